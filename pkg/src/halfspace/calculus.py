"""Holomorphic functional calculus of the discrete Dirac-type operator.

At desk scale the Dunford contour integral is redundant: the assembled
operator is a finite matrix, so every sectorial symbol b is evaluated
through a dense eigendecomposition T = V diag(lambda) V^{-1} as
b(T) = V diag(b(lambda)) V^{-1}.  A direct-solve resolvent provides an
independent cross-check route, and is the fallback when the eigenbasis is
ill conditioned.

Eigenvalues close to zero (relative threshold ``kernel_tol``) form the
discrete kernel, the stand-in for the missing constants of the continuum
problem.  Each symbol declares its kernel value explicitly: sgn and the
spectral projections vanish there, the semigroup and resolvent-type
symbols are one.

The quadratic-estimate functional integrates ||Q_t f||^2 dt/t over a
log-spaced grid (midpoint rule, 40 points per decade) with analytic tail
corrections from the spectral extremes.  For self-adjoint injective T the
exact value is ||f||^2 / 2, from the closed integral
int_0^inf (s/(1+s^2))^2 ds/s = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import OperatorMatrix

__all__ = [
    "SpectralDecomposition",
    "FunctionDescriptor",
    "IllConditionedEigenbasisError",
    "SectorViolationError",
    "decompose",
    "apply_function",
    "resolvent_direct",
    "resolvent",
    "q_t",
    "p_t",
    "chi_plus",
    "chi_minus",
    "sgn",
    "exp_minus_t_abs",
    "abs_power",
    "psi_exp",
    "custom",
    "default_t_grid",
    "quadratic_norm",
    "quadratic_constants",
    "lipschitz_probe",
]

POINTS_PER_DECADE = 40
DEFAULT_KERNEL_TOL = 1e-10
COND_V_CAP = 1e8


class IllConditionedEigenbasisError(np.linalg.LinAlgError):
    def __init__(self, message: str, cond_V: float):
        super().__init__(message)
        self.cond_V = cond_V


class SectorViolationError(ValueError):
    pass


@dataclass(frozen=True)
class FunctionDescriptor:
    """A holomorphic symbol on the double sector with a declared kernel value."""

    name: str
    fn: object  # callable complex array -> complex array
    kernel_value: complex

    def __call__(self, lam):
        return self.fn(np.asarray(lam, dtype=complex))


def _holo_sign(lam: np.ndarray) -> np.ndarray:
    """sgn on the double sector: +1 on Re > 0, -1 on Re < 0."""
    return np.where(lam.real > 0, 1.0, -1.0).astype(complex)


def _holo_abs(lam: np.ndarray) -> np.ndarray:
    """|z| := z sgn(z), the holomorphic branch of sqrt(z^2)."""
    return lam * _holo_sign(lam)


def resolvent(lam0: complex) -> FunctionDescriptor:
    return FunctionDescriptor(
        f"resolvent({lam0!r})",
        lambda z: 1.0 / (lam0 - z),
        kernel_value=1.0 / lam0)


def q_t(t: float) -> FunctionDescriptor:
    return FunctionDescriptor(
        f"q_t(t={t!r})",
        lambda z: t * z / (1.0 + (t * z) ** 2),
        kernel_value=0.0)


def p_t(t: float) -> FunctionDescriptor:
    return FunctionDescriptor(
        f"p_t(t={t!r})",
        lambda z: 1.0 / (1.0 + (t * z) ** 2),
        kernel_value=1.0)


def chi_plus() -> FunctionDescriptor:
    return FunctionDescriptor(
        "chi_plus", lambda z: (1.0 + _holo_sign(z)) / 2.0, kernel_value=0.0)


def chi_minus() -> FunctionDescriptor:
    return FunctionDescriptor(
        "chi_minus", lambda z: (1.0 - _holo_sign(z)) / 2.0, kernel_value=0.0)


def sgn() -> FunctionDescriptor:
    return FunctionDescriptor("sgn", _holo_sign, kernel_value=0.0)


def exp_minus_t_abs(t: float) -> FunctionDescriptor:
    return FunctionDescriptor(
        f"exp_minus_t_abs(t={t!r})",
        lambda z: np.exp(-t * _holo_abs(z)),
        kernel_value=1.0)


def abs_power(s: float) -> FunctionDescriptor:
    return FunctionDescriptor(
        f"abs_power(s={s!r})",
        lambda z: _holo_abs(z) ** s,
        kernel_value=0.0)


def psi_exp() -> FunctionDescriptor:
    """psi(z) = z e^{-|z|}, an alternative quadratic-estimate symbol."""
    return FunctionDescriptor(
        "psi_exp", lambda z: z * np.exp(-_holo_abs(z)), kernel_value=0.0)


def custom(fn, kernel_value: complex, name: str = "custom") -> FunctionDescriptor:
    return FunctionDescriptor(name, fn, kernel_value=kernel_value)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Dense eigendecomposition of a bisectorial operator matrix."""

    eigenvalues: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray
    cond_V: float
    kernel_indices: np.ndarray  # boolean mask over eigenvalue positions
    omega: float
    kernel_tol: float
    hermitian: bool
    basis_tag: str = "full"

    @property
    def dim(self) -> int:
        return self.V.shape[0]

    @property
    def nonkernel(self) -> np.ndarray:
        return ~self.kernel_indices

    def matrix(self) -> np.ndarray:
        return (self.V * self.eigenvalues) @ self.Vinv

    def kernel_projector(self) -> np.ndarray:
        sel = self.kernel_indices.astype(complex)
        return (self.V * sel) @ self.Vinv

    def nonkernel_projector(self) -> np.ndarray:
        sel = self.nonkernel.astype(complex)
        return (self.V * sel) @ self.Vinv

    def sector_margin(self) -> float:
        """max over non-kernel eigenvalues of (angle to real axis) - omega.

        Negative means every eigenvalue lies strictly inside the double
        sector of half-angle omega.
        """
        lam = self.eigenvalues[self.nonkernel]
        if lam.size == 0:
            return -self.omega
        ang = np.abs(np.angle(lam))
        ang = np.minimum(ang, np.pi - ang)
        return float(np.max(ang) - self.omega)

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues), initial=0.0))

    def min_nonkernel(self) -> float:
        lam = self.eigenvalues[self.nonkernel]
        if lam.size == 0:
            raise ValueError("empty non-kernel spectrum")
        return float(np.min(np.abs(lam)))


def decompose(T: OperatorMatrix | np.ndarray,
              B_constants: tuple | None = None,
              kernel_tol: float = DEFAULT_KERNEL_TOL,
              cond_cap: float = COND_V_CAP,
              basis_tag: str | None = None) -> SpectralDecomposition:
    """Full dense eigendecomposition with kernel and sector classification.

    ``B_constants`` is the pair (kappa, sup_norm) of the coefficients that
    built T; it sets the sector half-angle omega = arccos(kappa/(2 sup_norm)).
    Hermitian matrices (relative defect <= 1e-10) get a unitary eigenbasis.
    """
    if isinstance(T, OperatorMatrix):
        mat = T.entries
        tag = T.basis_tag if basis_tag is None else basis_tag
    else:
        mat = np.asarray(T, dtype=complex)
        tag = basis_tag or "full"
    scale = max(np.linalg.norm(mat, 2), 1e-300)
    hermitian = np.linalg.norm(mat - mat.conj().T, 2) <= 1e-10 * scale
    if hermitian:
        lam, V = np.linalg.eigh(0.5 * (mat + mat.conj().T))
        lam = lam.astype(complex)
        Vinv = V.conj().T
        cond_V = 1.0
    else:
        lam, V = np.linalg.eig(mat)
        sv = np.linalg.svd(V, compute_uv=False)
        cond_V = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        # The conditioning verdict waits until after kernel polishing below:
        # a near-degenerate zero cluster can make eig's raw basis look
        # arbitrarily ill conditioned even when the polished basis is fine.
        Vinv = np.linalg.inv(V) if np.isfinite(cond_V) else None
    max_abs = np.max(np.abs(lam), initial=0.0)
    kernel = np.abs(lam) <= kernel_tol * max_abs if max_abs > 0 else np.ones(
        lam.shape, dtype=bool)
    if not hermitian and np.any(kernel):
        # Polish the kernel: eig's eigenvectors for the (near-degenerate)
        # zero cluster are only accurate to the cluster's residual, which
        # would leave a t-independent defect in every semigroup evaluation.
        # Exact null vectors from the SVD replace them.
        k = int(np.sum(kernel))
        _, s_all, vh = np.linalg.svd(mat)
        if s_all[-k] <= kernel_tol * s_all[0]:
            V = V.copy()
            V[:, kernel] = vh[-k:].conj().T
            lam = lam.copy()
            lam[kernel] = 0.0
            sv = np.linalg.svd(V, compute_uv=False)
            cond_V = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
            Vinv = np.linalg.inv(V) if np.isfinite(cond_V) else None
    if not hermitian:
        if cond_V > cond_cap or Vinv is None:
            raise IllConditionedEigenbasisError(
                f"eigenvector matrix condition number {cond_V:.3e} exceeds "
                f"{cond_cap:.1e}; fall back to resolvent-based evaluation",
                cond_V)
    if B_constants is not None:
        kappa, sup_norm = B_constants
        omega = float(np.arccos(np.clip(kappa / (2.0 * sup_norm), -1.0, 1.0)))
    else:
        omega = np.pi / 2
    return SpectralDecomposition(
        eigenvalues=lam, V=V, Vinv=Vinv, cond_V=cond_V,
        kernel_indices=kernel, omega=omega, kernel_tol=kernel_tol,
        hermitian=hermitian, basis_tag=tag)


def apply_function(dec: SpectralDecomposition,
                   b: FunctionDescriptor) -> OperatorMatrix:
    """b(T) = V diag(b(lambda)) V^{-1}, kernel eigenvalues -> kernel value."""
    lam = dec.eigenvalues
    sign_sensitive = b.name in ("sgn", "chi_plus", "chi_minus") or \
        b.name.startswith(("exp_minus_t_abs", "abs_power"))
    if sign_sensitive:
        bad = dec.nonkernel & (np.abs(lam.real) <= 1e-14 * np.abs(lam))
        if np.any(bad):
            raise SectorViolationError(
                f"symbol {b.name!r} undefined at (near-)imaginary eigenvalue "
                f"{lam[bad][0]!r}")
    vals = np.asarray(b(lam), dtype=complex)
    vals = np.where(dec.kernel_indices, complex(b.kernel_value), vals)
    return OperatorMatrix((dec.V * vals) @ dec.Vinv, basis_tag=dec.basis_tag)


def apply_to_vector(dec: SpectralDecomposition, b: FunctionDescriptor,
                    vec: np.ndarray) -> np.ndarray:
    """b(T) vec without forming the full matrix."""
    lam = dec.eigenvalues
    vals = np.asarray(b(lam), dtype=complex)
    vals = np.where(dec.kernel_indices, complex(b.kernel_value), vals)
    return dec.V @ (vals * (dec.Vinv @ vec))


def resolvent_direct(T: OperatorMatrix | np.ndarray, lam0: complex) -> OperatorMatrix:
    """(lam0 - T)^{-1} by direct dense solve; the oracle route."""
    mat = T.entries if isinstance(T, OperatorMatrix) else np.asarray(T)
    tag = T.basis_tag if isinstance(T, OperatorMatrix) else "full"
    A = lam0 * np.eye(mat.shape[0]) - mat
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-14 * sv[0]:
        raise np.linalg.LinAlgError(
            f"lambda = {lam0!r} is (numerically) in the spectrum")
    return OperatorMatrix(np.linalg.solve(A, np.eye(mat.shape[0])), basis_tag=tag)


# ---------------------------------------------------------------------------
# quadratic estimates
# ---------------------------------------------------------------------------

def default_t_grid(dec: SpectralDecomposition,
                   c_lo: float = 1e-3, c_hi: float = 1e3,
                   points_per_decade: int = POINTS_PER_DECADE):
    """Log-spaced midpoint grid covering the spectral window.

    Returns (t values, log-spacing h) with t from c_lo/max|lambda| to
    c_hi/min nonkernel |lambda|.
    """
    t_min = c_lo / dec.spectral_radius()
    t_max = c_hi / dec.min_nonkernel()
    n_dec = np.log10(t_max / t_min)
    m = max(int(np.ceil(n_dec * points_per_decade)), 2)
    h = np.log(t_max / t_min) / m
    u = np.log(t_min) + (np.arange(m) + 0.5) * h
    return np.exp(u), h


def quadratic_norm(dec: SpectralDecomposition, coeffs: np.ndarray,
                   t_grid=None) -> float:
    """sqrt of int ||Q_t f||^2 dt/t, Q_t = tT(1 + t^2 T^2)^{-1}.

    Midpoint quadrature in log t plus analytic small-t and large-t tails
    (||Q_t f|| ~ t||Tf|| and ||Q_t f|| ~ ||T^{-1}f||/t respectively).
    Norms are plain coefficient-vector norms; ratios against ||f|| are
    scale free.
    """
    if not np.any(dec.nonkernel):
        raise ValueError("empty non-kernel spectrum")
    if t_grid is None:
        ts, h = default_t_grid(dec)
    else:
        ts = np.asarray(t_grid)
        h = np.log(ts[1] / ts[0]) if len(ts) > 1 else 1.0
    c = dec.Vinv @ coeffs
    lam = dec.eigenvalues
    total = 0.0
    for t in ts:
        vals = t * lam / (1.0 + (t * lam) ** 2)
        vals = np.where(dec.kernel_indices, 0.0, vals)
        qf = dec.V @ (vals * c)
        total += h * float(np.vdot(qf, qf).real)
    # tails
    lam_nk = np.where(dec.kernel_indices, 0.0, lam)
    Tf = dec.V @ (lam_nk * c)
    inv_vals = np.where(dec.kernel_indices, 0.0,
                        1.0 / np.where(dec.kernel_indices, 1.0, lam))
    Tinv_f = dec.V @ (inv_vals * c)
    t_lo, t_hi = ts[0] * np.exp(-h / 2), ts[-1] * np.exp(h / 2)
    total += (t_lo ** 2 / 2.0) * float(np.vdot(Tf, Tf).real)
    total += (1.0 / (2.0 * t_hi ** 2)) * float(np.vdot(Tinv_f, Tinv_f).real)
    return float(np.sqrt(total))


def quadratic_constants(dec: SpectralDecomposition, t_grid=None,
                        symbol=None):
    """Best discrete constants (c_low, c_high) in
    c_low ||f|| <= (int ||Q_t f||^2 dt/t)^{1/2} <= c_high ||f||
    over the non-kernel subspace, via the extreme eigenvalues of the Gram
    matrix G = sum_j w_j Q_{t_j}^* Q_{t_j} (plus analytic tails for the
    default symbol).

    ``symbol``: optional map t -> FunctionDescriptor replacing q_t.
    """
    if not np.any(dec.nonkernel):
        raise ValueError("empty non-kernel spectrum")
    if t_grid is None:
        ts, h = default_t_grid(dec)
    else:
        ts = np.asarray(t_grid)
        h = np.log(ts[1] / ts[0]) if len(ts) > 1 else 1.0
    dim = dec.dim
    G = np.zeros((dim, dim), dtype=complex)
    use_default = symbol is None
    for t in ts:
        desc = q_t(t) if use_default else symbol(t)
        Q = apply_function(dec, desc).entries
        G += h * (Q.conj().T @ Q)
    if use_default:
        Tm = dec.matrix()
        nk = dec.nonkernel_projector()
        Tnk = Tm @ nk
        lam = np.where(dec.kernel_indices, 1.0, dec.eigenvalues)
        inv_vals = np.where(dec.kernel_indices, 0.0, 1.0 / lam)
        Tinv = (dec.V * inv_vals) @ dec.Vinv
        t_lo, t_hi = ts[0] * np.exp(-h / 2), ts[-1] * np.exp(h / 2)
        G += (t_lo ** 2 / 2.0) * (Tnk.conj().T @ Tnk)
        G += (1.0 / (2.0 * t_hi ** 2)) * (Tinv.conj().T @ Tinv)
    # orthonormal basis of the non-kernel subspace
    Pnk = dec.nonkernel_projector()
    u, s, _ = np.linalg.svd(Pnk)
    U = u[:, s > 0.5]
    Gr = U.conj().T @ G @ U
    ev = np.linalg.eigvalsh(0.5 * (Gr + Gr.conj().T))
    ev = np.clip(ev, 0.0, None)
    return float(np.sqrt(ev[0])), float(np.sqrt(ev[-1]))


def lipschitz_probe(dec1: SpectralDecomposition, dec2: SpectralDecomposition,
                    b: FunctionDescriptor, coeff_distance: float):
    """Ratio ||b(T_2) - b(T_1)|| / ||B_2 - B_1||_inf.

    Returns (ratio, degenerate_flag); the flag is set when the coefficient
    distance vanishes, in which case the ratio is reported as 0.
    """
    if coeff_distance == 0:
        return 0.0, True
    diff = apply_function(dec2, b).entries - apply_function(dec1, b).entries
    return float(np.linalg.norm(diff, 2) / coeff_distance), False
