"""Dense assembly of the boundary Dirac-type operator and its companions.

Fields are flattened point-major (coefficient index fastest), so pointwise
coefficient multiplication is block diagonal and Fourier multipliers are
Kronecker products of per-axis derivative matrices with the identity on the
exterior algebra.

The central objects are

* ``M_B = N^+ - B^{-1} N^- B`` (pointwise, invertible for accretive B),
* ``T_B = M_B^{-1} (m d + B^{-1} m d* B)``,
* the perturbed reflections built from mu and mu*_B = B^{-1} mu* B
  for the splittings B^{-1}N^+H + N^-H ("hat") and N^+H + B^{-1}N^-H
  ("hut"),
* orthonormal bases of the constrained subspaces (curl-free vector fields,
  and the k-vector spaces cut out by d(f_tan) = 0 = d*((B f)_nor)),
* restriction of operators to such subspaces with an invariance-defect
  check, and
* the coefficient duality <f, g>_B = ((B N^+ - N^- B) f, g) with its
  operator adjoint.

All matrices act on plain coefficient vectors; because the grid quadrature
weight is a scalar multiple of the identity metric, operator norms, condition
numbers, and conjugate-transpose adjoints agree with their weighted
counterparts.  Physical field norms carry the weight explicitly via
``grid.norm``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import algebra
from .grid import CoefficientField, Field, Torus

__all__ = [
    "OperatorMatrix",
    "SubspaceBasis",
    "PointwiseInversionError",
    "SubspaceInvarianceError",
    "derivative_matrix",
    "pointwise_operator",
    "d_matrix",
    "d_star_matrix",
    "m_full_matrix",
    "reflection_full_matrix",
    "normal_proj_full",
    "tangential_proj_full",
    "underline_d_matrix",
    "underline_d_star_B_matrix",
    "gamma_matrix",
    "assemble_MB",
    "assemble_TB",
    "assemble_NB",
    "coefficient_matrix",
    "hat_h1_basis",
    "hat_hk_basis",
    "mean_zero_basis",
    "restrict",
    "duality_pairing",
    "duality_gram",
    "adjoint_in_duality",
    "hodge_split",
    "matrix_to_csv",
    "matrix_from_csv",
]


class PointwiseInversionError(np.linalg.LinAlgError):
    """A pointwise Lambda-map inversion failed; carries the grid location."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class SubspaceInvarianceError(ValueError):
    """An operator failed to preserve a subspace it should leave invariant."""

    def __init__(self, message: str, defect: float):
        super().__init__(message)
        self.defect = defect


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on a (possibly restricted) discrete field space."""

    entries: np.ndarray
    basis_tag: str = "full"

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("operator matrix must be square")
        if not np.all(np.isfinite(e)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "entries", e)
        self.entries.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def cond(self, cap: float = 1e18) -> float:
        sv = np.linalg.svd(self.entries, compute_uv=False)
        if sv[-1] <= sv[0] / cap:
            return cap
        return float(sv[0] / sv[-1])

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.entries @ other.entries, self.basis_tag)
        return self.entries @ other


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of the flattened field space."""

    columns: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        c = np.asarray(self.columns, dtype=complex)
        if c.ndim != 2 or c.shape[1] > c.shape[0]:
            raise ValueError("basis must be a tall matrix")
        gram_defect = np.linalg.norm(c.conj().T @ c - np.eye(c.shape[1]))
        if gram_defect > 1e-12 * max(1, c.shape[1]):
            raise ValueError(f"basis columns not orthonormal (defect {gram_defect:.2e})")
        object.__setattr__(self, "columns", c)
        self.columns.flags.writeable = False

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    def to_coords(self, vec: np.ndarray) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``vec``."""
        return self.columns.conj().T @ vec

    def from_coords(self, coords: np.ndarray) -> np.ndarray:
        return self.columns @ coords

    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _axis_derivative(N: int, L: float) -> np.ndarray:
    """Dense 1-D spectral derivative matrix on N periodic samples."""
    xi = 2.0 * np.pi * np.fft.fftfreq(N, d=1.0 / N) / L
    D = np.fft.ifft(1j * xi[:, None] * np.fft.fft(np.eye(N), axis=0), axis=0)
    D.flags.writeable = False
    return D


def derivative_matrix(torus: Torus, axis: int) -> np.ndarray:
    """Scalar derivative d/dx_axis on the flattened grid (no Lambda factor)."""
    N = torus.points_per_axis
    D1 = _axis_derivative(N, torus.length)
    if torus.dim_n == 1:
        return D1
    eye = np.eye(N)
    if axis == 0:
        return np.kron(D1, eye)
    return np.kron(eye, D1)


def pointwise_operator(torus: Torus, maps: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix applying one Lambda-map per grid point."""
    d = torus.lambda_dim
    P = torus.num_points
    flat = np.asarray(maps, dtype=complex).reshape(P, d, d)
    out = np.zeros((P * d, P * d), dtype=complex)
    rows = np.arange(P) * d
    for p in range(P):
        out[rows[p]:rows[p] + d, rows[p]:rows[p] + d] = flat[p]
    return out


def _lift(torus: Torus, lam_matrix: np.ndarray) -> np.ndarray:
    """Kronecker lift of a constant Lambda-map to the full field space."""
    return np.kron(np.eye(torus.num_points), lam_matrix)


def d_matrix(torus: Torus) -> np.ndarray:
    n = torus.dim_n
    out = np.zeros((torus.num_points * torus.lambda_dim,) * 2, dtype=complex)
    for j in range(1, n + 1):
        W = algebra.left_wedge_matrix(n, 1 << j)
        out += np.kron(derivative_matrix(torus, j - 1), W)
    return out


def d_star_matrix(torus: Torus) -> np.ndarray:
    n = torus.dim_n
    out = np.zeros((torus.num_points * torus.lambda_dim,) * 2, dtype=complex)
    for j in range(1, n + 1):
        H = algebra.left_hook_matrix(n, 1 << j)
        out -= np.kron(derivative_matrix(torus, j - 1), H)
    return out


def m_full_matrix(torus: Torus) -> np.ndarray:
    return _lift(torus, algebra.m_matrix(torus.dim_n))


def reflection_full_matrix(torus: Torus) -> np.ndarray:
    return _lift(torus, algebra.reflection_matrix(torus.dim_n))


def normal_proj_full(torus: Torus) -> np.ndarray:
    return _lift(torus, algebra.normal_proj_matrix(torus.dim_n))


def tangential_proj_full(torus: Torus) -> np.ndarray:
    return _lift(torus, algebra.tangential_proj_matrix(torus.dim_n))


def coefficient_matrix(B: CoefficientField) -> np.ndarray:
    """Dense matrix of pointwise multiplication by B."""
    return pointwise_operator(B.torus, B.maps)


def underline_d_matrix(torus: Torus) -> np.ndarray:
    return 1j * m_full_matrix(torus) @ d_matrix(torus)


def underline_d_star_B_matrix(B: CoefficientField) -> np.ndarray:
    torus = B.torus
    Bm = coefficient_matrix(B)
    Binv = pointwise_operator(torus, np.linalg.inv(B.maps))
    return Binv @ (1j * m_full_matrix(torus) @ d_star_matrix(torus)) @ Bm


def gamma_matrix(torus: Torus) -> np.ndarray:
    """Gamma = N m d, the nilpotent half of the block-coefficient operator."""
    return reflection_full_matrix(torus) @ m_full_matrix(torus) @ d_matrix(torus)


# ---------------------------------------------------------------------------
# the Dirac-type operator and perturbed reflections
# ---------------------------------------------------------------------------

def _pointwise_inverse(torus: Torus, maps: np.ndarray, what: str) -> np.ndarray:
    flat = np.asarray(maps).reshape(torus.num_points, torus.lambda_dim,
                                    torus.lambda_dim)
    try:
        return np.linalg.inv(flat).reshape(maps.shape)
    except np.linalg.LinAlgError:
        pass
    # locate the first failing point for the error report
    for p in range(flat.shape[0]):
        if abs(np.linalg.det(flat[p])) < 1e-300:
            idx = np.unravel_index(p, torus.shape)
            raise PointwiseInversionError(
                f"{what} is singular at grid point {idx}", location=idx)
    raise PointwiseInversionError(f"{what} is singular")  # pragma: no cover


def assemble_MB(B: CoefficientField) -> OperatorMatrix:
    """M_B = N^+ - B^{-1} N^- B, assembled pointwise over the grid."""
    n = B.torus.dim_n
    Npl = algebra.tangential_proj_matrix(n)
    Nmi = algebra.normal_proj_matrix(n)
    Binv = _pointwise_inverse(B.torus, B.maps, "coefficient map B")
    maps = Npl - np.einsum("...ij,jk,...kl->...il", Binv, Nmi, B.maps)
    # M_B is invertible iff its two diagonal blocks are; check pointwise.
    _pointwise_inverse(B.torus, maps, "M_B")
    return OperatorMatrix(pointwise_operator(B.torus, maps), basis_tag="full")


def assemble_TB(B: CoefficientField) -> OperatorMatrix:
    """T_B = M_B^{-1} (m d + B^{-1} m d* B) on the full discrete field space."""
    torus = B.torus
    MB = assemble_MB(B)
    m = m_full_matrix(torus)
    Bm = coefficient_matrix(B)
    Binv = pointwise_operator(
        torus, _pointwise_inverse(torus, B.maps, "coefficient map B"))
    K = m @ d_matrix(torus) + Binv @ m @ d_star_matrix(torus) @ Bm
    T = np.linalg.solve(MB.entries, K)
    return OperatorMatrix(T, basis_tag="full")


def _splitting_projections(U_maps: np.ndarray, V_maps: np.ndarray,
                           torus: Torus, what: str):
    """Pointwise complementary projections for range(U) + range(V).

    U_maps/V_maps map Lambda onto the two subspaces; the projection onto
    range(U) along range(V) is computed per point from the column splitting.
    """
    d = torus.lambda_dim
    nor = algebra.normal_mask(torus.dim_n)
    tan_cols = np.where(~nor)[0]
    nor_cols = np.where(nor)[0]
    plus = U_maps[..., :, tan_cols]
    minus = V_maps[..., :, nor_cols]
    S = np.concatenate([plus, minus], axis=-1)
    Sinv = _pointwise_inverse(torus, S, what)
    sel_plus = np.zeros((d, d))
    sel_plus[np.arange(len(tan_cols)), np.arange(len(tan_cols))] = 1.0
    P_plus = np.einsum("...ij,jk,...kl->...il", S, sel_plus, Sinv)
    eye = np.broadcast_to(np.eye(d), P_plus.shape)
    P_minus = eye - P_plus
    return P_plus, P_minus


def assemble_NB(B: CoefficientField, variant: str = "hat"):
    """Perturbed complementary projections and reflection.

    variant "hat": splitting H = B^{-1}N^+H + N^-H, built from the explicit
    formulas N^+_B = mu*_B (mu + mu*_B)^{-1} and N^-_B = mu (mu + mu*_B)^{-1}
    with mu*_B = B^{-1} mu* B.

    variant "hut": splitting H = N^+H + B^{-1}N^-H, built directly from the
    pointwise column splitting.

    Returns (N_B^+, N_B^-, N_B) as OperatorMatrix.
    """
    torus = B.torus
    n = torus.dim_n
    mu = algebra.mu_matrix(n)
    mu_s = algebra.mu_star_matrix(n)
    Binv = _pointwise_inverse(torus, B.maps, "coefficient map B")
    if variant == "hat":
        mu_sB = np.einsum("...ij,jk,...kl->...il", Binv, mu_s, B.maps)
        denom = _pointwise_inverse(torus, mu + mu_sB, "mu + mu*_B")
        P_plus = np.einsum("...ij,...jk->...ik", mu_sB, denom)
        eye = np.broadcast_to(np.eye(torus.lambda_dim), P_plus.shape)
        P_minus = eye - P_plus
    elif variant == "hut":
        # range(N^+ restricted) = tangential, twisted normal range = B^{-1} N^- H
        eye_maps = np.broadcast_to(np.eye(torus.lambda_dim),
                                   torus.shape + (torus.lambda_dim,) * 2)
        P_plus, P_minus = _splitting_projections(
            eye_maps, Binv, torus, "hut splitting matrix")
    else:
        raise ValueError("variant must be 'hat' or 'hut'")
    to_op = lambda maps: OperatorMatrix(pointwise_operator(torus, maps),
                                        basis_tag="full")
    return to_op(P_plus), to_op(P_minus), to_op(P_plus - P_minus)


# ---------------------------------------------------------------------------
# constrained subspaces
# ---------------------------------------------------------------------------

def _plane_wave_columns(torus: Torus, mode_vectors) -> np.ndarray:
    """Orthonormal columns e^{i xi.x} v / sqrt(P) for (mode, multivector) pairs."""
    P = torus.num_points
    d = torus.lambda_dim
    coords = torus.coordinates()
    cols = np.zeros((P * d, len(mode_vectors)), dtype=complex)
    for c, (kvec, v) in enumerate(mode_vectors):
        phase = np.zeros(torus.shape, dtype=complex)
        phase[...] = 1.0
        for j in range(torus.dim_n):
            phase = phase * np.exp(2j * np.pi * kvec[j] * coords[j] / torus.length)
        vshaped = np.asarray(v).reshape((1,) * torus.dim_n + (d,))
        block = phase[..., None] * vshaped
        cols[:, c] = block.reshape(-1) / np.sqrt(P)
    return cols


def hat_h1_basis(torus: Torus) -> SubspaceBasis:
    """Orthonormal basis of the curl-free vector fields.

    Per Fourier mode xi != 0 this is span{e_0, xi/|xi|} inside the vector
    component; for n = 1 that is every vector field.  The zero mode keeps
    all constant vectors (they form the discrete kernel of the Dirac
    operator and are handled by the kernel policy downstream).
    """
    n = torus.dim_n
    d = torus.lambda_dim
    N = torus.points_per_axis
    ks = np.fft.fftfreq(N, d=1.0 / N).astype(int)
    mode_vectors = []
    e0 = np.zeros(d)
    e0[1] = 1.0
    if n == 1:
        for k in ks:
            v1 = np.zeros(d)
            v1[2] = 1.0
            mode_vectors.append(((k,), e0))
            mode_vectors.append(((k,), v1))
    else:
        for k1 in ks:
            for k2 in ks:
                mode_vectors.append(((k1, k2), e0))
                if k1 == 0 and k2 == 0:
                    for mask in (2, 4):
                        v = np.zeros(d)
                        v[mask] = 1.0
                        mode_vectors.append(((k1, k2), v))
                else:
                    norm_k = np.hypot(k1, k2)
                    v = np.zeros(d)
                    v[2] = k1 / norm_k
                    v[4] = k2 / norm_k
                    mode_vectors.append(((k1, k2), v))
    cols = _plane_wave_columns(torus, mode_vectors)
    return SubspaceBasis(cols, label="hat_h1")


def hat_hk_basis(B: CoefficientField, k: int,
                 rtol: float = 1e-10) -> SubspaceBasis:
    """Orthonormal basis of the degree-k fields with d(f_tan) = 0 and
    d*((B f)_nor) = 0, via an SVD null space of the stacked constraints."""
    torus = B.torus
    n = torus.dim_n
    if not 0 <= k <= n + 1:
        raise ValueError(f"degree k={k} out of range")
    d = torus.lambda_dim
    degs = algebra.mask_degrees(n)
    deg_cols = np.where(degs == k)[0]
    P = torus.num_points
    # embedding of degree-k fields into the full space
    embed = np.zeros((P * d, P * len(deg_cols)), dtype=complex)
    for p in range(P):
        for j, mask in enumerate(deg_cols):
            embed[p * d + mask, p * len(deg_cols) + j] = 1.0
    D = d_matrix(torus)
    Ds = d_star_matrix(torus)
    tang = tangential_proj_full(torus)
    norp = normal_proj_full(torus)
    Bm = coefficient_matrix(B)
    C = np.vstack([D @ tang @ embed, Ds @ norp @ Bm @ embed])
    null = scipy.linalg.null_space(C, rcond=rtol)
    if null.shape[1] == 0:
        raise ValueError(f"constrained degree-{k} subspace is empty")
    cols = embed @ null
    return SubspaceBasis(cols, label=f"hat_hk(k={k})")


def mean_zero_basis(basis: SubspaceBasis, torus: Torus) -> SubspaceBasis:
    """Sub-basis of ``basis`` orthogonal to all constant fields.

    Constant fields are the discrete stand-in for the missing L2 constants
    on R^n; boundary data is projected onto this complement.
    """
    d = torus.lambda_dim
    P = torus.num_points
    const = np.zeros((P * d, d), dtype=complex)
    for mask in range(d):
        col = np.zeros((P, d), dtype=complex)
        col[:, mask] = 1.0 / np.sqrt(P)
        const[:, mask] = col.reshape(-1)
    # project the constants into the subspace, drop their span
    inside = basis.columns.conj().T @ const
    u, s, _ = np.linalg.svd(inside, full_matrices=False)
    q = u[:, s > 1e-10]
    proj = np.eye(basis.dim) - q @ q.conj().T
    u, s, _ = np.linalg.svd(proj)
    cols_coords = u[:, s > 0.5]
    return SubspaceBasis(basis.columns @ cols_coords,
                         label=basis.label + "+mean_zero")


def restrict(op: OperatorMatrix, basis: SubspaceBasis,
             invariance_tol: float | None = None) -> OperatorMatrix:
    """Compress an operator to a subspace: columns* . op . columns.

    Also measures the invariance defect ||(I - P) op P|| relative to ||op||;
    if ``invariance_tol`` is given and the defect exceeds it, a
    SubspaceInvarianceError is raised.  The defect is attached to the
    returned matrix as ``restrict.last_defect``.
    """
    if basis.ambient_dim != op.dim:
        raise ValueError("basis ambient dimension does not match operator")
    U = basis.columns
    opU = op.entries @ U
    compressed = U.conj().T @ opU
    leak = opU - U @ compressed
    scale = max(np.linalg.norm(op.entries, 2), 1e-300)
    defect = float(np.linalg.norm(leak, 2) / scale)
    restrict.last_defect = defect
    if invariance_tol is not None and defect > invariance_tol:
        raise SubspaceInvarianceError(
            f"operator does not preserve subspace {basis.label!r}: "
            f"relative defect {defect:.3e} > {invariance_tol:.1e}", defect)
    return OperatorMatrix(compressed, basis_tag=basis.label)


restrict.last_defect = 0.0


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def duality_gram(B: CoefficientField) -> np.ndarray:
    """Matrix of the pairing <f, g>_B = ((B N^+ - N^- B) f, g) on coefficient
    vectors (the scalar grid weight is left to the caller; it cancels in
    every adjoint computation)."""
    n = B.torus.dim_n
    Npl = algebra.tangential_proj_matrix(n)
    Nmi = algebra.normal_proj_matrix(n)
    maps = (np.einsum("...ij,jk->...ik", B.maps, Npl)
            - np.einsum("ij,...jk->...ik", Nmi, B.maps))
    return pointwise_operator(B.torus, maps)


def duality_pairing(f: Field, g: Field, B: CoefficientField) -> complex:
    """<f, g>_B with the physical grid weight included."""
    S = duality_gram(B)
    return complex(B.torus.weight * np.vdot(g.flatten(), S @ f.flatten()))


def adjoint_in_duality(op: OperatorMatrix, B: CoefficientField) -> OperatorMatrix:
    """The operator T' with <T f, g>_B = <f, T' g>_B for all f, g."""
    S = duality_gram(B)
    # <Tf, g> = g^H S T f and <f, T'g> = g^H T'^H S f, so T'^H = S T S^{-1}.
    T_prime_H = S @ op.entries @ np.linalg.inv(S)
    return OperatorMatrix(T_prime_H.conj().T, basis_tag=op.basis_tag)


# ---------------------------------------------------------------------------
# Hodge-type splitting
# ---------------------------------------------------------------------------

def hodge_split(B: CoefficientField, f: Field, rtol: float = 1e-9):
    """Split f (minus its grid mean) as f1 + f2 with f1 in null(i m d) and
    f2 in null(B^{-1} i m d* B), inside the mean-zero complement.

    Returns (f1, f2, constant_part, split_constant) where split_constant is
    (||f1|| + ||f2||) / ||f - mean||, the measured topological-splitting
    constant for this input.
    """
    torus = B.torus
    vec = f.flatten()
    P = torus.num_points
    d = torus.lambda_dim
    mean = vec.reshape(P, d).mean(axis=0)
    const_vec = np.tile(mean, P)
    v = vec - const_vec
    D1 = underline_d_matrix(torus)
    D2 = underline_d_star_B_matrix(B)
    n1 = scipy.linalg.null_space(D1, rcond=rtol)
    n2 = scipy.linalg.null_space(D2, rcond=rtol)
    # remove constants from both null spaces (they lie in the intersection)
    const_basis = np.zeros((P * d, d), dtype=complex)
    for mask in range(d):
        col = np.zeros((P, d), dtype=complex)
        col[:, mask] = 1.0 / np.sqrt(P)
        const_basis[:, mask] = col.reshape(-1)
    def drop_consts(nspace):
        keep = nspace - const_basis @ (const_basis.conj().T @ nspace)
        u, s, _ = np.linalg.svd(keep, full_matrices=False)
        return u[:, s > 1e-10]
    U1 = drop_consts(n1)
    U2 = drop_consts(n2)
    stacked = np.hstack([U1, U2])
    coef, *_ = np.linalg.lstsq(stacked, v, rcond=None)
    v1 = U1 @ coef[:U1.shape[1]]
    v2 = U2 @ coef[U1.shape[1]:]
    resid = np.linalg.norm(stacked @ coef - v)
    vnorm = np.linalg.norm(v)
    if vnorm > 0 and resid > 1e-6 * vnorm:
        raise ValueError(f"Hodge splitting failed: residual {resid/vnorm:.2e}")
    f1 = Field.from_flat(torus, v1)
    f2 = Field.from_flat(torus, v2)
    c = ((np.linalg.norm(v1) + np.linalg.norm(v2)) / vnorm) if vnorm > 0 else 0.0
    return f1, f2, Field.from_flat(torus, const_vec), float(c)


# ---------------------------------------------------------------------------
# matrix interchange
# ---------------------------------------------------------------------------

def matrix_to_csv(op: OperatorMatrix, path) -> None:
    """Row-major dump with interleaved Re/Im columns."""
    e = op.entries
    out = np.empty((e.shape[0], 2 * e.shape[1]))
    out[:, 0::2] = e.real
    out[:, 1::2] = e.imag
    np.savetxt(path, out, delimiter=",", fmt="%.17g")


def matrix_from_csv(path, basis_tag: str = "full") -> OperatorMatrix:
    raw = np.loadtxt(path, delimiter=",", ndmin=2)
    return OperatorMatrix(raw[:, 0::2] + 1j * raw[:, 1::2], basis_tag=basis_tag)
