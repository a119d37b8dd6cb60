"""Boundary value problems in the upper half space via boundary operators.

The trace space is the constrained subspace of curl-free vector fields (or
the degree-k analogue for transmission problems).  On its orthonormal basis
we assemble the Dirac-type operator, take its spectral decomposition, and
form the generalized Cauchy reflection E = sgn(T) together with the two
boundary reflections N (unperturbed) and N_A (coefficient-twisted).  The
solve formulas are

    Neumann:     f = 2 (E - N_A)^{-1} (a00^{-1} phi e_0)
    regularity:  f = 2 (E + N)^{-1}  (grad psi)
    aux Neumann: f = 2 (E - N)^{-1}  (phi e_0)
    Dirichlet:   U_t = (F_t, e_0),  F_t from the aux Neumann solve with u
    transmission: (lambda - E N_B) f = 2/(a+ - a-) E g,
                  lambda = (a+ + a-)/(a+ - a-)

and the interior extension is always the semigroup F_t = e^{-t|T|} f applied
through the spectral decomposition.  Time derivatives are always computed
from the generator (-|T| on the Hardy part), never by finite differences.

Constant grid modes form the discrete kernel of T (the torus stand-in for
the absence of L2 constants on R^n); boundary data is projected onto the
non-kernel subspace and the discarded norm is reported.  Inverted boundary
operators carry a condition-number cap of 1e10: beyond it the problem is
declared ill posed at this discretization.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.linalg

from . import algebra, calculus
from .assembly import (OperatorMatrix, assemble_NB, assemble_TB,
                       hat_h1_basis, hat_hk_basis,
                       reflection_full_matrix, restrict, derivative_matrix)
from .calculus import (apply_to_vector, custom,
                       decompose, exp_minus_t_abs, sgn)
from .grid import (CoefficientField, Field, Torus,
                   vector_block_coefficients)

COND_CAP = 1e10

__all__ = [
    "WellPosednessError",
    "BoundaryData",
    "SolutionField",
    "SolveReport",
    "BoundaryFrame",
    "solve_neumann",
    "solve_regularity",
    "solve_neu_perp",
    "solve_dirichlet",
    "solve_transmission",
    "norm_sup_t",
    "norm_triplebar_dt",
    "norm_triplebar_gradx",
    "nontangential_max",
    "wellposedness_report",
    "dirichlet_values",
    "dirichlet_second_order_residual",
]


class WellPosednessError(RuntimeError):
    """A boundary operator is numerically non-invertible (cond >= 1e10)."""

    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


@dataclass(frozen=True)
class BoundaryData:
    """Boundary datum for one of the five problem kinds.

    kind 'neumann', 'neu_perp', 'dirichlet': ``scalar`` is the grid array of
    phi (resp. u).  kind 'regularity': ``gradient`` is a tangential,
    curl-free vector Field.  kind 'transmission': ``g`` is a degree-k Field
    together with the jump weights alpha_plus != alpha_minus.
    """

    kind: str
    scalar: np.ndarray | None = None
    gradient: Field | None = None
    g: Field | None = None
    alpha_plus: complex = 1.0
    alpha_minus: complex = 0.0
    degree: int = 1

    def __post_init__(self):
        if self.kind not in ("neumann", "regularity", "neu_perp",
                             "dirichlet", "transmission"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.kind == "transmission" and self.alpha_plus == self.alpha_minus:
            raise ValueError("transmission requires alpha_plus != alpha_minus")


@dataclass
class SolveReport:
    """Everything measured during a solve, serializable as flat key=value."""

    formula: str
    condition_numbers: dict
    boundary_residual: float
    data_projection_loss: float
    trace_kernel_fraction: float
    hardy_defect: float
    invariance_defect: float
    norms: dict = dataclass_field(default_factory=dict)
    second_order_residual: float | None = None
    extra: dict = dataclass_field(default_factory=dict)

    def items(self):
        yield "formula", self.formula
        for k, v in self.condition_numbers.items():
            yield f"cond.{k}", v
        yield "boundary_residual", self.boundary_residual
        yield "data_projection_loss", self.data_projection_loss
        yield "trace_kernel_fraction", self.trace_kernel_fraction
        yield "hardy_defect", self.hardy_defect
        yield "invariance_defect", self.invariance_defect
        for k, v in self.norms.items():
            yield f"norm.{k}", v
        if self.second_order_residual is not None:
            yield "second_order_residual", self.second_order_residual
        for k, v in self.extra.items():
            yield k, v

    def to_text(self) -> str:
        lines = []
        for k, v in self.items():
            if isinstance(v, float):
                lines.append(f"{k} = {v!r}")
            else:
                lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


class BoundaryFrame:
    """Assembled boundary machinery for one coefficient field and subspace.

    Builds (once) the restricted Dirac operator, its spectral decomposition,
    the Cauchy reflection E, and the two boundary reflections.  All solves
    and campaigns for the same coefficients share a frame.
    """

    def __init__(self, B: CoefficientField, degree: int = 1,
                 invariance_tol: float = 1e-8,
                 kernel_tol: float = calculus.DEFAULT_KERNEL_TOL):
        if not B.is_accretive():
            raise ValueError(
                f"coefficients are not accretive (kappa = {B.kappa:.3e})")
        self.B = B
        self.torus = B.torus
        self.degree = degree
        if degree == 1:
            self.basis = hat_h1_basis(self.torus)
        else:
            self.basis = hat_hk_basis(B, degree)
        T_full = assemble_TB(B)
        self.T = restrict(T_full, self.basis, invariance_tol=invariance_tol)
        self.invariance_defect = restrict.last_defect
        self.dec = decompose(self.T, (B.kappa, B.sup_norm),
                             kernel_tol=kernel_tol)
        self.E = calculus.apply_function(self.dec, sgn()).entries
        self.N = restrict(OperatorMatrix(reflection_full_matrix(self.torus)),
                          self.basis).entries
        _, _, NB_hat = assemble_NB(B, "hat")
        self.NA = restrict(NB_hat, self.basis).entries
        self.Pnk = self.dec.nonkernel_projector()
        self.PK = self.dec.kernel_projector()
        self.kernel_dim = int(np.sum(self.dec.kernel_indices))
        # Solve-side Cauchy reflection: the discrete kernel (the torus
        # artifact replacing the absent constants) is assigned to the upper
        # Hardy class, so that (E - N) f = 2 N^- f holds on the whole
        # bounded-solution class E^+ H + ker T.
        self.E_solve = self.E + self.PK

    # -- operators ---------------------------------------------------------

    def boundary_operator(self, kind: str, lam: complex | None = None):
        eye = np.eye(self.dec.dim)
        if kind == "neumann":
            return self.E_solve - self.NA, "E - N_A"
        if kind == "regularity":
            return self.E_solve + self.N, "E + N"
        if kind in ("neu_perp", "dirichlet"):
            return self.E_solve - self.N, "E - N"
        if kind == "transmission":
            return lam * eye - self.E_solve @ self.NA, "lambda - E N_B"
        raise ValueError(f"unknown kind {kind!r}")

    def invert(self, op: np.ndarray, rhs: np.ndarray, label: str):
        """Minimum-norm solve through an SVD cutoff.

        Kernel directions of T invisible to the boundary datum make the
        solve operators structurally rank deficient by at most dim ker T;
        any null space beyond that, or an effective condition number past
        the cap, is a well-posedness failure.
        """
        try:
            U, s, Vh = np.linalg.svd(op)
        except np.linalg.LinAlgError:
            # the default divide-and-conquer driver can fail to converge on
            # large non-normal matrices; the QR-based driver is slower but
            # unconditionally convergent
            U, s, Vh = scipy.linalg.svd(op, lapack_driver="gesvd")
        cutoff = 1e-12 * s[0]
        keep = s > cutoff
        null_dim = int(op.shape[0] - np.sum(keep))
        cond = float(s[0] / s[keep][-1]) if np.any(keep) else np.inf
        if null_dim > self.kernel_dim:
            raise WellPosednessError(
                f"boundary operator {label!r} has {null_dim} null directions "
                f"(at most {self.kernel_dim} kernel ambiguities expected)",
                np.inf)
        if not np.isfinite(cond) or cond >= COND_CAP:
            raise WellPosednessError(
                f"boundary operator {label!r} is numerically singular "
                f"(condition number {cond:.3e} >= {COND_CAP:.0e})", cond)
        x = Vh.conj().T[:, keep] @ ((U[:, keep].conj().T @ rhs) / s[keep])
        return x, cond, null_dim

    # -- field/coordinate plumbing ----------------------------------------

    def to_coords(self, f: Field):
        vec = f.flatten()
        coords = self.basis.to_coords(vec)
        loss = np.linalg.norm(vec - self.basis.from_coords(coords))
        scale = max(np.linalg.norm(vec), 1e-300)
        return coords, float(loss / scale)

    def to_field(self, coords: np.ndarray) -> Field:
        return Field.from_flat(self.torus, self.basis.from_coords(coords))

    def project_nonkernel(self, coords: np.ndarray):
        proj = self.Pnk @ coords
        scale = max(np.linalg.norm(coords), 1e-300)
        return proj, float(np.linalg.norm(coords - proj) / scale)

    def phys_norm(self, coords: np.ndarray) -> float:
        return float(np.sqrt(self.torus.weight) * np.linalg.norm(coords))


@dataclass
class SolutionField:
    """Boundary trace plus semigroup evaluator for one half space."""

    frame: BoundaryFrame
    coords: np.ndarray  # trace in the restricted basis
    side: int = +1  # +1 upper half space, -1 lower

    def coords_at_t(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("t measures distance to the boundary; t >= 0")
        if t == 0:
            return self.coords
        return apply_to_vector(self.frame.dec, exp_minus_t_abs(t), self.coords)

    def at_t(self, t: float) -> Field:
        return self.frame.to_field(self.coords_at_t(t))

    def trace_field(self) -> Field:
        return self.frame.to_field(self.coords)

    def dt_coords_at_t(self, t: float) -> np.ndarray:
        """Exact d/dt F_t = -|T| F_t through the semigroup generator."""
        dec = self.frame.dec
        desc = custom(
            lambda z, t=t: -(z * np.where(z.real > 0, 1, -1)) * np.exp(
                -t * z * np.where(z.real > 0, 1, -1)),
            kernel_value=0.0, name=f"-abs*exp(-t abs), t={t}")
        return apply_to_vector(dec, desc, self.coords)

    def hardy_defect(self) -> float:
        """Relative size of the Hardy component for the wrong half space
        (the kernel belongs to both, so it never counts as a defect)."""
        E, Pnk = self.frame.E, self.frame.Pnk
        resid = 0.5 * ((Pnk - self.side * E) @ self.coords)
        scale = max(np.linalg.norm(self.coords), 1e-300)
        return float(np.linalg.norm(resid) / scale)

    def default_t_samples(self, points_per_decade: int = 10):
        dec = self.frame.dec
        t_min = 1e-2 / dec.spectral_radius()
        t_max = 1e2 / dec.min_nonkernel()
        m = max(int(np.ceil(np.log10(t_max / t_min) * points_per_decade)), 2)
        return np.exp(np.linspace(np.log(t_min), np.log(t_max), m))


# ---------------------------------------------------------------------------
# solves
# ---------------------------------------------------------------------------

def _as_coefficients(A, torus: Torus | None) -> CoefficientField:
    if isinstance(A, CoefficientField):
        return A
    if torus is None:
        raise ValueError("a torus is required when passing a plain matrix")
    return vector_block_coefficients(torus, np.asarray(A, dtype=complex))


def _e0_field(torus: Torus, scalar: np.ndarray) -> Field:
    vals = np.zeros(torus.shape + (torus.lambda_dim,), dtype=complex)
    vals[..., 1] = scalar
    return Field(torus, vals)


def _finish_solve(frame: BoundaryFrame, kind: str, formula: str,
                  rhs_field: Field, compare, mean_loss: float = 0.0) -> tuple:
    rhs_coords, data_loss = frame.to_coords(rhs_field)
    op, label = frame.boundary_operator(kind)
    sol_coords, cond, null_dim = frame.invert(op, 2.0 * rhs_coords, label)
    sol = SolutionField(frame, sol_coords)
    g_eff = frame.to_field(rhs_coords)
    resid = compare(sol.trace_field(), g_eff)
    scale = max(np.linalg.norm(sol_coords), 1e-300)
    kernel_fraction = float(np.linalg.norm(frame.PK @ sol_coords) / scale)
    report = SolveReport(
        formula=formula,
        condition_numbers={label: cond},
        boundary_residual=resid,
        data_projection_loss=float(np.hypot(data_loss, mean_loss)),
        trace_kernel_fraction=kernel_fraction,
        hardy_defect=sol.hardy_defect(),
        invariance_defect=frame.invariance_defect,
        extra={"null_dim": null_dim},
    )
    return sol, report


def _remove_mean(scalar: np.ndarray):
    """Drop the constant Fourier mode of a scalar boundary datum (the torus
    stand-in for data with no zero-frequency content)."""
    mean = complex(np.mean(scalar))
    out = scalar - mean
    loss = abs(mean) / max(float(np.linalg.norm(scalar))
                           / np.sqrt(scalar.size), 1e-300)
    return out, (0.0 if abs(mean) == 0 else float(loss))


def _rel(num: float, den: float) -> float:
    return float(num / max(den, 1e-300))


def solve_neumann(A, data, torus: Torus | None = None,
                  frame: BoundaryFrame | None = None):
    """Neumann problem: conormal derivative e_0 . (A f) = phi on the boundary."""
    if frame is None:
        frame = BoundaryFrame(_as_coefficients(A, torus))
    torus = frame.torus
    phi, mean_loss = _remove_mean(np.asarray(data, dtype=complex))
    a00 = frame.B.maps[..., 1, 1]
    rhs_field = _e0_field(torus, phi / a00)
    Bmat = frame.B.maps

    def compare(trace: Field, g_eff: Field):
        Af = np.einsum("...ij,...j->...i", Bmat, trace.values)
        Ag = np.einsum("...ij,...j->...i", Bmat, g_eff.values)
        return _rel(np.linalg.norm(Af[..., 1] - Ag[..., 1]),
                    np.linalg.norm(Ag[..., 1]))

    return _finish_solve(frame, "neumann",
                         "f = 2 (E - N_A)^{-1} (a00^{-1} phi e0)",
                         rhs_field, compare, mean_loss=mean_loss)


def solve_regularity(A, data: Field, torus: Torus | None = None,
                     frame: BoundaryFrame | None = None):
    """Regularity problem: tangential part of the trace equals grad psi."""
    if frame is None:
        frame = BoundaryFrame(_as_coefficients(A, torus))
    _check_gradient(data)
    tang = algebra.tangential_proj_matrix(frame.torus.dim_n)

    def compare(trace: Field, g_eff: Field):
        diff = (trace.values - g_eff.values) @ tang.T
        return _rel(np.linalg.norm(diff),
                    np.linalg.norm(g_eff.values @ tang.T))

    return _finish_solve(frame, "regularity",
                         "f = 2 (E + N)^{-1} (grad psi)", data, compare)


def solve_neu_perp(A, data, torus: Torus | None = None,
                   frame: BoundaryFrame | None = None):
    """Auxiliary Neumann problem: normal component e_0 . f = phi."""
    if frame is None:
        frame = BoundaryFrame(_as_coefficients(A, torus))
    phi, mean_loss = _remove_mean(np.asarray(data, dtype=complex))
    rhs_field = _e0_field(frame.torus, phi)

    def compare(trace: Field, g_eff: Field):
        return _rel(np.linalg.norm(trace.values[..., 1] - g_eff.values[..., 1]),
                    np.linalg.norm(g_eff.values[..., 1]))

    return _finish_solve(frame, "neu_perp",
                         "f = 2 (E - N)^{-1} (phi e0)", rhs_field, compare,
                         mean_loss=mean_loss)


def solve_dirichlet(A, data, torus: Torus | None = None,
                    frame: BoundaryFrame | None = None,
                    residual_t_samples=None):
    """Dirichlet problem: U_t is the e_0 reading of the aux Neumann solve.

    The report additionally carries the relative second-order interior
    residual div_{t,x} A grad_{t,x} U at sampled heights, computed with
    spectral x-derivatives and exact generator t-derivatives.
    """
    if frame is None:
        frame = BoundaryFrame(_as_coefficients(A, torus))
    sol, report = solve_neu_perp(None, data, frame=frame)
    report.formula = "U_t = (2 e^{-t|T|} (E - N)^{-1} (u e0), e0)"
    if residual_t_samples is None:
        dec = frame.dec
        residual_t_samples = np.exp(np.linspace(
            np.log(0.05 / dec.spectral_radius()),
            np.log(2.0 / dec.min_nonkernel()), 10))
    resid = dirichlet_second_order_residual(sol, residual_t_samples)
    report.second_order_residual = resid
    return sol, report


def dirichlet_values(sol: SolutionField, t: float) -> np.ndarray:
    """U_t(x): the e_0 component of the interior field."""
    return sol.at_t(t).component(1)


def dirichlet_second_order_residual(sol: SolutionField, t_samples) -> float:
    """max over sampled t of ||div_{t,x} A grad_{t,x} U|| relative to the
    size of its constituent terms."""
    frame = sol.frame
    torus = frame.torus
    n = torus.dim_n
    A = frame.B.vector_block()
    Dx = [derivative_matrix(torus, j) for j in range(n)]
    worst = 0.0
    dec = frame.dec
    hol_abs = lambda z: z * np.where(z.real > 0, 1, -1)
    for t in t_samples:
        U = sol.at_t(t).component(1).reshape(-1)
        Ut = frame.to_field(apply_to_vector(
            dec, custom(lambda z, t=t: -hol_abs(z) * np.exp(-t * hol_abs(z)),
                        kernel_value=0.0), sol.coords)).component(1).reshape(-1)
        Utt = frame.to_field(apply_to_vector(
            dec, custom(lambda z, t=t: hol_abs(z) ** 2 * np.exp(-t * hol_abs(z)),
                        kernel_value=0.0), sol.coords)).component(1).reshape(-1)
        gradU = [D @ U for D in Dx]
        gradUt = [D @ Ut for D in Dx]
        Aflat = A.reshape(-1, n + 1, n + 1)
        # g = A (dU/dt, grad_x U); residual = d/dt g_0 + div_x g_par
        dt_g0 = Aflat[:, 0, 0] * Utt
        for j in range(n):
            dt_g0 = dt_g0 + Aflat[:, 0, j + 1] * gradUt[j]
        div_gpar = np.zeros_like(U)
        scale_terms = [np.linalg.norm(dt_g0)]
        for i in range(n):
            g_i = Aflat[:, i + 1, 0] * Ut
            for j in range(n):
                g_i = g_i + Aflat[:, i + 1, j + 1] * gradU[j]
            div_gpar = div_gpar + Dx[i] @ g_i
            scale_terms.append(np.linalg.norm(Dx[i] @ g_i))
        resid = np.linalg.norm(dt_g0 + div_gpar)
        scale = max(max(scale_terms), 1e-300)
        worst = max(worst, float(resid / scale))
    return worst


def _check_gradient(data: Field, tol: float = 1e-10) -> None:
    """Regularity data must be tangential and curl free (checked per mode)."""
    torus = data.torus
    n = torus.dim_n
    nor = algebra.normal_mask(n)
    if np.linalg.norm(data.values[..., nor]) > tol * max(
            np.linalg.norm(data.values), 1e-300):
        raise ValueError("regularity data must be tangential")
    degs = algebra.mask_degrees(n)
    high = degs > 1
    if np.linalg.norm(data.values[..., high]) > tol * max(
            np.linalg.norm(data.values), 1e-300):
        raise ValueError("regularity data must be a vector field")
    if n == 2:
        spec = np.fft.fftn(data.values, axes=(0, 1))
        xi1, xi2 = torus.wavenumbers()
        curl = xi1 * spec[..., 4] - xi2 * spec[..., 2]
        if np.linalg.norm(curl) > tol * max(np.linalg.norm(spec), 1e-300):
            raise ValueError("regularity data is not curl free")


def solve_transmission(B: CoefficientField, degree: int, alpha_plus: complex,
                       alpha_minus: complex, g: Field,
                       frame: BoundaryFrame | None = None,
                       membership_tol: float = 1e-8):
    """Two-sided transmission problem for degree-k fields.

    Solves (lambda - E N_B) f = 2/(a+ - a-) E g on the constrained degree-k
    subspace, splits f into Hardy halves and verifies both jump conditions.
    """
    if alpha_plus == alpha_minus:
        raise ValueError("alpha_plus and alpha_minus must differ")
    lam = (alpha_plus + alpha_minus) / (alpha_plus - alpha_minus)
    if frame is None:
        frame = BoundaryFrame(B, degree=degree)
    torus = frame.torus
    g_coords, g_loss = frame.to_coords(g)
    if g_loss > membership_tol:
        raise ValueError(
            f"transmission datum is outside the constrained degree-{degree} "
            f"space (relative distance {g_loss:.3e})")
    margin = abs(lam ** 2 + 1.0)
    op, label = frame.boundary_operator("transmission", lam=lam)
    if margin < 1e-12:
        raise WellPosednessError(
            f"spectral point lambda = {lam!r} is degenerate "
            f"(|lambda^2 + 1| = {margin:.3e})", np.inf)
    rhs = (2.0 / (alpha_plus - alpha_minus)) * (frame.E_solve @ g_coords)
    f_coords, cond, null_dim = frame.invert(op, rhs, label)
    f_plus = 0.5 * (f_coords + frame.E_solve @ f_coords)
    f_minus = 0.5 * (f_coords - frame.E_solve @ f_coords)
    sol_p = SolutionField(frame, f_plus, side=+1)
    sol_m = SolutionField(frame, f_minus, side=-1)

    # jump conditions in the ambient field space
    n = torus.dim_n
    mu = algebra.mu_matrix(n)
    Bmat = frame.B.maps
    mus = algebra.mu_star_matrix(n)
    fp = frame.to_field(f_plus).values
    fm = frame.to_field(f_minus).values
    gv = frame.to_field(g_coords).values
    j1 = (alpha_minus * fp - alpha_plus * fm - gv) @ mu.T
    j1_scale = np.linalg.norm(gv @ mu.T)
    Bfp = np.einsum("...ij,...j->...i", Bmat, fp)
    Bfm = np.einsum("...ij,...j->...i", Bmat, fm)
    Bg = np.einsum("...ij,...j->...i", Bmat, gv)
    j2 = (alpha_plus * Bfp - alpha_minus * Bfm - Bg) @ mus.T
    j2_scale = np.linalg.norm(Bg @ mus.T)
    resid = max(_rel(np.linalg.norm(j1), j1_scale),
                _rel(np.linalg.norm(j2), j2_scale))
    report = SolveReport(
        formula="(lambda - E N_B) f = 2/(a+ - a-) E g",
        condition_numbers={label: cond},
        boundary_residual=resid,
        data_projection_loss=float(g_loss),
        trace_kernel_fraction=float(
            np.linalg.norm(frame.PK @ f_coords)
            / max(np.linalg.norm(f_coords), 1e-300)),
        hardy_defect=max(sol_p.hardy_defect() if np.linalg.norm(f_plus) > 0 else 0.0,
                         sol_m.hardy_defect() if np.linalg.norm(f_minus) > 0 else 0.0),
        invariance_defect=frame.invariance_defect,
        extra={"lambda": lam, "degeneracy_margin": margin,
               "null_dim": null_dim},
    )
    return (sol_p, sol_m), report


# ---------------------------------------------------------------------------
# solution norms
# ---------------------------------------------------------------------------

def norm_sup_t(sol: SolutionField, t_samples=None) -> float:
    if t_samples is None:
        t_samples = sol.default_t_samples()
    if len(t_samples) == 0:
        raise ValueError("empty sample grid")
    return max(sol.frame.phys_norm(sol.coords_at_t(t)) for t in t_samples)


def norm_triplebar_dt(sol: SolutionField, points_per_decade: int = 40) -> float:
    """Triple-bar norm (int ||t dF/dt||^2 dt/t)^{1/2} via the generator."""
    dec = sol.frame.dec
    ts, h = calculus.default_t_grid(dec, points_per_decade=points_per_decade)
    c = dec.Vinv @ sol.coords
    lam = dec.eigenvalues
    abs_lam = lam * np.where(lam.real > 0, 1, -1)
    total = 0.0
    for t in ts:
        vals = np.where(dec.kernel_indices, 0.0,
                        t * abs_lam * np.exp(-t * abs_lam))
        y = dec.V @ (vals * c)
        total += h * float(np.vdot(y, y).real)
    # small-t tail: integrand ~ (t |lam|)^2
    Tf = dec.V @ (np.where(dec.kernel_indices, 0.0, abs_lam) * c)
    t_lo = ts[0] * np.exp(-h / 2)
    total += (t_lo ** 2 / 2.0) * float(np.vdot(Tf, Tf).real)
    return float(np.sqrt(sol.frame.torus.weight * total))


def norm_triplebar_gradx(sol: SolutionField,
                         points_per_decade: int = 40) -> float:
    """Triple-bar norm of t grad_x U_t for the scalar Dirichlet reading."""
    frame = sol.frame
    torus = frame.torus
    dec = frame.dec
    Dx = [derivative_matrix(torus, j) for j in range(torus.dim_n)]
    ts, h = calculus.default_t_grid(dec, points_per_decade=points_per_decade)
    total = 0.0
    for t in ts:
        U = sol.at_t(t).component(1).reshape(-1)
        for D in Dx:
            g = D @ U
            total += h * (t ** 2) * float(np.vdot(g, g).real)
    return float(np.sqrt(torus.weight * total))


def nontangential_max(sol: SolutionField, c0: float = 0.5, c1: float = 1.0,
                      t_samples=None) -> float:
    """L2 norm of the non-tangential maximal function on the sample lattice.

    Whitney boxes: |s - t| < c0 t in height, |y - x| < c1 t per axis
    (periodic distance); the box average always includes the nearest lattice
    sample.
    """
    frame = sol.frame
    torus = frame.torus
    if t_samples is None:
        t_samples = sol.default_t_samples()
    t_samples = np.asarray(sorted(t_samples))
    P_shape = torus.shape
    sq = np.zeros((len(t_samples),) + P_shape)
    for i, t in enumerate(t_samples):
        vals = sol.at_t(t).values
        sq[i] = np.sum(np.abs(vals) ** 2, axis=-1)
    dx = torus.length / torus.points_per_axis
    best = np.zeros(P_shape)
    for i, t in enumerate(t_samples):
        in_s = np.abs(t_samples - t) < c0 * t
        if not np.any(in_s):
            in_s = np.zeros_like(in_s)
            in_s[i] = True
        layer = sq[in_s].mean(axis=0)
        half_w = max(int(np.floor(c1 * t / dx)), 0)
        win = min(2 * half_w + 1, torus.points_per_axis)
        avg = layer
        for ax in range(torus.dim_n):
            kernel_idx = (np.arange(win) - win // 2)
            rolled = sum(np.roll(avg, shift, axis=ax) for shift in kernel_idx)
            avg = rolled / win
        best = np.maximum(best, avg)
    nt = np.sqrt(best)
    return float(np.sqrt(torus.weight * np.sum(nt ** 2)))


# ---------------------------------------------------------------------------
# well-posedness landscape
# ---------------------------------------------------------------------------

def wellposedness_report(frame: BoundaryFrame, cap: float = COND_CAP) -> dict:
    """Condition numbers of the four boundary operators plus the restricted
    Hardy-to-normal/tangential projection gaps."""
    eye = np.eye(frame.dec.dim)
    ops = {
        "I-EN_A": eye - frame.E @ frame.NA,
        "I+EN_A": eye + frame.E @ frame.NA,
        "I-EN": eye - frame.E @ frame.N,
        "I+EN": eye + frame.E @ frame.N,
    }
    out = {}
    for label, op in ops.items():
        sv = np.linalg.svd(op, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > sv[0] / cap else cap
        out[label] = {"cond": cond, "capped": cond >= cap}
    # restricted projections N^{+-}_A : E^+ H -> N^{+-}_A H on non-kernel part
    Pnk = frame.Pnk
    Eplus = 0.5 * (Pnk + frame.E @ Pnk)
    u, s, _ = np.linalg.svd(Eplus)
    U = u[:, s > 0.5]
    for name, refl in (("N_A", frame.NA), ("N", frame.N)):
        for pm, sign_ in (("+", +1.0), ("-", -1.0)):
            proj = 0.5 * (np.eye(frame.dec.dim) + sign_ * refl)
            svals = np.linalg.svd(proj @ U, compute_uv=False)
            out[f"gap.{name}{pm}"] = {
                "smin": float(svals[-1]) if len(svals) else 0.0,
                "smax": float(svals[0]) if len(svals) else 0.0}
    return out
