"""Tests for the dense holomorphic functional calculus."""

import numpy as np
import pytest

from halfspace.calculus import (IllConditionedEigenbasisError,
                                SectorViolationError, abs_power,
                                apply_function, apply_to_vector, chi_minus,
                                chi_plus, decompose, default_t_grid,
                                exp_minus_t_abs, p_t, q_t, quadratic_constants,
                                quadratic_norm, resolvent, resolvent_direct,
                                sgn)
from halfspace.oracles import brute_resolvent, selfadjoint_qe_value


def _hermitian_with_kernel(seed=0, dim=12, kernel_dim=2):
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.normal(size=(dim, dim))
                     + 1j * rng.normal(size=(dim, dim)))[0]
    lam = np.concatenate([np.zeros(kernel_dim),
                          rng.uniform(0.5, 4.0, dim - kernel_dim)
                          * rng.choice([-1.0, 1.0], dim - kernel_dim)])
    return Q @ np.diag(lam) @ Q.conj().T, lam


def _nonnormal_bisectorial(seed=1, dim=10):
    rng = np.random.default_rng(seed)
    V = np.eye(dim) + 0.3 * (rng.normal(size=(dim, dim))
                             + 1j * rng.normal(size=(dim, dim)))
    lam = rng.uniform(0.5, 3.0, dim) * rng.choice([-1.0, 1.0], dim)
    lam = lam * np.exp(1j * rng.uniform(-0.2, 0.2, dim))
    return V @ np.diag(lam) @ np.linalg.inv(V)


def test_sign_function_idempotent_projections():
    mat, _ = _hermitian_with_kernel()
    dec = decompose(mat)
    E = apply_function(dec, sgn()).entries
    Pp = apply_function(dec, chi_plus()).entries
    Pm = apply_function(dec, chi_minus()).entries
    Pnk = dec.nonkernel_projector()
    assert np.allclose(Pp @ Pp, Pp, atol=1e-10)
    assert np.allclose(Pm @ Pm, Pm, atol=1e-10)
    assert np.allclose(Pp + Pm, Pnk, atol=1e-10)
    assert np.allclose(Pp - Pm, E, atol=1e-10)
    assert np.allclose(E @ E, Pnk, atol=1e-10)


def test_kernel_projector_and_dimensions():
    mat, lam = _hermitian_with_kernel(kernel_dim=3)
    dec = decompose(mat)
    PK = dec.kernel_projector()
    assert int(round(np.real(np.trace(PK)))) == 3
    assert np.allclose(mat @ PK, 0.0, atol=1e-10)


def test_resolvent_against_direct_and_brute():
    mat = _nonnormal_bisectorial()
    lam0 = 0.7j
    dec = decompose(mat)
    R_spec = apply_function(dec, resolvent(lam0)).entries
    R_dir = resolvent_direct(mat, lam0).entries
    assert np.allclose(R_spec, R_dir, atol=1e-9 * np.linalg.norm(R_dir, 2))
    v = np.arange(mat.shape[0], dtype=complex)
    assert np.allclose(brute_resolvent(mat, lam0, v), R_dir @ v, atol=1e-9)


def test_semigroup_composition():
    mat, _ = _hermitian_with_kernel(seed=3)
    dec = decompose(mat)
    rng = np.random.default_rng(4)
    v = rng.normal(size=mat.shape[0]) + 1j * rng.normal(size=mat.shape[0])
    s, t = 0.3, 1.1
    one = apply_to_vector(dec, exp_minus_t_abs(s + t), v)
    two = apply_to_vector(dec, exp_minus_t_abs(t),
                          apply_to_vector(dec, exp_minus_t_abs(s), v))
    assert np.linalg.norm(one - two) <= 1e-9 * np.linalg.norm(v)


def test_exp_abs_fixes_kernel():
    mat, _ = _hermitian_with_kernel(seed=5, kernel_dim=2)
    dec = decompose(mat)
    PK = dec.kernel_projector()
    v = PK @ (np.ones(mat.shape[0]) + 0.5j)
    out = apply_to_vector(dec, exp_minus_t_abs(2.0), v)
    assert np.allclose(out, v, atol=1e-10)


def test_q_t_and_p_t_algebra():
    # q_t = tT(1+t^2 T^2)^{-1}, p_t = (1+t^2 T^2)^{-1}; p + (tT) q = identity
    mat = _nonnormal_bisectorial(seed=6)
    dec = decompose(mat)
    t = 0.8
    q = apply_function(dec, q_t(t)).entries
    p = apply_function(dec, p_t(t)).entries
    Pnk = dec.nonkernel_projector()
    lhs = p + t * (mat @ q)
    # on the kernel p_t acts as the identity
    assert np.allclose(lhs, Pnk + (np.eye(mat.shape[0]) - Pnk) @ p, atol=1e-8)


def test_sector_violation_detected():
    # the sign function is undefined on (near-)imaginary eigenvalues
    mat = np.diag([1.0, -1.0, 1.0j])
    dec = decompose(mat)
    with pytest.raises(SectorViolationError):
        apply_function(dec, sgn())


def test_ill_conditioned_eigenbasis_rejected():
    # a nearly defective matrix has an exploding eigenbasis condition number
    eps = 1e-14
    mat = np.array([[1.0, 1.0], [eps, 1.0]])
    with pytest.raises(IllConditionedEigenbasisError):
        decompose(mat, cond_cap=1e6)


def test_selfadjoint_quadratic_value():
    mat, _ = _hermitian_with_kernel(seed=7, kernel_dim=0)
    dec = decompose(mat)
    rng = np.random.default_rng(8)
    v = rng.normal(size=mat.shape[0]) + 1j * rng.normal(size=mat.shape[0])
    val = quadratic_norm(dec, v) ** 2
    ref = 0.5 * np.linalg.norm(v) ** 2
    assert abs(val - ref) <= 1e-6 * ref
    # independent quadrature route
    val2 = selfadjoint_qe_value(mat, v)
    assert abs(val2 - ref) <= 1e-6 * ref


def test_quadratic_constants_selfadjoint():
    mat, _ = _hermitian_with_kernel(seed=9, kernel_dim=1)
    dec = decompose(mat)
    c_low, c_high = quadratic_constants(dec)
    assert abs(c_low - 1 / np.sqrt(2)) <= 1e-3
    assert abs(c_high - 1 / np.sqrt(2)) <= 1e-3


def test_abs_power_composition():
    mat, _ = _hermitian_with_kernel(seed=10, kernel_dim=0)
    dec = decompose(mat)
    half = apply_function(dec, abs_power(0.5)).entries
    full = apply_function(dec, abs_power(1.0)).entries
    assert np.allclose(half @ half, full, atol=1e-9 * np.linalg.norm(full, 2))


def test_default_t_grid_spans_spectrum():
    mat, _ = _hermitian_with_kernel(seed=11, kernel_dim=1)
    dec = decompose(mat)
    ts, h = default_t_grid(dec)
    assert ts[0] < 1.0 / dec.spectral_radius()
    assert ts[-1] > 1.0 / dec.min_nonkernel()
    assert h > 0
    assert np.allclose(np.diff(np.log(ts)), h)
