"""Tests for the boundary value problem solves and solution norms."""

import numpy as np
import pytest

from halfspace.bvp import (BoundaryFrame, SolutionField, WellPosednessError,
                           dirichlet_values,
                           nontangential_max, norm_sup_t, norm_triplebar_dt,
                           solve_dirichlet, solve_neumann, solve_neu_perp,
                           solve_regularity, solve_transmission,
                           wellposedness_report)
from halfspace.diagnostics import (gaussian_data, mode_data,
                                   smooth_real_symmetric)
from halfspace.grid import Field, Torus, d_op, identity_coefficients


def _torus():
    return Torus(1, 2 * np.pi, 64)


def _gradient_data(torus, scalar):
    vals = np.zeros(torus.shape + (torus.lambda_dim,), dtype=complex)
    vals[..., 0] = scalar
    return d_op(Field(torus, vals))


@pytest.fixture(scope="module")
def identity_frame():
    return BoundaryFrame(identity_coefficients(_torus()))


@pytest.fixture(scope="module")
def smooth_frame():
    return BoundaryFrame(smooth_real_symmetric(_torus(), seed=3))


@pytest.mark.parametrize("frame_name", ["identity_frame", "smooth_frame"])
def test_neumann_solve_residuals(frame_name, request):
    frame = request.getfixturevalue(frame_name)
    phi = gaussian_data(frame.torus)
    sol, report = solve_neumann(None, phi, frame=frame)
    assert report.boundary_residual <= 1e-8
    assert report.hardy_defect <= 1e-8
    assert report.data_projection_loss <= 1e-8


@pytest.mark.parametrize("frame_name", ["identity_frame", "smooth_frame"])
def test_regularity_solve_residuals(frame_name, request):
    frame = request.getfixturevalue(frame_name)
    data = _gradient_data(frame.torus, gaussian_data(frame.torus))
    sol, report = solve_regularity(None, data, frame=frame)
    assert report.boundary_residual <= 1e-8
    assert report.hardy_defect <= 1e-8


@pytest.mark.parametrize("frame_name", ["identity_frame", "smooth_frame"])
def test_neu_perp_solve_residuals(frame_name, request):
    frame = request.getfixturevalue(frame_name)
    phi = mode_data(frame.torus, 2)
    sol, report = solve_neu_perp(None, phi, frame=frame)
    assert report.boundary_residual <= 1e-8
    assert report.hardy_defect <= 1e-8


def test_first_order_equation_inside(smooth_frame):
    # the interior field satisfies d/dt F_t = -T F_t exactly through the
    # semigroup generator
    frame = smooth_frame
    sol, _ = solve_neumann(None, gaussian_data(frame.torus), frame=frame)
    for t in (0.1, 0.5, 2.0):
        lhs = sol.dt_coords_at_t(t)
        rhs = -frame.T.entries @ sol.coords_at_t(t)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(
            np.linalg.norm(rhs), 1e-30)


def test_semigroup_reproduction(smooth_frame):
    # F_{s+t} equals the evolution of F_s by t
    frame = smooth_frame
    sol, _ = solve_regularity(
        None, _gradient_data(frame.torus, gaussian_data(frame.torus)),
        frame=frame)
    s, t = 0.4, 0.9
    direct = sol.coords_at_t(s + t)
    via = SolutionField(frame, sol.coords_at_t(s)).coords_at_t(t)
    assert np.linalg.norm(direct - via) <= 1e-9 * np.linalg.norm(sol.coords)


def test_interior_norms_comparable(smooth_frame):
    frame = smooth_frame
    sol, _ = solve_neumann(None, gaussian_data(frame.torus), frame=frame)
    trace = frame.phys_norm(sol.coords)
    for value in (norm_sup_t(sol), norm_triplebar_dt(sol),
                  nontangential_max(sol)):
        assert trace / 50 <= value <= 50 * trace


def test_dirichlet_interior_residual(smooth_frame):
    frame = smooth_frame
    sol, report = solve_dirichlet(None, gaussian_data(frame.torus),
                                  frame=frame)
    assert report.second_order_residual <= 1e-6
    u0 = dirichlet_values(sol, 1e-9)
    trace = sol.trace_field().component(1)
    assert np.allclose(u0, trace, atol=1e-6 * max(np.max(np.abs(trace)), 1))


def test_dirichlet_identity_matches_poisson(identity_frame):
    frame = identity_frame
    torus = frame.torus
    x = torus.axis_coordinates()
    u = np.cos(3 * x)
    sol, report = solve_dirichlet(None, u, frame=frame)
    t = 0.6
    ref = np.exp(-3 * t) * u
    got = dirichlet_values(sol, t).real
    assert np.allclose(got, ref, atol=1e-9)


def test_transmission_jump_conditions(smooth_frame):
    frame_src = smooth_frame
    torus = frame_src.torus
    B = frame_src.B
    frame = BoundaryFrame(B, degree=1)
    g_coords, _ = frame.to_coords(_gradient_data(torus, gaussian_data(torus)))
    g_field = frame.to_field(g_coords)
    (sol_p, sol_m), report = solve_transmission(
        B, 1, 2.0, 1.0, g_field, frame=frame)
    assert report.boundary_residual <= 1e-8
    assert report.hardy_defect <= 1e-7


def test_transmission_degenerate_lambda_rejected(smooth_frame):
    B = smooth_frame.B
    torus = smooth_frame.torus
    frame = BoundaryFrame(B, degree=1)
    g = frame.to_field(frame.to_coords(
        _gradient_data(torus, gaussian_data(torus)))[0])
    # alpha ratio giving lambda = i is spectrally degenerate
    a_plus = 1.0j + 1.0
    a_minus = 1.0j - 1.0
    with pytest.raises(WellPosednessError):
        solve_transmission(B, 1, a_plus, a_minus, g, frame=frame)
    with pytest.raises(ValueError):
        solve_transmission(B, 1, 1.0, 1.0, g, frame=frame)


def test_wellposedness_report(smooth_frame):
    rep = wellposedness_report(smooth_frame)
    for label in ("I-EN_A", "I+EN_A", "I-EN", "I+EN"):
        entry = rep[label]
        assert np.isfinite(entry["cond"])
        assert not entry["capped"]
    for key in ("gap.N_A+", "gap.N+"):
        assert 0.0 < rep[key]["smin"] <= rep[key]["smax"]


def test_report_serialization(smooth_frame):
    frame = smooth_frame
    _, report = solve_neumann(None, gaussian_data(frame.torus), frame=frame)
    text = report.to_text()
    assert "boundary_residual" in text
    keys = [k for k, _ in report.items()]
    assert "formula" in keys
    assert any(k.startswith("cond.") for k in keys)


def test_solution_rejects_negative_t(smooth_frame):
    sol, _ = solve_neumann(None, gaussian_data(smooth_frame.torus),
                           frame=smooth_frame)
    with pytest.raises(ValueError):
        sol.coords_at_t(-0.1)
