import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_bvp
from scipy.interpolate import CubicSpline

from heliflow import AnnulusGrid, coefficient_table, critical_step, single_mode_bc, solve_background
from heliflow.elliptic import solve_mode_bvp, solve_poisson, solve_potential, thomas
from heliflow.errors import NotElliptic, SingularMode, ZeroMeanViolation
from heliflow.boundary import FourierSeries, HelicalBC
from heliflow.verify import mms_potential_error, mms_study


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 40), seed=st.integers(0, 2 ** 31))
def test_thomas_matches_dense(n, seed):
    rng = np.random.default_rng(seed)
    lo, up = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    di = 4 + np.abs(lo) + np.abs(up) + 1j * rng.standard_normal(n)
    rhs = rng.standard_normal((n, 3)) + 0j
    M = np.diag(di) + np.diag(lo[1:], -1) + np.diag(up[:-1], 1)
    x = thomas(lo, di, up, rhs)
    assert np.allclose(M @ x, rhs, atol=1e-10)


def test_thomas_zero_pivot():
    z = np.zeros(4)
    with pytest.raises(SingularMode):
        thomas(z, z.copy(), z, np.ones(4))


def test_poisson_of_zero_is_zero(grid):
    assert np.all(solve_poisson(grid.zeros(), grid) == 0)


def _mode0(n, inflow, sigma_fraction=0.5):
    """Mode-0 problem with the solver's radial coefficient, exact solution sin(3r) + r^2."""
    bg = solve_background(inflow, N_r=n)
    t = coefficient_table(bg, sigma_fraction * critical_step(bg)[0])
    r = bg.r_grid
    phi = np.sin(3 * r) + r ** 2
    d1 = 3 * np.cos(3 * r) + 2 * r
    d2 = -9 * np.sin(3 * r) + 2
    g = (d2 + t.k1_euler * d1)[:, None]
    u = solve_mode_bvp(r[1] - r[0], t.k1_euler, np.zeros_like(g), g,
                       ("robin", 0.0, d1[0]), ("dirichlet", phi[-1]))
    return r, u[:, 0].real, phi, t


def test_mode0_second_order_and_richardson(inflow):
    r1, u1, ex1, _ = _mode0(513, inflow)
    r2, u2, ex2, _ = _mode0(1025, inflow)
    e1, e2 = np.max(np.abs(u1 - ex1)), np.max(np.abs(u2 - ex2))
    assert 3.5 < e1 / e2 < 4.5
    rich = (4 * u2[::2] - u1) / 3
    assert np.max(np.abs(rich - ex1)) < 1e-8


def test_mode0_against_collocation_reference(inflow):
    r1, u1, _, _ = _mode0(513, inflow)
    r, u, exact, t = _mode0(1025, inflow)
    k1 = CubicSpline(r, t.k1_euler)
    g = CubicSpline(r, -9 * np.sin(3 * r) + 2 + t.k1_euler * (3 * np.cos(3 * r) + 2 * r))
    left = 3 * np.cos(3 * r[0]) + 2 * r[0]
    right = np.sin(3 * r[-1]) + r[-1] ** 2
    sol = solve_bvp(lambda x, y: np.vstack([y[1], g(x) - k1(x) * y[1]]),
                    lambda ya, yb: np.array([ya[1] - left, yb[0] - right]),
                    r, np.zeros((2, r.size)), tol=1e-10, max_nodes=200000)
    assert sol.success
    ref = sol.sol(r1)[0]
    assert np.max(np.abs(ref - exact[::2])) < 1e-8
    rich = (4 * u[::2] - u1) / 3
    assert np.max(np.abs(rich - ref)) < 1e-8


def test_manufactured_convergence(inflow):
    res = mms_study(inflow, levels=(129, 257, 513))
    for ratio in res.poisson_ratios + res.potential_ratios:
        assert 3.5 <= ratio <= 4.5


def test_reduced_variant_also_converges(inflow):
    errs = []
    for n in (129, 257):
        bg = solve_background(inflow, N_r=n)
        s = 0.5 * critical_step(bg)[0]
        errs.append(mms_potential_error(coefficient_table(bg, s),
                                        AnnulusGrid(inflow.r0, inflow.r1, n, s, 64), "reduced"))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_not_elliptic_beyond_critical_step(bg, sigma_star, inflow):
    s = 1.01 * sigma_star
    t = coefficient_table(bg, s)
    grid = AnnulusGrid(inflow.r0, inflow.r1, bg.N_r, s, 64)
    with pytest.raises(NotElliptic):
        solve_potential(grid.zeros(), t, single_mode_bc(s, 1e-3), grid)


def test_q3_mean_is_refused(table, grid):
    bc = HelicalBC(table.sigma, 1e-3, q3=FourierSeries(mean=1.0))
    with pytest.raises(ZeroMeanViolation):
        solve_potential(grid.zeros(), table, bc, grid)


def test_homogeneous_problem_has_zero_solution(table, grid):
    sol = solve_potential(grid.zeros(), table, single_mode_bc(table.sigma, 0.0), grid)
    for arr in (sol.phi, sol.phi_r, sol.phi_eta):
        assert np.all(arr == 0)


def test_boundary_conditions_are_met(table, grid):
    bc = single_mode_bc(table.sigma, 1e-3)
    sol = solve_potential(grid.zeros(), table, bc, grid)
    eta = grid.eta
    # Dirichlet: phi(r1, eta) equals the antiderivative of the r1 datum for V3
    assert np.allclose(sol.phi[-1], bc.eps * bc.q3.antiderivative(eta, bc.sigma), atol=1e-12)
    # oblique condition at r0: d_r phi = eps q1
    assert np.allclose(sol.phi_r[0], bc.eps * bc.q1(eta, bc.sigma), atol=1e-10)
