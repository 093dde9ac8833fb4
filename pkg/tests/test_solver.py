import json
from dataclasses import replace

import numpy as np
import pytest

from heliflow import NoConvergence, StepTooLarge, ValidationError, fixed_point_solve, reference_config
from heliflow.assembly import PerturbationState
from heliflow.errors import DegenerateRadialVelocity
from heliflow.fields import c_norms
from heliflow.solver import apply_map_once, build_context


@pytest.fixture(scope="module")
def small():
    return reference_config(eps=1e-3, N_r=129, N_eta=32).solver_config()


def test_zero_amplitude_is_the_background(small):
    cfg = replace(small, bc=small.bc.with_eps(0.0))
    W, flow, rep = fixed_point_solve(cfg)
    assert rep.iterations == 1 and rep.converged
    assert all(np.all(a == 0) for a in W.arrays())
    bg = build_context(cfg)[0].bg
    assert np.max(np.abs(flow.V1 - bg.U1_bar[:, None])) <= 1e-12
    assert np.max(np.abs(flow.rho - bg.rho_bar[:, None])) <= 1e-12
    assert np.max(np.abs(flow.p - bg.p_bar[:, None])) <= 1e-12


def test_map_of_zero_with_zero_data_is_zero(small):
    cfg = replace(small, bc=small.bc.with_eps(0.0))
    ctx, _ = build_context(cfg)
    out = apply_map_once(PerturbationState.zeros(ctx.grid), ctx)
    assert all(np.all(a == 0) for a in out.arrays())


def test_step_too_large_names_the_key(small):
    ctx, sigma_star = build_context(small)
    cfg = replace(small, bc=small.bc.with_sigma(1.1 * sigma_star))
    with pytest.raises(StepTooLarge, match="helical.sigma"):
        fixed_point_solve(cfg)


def test_amplitude_limit(small):
    with pytest.raises(ValidationError):
        fixed_point_solve(replace(small, bc=small.bc.with_eps(0.5)))


def test_contraction_and_fixed_point(small):
    W, _, rep = fixed_point_solve(small, residuals=False)
    assert rep.converged
    assert max(rep.ratios) < 0.5
    assert rep.in_ball
    assert rep.c_star_empirical > 0
    ctx, _ = build_context(small)
    again = apply_map_once(W, ctx)
    assert c_norms((again - W).arrays(), ctx.grid)[1] < 10 * small.tol


def test_first_iterate_is_order_eps(small):
    ctx, _ = build_context(small)
    sizes = []
    for eps in (1e-3, 5e-4):
        c = replace(ctx, bc=ctx.bc.with_eps(eps))
        sizes.append(c_norms(apply_map_once(PerturbationState.zeros(ctx.grid), c).arrays(), ctx.grid)[1])
    assert sizes[0] / sizes[1] == pytest.approx(2.0, rel=1e-2)


def test_stage_annotation(small):
    ctx, _ = build_context(small)
    bad = PerturbationState.zeros(ctx.grid)
    bad.W1 = -ctx.bg.U1_bar[:, None] + ctx.grid.zeros()
    with pytest.raises(DegenerateRadialVelocity) as err:
        apply_map_once(bad, ctx)
    assert err.value.stage == "transport"


def test_no_convergence_is_reported(small):
    W, _, rep = fixed_point_solve(replace(small, max_iters=2), residuals=False)
    assert not rep.converged and rep.iterations == 2
    # an expanding map must raise instead of returning
    with pytest.raises(NoConvergence):
        from heliflow import solver
        orig = solver.apply_map_once
        try:
            solver.apply_map_once = lambda W, ctx: PerturbationState(
                W.grid, *(2 * a + 1e-3 for a in W.arrays()))
            fixed_point_solve(replace(small, max_iters=5), residuals=False)
        finally:
            solver.apply_map_once = orig


def test_report_json_is_deterministic(small):
    a = fixed_point_solve(small)[2].to_json()
    b = fixed_point_solve(small)[2].to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert set(a["residuals"]) == {"continuity", "r_momentum", "theta_momentum", "z_momentum", "entropy"}
    assert set(a["transport_defects"]) == {"B", "A", "Vc"}
