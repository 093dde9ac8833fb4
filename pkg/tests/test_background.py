import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heliflow import GasInflow, coefficient_table, critical_step, solve_background
from heliflow.background import (background_defects, critical_step_profile,
                                 sonic_radius_closed_form, write_background_csv)
from heliflow.config import REFERENCE
from heliflow.errors import NoSupersonicRegion, SonicRadialVelocity, ValidationError
from heliflow.verify import identity_checks


def test_reference_constants(inflow):
    assert inflow.kappa1 == pytest.approx(-0.6)
    assert inflow.kappa2 == pytest.approx(1.0)
    assert inflow.B0 == pytest.approx(2.17)


def test_sonic_radius_matches_closed_form():
    bg = solve_background(GasInflow(**REFERENCE), N_r=1024)
    exact = sonic_radius_closed_form(bg.inflow)
    assert abs(bg.r_c - exact) / exact < 1e-7


def test_invariants_hold():
    bg = solve_background(GasInflow(**REFERENCE), N_r=1024)
    assert max(background_defects(bg).values()) < 1e-9


def test_flow_is_transonic(bg):
    m = bg.M_sq
    assert m[-1] < 1 < m[0]
    assert np.all(np.diff(m) < 0)  # speeds up monotonically inward
    assert np.all(bg.M1_sq < 1)


def test_rk4_order(inflow):
    fine = solve_background(inflow, N_r=2049)
    errs = [abs(solve_background(inflow, N_r=n).rho_bar[0] - fine.rho_bar[0]) for n in (33, 65)]
    assert errs[0] / errs[1] > 12


def test_radial_sonic_point_is_refused():
    params = dict(REFERENCE, r0=1.0)
    with pytest.raises(SonicRadialVelocity):
        solve_background(GasInflow(**params), N_r=257)


def test_subsonic_annulus_has_no_critical_step():
    bg = solve_background(GasInflow(**dict(REFERENCE, r0=1.5)), N_r=129)
    assert bg.r_c is None
    with pytest.raises(NoSupersonicRegion):
        critical_step(bg)


@pytest.mark.parametrize("field,value", [("gamma", 1.0), ("A0", -1.0), ("rho0", 0.0),
                                         ("U10", 0.1), ("r0", 2.5)])
def test_inflow_validation(field, value):
    with pytest.raises(ValidationError):
        solve_background(GasInflow(**dict(REFERENCE, **{field: value})), N_r=64)


def test_supersonic_inflow_is_rejected():
    with pytest.raises(ValidationError):
        solve_background(GasInflow(**dict(REFERENCE, U20=2.0)), N_r=64)


def test_critical_step_is_the_profile_minimum(bg):
    sigma_star, r_star = critical_step(bg)
    dense = np.linspace(bg.r_grid[0], bg.r_c, 4001)
    prof = critical_step_profile(bg, dense)
    assert sigma_star <= np.nanmin(prof) * (1 + 1e-9)
    assert bg.r_grid[0] <= r_star <= bg.r_c


@pytest.mark.parametrize("fraction", [0.25, 0.5, 0.9])
def test_closed_form_identities(bg, sigma_star, fraction):
    checks = identity_checks(bg, fraction * sigma_star)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


@pytest.mark.parametrize("fraction,sign", [(0.999, 1), (1.001, -1)])
def test_ellipticity_threshold(bg, sigma_star, fraction, sign):
    t = coefficient_table(bg, fraction * sigma_star)
    assert np.sign(np.min(t.k22)) == sign


def test_centrifugal_correction_removes_k2(table):
    scale = np.max(np.abs(table.k2))
    assert np.max(np.abs(table.k2_euler)) < 1e-12 * max(scale, 1.0)


def test_zero_step_table(bg):
    t = coefficient_table(bg, 0.0)
    assert np.all(t.k2 == 0)
    assert np.all(t.k22 > 0)


@settings(max_examples=20, deadline=None)
@given(U10=st.floats(-0.45, -0.15), U20=st.floats(0.3, 0.6))
def test_sonic_radius_property(U10, U20):
    inflow = GasInflow(**dict(REFERENCE, U10=U10, U20=U20, r0=0.2))
    rc = sonic_radius_closed_form(inflow)
    # stop just outside the radial sonic point so the annulus stays admissible
    try:
        bg = solve_background(GasInflow(**dict(REFERENCE, U10=U10, U20=U20, r0=max(rc * 0.999, 0.3))),
                              N_r=512)
    except SonicRadialVelocity:
        return
    if bg.r_c is not None:
        assert abs(bg.r_c - rc) / rc < 1e-6


def test_background_csv(tmp_path, bg, table):
    path = tmp_path / "bg.csv"
    write_background_csv(path, bg, table)
    lines = path.read_text().splitlines()
    assert len(lines) == bg.N_r + 1
    head = lines[0].split(",")
    assert head[0] == "r"
    first = dict(zip(head, lines[1].split(",")))
    assert float(first["r"]) == bg.r_grid[0]


def test_critical_step_without_radial_inflow():
    """U10 = 0: sigma* = min 2 pi r / sqrt(M2^2 - 1) against a dense brute-force scan."""
    bg = solve_background(GasInflow(**dict(REFERENCE, U10=0.0, U20=1.2, r0=1.1)), N_r=1024)
    assert bg.r_c is not None and np.all(bg.M1_sq == 0)
    sigma_star, _ = critical_step(bg)
    r = np.linspace(bg.r_grid[0], bg.r_c, 100001)[:-1]
    _, m = bg.mach_sq_at(r)
    brute = np.min(2 * math.pi * r / np.sqrt(m - 1))
    assert abs(sigma_star - brute) / brute < 1e-6
