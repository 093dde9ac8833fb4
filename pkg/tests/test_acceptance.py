"""Acceptance gates, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured values and
the wall time, then asserts. Wall-time limits count as part of the criterion.
Run ``pytest -v -s tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from heliflow import (GasInflow, coefficient_table, critical_step, fixed_point_solve,
                      reference_config, solve_background, sonic_radius_closed_form)
from heliflow.background import background_defects
from heliflow.config import REFERENCE
from heliflow.residuals import EULER_NAMES
from heliflow.verify import equivalence_check, mms_study, ratio_spread, scaling_study

SIGMA_GRID = 1025  # sigma* used for every refinement study, so sigma is fixed across grids
LINES = []  # collected for the terminal summary (see conftest.py)


def report(tag, title, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'}  {tag:<4} {title:<34} {detail}  [{elapsed:.2f}s < {limit:g}s]"
    print("\n" + line, flush=True)
    LINES.append(line)
    return ok


def nodewise_rel(a, b):
    """Max over nodes of |a - b| / |b|, with |b| floored at 1e-12 max|b|."""
    floor = 1e-12 * np.max(np.abs(b))
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def test_c1_background_fidelity():
    t0 = time.perf_counter()
    bg = solve_background(GasInflow(**REFERENCE), N_r=1024)
    exact = sonic_radius_closed_form(bg.inflow)
    rc_err = abs(bg.r_c - exact) / exact
    defects = background_defects(bg)
    worst = max(defects.values())
    ok = report("C1", "background fidelity", rc_err <= 1e-7 and worst <= 1e-9,
                f"r_c rel err {rc_err:.2e} (<=1e-7), invariants {worst:.2e} (<=1e-9)",
                time.perf_counter() - t0, 1.0)
    assert ok


def test_c2_closed_form_identities():
    t0 = time.perf_counter()
    bg = solve_background(GasInflow(**REFERENCE), N_r=1024)
    sigma_star = critical_step(bg)[0]
    errs = []
    for frac in (0.25, 0.5, 0.9):
        t = coefficient_table(bg, frac * sigma_star)
        errs.append(max(nodewise_rel(t.k2, t.forms["k2_alt"]),
                        nodewise_rel(t.k22, t.forms["k22_alt"])))
    ok = report("C2", "k2/k22 closed forms", max(errs) <= 1e-6,
                "node-wise rel err " + ", ".join(f"{e:.1e}" for e in errs) + " (<=1e-6)",
                time.perf_counter() - t0, 1.0)
    assert ok


def test_c3_ellipticity_threshold():
    t0 = time.perf_counter()
    bg = solve_background(GasInflow(**REFERENCE), N_r=1024)
    sigma_star = critical_step(bg)[0]
    below = float(np.min(coefficient_table(bg, 0.999 * sigma_star).k22))
    above = float(np.min(coefficient_table(bg, 1.001 * sigma_star).k22))
    ok = report("C3", "ellipticity threshold", below > 0 > above,
                f"min k22 {below:+.2e} at 0.999s*, {above:+.2e} at 1.001s*",
                time.perf_counter() - t0, 1.0)
    assert ok


def test_c4_elliptic_order():
    t0 = time.perf_counter()
    res = mms_study(GasInflow(**REFERENCE), levels=(129, 257, 513), N_eta=64)
    ratios = res.poisson_ratios + res.potential_ratios
    ok = report("C4", "elliptic solver order", all(3.5 <= q <= 4.5 for q in ratios),
                "ratios poisson " + ", ".join(f"{q:.3f}" for q in res.poisson_ratios)
                + "; potential " + ", ".join(f"{q:.3f}" for q in res.potential_ratios) + " (4 +- 0.5)",
                time.perf_counter() - t0, 10.0)
    assert ok


def test_c5_equivalence_oracle():
    t0 = time.perf_counter()
    trials = equivalence_check(32, factor=5.0)
    worst = max(t.mismatch / t.discretization for t in trials)
    npass = sum(t.passed for t in trials)
    ok = report("C5", "equivalence oracle", npass == 32,
                f"{npass}/32 trials, worst mismatch/discretization {worst:.2f} (<=5)",
                time.perf_counter() - t0, 30.0)
    assert ok


def monotone_after(ratios, first_iteration=3):
    """Ratios q_k = d_k / d_{k-1} (k >= 2) are non-increasing from iteration ``first_iteration``."""
    tail = ratios[first_iteration - 2:]
    return all(b <= a for a, b in zip(tail, tail[1:]))


def test_c6_fixed_point_convergence():
    t0 = time.perf_counter()
    cfg = reference_config(eps=1e-3, sigma_fraction=0.5, N_r=257, N_eta=64)
    _, _, rep = fixed_point_solve(replace(cfg.solver_config(), max_iters=30), residuals=False)
    ok_conv = rep.converged and rep.iterations <= 30 and rep.deltas[-1] < 1e-11
    ok_ratio = all(q < 1 for q in rep.ratios) and monotone_after(rep.ratios)
    ok = report("C6", "fixed-point convergence", ok_conv and ok_ratio,
                f"{rep.iterations} iterations, final step {rep.deltas[-1]:.1e}, ratios "
                + ", ".join(f"{q:.5f}" for q in rep.ratios),
                time.perf_counter() - t0, 60.0)
    assert ok


def test_c7_eps_scaling():
    t0 = time.perf_counter()
    cfg = reference_config(eps=1e-3, N_r=257, N_eta=64).solver_config()
    rows = scaling_study(cfg, [1e-4, 1e-3, 1e-2])
    spread = ratio_spread(rows)
    zero = scaling_study(cfg, [0.0])[0]
    zero_exact = all(v["C0"] == 0 and v["C1"] == 0 for v in zero["norms"].values())
    ok = report("C7", "amplitude scaling", max(spread.values()) <= 0.10 and zero_exact,
                "spread " + ", ".join(f"{k} {v:.2%}" for k, v in spread.items())
                + f" (<=10%); eps=0 exact zeros: {zero_exact}",
                time.perf_counter() - t0, 300.0)
    assert ok


@pytest.fixture(scope="module")
def refinement():
    """Converged eps = 1e-3 solutions at N_r = 257, 513, 1025 with sigma held fixed."""
    out, times = {}, {}
    for n in (257, 513, 1025):
        t0 = time.perf_counter()
        cfg = reference_config(eps=1e-3, N_r=n, N_eta=64, sigma_grid=SIGMA_GRID)
        out[n] = fixed_point_solve(cfg.solver_config())[2]
        times[n] = time.perf_counter() - t0
    return out, times


def test_c8_transport_defects(refinement):
    reps, times = refinement
    a, b = reps[257].transport_defects, reps[513].transport_defects
    ratios = {k: a[k] / b[k] for k in a}
    ok = report("C8", "transport defects", all(q >= 3 for q in ratios.values()),
                "257->513 ratios " + ", ".join(f"{k} {q:.2f}" for k, q in ratios.items())
                + " (>=3); defects at 513 " + ", ".join(f"{v:.1e}" for v in b.values()),
                times[257] + times[513], 60.0)
    assert ok


def test_c9_euler_residual_gate(refinement):
    reps, times = refinement
    a, b = reps[513].residuals, reps[1025].residuals
    ratios = {k: a[k] / b[k] for k in EULER_NAMES}
    ok = report("C9", "Euler residual gate", all(3.5 <= q <= 4.5 for q in ratios.values()),
                "513->1025 ratios " + ", ".join(f"{k} {q:.2f}" for k, q in ratios.items())
                + " (3.5-4.5)",
                times[513] + times[1025], 120.0)
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
