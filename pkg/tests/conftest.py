import pytest

from heliflow import (AnnulusGrid, GasInflow, coefficient_table, critical_step, reference_config,
                      solve_background)
from heliflow.config import REFERENCE


@pytest.fixture(scope="session")
def inflow():
    return GasInflow(**REFERENCE)


@pytest.fixture(scope="session")
def bg(inflow):
    return solve_background(inflow, N_r=257)


@pytest.fixture(scope="session")
def sigma_star(bg):
    return critical_step(bg)[0]


@pytest.fixture(scope="session")
def table(bg, sigma_star):
    return coefficient_table(bg, 0.5 * sigma_star)


@pytest.fixture(scope="session")
def grid(inflow, sigma_star):
    return AnnulusGrid(inflow.r0, inflow.r1, 257, 0.5 * sigma_star, 64)


@pytest.fixture(scope="session")
def reference_solve():
    from heliflow import fixed_point_solve
    cfg = reference_config(eps=1e-3, N_r=257, N_eta=64)
    return cfg, fixed_point_solve(cfg.solver_config())


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split()[1]):
            terminalreporter.write_line(line)
