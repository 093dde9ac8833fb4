"""Command line entry point: ``python -m heliflow <command> --config run.json``.

Exit codes: 0 success, 1 invalid input (bad config, sigma not below sigma*),
2 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .background import (background_defects, coefficient_table, critical_step, solve_background,
                         write_background_csv)
from .config import RunConfig
from .errors import HeliflowError, SolverError, ValidationError


def _threads() -> int:
    raw = os.environ.get("HELIFLOW_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"HELIFLOW_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError("HELIFLOW_THREADS must be >= 1")
    return n


def _emit(obj, path=None):
    text = json.dumps(obj, sort_keys=True)
    print(text)
    if path:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")


def write_solution_csv(path, flow) -> None:
    cols = flow.columns()
    R, E = flow.grid.mesh()
    names = list(cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "eta"] + names)
        flat = [R.ravel(), E.ravel()] + [np.asarray(cols[k]).ravel() for k in names]
        for row in zip(*flat):
            w.writerow([f"{v:.17g}" for v in row])


def cmd_background(cfg: RunConfig, args) -> dict:
    bg = solve_background(cfg.inflow(), N_r=cfg.N_r)
    table = coefficient_table(bg, cfg.sigma)
    if args.out:
        write_background_csv(args.out, bg, table)
    return {"r_c": bg.r_c, "kappa1": bg.kappa1, "kappa2": bg.kappa2, "B0": bg.B0,
            "sigma_star": table.sigma_star, "defects": background_defects(bg)}


def cmd_sigma_star(cfg: RunConfig, args) -> dict:
    bg = solve_background(cfg.inflow(), N_r=cfg.N_r)
    sigma_star, argmin = critical_step(bg)
    return {"sigma_star": sigma_star, "argmin_radius": argmin, "r_c": bg.r_c}


def cmd_solve(cfg: RunConfig, args) -> dict:
    from .solver import fixed_point_solve
    _, flow, report = fixed_point_solve(cfg.solver_config())
    if args.out:
        write_solution_csv(args.out, flow)
    doc = report.to_json()
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return {"iterations": report.iterations, "converged": report.converged,
            "final_delta": report.deltas[-1], "residuals": report.residuals}


def cmd_verify(cfg: RunConfig, args) -> dict:
    from . import verify as V
    bg = solve_background(cfg.inflow(), N_r=cfg.N_r)
    checks = V.identity_checks(bg, cfg.sigma)
    for k, v in background_defects(bg).items():
        checks.append(V.check_le(f"background_{k}", v, 1e-9))
    trials = V.equivalence_check(32, workers=_threads())
    worst = max(t.mismatch / t.discretization for t in trials)
    checks.append(V.check_le("equivalence_mismatch_over_discretization", worst, 5.0,
                             trials=len(trials)))
    checks.append(V.check_le("equivalence_exact_identity",
                             max(t.identity / t.scale for t in trials), 1e-10))
    if args.report:
        V.write_ledger(args.report, checks, {"sigma": cfg.sigma, "N_r": cfg.N_r})
    return {"passed": all(c.passed for c in checks),
            "checks": {c.name: {"value": c.value, "tol": c.tol, "passed": c.passed}
                       for c in checks}}


def cmd_mms(cfg: RunConfig, args) -> dict:
    from .verify import mms_study
    k = args.refine or 3
    if k < 2:
        raise ValidationError("--refine needs at least 2 levels")
    levels = tuple(129 * 2 ** i - 2 ** i + 1 for i in range(k))
    res = mms_study(cfg.inflow(), sigma_fraction=min(cfg.sigma / _sigma_star(cfg), 0.99),
                    levels=levels, N_eta=cfg.N_eta)
    out = {"N_r": res.N_r, "poisson_errors": res.poisson_errors,
           "poisson_ratios": res.poisson_ratios, "potential_errors": res.potential_errors,
           "potential_ratios": res.potential_ratios}
    if args.report:
        _emit(out, args.report)
        return None
    return out


def cmd_scaling(cfg: RunConfig, args) -> dict:
    from .verify import ratio_spread, scaling_study
    eps_list = [float(x) for x in (args.eps or "1e-4,1e-3,1e-2").split(",") if x.strip()]
    rows = scaling_study(cfg.solver_config(), eps_list)
    out = {"rows": rows, "spread": ratio_spread(rows)}
    if args.report:
        _emit(out, args.report)
        return None
    return out


def _sigma_star(cfg: RunConfig) -> float:
    return critical_step(solve_background(cfg.inflow(), N_r=cfg.N_r))[0]


COMMANDS = {
    "background": cmd_background,
    "sigma-star": cmd_sigma_star,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "mms": cmd_mms,
    "scaling": cmd_scaling,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heliflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="run configuration (JSON)")
        s.add_argument("--out", help="CSV output (background, solve)")
        s.add_argument("--report", help="JSON report output")
        if name == "scaling":
            s.add_argument("--eps", help="comma separated amplitudes")
        if name == "mms":
            s.add_argument("--refine", type=int, help="number of refinement levels")
    return p


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _threads()
        cfg = RunConfig.load(args.config)
        out = COMMANDS[args.command](cfg, args)
        if out is not None:
            _emit(out)
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, HeliflowError) as exc:
        stage = f" [stage: {exc.stage}]" if exc.stage else ""
        print(f"solver error{stage}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
