"""Solve the reference configuration and write solution.csv / report.json."""

import argparse
import json
from pathlib import Path

from heliflow import RunConfig, fixed_point_solve
from heliflow.cli import write_solution_csv

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=HERE / "reference.json")
    ap.add_argument("--out", default="results/reference")
    args = ap.parse_args()
    cfg = RunConfig.load(args.config)
    _, flow, rep = fixed_point_solve(cfg.solver_config())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_solution_csv(out / "solution.csv", flow)
    (out / "report.json").write_text(json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n")
    print(f"sigma = {rep.sigma:.6g} (sigma* = {rep.sigma_star:.6g}), r_c = {rep.r_c:.6g}")
    print(f"{rep.iterations} iterations, {rep.wall_time:.1f}s")
    for k, (d, q) in enumerate(zip(rep.deltas, [None] + rep.ratios), start=1):
        print(f"  iter {k:2d}  step {d:.3e}" + (f"  ratio {q:.5f}" if q else ""))
    for k, v in rep.residuals.items():
        print(f"  residual {k:<15} {v:.3e}")
    print(f"max Mach {flow.mach.max():.4f}, min Mach {flow.mach.min():.4f}")


if __name__ == "__main__":
    main()
