"""Linear amplitude scaling of the converged perturbation, plus a grid-independence check."""

import argparse
from dataclasses import replace

from heliflow import fixed_point_solve, reference_config
from heliflow.solver import build_context
from heliflow.verify import SCALING_QUANTITIES, perturbation_norms, ratio_spread, scaling_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="1e-4,1e-3,1e-2")
    ap.add_argument("--N_r", type=int, default=257)
    ap.add_argument("--N_eta", type=int, default=64)
    ap.add_argument("--skip-grid", action="store_true")
    args = ap.parse_args()
    cfg = reference_config(N_r=args.N_r, N_eta=args.N_eta).solver_config()
    rows = scaling_study(cfg, [float(e) for e in args.eps.split(",")])
    print(f"{'eps':>8} {'iters':>5} " + " ".join(f"{k + '/eps':>10}" for k in SCALING_QUANTITIES))
    for row in rows:
        print(f"{row['eps']:8.0e} {row['iterations']:5d} "
              + " ".join(f"{row['ratios'][k]:10.4f}" for k in SCALING_QUANTITIES))
    print("relative spread: " + ", ".join(f"{k} {v:.2%}" for k, v in ratio_spread(rows).items()))
    if args.skip_grid:
        return
    # doubling both resolutions at fixed sigma
    fine = replace(cfg, N_r=2 * cfg.N_r - 1, N_eta=2 * cfg.N_eta)
    norms = []
    for c in (cfg, fine):
        _, flow, _ = fixed_point_solve(c, residuals=False)
        norms.append(perturbation_norms(flow, build_context(c)[0].bg))
    print("grid change of ||.||_C0 under doubling: "
          + ", ".join(f"{k} {abs(norms[1][k]['C0'] / norms[0][k]['C0'] - 1):.2%}"
                      for k in SCALING_QUANTITIES))


if __name__ == "__main__":
    main()
