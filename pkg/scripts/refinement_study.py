"""Euler residuals and transport defects of the converged solution under N_r doubling.

The max-norm ratios are printed next to ratios at a fixed physical radius,
which separate grid convergence from the steep layer next to the inner wall
(the background is close to radially sonic there). Try --r0 1.03 to see the
layer dominate the max norm.
"""

import argparse

import numpy as np

from heliflow import fixed_point_solve, reference_config
from heliflow.config import REFERENCE
from heliflow.residuals import EULER_NAMES
from heliflow.solver import build_context
from heliflow.verify import euler_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", default="257,513,1025")
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--r0", type=float, default=REFERENCE["r0"])
    ap.add_argument("--probe", type=float, default=None, help="fixed radius for pointwise ratios")
    args = ap.parse_args()
    REFERENCE["r0"] = args.r0
    levels = [int(x) for x in args.levels.split(",")]
    probe = args.probe or args.r0 + 0.1 * (REFERENCE["r1"] - args.r0)
    rows = []
    for n in levels:
        cfg = reference_config(eps=args.eps, N_r=n, sigma_grid=levels[-1]).solver_config()
        _, flow, rep = fixed_point_solve(cfg, residuals=False)
        res = euler_residual(flow, build_context(cfg)[0].bg)
        i = int(np.argmin(np.abs(flow.grid.r - probe)))
        rows.append((n, res, {k: float(np.max(np.abs(v[i]))) for k, v in res.pointwise.items()}))
        print(f"N_r={n}: {rep.iterations} iterations, {rep.wall_time:.1f}s")
    print(f"\n{'quantity':<16}" + "".join(f"{n:>12}" for n, *_ in rows) + "   max-norm ratios   ratios at r={:.3f}".format(probe))
    for k in EULER_NAMES + ("B", "A", "Vc"):
        src = "euler" if k in EULER_NAMES else "transport"
        vals = [getattr(r, src)[k] for _, r, _ in rows]
        pts = [p[k] for *_, p in rows]
        q = [vals[j] / vals[j + 1] for j in range(len(vals) - 1)]
        qp = [pts[j] / pts[j + 1] for j in range(len(pts) - 1)]
        print(f"{k:<16}" + "".join(f"{v:12.3e}" for v in vals) + "   "
              + " ".join(f"{x:5.2f}" for x in q) + "        " + " ".join(f"{x:5.2f}" for x in qp))


if __name__ == "__main__":
    main()
