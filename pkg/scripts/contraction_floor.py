"""Contraction ratios of the fixed-point map, iterated past convergence.

Shows where the C1-proxy step reaches its round-off floor (C0 round-off times
the one-sided radial stencil at the walls), which bounds how precisely the
late ratios can be measured.
"""

import argparse

from heliflow import reference_config
from heliflow.assembly import PerturbationState
from heliflow.fields import c_norms
from heliflow.solver import apply_map_once, build_context


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--iters", type=int, default=9)
    ap.add_argument("--N_r", type=int, default=257)
    ap.add_argument("--eps", type=float, default=1e-3)
    args = ap.parse_args()
    ctx, _ = build_context(reference_config(eps=args.eps, N_r=args.N_r).solver_config())
    W = PerturbationState.zeros(ctx.grid)
    prev = None
    print(f"{'iter':>4} {'C0 step':>10} {'C1 step':>10} {'C1 ratio':>9}")
    for k in range(1, args.iters + 1):
        Wn = apply_map_once(W, ctx)
        c0, c1 = c_norms((Wn - W).arrays(), ctx.grid)
        q = f"{c1 / prev:9.5f}" if prev else ""
        print(f"{k:4d} {c0:10.3e} {c1:10.3e} {q}")
        prev, W = c1, Wn
    print(f"expected C1 floor ~ 1e-16 * 2/h_r = {2e-16 / ctx.grid.h_r:.1e}")


if __name__ == "__main__":
    main()
