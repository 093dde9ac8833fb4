"""Manufactured-solution convergence of the Poisson and potential solvers."""

import argparse

from heliflow import GasInflow
from heliflow.config import REFERENCE
from heliflow.verify import mms_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", default="129,257,513,1025")
    ap.add_argument("--fraction", type=float, default=0.5, help="sigma / sigma*")
    args = ap.parse_args()
    levels = tuple(int(x) for x in args.levels.split(","))
    res = mms_study(GasInflow(**REFERENCE), args.fraction, levels)
    print(f"{'N_r':>6} {'poisson':>12} {'ratio':>6} {'potential':>12} {'ratio':>6}")
    for i, n in enumerate(levels):
        qp = f"{res.poisson_ratios[i - 1]:6.3f}" if i else " " * 6
        qq = f"{res.potential_ratios[i - 1]:6.3f}" if i else " " * 6
        print(f"{n:6d} {res.poisson_errors[i]:12.4e} {qp} {res.potential_errors[i]:12.4e} {qq}")


if __name__ == "__main__":
    main()
