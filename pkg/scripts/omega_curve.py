"""Tabulate the limit reduced speed curve next to a finite (D, rho) column."""

import argparse

import numpy as np

from roadsir.dispersion import omega_reduced, reduced_speed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--dd", type=float, default=1e4)
    ap.add_argument("--rho", type=float, default=1e-3)
    args = ap.parse_args()

    print("lambda,omega,reduced_speed")
    for lam in np.linspace(0.0, args.lam_max, args.points):
        print(f"{lam:.4f},{omega_reduced(lam):.10f},{reduced_speed(lam, args.rho, args.dd):.10f}")


if __name__ == "__main__":
    main()
