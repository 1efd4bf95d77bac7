"""Print c_SIR and c_SIR^T over a range of road diffusivities."""

import argparse

from roadsir import ModelParams, c_sir, c_sirt


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=float, default=1.0)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--road", type=float, nargs="+", default=[0.5, 1, 2, 2.5, 4, 10, 20, 50, 100])
    args = ap.parse_args()

    print("D,c_sir,c_sirt,ratio")
    for road in args.road:
        p = ModelParams(d=args.d, D=road, alpha=1.0, beta=args.beta, mu=1.0, nu=1.0, s0=1.0)
        cs, ct = c_sir(p), c_sirt(p)
        print(f"{road:g},{cs:.10f},{ct:.10f},{ct / cs:.6f}")


if __name__ == "__main__":
    main()
