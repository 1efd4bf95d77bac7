"""Steady states with and without the road, split into gain and loss regions."""

import argparse

from roadsir import ModelParams, v_star
from roadsir.analysis import integral_balance, region_split
from roadsir.pde import GridSpec, SourceSpec, init_state, solve_steady


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.5)
    ap.add_argument("--road", type=float, default=10.0)
    args = ap.parse_args()

    p = ModelParams(d=1.0, D=args.road, alpha=1.0, beta=2.0, mu=1.0, nu=1.0, s0=1.0)
    g = GridSpec(lx=100.0, ly=10.0, h=args.h)
    src = SourceSpec("disk-indicator", (0.0, 0.0), 5.0, 1.0)
    road = solve_steady(init_state(g, "roadfield_uv", (src, None), p), p)
    plain = solve_steady(init_state(g, "scalar_v", (src, None), p), p)

    rep = region_split(road.state.bulk["v"], plain.state.bulk["v"], 1e-4 * v_star(p), g)
    bulk, edge = integral_balance(road, p)
    print(f"converged road={road.converged} plain={plain.converged}")
    print(f"E+ area {rep.e_plus_area:g}  bbox {rep.e_plus_bbox}")
    print(f"E- area {rep.e_minus_area:g}  bbox {rep.e_minus_bbox}")
    print(f"balance residuals bulk {bulk:.3e} road {edge:.3e}")


if __name__ == "__main__":
    main()
