"""Convergence of the finite-difference oracle: error against the closed form as h halves.

    python3 scripts/step_halving.py --chart wavy:n=3,eps=0.2 --order 4
"""

import argparse

import numpy as np

from unitbundle.oracle import t1m
from unitbundle.oracle.charts import get_chart
from unitbundle.oracle.fd import FDConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chart", default="wavy:n=3,eps=0.2")
    ap.add_argument("--order", type=int, choices=(2, 4), default=4)
    ap.add_argument("--steps", type=float, nargs="+", default=[0.04, 0.02, 0.01, 0.005, 0.0025, 1e-3])
    args = ap.parse_args()

    c = get_chart(args.chart)
    (x, u), = t1m.sample_points(c, 1, seed=1)
    print(f"chart {args.chart}, order {args.order}, x={np.round(x, 4)}, u={np.round(u, 4)}")
    print(f"{'h':>8} {'ricci err':>12} {'ratio':>7} {'curv err':>12} {'ratio':>7}")
    prev = None
    for h in args.steps:
        cfg = FDConfig(h=h, order=args.order)
        err = (t1m.ricci_deviation(c, x, u, cfg), t1m.curvature_deviation(c, x, u, cfg))
        ratios = ("", "") if prev is None else tuple(f"{p / e:7.2f}" for p, e in zip(prev, err))
        print(f"{h:>8g} {err[0]:>12.3e} {ratios[0]:>7} {err[1]:>12.3e} {ratios[1]:>7}")
        prev = err


if __name__ == "__main__":
    main()
