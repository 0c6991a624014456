"""Compare the finite-difference scalar curvature of T1M with both closed-form normalizations.

    python3 scripts/normalization_check.py sphere:n=2,kappa=1 sphere:n=4,kappa=2 wavy:n=3,eps=0.2
"""

import argparse

from unitbundle.oracle import t1m
from unitbundle.oracle.charts import get_chart
from unitbundle.oracle.fd import FDConfig

DEFAULT = ["sphere:n=2,kappa=1", "sphere:n=3,kappa=1", "sphere:n=4,kappa=2", "hyperbolic:n=3,kappa=-1",
           "product-s2s2:k1=1,k2=2", "wavy:n=3,eps=0.2"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("charts", nargs="*", default=DEFAULT)
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--h", type=float, default=1e-3)
    args = ap.parse_args()
    cfg = FDConfig(h=args.h)

    print(f"{'chart':<26} {'fd':>12} {'trace-consistent':>17} {'as-printed':>12} {'fd/as-printed':>14}")
    for spec in args.charts:
        c = get_chart(spec)
        for x, u in t1m.sample_points(c, args.samples):
            v = t1m.scalar_values(c, x, u, cfg)
            ratio = v["fd"] / v["as-printed"] if v["as-printed"] else float("nan")
            print(f"{spec:<26} {v['fd']:>12.6f} {v['trace-consistent']:>17.6f} {v['as-printed']:>12.6f} {ratio:>14.6f}")


if __name__ == "__main__":
    main()
