"""Sweep constant curvature kappa in each dimension and tabulate where T1M is eta-Einstein.

    python3 scripts/const_curv_sweep.py --nmax 8 --points 41
"""

import argparse

import numpy as np

from unitbundle import classify as cl


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=8)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--kmin", type=float, default=-2.0)
    ap.add_argument("--kmax", type=float, default=7.0)
    args = ap.parse_args()

    print(f"{'n':>2}  {'eta-Einstein at kappa':<24} {'alpha':>8} {'beta':>9}  min |eq-4.10| off roots")
    for n in range(2, args.nmax + 1):
        grid = np.union1d(np.linspace(args.kmin, args.kmax, args.points), [1.0, float(n - 2)])
        results = [(float(k), cl.classify_const_curv(n, float(k))) for k in grid]
        hits = [(k, c) for k, c in results if c.is_eta_einstein]
        off = [abs(c.residual("eq-4.10")) for k, c in results if not c.is_eta_einstein]
        for i, (k, c) in enumerate(hits):
            head = f"{n:>2}" if i == 0 else "  "
            tail = f"  {min(off):.3g}" if i == 0 and off else ""
            print(f"{head}  {k:<24g} {c.alpha:>8.3f} {c.beta:>9.3f}{tail}")


if __name__ == "__main__":
    main()
