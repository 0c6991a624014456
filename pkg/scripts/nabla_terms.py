"""Show that the derivative-of-curvature terms matter off locally symmetric bases.

On the wavy chart nabla R is nonzero, so dropping it from the closed-form Ricci
tensor of T1M leaves a large mismatch against finite differences.

    python3 scripts/nabla_terms.py --chart wavy:n=3,eps=0.2
"""

import argparse

import numpy as np

from unitbundle import utb
from unitbundle.models import CurvModel
from unitbundle.oracle import t1m
from unitbundle.oracle.charts import get_chart, model_fd
from unitbundle.oracle.fd import FDConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chart", default="wavy:n=3,eps=0.2")
    ap.add_argument("--samples", type=int, default=5)
    args = ap.parse_args()
    c = get_chart(args.chart)
    cfg = FDConfig()

    print(f"{'max|nabla R|':>13} {'with nabla R':>13} {'without':>11}")
    for x, u in t1m.sample_points(c, args.samples):
        t = t1m.build_t1m_chart(c, u, cfg)
        y = t.point(x, u)
        geo = t1m.geometry_at(t, y)
        _, F = t1m.lifted_frame_coords(t, y, u)
        fd = F.T @ geo.ricci @ F
        m = model_fd(c, x, cfg)
        bare = CurvModel(m.R)
        with_dr = np.max(np.abs(fd - utb.ricci_bar_matrix(m, u)))
        without = np.max(np.abs(fd - utb.ricci_bar_matrix(bare, u)))
        print(f"{np.abs(m.dR.components).max():>13.4f} {with_dr:>13.2e} {without:>11.2e}")


if __name__ == "__main__":
    main()
