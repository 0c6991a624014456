"""The verification suite behind ``unitbundle verify``.

Each group function returns :class:`~unitbundle.report.CheckRecord` objects.
Groups are selected with ``--only``; a filter token matches a group name or
any substring of a check-id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import classify as cl
from . import models as md
from . import utb
from .curvature import kulkarni_nomizu, norm_sq_curv, sphere_moment, validate_curvature
from .oracle import t1m
from .oracle.charts import get_chart, model_fd, sample_base_points
from .oracle.fd import FDConfig
from .report import CheckRecord

ORACLE_CHARTS = ("flat:n=2", "sphere:n=2,kappa=1", "sphere:n=3,kappa=1", "sphere:n=4,kappa=2")


@dataclass
class SuiteContext:
    fd: FDConfig = field(default_factory=FDConfig)
    samples: int = 10
    seed: int = 0
    quadrature_samples: int = 100_000

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def _mismatch(check_id, equation, bad: list, inputs=None, values=None) -> CheckRecord:
    vals = dict(values or {})
    vals["mismatches"] = bad[:10]
    return CheckRecord(check_id, equation, float(len(bad)), 0.0, inputs=inputs or {}, values=vals,
                       overridable=False)


# -- 2D ------------------------------------------------------------------------------


def dim2_grid() -> np.ndarray:
    return np.union1d(np.linspace(-2.0, 3.0, 398), [0.0, 1.0])


def group_dim2(ctx: SuiteContext) -> list[CheckRecord]:
    grid = dim2_grid()
    res = {k: cl.classify_dim2(k) for k in grid}
    roots = [float(k) for k, c in res.items() if c.is_eta_einstein]
    bad = [float(k) for k, c in res.items() if c.is_eta_einstein != (k in (0.0, 1.0))]
    at_roots = max(abs(res[k].residual("eq-4.10")) for k in (0.0, 1.0))
    far = [k for k in grid if min(abs(k), abs(k - 1.0)) >= 0.05]
    away = min(abs(res[k].residual("eq-4.10")) for k in far)
    return [
        _mismatch("dim2/eq-4.10-roots", "eq-4.10", bad, {"grid": [-2.0, 3.0, len(grid)]}, {"roots": roots}),
        CheckRecord("dim2/eq-4.10-residual-at-roots", "eq-4.10", at_roots, 1e-10),
        CheckRecord("dim2/eq-4.10-separation", "eq-4.10", away, 1e-2, "ge",
                    values={"points": len(far)}, overridable=False),
    ]


# -- 3D ------------------------------------------------------------------------------


def _random_nonproportional_ricci(rng, count: int) -> list[np.ndarray]:
    out = []
    while len(out) < count:
        r = md.random_symmetric(3, rng)
        if np.max(np.abs(r - np.trace(r) / 3 * np.eye(3))) > 1e-3:
            out.append(r)
    return out


def group_dim3(ctx: SuiteContext) -> list[CheckRecord]:
    c = cl.classify_dim3(2 * np.eye(3))
    ok_2g = c.is_eta_einstein and c.kappa == 1.0 and abs(c.tau - 6.0) <= 1e-12
    rs = _random_nonproportional_ricci(ctx.rng(3), 100)
    bad = [i for i, r in enumerate(rs) if cl.classify_dim3(r).is_eta_einstein]
    worst = 0.0
    for r in _random_nonproportional_ricci(ctx.rng(4), 100):
        m = md.from_ricci_3d(r)
        rhs = 4 * m.norm_rho - m.tau ** 2
        worst = max(worst, abs(m.norm_R - rhs) / max(1.0, abs(rhs)))
    return [
        CheckRecord("dim3/eq-4-4-rho-2g", "eq-4-4", c.residual("eq-4-3") if ok_2g else np.inf, 1e-10,
                    values={"label": c.label(), "tau": c.tau}),
        _mismatch("dim3/eq-4-3-rejects-random", "eq-4-3", bad, {"count": 100}),
        CheckRecord("dim3/eq-4-2-norm-identity", "eq-4-2", worst, 1e-10, values={"models": 100}),
    ]


# -- constant curvature ------------------------------------------------------------


def const_curv_roots(n: int) -> set[float]:
    return {1.0, float(n - 2)}


def group_const_curv(ctx: SuiteContext) -> list[CheckRecord]:
    bad, worst = [], 0.0
    for n in range(2, 9):
        grid = np.union1d(np.linspace(-3.0, float(n), 200), sorted(const_curv_roots(n)))
        for k in grid:
            c = cl.classify_const_curv(n, float(k))
            if c.is_eta_einstein != (float(k) in const_curv_roots(n)):
                bad.append([n, float(k)])
        for k in const_curv_roots(n):
            c = cl.classify_const_curv(n, k)
            worst = max(worst, *(c.residual(e) for e in ("eq-4.1", "eq-4.2", "eq-4.3")))
    agree = [float(k) for k in dim2_grid()
             if cl.classify_dim2(k).is_eta_einstein != cl.classify_const_curv(2, float(k)).is_eta_einstein]
    return [
        _mismatch("const-curv/thm3-roots", "thm-3", bad, {"n": [2, 8], "kappa_grid": [-3.0, "n", 200]}),
        CheckRecord("const-curv/eq-4.1-4.3-at-roots", "eq-4.1", worst, 1e-10),
        _mismatch("const-curv/dim2-agreement", "eq-4.10", agree),
    ]


# -- 4D Einstein ------------------------------------------------------------------------

TWO_EQUAL_BRANCH = [
    (-1.0, 0.5, -1.0, -0.5, 1.0, -0.5),
    (-1.0, 0.5, -1.0, 0.5, -1.0, 0.5),
    (0.5, -1.0, -1.0, 1.0, -0.5, -0.5),
    (-1.0, -1.0, 0.5, -0.5, -0.5, 1.0),
]


def equal_sweep() -> np.ndarray:
    pts = np.linspace(-3.0, 1.0, 103)
    pts = pts[np.min(np.abs(pts[:, None] - np.array([-1.0, -2.0])[None]), axis=1) > 1e-6]
    return pts[:100]


def group_st4d(ctx: SuiteContext) -> list[CheckRecord]:
    bad = []
    for p, kappa, tau in (((-1, -1, -1, 0, 0, 0), 1.0, 12.0), ((-2, -2, -2, 0, 0, 0), 2.0, 24.0)):
        c = cl.classify_4d_einstein(p)
        if not (c.is_eta_einstein and abs(c.kappa - kappa) <= 1e-12 and abs(c.tau - tau) <= 1e-12):
            bad.append([list(p), c.label()])
    contra, margins = [], []
    for p in TWO_EQUAL_BRANCH:
        c = cl.classify_4d_einstein(p)
        ok = (c.verdict is cl.Verdict.CONTRADICTION and c.residual("eq-5.16-discriminant") == -156.0)
        if not ok:
            contra.append([list(p), c.label()])
        else:
            margins.append(abs(c.residual("eq-5.16")) / c.tol)
    sweep = [float(a) for a in equal_sweep()
             if cl.classify_4d_einstein((a, a, a, 0, 0, 0)).is_eta_einstein]
    rng = ctx.rng(5)
    for _ in range(200):
        c = cl.classify_4d_einstein(md.random_st_params(rng))
        if c.verdict is cl.Verdict.CONTRADICTION and c.branch != "degenerate-branch":
            margins.append(abs(c.certificate[0][1]) / c.tol)
    return [
        _mismatch("st4d/eq-5.17-roots", "eq-5.17", bad),
        _mismatch("st4d/eq-5.16-contradiction", "eq-5.16", contra, {"branch_values": TWO_EQUAL_BRANCH}),
        _mismatch("st4d/equal-sweep-rejects", "eq-5.17", sweep, {"a_range": [-3.0, 1.0, 100]}),
        CheckRecord("st4d/contradiction-margin", "eq-5.16", min(margins), 10.0, "ge",
                    values={"contradictions": len(margins)}, overridable=False),
    ]


# -- Einstein bound ---------------------------------------------------------------------


def group_bounds(ctx: SuiteContext) -> list[CheckRecord]:
    rng = ctx.rng(6)
    candidates = [md.singer_thorpe_4d(md.STParams(a, a, a, 0, 0, 0)) for a in np.linspace(-3, 1, 401)]
    candidates += [md.singer_thorpe_4d(md.random_st_params(rng)) for _ in range(200)]
    us = md.random_symmetric(4, rng)[:3]
    us = us / np.linalg.norm(us, axis=1, keepdims=True)
    passing, outside = [], []
    for m in candidates:
        al, be = utb.solve_alpha_beta(m)
        if all(utb.eta_einstein_residual(m, u, al, be).is_eta_einstein for u in us):
            passing.append(m.tau)
            if not utb.einstein_bounds(4, m.tau):
                outside.append(m.tau)
    endpoints = [t for t in (12.0, 24.0) if not any(abs(x - t) <= 1e-9 for x in passing)]
    return [
        _mismatch("bounds/eq-4-7-interval", "eq-4-7", outside, values={"passing_tau": sorted(set(np.round(passing, 9)))}),
        _mismatch("bounds/eq-4-7-endpoints", "eq-4-7", endpoints),
    ]


# -- oracle ------------------------------------------------------------------------------


def _chart_key(spec: str) -> str:
    return spec.replace(":", "-").replace(",", "-").replace("=", "")


def group_oracle(ctx: SuiteContext) -> list[CheckRecord]:
    recs = []
    fdinfo = {"h": ctx.fd.h, "order": ctx.fd.order, "samples": ctx.samples}
    for spec in ORACLE_CHARTS:
        c = get_chart(spec)
        for formula, eq in (("conn-3.2", "eq-3.2"), ("curv-3.3", "eq-3.3"), ("ricci-3.4", "eq-3.4")):
            cv = t1m.cross_validate(c, formula, ctx.samples, ctx.fd, ctx.seed)
            recs.append(CheckRecord(f"oracle/{_chart_key(spec)}/{eq}", eq, cv.report.worst, 1e-4,
                                    inputs={"chart": spec, **fdinfo}))
        rep = t1m.validate_contact_structure(c, ctx.samples, ctx.fd, ctx.seed)
        recs.append(CheckRecord(f"oracle/{_chart_key(spec)}/eq-2.1-contact", "eq-2.1", rep.worst, 1e-6,
                                inputs={"chart": spec, **fdinfo}, values=rep.violations))
    c = get_chart("sphere:n=2,kappa=1")
    cv = t1m.cross_validate(c, "scalar-3.5", ctx.samples, ctx.fd, ctx.seed)
    x, u = t1m.sample_points(c, 1, ctx.seed)[0]
    vals = t1m.scalar_values(c, x, u, ctx.fd)
    recs.append(CheckRecord(
        "oracle/normalization/eq-3.5", "eq-3.5", abs(vals["fd"] - 6.0), 1e-4,
        inputs={"chart": "sphere:n=2,kappa=1", **fdinfo},
        values={"fd_scalar": vals["fd"], "trace_consistent": vals["trace-consistent"],
                "as_printed": vals["as-printed"], "as_printed_mismatch": abs(vals["fd"] - vals["as-printed"]),
                "matching_normalization": cv.matching_normalization,
                "trace_identity_2n-1_alpha_plus_beta": 3 * 2.0 + 0.0}))
    recs.append(CheckRecord("oracle/normalization/eq-3.5-trace-consistent", "eq-3.5",
                            cv.report.violations["trace-consistent"], 1e-4,
                            values={"as_printed_deviation": cv.report.violations["as-printed"]}))
    return recs


def group_constancy(ctx: SuiteContext) -> list[CheckRecord]:
    c = get_chart("sphere:n=4,kappa=2")
    fit = t1m.fit_alpha_beta(c, max(10, ctx.samples), ctx.fd, ctx.seed)
    recs = [
        CheckRecord("constancy/s4-k2/fit-alpha-beta", "thm-1.1",
                    max(abs(fit.alpha - 16.0), abs(fit.beta + 16.0)), 1e-4,
                    values={"alpha": fit.alpha, "beta": fit.beta, "residual": fit.residual}),
        CheckRecord("constancy/s4-k2/fit-spread", "thm-1.1", fit.spread, 1e-4),
    ]
    for spec in ("sphere:n=4,kappa=2", "sphere:n=4,kappa=1"):
        inv = t1m.base_invariants(get_chart(spec), max(10, ctx.samples), ctx.fd, ctx.seed)
        recs.append(CheckRecord(f"constancy/{_chart_key(spec)}/base-invariants", "thm-1.2",
                                float(np.max(np.ptp(inv, axis=0))), 1e-6,
                                values={"tau": inv[0, 0], "norm_rho": inv[0, 1], "norm_R": inv[0, 2]}))
    return recs


def group_negative_control(ctx: SuiteContext) -> list[CheckRecord]:
    c = get_chart("product-s2s2:k1=1,k2=1")
    x = sample_base_points(c, 1, ctx.seed)[0]
    m = model_fd(c, x, ctx.fd, with_nabla=False)
    fit = t1m.fit_alpha_beta(c, max(10, ctx.samples), ctx.fd, ctx.seed)
    return [
        CheckRecord("negative-control/s2xs2/base-einstein", "thm-7", md.einstein_deviation(m), 1e-6),
        CheckRecord("negative-control/s2xs2/fit-residual", "thm-7", fit.residual, 0.1, "ge",
                    values={"alpha": fit.alpha, "beta": fit.beta, "spread": fit.spread}, overridable=False),
    ]


# -- moment identity and property suites ---------------------------------------------------


def group_moment(ctx: SuiteContext) -> list[CheckRecord]:
    rng = ctx.rng(7)
    worst = 0.0
    for i in range(20):
        m = md.random_model((3, 4, 5)[i % 3], rng)
        ex = sphere_moment(m.R, "exact-moment")
        qu = sphere_moment(m.R, "quadrature", ctx.quadrature_samples, ctx.seed + i)
        worst = max(worst, abs(ex - qu) / abs(ex))
    worst49 = 0.0
    for n in range(2, 9):
        for k in const_curv_roots(n):
            m = md.constant_curvature(n, k)
            worst49 = max(worst49, utb.check_identity_49(m, *utb.solve_alpha_beta(m)))
    return [
        CheckRecord("moment/eq-4.9-quadrature", "eq-4.9", worst, 1e-3,
                    inputs={"models": 20, "samples": ctx.quadrature_samples}),
        CheckRecord("moment/eq-4.9-at-roots", "eq-4.9", worst49, 1e-10),
    ]


def group_properties(ctx: SuiteContext) -> list[CheckRecord]:
    rng = ctx.rng(8)
    sym = 0.0
    for n in range(2, 7):
        for _ in range(5):
            sym = max(sym, validate_curvature(md.random_curvature(n, rng)).worst)
    kn = 0.0
    for n in range(3, 7):
        for _ in range(5):
            m = md.random_einstein_model(n, rng)
            g = np.eye(n)
            lhs = norm_sq_curv(m.R.components + m.tau / (2 * n * (n - 1)) * kulkarni_nomizu(g, g))
            rhs = m.norm_R - 2 * m.tau ** 2 / (n * (n - 1))
            kn = max(kn, abs(lhs - rhs) / max(1.0, abs(m.norm_R)))
    tr = 0.0
    for n in range(2, 9):
        for k in const_curv_roots(n):
            m = md.constant_curvature(n, k)
            t = utb.trace_identities(m, np.eye(n)[0], *utb.solve_alpha_beta(m))
            tr = max(tr, t.eq_4_24, t.eq_4_25, t.eq_4_26)
    rb = 0.0
    for n in (2, 3, 4):
        m = md.random_model(n, rng)
        u = md.random_symmetric(n, rng)[0]
        u /= np.linalg.norm(u)
        rb = max(rb, abs(np.trace(utb.ricci_bar_matrix(m, u)) - utb.scalar_bar(m, u)) / max(1.0, m.scale ** 2))
    bianchi = 0.0
    for spec in ("sphere:n=3,kappa=1", "hyperbolic:n=3,kappa=-1", "product-s2s2:k1=1,k2=2", "wavy:n=3,eps=0.2"):
        c = get_chart(spec)
        x = sample_base_points(c, 1, ctx.seed)[0]
        bianchi = max(bianchi, md.nabla_curvature_violations(model_fd(c, x, ctx.fd).dR.components)["second_bianchi"])
    return [
        CheckRecord("properties/curvature-symmetries", "curvature-axioms", sym, 1e-12),
        CheckRecord("properties/eq-4-5-kulkarni-nomizu", "eq-4-5", kn, 1e-10),
        CheckRecord("properties/eq-4-24-4-26-traces", "eq-4-26", tr, 1e-10),
        CheckRecord("properties/eq-3.5-trace-consistency", "eq-3.5", rb, 1e-10),
        CheckRecord("properties/second-bianchi-fd", "second-bianchi", bianchi, 1e-5),
    ]


GROUPS = {
    "dim2": group_dim2,
    "dim3": group_dim3,
    "const-curv": group_const_curv,
    "st4d": group_st4d,
    "bounds": group_bounds,
    "oracle": group_oracle,
    "constancy": group_constancy,
    "negative-control": group_negative_control,
    "moment": group_moment,
    "properties": group_properties,
}


def run_suite(ctx: SuiteContext, only: list[str] | None = None) -> list[CheckRecord]:
    """Run the selected groups.

    A token equal to a group name selects that group; any other token keeps
    the checks whose id contains it (every group runs to find them).
    """
    tokens = [t for t in (only or []) if t]
    free = [t for t in tokens if t not in GROUPS]
    records = []
    for name, fn in GROUPS.items():
        if tokens and name not in tokens and not free:
            continue
        for rec in fn(ctx):
            if not tokens or name in tokens or any(t in rec.check_id for t in free):
                records.append(rec)
    return records
