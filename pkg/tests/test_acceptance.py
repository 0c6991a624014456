"""Acceptance criteria 1-11. Each test prints one PASS/FAIL line with its measured numbers."""

import json
import time

import numpy as np
import pytest

from unitbundle import cli
from unitbundle import classify as cl
from unitbundle import models as md
from unitbundle import utb
from unitbundle.curvature import sphere_moment
from unitbundle.oracle import t1m
from unitbundle.oracle.charts import get_chart, model_fd, sample_base_points
from unitbundle.oracle.fd import FDConfig


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[acceptance {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def test_01_surface_roots(verdict):
    t0 = time.perf_counter()
    grid = np.union1d(np.linspace(-2.0, 3.0, 398), [0.0, 1.0])
    results = {float(k): cl.classify_dim2(float(k)) for k in grid}
    roots = sorted(k for k, c in results.items() if c.is_eta_einstein)
    at_roots = max(abs(results[k].residual("eq-4.10")) for k in (0.0, 1.0))
    away = min(abs(c.residual("eq-4.10")) for k, c in results.items() if min(abs(k), abs(k - 1)) >= 0.05)
    dt = time.perf_counter() - t0
    ok = len(grid) == 400 and roots == [0.0, 1.0] and at_roots <= 1e-10 and away >= 1e-2 and dt < 1.0
    verdict(1, ok, f"grid={len(grid)} roots={roots} |r|@roots={at_roots:.1e} min|r|away={away:.3g} t={dt:.3f}s")


def test_02_three_dim(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    c = cl.classify_dim3(2 * np.eye(3))
    accepted = c.is_eta_einstein and c.tau == 6.0
    rejected, worst = 0, 0.0
    while rejected < 100:
        r = md.random_symmetric(3, rng)
        if np.max(np.abs(r - np.trace(r) / 3 * np.eye(3))) < 1e-6:
            continue
        rejected += not cl.classify_dim3(r).is_eta_einstein
        m = md.from_ricci_3d(r)
        rhs = 4 * m.norm_rho - m.tau ** 2
        worst = max(worst, abs(m.norm_R - rhs) / max(abs(rhs), 1e-300))
    dt = time.perf_counter() - t0
    ok = accepted and rejected == 100 and worst <= 1e-10 and dt < 1.0
    verdict(2, ok, f"rho=2g accepted={accepted} tau={c.tau} rejected={rejected}/100 "
                   f"norm-identity rel={worst:.1e} t={dt:.3f}s")


def test_03_constant_curvature_family(verdict):
    t0 = time.perf_counter()
    wrong, worst = [], 0.0
    for n in range(2, 9):
        roots = {1.0, float(n - 2)}
        for k in np.union1d(np.linspace(-3.0, n, 101), sorted(roots)):
            if cl.classify_const_curv(n, float(k)).is_eta_einstein != (float(k) in roots):
                wrong.append((n, float(k)))
        for k in roots:
            m = md.constant_curvature(n, k)
            al, be = utb.solve_alpha_beta(m)
            for u in np.eye(n):
                rep = utb.eta_einstein_residual(m, u, al, be)
                worst = max(worst, rep.residual_41, rep.residual_42, rep.residual_43)
            worst = max(worst, utb.eta_einstein_matrix_residual(m, np.eye(n)[0], al, be))
    dt = time.perf_counter() - t0
    ok = not wrong and worst <= 1e-10 and dt < 5.0
    verdict(3, ok, f"n=2..8 misclassified={wrong[:3]} max residual@roots={worst:.1e} t={dt:.3f}s")


def test_04_four_dim_einstein(verdict):
    t0 = time.perf_counter()
    s1 = cl.classify_4d_einstein((-1, -1, -1, 0, 0, 0))
    s2 = cl.classify_4d_einstein((-2, -2, -2, 0, 0, 0))
    spheres = s1.label() == "ConstCurv(1)" and s2.label() == "ConstCurv(2)"
    branch = [cl.classify_4d_einstein(p) for p in
              ((-1, 0.5, -1, -0.5, 1, -0.5), (-1, 0.5, -1, 0.5, -1, 0.5))]
    contradictions = all(c.verdict is cl.Verdict.CONTRADICTION and c.residual("eq-5.16-discriminant") == -156.0
                         for c in branch)
    sweep = [a for a in np.linspace(-3.0, 1.0, 100) if min(abs(a + 1), abs(a + 2)) > 1e-9]
    sweep_ok = all(cl.classify_4d_einstein((a, a, a, 0, 0, 0)).verdict is cl.Verdict.NOT_ETA_EINSTEIN
                   for a in sweep)
    dt = time.perf_counter() - t0
    ok = spheres and contradictions and sweep_ok and len(sweep) == 100 and dt < 1.0
    verdict(4, ok, f"{s1.label()},{s2.label()} branch={[c.label() for c in branch]} disc=-156 "
                   f"sweep {len(sweep)} rejected={sweep_ok} t={dt:.3f}s")


def test_05_einstein_bound(verdict):
    rng = np.random.default_rng(5)
    candidates = [(a, a, a, 0, 0, 0) for a in np.linspace(-3.0, 1.0, 401)]
    candidates += [(-1, -1, -1, 0, 0, 0), (-2, -2, -2, 0, 0, 0)]
    candidates += [md.random_st_params(rng).as_tuple() for _ in range(300)]
    candidates += [(-1, 0.5, -1, -0.5, 1, -0.5)]
    us = rng.normal(size=(4, 4))
    us /= np.linalg.norm(us, axis=1, keepdims=True)
    passing = []
    for p in candidates:
        m = md.singer_thorpe_4d(p)
        al, be = utb.solve_alpha_beta(m)
        if all(utb.eta_einstein_residual(m, u, al, be).is_eta_einstein for u in us):
            passing.append(float(m.tau))
    inside = all(utb.einstein_bounds(4, t) for t in passing)
    endpoints = all(any(abs(t - e) <= 1e-9 for t in passing) for e in (12.0, 24.0))
    verdict(5, inside and endpoints and bool(passing),
            f"passing tau={sorted(set(round(t, 9) for t in passing))} within [12,24]={inside} endpoints={endpoints}")


CHARTS_6 = ("flat:n=2", "sphere:n=2,kappa=1", "sphere:n=3,kappa=1", "sphere:n=4,kappa=2")


def test_06_oracle_agreement(verdict):
    t0 = time.perf_counter()
    cfg = FDConfig(h=1e-3, order=4)
    worst = {}
    for spec in CHARTS_6:
        c = get_chart(spec)
        worst[spec] = max(t1m.cross_validate(c, f, 10, cfg).report.worst
                          for f in ("conn-3.2", "curv-3.3", "ricci-3.4"))
    dt = time.perf_counter() - t0
    top = max(worst.values())
    verdict(6, top <= 1e-4 and dt < 300, f"max deviation={top:.1e} per chart="
            + ",".join(f"{k}:{v:.0e}" for k, v in worst.items()) + f" samples=10 t={dt:.1f}s")


def test_07_scalar_normalization(verdict):
    c = get_chart("sphere:n=2,kappa=1")
    cv = t1m.cross_validate(c, "scalar-3.5", 10)
    vals = t1m.scalar_values(c, *t1m.sample_points(c, 1)[0])
    al, be = utb.solve_alpha_beta(md.constant_curvature(2, 1.0))
    trace = 3 * al + be
    ok = (abs(vals["fd"] - 6.0) <= 1e-4 and cv.matching_normalization == "trace-consistent"
          and abs(trace - vals["fd"]) <= 1e-4 and (al, be) == pytest.approx((2.0, 0.0))
          and not cv.report.passed["as-printed"])
    verdict(7, ok, f"fd scalar={vals['fd']:.7f} trace-consistent={vals['trace-consistent']} "
                   f"(2n-1)a+b={trace} as-printed={vals['as-printed']} mismatched={not cv.report.passed['as-printed']}")


def test_08_constancy(verdict):
    c = get_chart("sphere:n=4,kappa=2")
    fit = t1m.fit_alpha_beta(c, 10)
    inv = t1m.base_invariants(c, 10)
    spread = float(np.ptp(inv, axis=0).max())
    ok = (fit.spread <= 1e-4 and abs(fit.alpha - 16) <= 1e-4 and abs(fit.beta + 16) <= 1e-4
          and spread <= 1e-6)
    verdict(8, ok, f"(alpha,beta)=({fit.alpha:.7f},{fit.beta:.7f}) spread={fit.spread:.1e} "
                   f"invariant spread={spread:.1e}")


def test_09_negative_control(verdict):
    c = get_chart("product-s2s2:k1=1,k2=1")
    m = model_fd(c, sample_base_points(c, 1)[0], with_nabla=False)
    einstein = md.is_einstein(m, 1e-6)
    fit = t1m.fit_alpha_beta(c, 10)
    verdict(9, einstein and fit.residual >= 0.1,
            f"base Einstein={einstein} (dev {md.einstein_deviation(m):.1e}) fit residual={fit.residual:.3f}")


def test_10_moment_identity(verdict):
    rng = np.random.default_rng(10)
    worst = 0.0
    for i in range(20):
        m = md.random_model((3, 4, 5)[i % 3], rng)
        exact = sphere_moment(m.R, "exact-moment")
        quad = sphere_moment(m.R, "quadrature", samples=100_000, seed=i)
        worst = max(worst, abs(exact - quad) / abs(exact))
    verdict(10, worst <= 1e-3, f"20 models n in {{3,4,5}} max rel diff={worst:.1e} (1e5 samples)")


def test_11_property_suites_under_default_cli(verdict, capsys):
    code = cli.main(["verify", "--deterministic"])
    rep = json.loads(capsys.readouterr().out)
    props = {c["check_id"]: c["pass"] for c in rep["checks"] if c["check_id"].startswith("properties/")}
    wanted = ("properties/curvature-symmetries", "properties/eq-4-5-kulkarni-nomizu",
              "properties/eq-4-24-4-26-traces")
    ok = code == 0 and all(props.get(k) for k in wanted) and rep["summary"]["failed"] == 0
    verdict(11, ok, f"exit={code} {rep['summary']['passed']}/{rep['summary']['total']} checks pass; "
                    + " ".join(f"{k.split('/')[1]}={props.get(k)}" for k in wanted))
