"""Coordinate charts of base manifolds and finite-difference curvature in an orthonormal frame."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..curvature import FrameCurvature, NablaCurvature
from ..models import CurvModel
from .fd import FDConfig, christoffel_from_jet, jet, orthonormal_frame, riemann_from_jet


class OracleDomainError(ValueError):
    """A stencil would leave the chart domain (or a fiber chart degenerates)."""


class UnknownChartError(KeyError):
    pass


@dataclass(frozen=True)
class MetricChart:
    """Metric g(x) on the box center +- half_width in R^dim.

    ``metric_fn`` maps points of shape (..., dim) to matrices (..., dim, dim).
    """

    dim: int
    half_width: float
    metric_fn: Callable[[np.ndarray], np.ndarray]
    label: str
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        return self.metric_fn(np.asarray(x, dtype=float))

    def check_interior(self, x, clearance: float) -> None:
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) + clearance > self.half_width):
            raise OracleDomainError(
                f"point {x} with stencil clearance {clearance:g} leaves the domain of {self.label}"
            )


def _conformal(kappa: float):
    """4|dx|^2/(1 + kappa|x|^2)^2: constant curvature kappa (stereographic for kappa > 0, ball for kappa < 0)."""

    def metric(x):
        r2 = np.sum(x * x, axis=-1)
        factor = 4.0 / (1.0 + kappa * r2) ** 2
        n = x.shape[-1]
        return factor[..., None, None] * np.eye(n)

    return metric


def _conformal_factor_log_grad(x, kappa: float) -> np.ndarray:
    return -2.0 * kappa * x / (1.0 + kappa * np.dot(x, x))


def conformal_christoffels(x, kappa: float) -> np.ndarray:
    """Analytic Gamma^k_ij = d_ik f_j + d_jk f_i - d_ij f_k for g = e^{2f} delta."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    df = _conformal_factor_log_grad(x, kappa)
    d = np.eye(n)
    return (np.einsum("ik,j->kij", d, df) + np.einsum("jk,i->kij", d, df)
            - np.einsum("ij,k->kij", d, df))


def flat(n: int) -> MetricChart:
    return MetricChart(n, 1.0, lambda x: np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n)).copy(),
                       f"flat:n={n}", {"n": n})


def sphere(n: int, kappa: float) -> MetricChart:
    if not kappa > 0:
        raise ValueError("sphere chart needs kappa > 0")
    return MetricChart(n, 0.8 / np.sqrt(kappa), _conformal(kappa),
                       f"sphere:n={n},kappa={kappa:g}", {"n": n, "kappa": kappa})


def hyperbolic(n: int, kappa: float) -> MetricChart:
    if not kappa < 0:
        raise ValueError("hyperbolic chart needs kappa < 0")
    # box inscribed well inside the ball of radius 1/sqrt(-kappa)
    w = 0.6 / np.sqrt(-kappa * n)
    return MetricChart(n, w, _conformal(kappa),
                       f"hyperbolic:n={n},kappa={kappa:g}", {"n": n, "kappa": kappa})


def product_s2s2(k1: float, k2: float) -> MetricChart:
    """S^2(k1) x S^2(k2): Einstein iff k1 = k2, never of constant curvature."""
    m1, m2 = _conformal(k1), _conformal(k2)

    def metric(x):
        out = np.zeros(x.shape[:-1] + (4, 4))
        out[..., :2, :2] = m1(x[..., :2])
        out[..., 2:, 2:] = m2(x[..., 2:])
        return out

    return MetricChart(4, 0.8 / np.sqrt(max(k1, k2)), metric,
                       f"product-s2s2:k1={k1:g},k2={k2:g}", {"k1": k1, "k2": k2})


def wavy(n: int, eps: float) -> MetricChart:
    """g_ij = d_ij + eps sin(x_i + x_j + (i+j)/2): a metric with non-parallel curvature."""
    idx = np.arange(n)
    phase = 0.5 * (idx[:, None] + idx[None, :])

    def metric(x):
        return np.eye(n) + eps * np.sin(x[..., :, None] + x[..., None, :] + phase)

    return MetricChart(n, 0.8, metric, f"wavy:n={n},eps={eps:g}", {"n": n, "eps": eps})


_REGISTRY = {
    "flat": (flat, {"n": int}),
    "sphere": (sphere, {"n": int, "kappa": float}),
    "hyperbolic": (hyperbolic, {"n": int, "kappa": float}),
    "product-s2s2": (product_s2s2, {"k1": float, "k2": float}),
    "wavy": (wavy, {"n": int, "eps": float}),
}


def chart_names() -> list[str]:
    return sorted(_REGISTRY)


def get_chart(spec: str) -> MetricChart:
    """Resolve a chart selector such as ``sphere:n=4,kappa=2``."""
    name, _, rest = spec.partition(":")
    if name not in _REGISTRY:
        raise UnknownChartError(f"unknown chart {name!r}; known: {', '.join(chart_names())}")
    factory, types = _REGISTRY[name]
    kwargs = {}
    for item in filter(None, rest.split(",")):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in types:
            raise ValueError(f"bad parameter {item!r} for chart {name!r}")
        kwargs[key] = types[key](val)
    missing = set(types) - set(kwargs)
    if missing:
        raise ValueError(f"chart {name!r} needs parameters {sorted(missing)}")
    return factory(**kwargs)


# -- base geometry -------------------------------------------------------------


def _jet_points(c: MetricChart, x, cfg: FDConfig, second: bool = True):
    x = np.asarray(x, dtype=float)
    c.check_interior(x, cfg.reach * cfg.h)
    return jet(c.metric_fn, x[None], cfg.h, cfg.order, second)


def christoffels_fd(c: MetricChart, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij at x."""
    g, dg = _jet_points(c, x, cfg, second=False)
    Gam, _, _ = christoffel_from_jet(g[0], dg[0])
    return Gam


def _coord_riemann(c: MetricChart, xs: np.ndarray, cfg: FDConfig):
    g, dg, d2g = jet(c.metric_fn, xs, cfg.h, cfg.order)
    Gam, R_up, R_low = riemann_from_jet(g, dg, d2g)
    return g, Gam, R_up, R_low


def frame_at(c: MetricChart, x) -> np.ndarray:
    return orthonormal_frame(c(np.asarray(x, dtype=float)))


def riemann_fd(c: MetricChart, x, cfg: FDConfig = FDConfig()) -> FrameCurvature:
    """Curvature at x in the Gram-Schmidt orthonormal frame."""
    x = np.asarray(x, dtype=float)
    c.check_interior(x, cfg.reach * cfg.h)
    g, _, _, R_low = _coord_riemann(c, x[None], cfg)
    E = orthonormal_frame(g[0])
    return FrameCurvature(np.einsum("abcd,ai,bj,ck,dl->ijkl", R_low[0], E, E, E, E))


def ricci_fd(c: MetricChart, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    from ..curvature import ricci

    return ricci(riemann_fd(c, x, cfg)).components


def scalar_fd(c: MetricChart, x, cfg: FDConfig = FDConfig()) -> float:
    return float(np.trace(ricci_fd(c, x, cfg)))


def nabla_riemann_fd(c: MetricChart, x, cfg: FDConfig = FDConfig()) -> NablaCurvature:
    """nabla R in the orthonormal frame: nested differences of the coordinate curvature."""
    x = np.asarray(x, dtype=float)
    H = cfg.outer_h
    c.check_interior(x, cfg.reach * (cfg.h + H))
    R0, dR = jet(lambda xs: _coord_riemann(c, xs, cfg)[3], x[None], H, cfg.order, second=False)
    R0, dR = R0[0], dR[0]
    g, dg = jet(c.metric_fn, x[None], cfg.h, cfg.order, second=False)
    Gam, _, _ = christoffel_from_jet(g[0], dg[0])
    cov = (
        dR
        - np.einsum("pma,pbcd->mabcd", Gam, R0)
        - np.einsum("pmb,apcd->mabcd", Gam, R0)
        - np.einsum("pmc,abpd->mabcd", Gam, R0)
        - np.einsum("pmd,abcp->mabcd", Gam, R0)
    )
    E = orthonormal_frame(g[0])
    return NablaCurvature(np.einsum("mabcd,mz,ai,bj,ck,dl->zijkl", cov, E, E, E, E, E))


def nabla_ricci_fd(c: MetricChart, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    return nabla_riemann_fd(c, x, cfg).contract().components


def model_fd(c: MetricChart, x, cfg: FDConfig = FDConfig(), with_nabla: bool = True) -> CurvModel:
    """CurvModel populated from finite differences at x."""
    R = riemann_fd(c, x, cfg)
    dR = nabla_riemann_fd(c, x, cfg) if with_nabla else None
    return CurvModel(R, dR, label=f"{c.label}@{np.round(np.asarray(x, dtype=float), 6).tolist()}")


def sample_base_points(c: MetricChart, count: int, seed: int = 0, fraction: float = 0.8) -> np.ndarray:
    """Fixed-seed quasi-random points in the centered sub-box covering ``fraction`` of the domain."""
    from scipy.stats import qmc

    pts = qmc.Halton(d=c.dim, scramble=True, seed=seed).random(count)
    return (2.0 * pts - 1.0) * fraction * c.half_width
