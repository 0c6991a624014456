"""Finite-difference geometry of T1M built from a base chart.

The tangent bundle TM carries coordinates z = (x, v) where v are the
coordinate components of the tangent vector. The unit bundle is parametrized
by y = (x, s): s holds n-1 of the components w of v in the Gram-Schmidt frame
E(x) and the remaining component is solved from |w| = 1. The metric on T1M is
the pullback of the Sasaki metric, divided by four.

Lifted vectors from :mod:`unitbundle.utb` are converted to y-coordinates, so
the closed-form formulas can be compared with curvature computed directly
from the 2-jet of the pulled-back metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..curvature import ValidationReport
from ..models import CurvModel
from .. import utb
from .charts import MetricChart, OracleDomainError, model_fd, sample_base_points
from .fd import FDConfig, christoffel_from_jet, jet, orthonormal_frame, riemann_from_jet, ricci_from_riemann

# dropped fiber component must stay at least this large in absolute value
FIBER_SWITCH = 0.6
# d eta(X, Y) = DETA_FACTOR (X eta(Y) - Y eta(X) - eta([X, Y]))
DETA_FACTOR = 0.5


@dataclass(frozen=True)
class FiberScheme:
    """w_drop = sign * sqrt(1 - |s|^2); the other components of w are s."""

    n: int
    drop: int
    sign: float

    @classmethod
    def for_direction(cls, w, default_drop: int | None = None) -> "FiberScheme":
        w = np.asarray(w, dtype=float)
        n = w.shape[0]
        drop = n - 1 if default_drop is None else default_drop
        if abs(w[drop]) < FIBER_SWITCH:
            drop = int(np.argmax(np.abs(w)))
        return cls(n, drop, 1.0 if w[drop] >= 0 else -1.0)

    def keep(self) -> np.ndarray:
        return np.array([i for i in range(self.n) if i != self.drop])

    def coords(self, w) -> np.ndarray:
        return np.asarray(w, dtype=float)[..., self.keep()]

    def unit(self, s: np.ndarray) -> np.ndarray:
        """w(s) for s of shape (..., n-1)."""
        r2 = np.sum(s * s, axis=-1)
        if np.any(r2 >= 1.0 - FIBER_SWITCH ** 2 / 4):
            raise OracleDomainError("fiber chart degenerates: dropped component too small")
        w = np.empty(s.shape[:-1] + (self.n,))
        w[..., self.keep()] = s
        w[..., self.drop] = self.sign * np.sqrt(1.0 - r2)
        return w

    def unit_jacobian(self, s: np.ndarray) -> np.ndarray:
        """dw/ds, shape (..., n, n-1)."""
        w = self.unit(s)
        J = np.zeros(s.shape[:-1] + (self.n, self.n - 1))
        for col, i in enumerate(self.keep()):
            J[..., i, col] = 1.0
        J[..., self.drop, :] = -s / w[..., self.drop, None]
        return J


def sasaki_metric(c: MetricChart, x, v, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Sasaki metric of TM at (x, v) in the coordinates (dx, dv), shape (2n, 2n)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    c.check_interior(x, cfg.reach * cfg.h)
    g, dg = jet(c.metric_fn, x[None], cfg.h, cfg.order, second=False)
    Gam, _, _ = christoffel_from_jet(g[0], dg[0])
    return _sasaki_blocks(g[0], np.einsum("ijk,j->ik", Gam, v))


def _sasaki_blocks(g: np.ndarray, K: np.ndarray) -> np.ndarray:
    gK = np.einsum("...ij,...jk->...ik", g, K)
    top = np.concatenate([g + np.einsum("...ji,...jk->...ik", K, gK), np.swapaxes(gK, -1, -2)], axis=-1)
    bottom = np.concatenate([gK, g], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


@dataclass(frozen=True)
class T1MChart:
    """Unit tangent bundle over ``base`` near a reference unit direction."""

    base: MetricChart
    fiber: FiberScheme
    cfg: FDConfig = FDConfig()

    @property
    def n(self) -> int:
        return self.base.dim

    @property
    def dim(self) -> int:
        return 2 * self.base.dim - 1

    # -- pointwise data, vectorized over leading axes of y ---------------------

    def _base_data(self, x: np.ndarray):
        """g, Gamma, E and dE at points x of shape (P, n)."""
        h, order = self.cfg.h, self.cfg.order
        g, dg = jet(self.base.metric_fn, x, h, order, second=False)
        Gam, _, _ = christoffel_from_jet(g, dg)
        E, dE = jet(lambda xs: orthonormal_frame(self.base.metric_fn(xs)), x, h, order, second=False)
        return g, Gam, E, dE

    def embedding(self, y: np.ndarray):
        """Point (x, v) of TM, base data, and the Jacobian dz/dy of shape (P, 2n, 2n-1)."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        n = self.n
        x, s = y[:, :n], y[:, n:]
        g, Gam, E, dE = self._base_data(x)
        w = self.fiber.unit(s)
        v = np.einsum("pij,pj->pi", E, w)
        J = np.zeros((y.shape[0], 2 * n, 2 * n - 1))
        J[:, :n, :n] = np.eye(n)
        J[:, n:, :n] = np.einsum("pmij,pj->pim", dE, w)
        J[:, n:, n:] = np.einsum("pij,pjk->pik", E, self.fiber.unit_jacobian(s))
        return x, v, g, Gam, E, J

    def metric(self, y: np.ndarray) -> np.ndarray:
        """gbar = J^T G_sasaki J / 4 at each row of y."""
        _, v, g, Gam, _, J = self.embedding(y)
        GS = _sasaki_blocks(g, np.einsum("pijk,pj->pik", Gam, v))
        return 0.25 * np.einsum("pai,pab,pbj->pij", J, GS, J)

    def unit_defect(self, y: np.ndarray) -> np.ndarray:
        """|g(v, v) - 1| at each row of y."""
        _, v, g, _, _, _ = self.embedding(y)
        return np.abs(np.einsum("pi,pij,pj->p", v, g, v) - 1.0)

    def eta_form(self, y: np.ndarray) -> np.ndarray:
        """Components of eta = (1/2) g(v, dpi .) in y-coordinates."""
        _, v, g, _, _, J = self.embedding(y)
        return 0.5 * np.einsum("pi,pij,pja->pa", v, g, J[:, : self.n, :])

    def check_interior(self, y, clearance: float) -> None:
        y = np.asarray(y, dtype=float)
        self.base.check_interior(y[: self.n], clearance + self.cfg.reach * self.cfg.h)

    # -- lifts ------------------------------------------------------------------

    def point(self, x, u) -> np.ndarray:
        """y-coordinates of the unit vector with frame components u at base point x."""
        return np.concatenate([np.asarray(x, dtype=float), self.fiber.coords(u)])

    def lift_to_coords(self, y, lv: utb.LiftedVector) -> np.ndarray:
        """y-components of a lifted vector whose parts are given in the base frame."""
        x, v, _, Gam, E, J = self.embedding(y)
        Xh = E[0] @ lv.h_part
        Xt = E[0] @ lv.t_part
        dz = np.concatenate([Xh, Xt - np.einsum("ijk,j,k->i", Gam[0], v[0], Xh)])
        dy, *_ = np.linalg.lstsq(J[0], dz, rcond=None)
        return dy

    def coords_to_lift(self, y, dy) -> utb.LiftedVector:
        """Inverse of :meth:`lift_to_coords` (the tangential part is re-projected onto u-perp)."""
        x, v, _, Gam, E, J = self.embedding(y)
        dz = J[0] @ np.asarray(dy, dtype=float)
        dx, dv = dz[: self.n], dz[self.n:]
        t = dv + np.einsum("ijk,j,k->i", Gam[0], v[0], dx)
        Einv = np.linalg.inv(E[0])
        u = self.fiber.unit(np.asarray(y, dtype=float)[self.n:])
        return utb._lv(Einv @ t, Einv @ dx, u)


def build_t1m_chart(c: MetricChart, u_ref=None, cfg: FDConfig = FDConfig()) -> T1MChart:
    """T1M chart over ``c`` whose fiber coordinates are regular near ``u_ref``."""
    n = c.dim
    u_ref = np.eye(n)[n - 1] if u_ref is None else np.asarray(u_ref, dtype=float)
    return T1MChart(c, FiberScheme.for_direction(u_ref / np.linalg.norm(u_ref)), cfg)


# -- sampled geometry -------------------------------------------------------------


def sample_points(c: MetricChart, samples: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Base points and frame directions (x, u), fixed-seed."""
    from ..curvature import sphere_points

    xs = sample_base_points(c, samples, seed)
    us = sphere_points(c.dim, samples, seed + 1)
    return list(zip(xs, us))


@dataclass
class T1MGeometry:
    """Finite-difference geometry of T1M at one point, in y-coordinates."""

    chart: T1MChart
    y: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    Gamma: np.ndarray
    R_low: np.ndarray
    ricci: np.ndarray

    @property
    def scalar(self) -> float:
        return float(np.einsum("ab,ab->", np.linalg.inv(self.g), self.ricci))


def geometry_at(t: T1MChart, y) -> T1MGeometry:
    y = np.asarray(y, dtype=float)
    t.check_interior(y, t.cfg.reach * t.cfg.h)
    G, dG, d2G = jet(t.metric, y[None], t.cfg.h, t.cfg.order)
    Gam, R_up, R_low = riemann_from_jet(G, dG, d2G)
    Ric = ricci_from_riemann(R_up)[0]
    return T1MGeometry(t, y, G[0], dG[0], Gam[0], R_low[0], 0.5 * (Ric + Ric.T))


def lifted_frame_coords(t: T1MChart, y, u) -> tuple[list[utb.LiftedVector], np.ndarray]:
    """The gbar-orthonormal frame of the closed-form module and its y-components (columns)."""
    basis = utb.gbar_frame(u)
    return basis, np.column_stack([t.lift_to_coords(y, b) for b in basis])


def _local(c: MetricChart, x, u, cfg: FDConfig, with_nabla: bool):
    t = build_t1m_chart(c, u, cfg)
    y = t.point(x, u)
    m = model_fd(c, x, cfg, with_nabla=with_nabla)
    return t, y, m


def ricci_deviation(c: MetricChart, x, u, cfg: FDConfig = FDConfig()) -> float:
    """max |rhobar_fd - rhobar_closed| over the gbar-orthonormal frame."""
    t, y, m = _local(c, x, u, cfg, with_nabla=True)
    geo = geometry_at(t, y)
    _, F = lifted_frame_coords(t, y, u)
    return float(np.max(np.abs(F.T @ geo.ricci @ F - utb.ricci_bar_matrix(m, u))))


def curvature_deviation(c: MetricChart, x, u, cfg: FDConfig = FDConfig()) -> float:
    """max |gbar(Rbar(E_a,E_b)E_c, E_d)| deviation over the frame, finite differences vs closed form."""
    t, y, m = _local(c, x, u, cfg, with_nabla=True)
    geo = geometry_at(t, y)
    basis, F = lifted_frame_coords(t, y, u)
    fd = np.einsum("ijkl,ia,jb,kc,ld->abcd", geo.R_low, F, F, F, F)
    N = len(basis)
    worst = 0.0
    for a in range(N):
        for b in range(a + 1, N):
            for cc in range(N):
                out = utb.riemann_bar_lifted(basis[a], basis[b], basis[cc], m)
                closed = np.array([utb.gbar(out, basis[d]) for d in range(N)])
                worst = max(worst, float(np.max(np.abs(fd[a, b, cc] - closed))))
    return worst


def scalar_values(c: MetricChart, x, u, cfg: FDConfig = FDConfig()) -> dict[str, float]:
    """Finite-difference scalar curvature of T1M and both closed-form normalizations."""
    t, y, m = _local(c, x, u, cfg, with_nabla=False)
    geo = geometry_at(t, y)
    return {
        "fd": geo.scalar,
        "trace-consistent": utb.scalar_bar(m, u, "trace-consistent"),
        "as-printed": utb.scalar_bar(m, u, "as-printed"),
    }


def _field_coords(t: T1MChart, ys: np.ndarray, Yc: np.ndarray, kind: str) -> np.ndarray:
    """y-components of the lift of the coordinate-constant field Yc, at each row of ys."""
    n = t.n
    _, v, g, Gam, _, J = t.embedding(ys)
    P = ys.shape[0]
    Y = np.broadcast_to(Yc, (P, n))
    if kind == "h":
        dz = np.concatenate([Y, -np.einsum("pijk,pj,pk->pi", Gam, v, Y)], axis=1)
    else:
        gyv = np.einsum("pi,pij,pj->p", Y, g, v)
        dz = np.concatenate([np.zeros((P, n)), Y - gyv[:, None] * v], axis=1)
    return np.einsum("pij,pj->pi", np.linalg.pinv(J), dz)


def connection_deviation(c: MetricChart, x, u, cfg: FDConfig = FDConfig()) -> float:
    """Max deviation of nablabar on lifts of coordinate-constant fields, over all four lift cases."""
    t, y, m = _local(c, x, u, cfg, with_nabla=False)
    n = c.dim
    G, dG = jet(t.metric, y[None], cfg.h, cfg.order, second=False)
    Gbar, _, _ = christoffel_from_jet(G[0], dG[0])
    xx, v, g, Gam, E, _ = t.embedding(y)
    Einv = np.linalg.inv(E[0])
    worst = 0.0
    for i in range(n):
        Xf = np.eye(n)[i]
        for j in range(n):
            Yc = E[0][:, j]
            Yf = np.eye(n)[j]
            cov = Einv @ np.einsum("kab,a,b->k", Gam[0], E[0] @ Xf, Yc)
            for case in ("tt", "th", "ht", "hh"):
                Xlift = utb.LiftedVector.lift(Xf, u, "t" if case[0] == "t" else "h")
                Xy = t.lift_to_coords(y, Xlift)
                Y0, dY = jet(lambda ys: _field_coords(t, ys, Yc, case[1]), y[None], cfg.h, cfg.order, second=False)
                nab = Xy @ dY[0] + np.einsum("cab,a,b->c", Gbar, Xy, Y0[0])
                fd_lift = t.coords_to_lift(y, nab)
                closed = utb.nabla_bar(case, Xlift.t_part + Xlift.h_part, Yf, cov, m, u)
                worst = max(worst, float(np.max(np.abs(np.concatenate(
                    [fd_lift.t_part - closed.t_part, fd_lift.h_part - closed.h_part])))))
    return worst


# -- contact structure ---------------------------------------------------------------


def contact_residuals(t: T1MChart, y, u) -> dict[str, float]:
    """Residuals of the contact metric axioms and of div xi = 0, (nablabar eta) xi = 0 at y."""
    cfg = t.cfg
    y = np.asarray(y, dtype=float)
    G, dG = jet(t.metric, y[None], cfg.h, cfg.order, second=False)
    G, dG = G[0], dG[0]
    Gbar, _, Ginv = christoffel_from_jet(G, dG)
    e0, de = jet(t.eta_form, y[None], cfg.h, cfg.order, second=False)
    e0, de = e0[0], de[0]
    xi_fd = Ginv @ e0
    deta = DETA_FACTOR * (de - de.T)  # de[a, b] = d_a eta_b
    phi_fd = Ginv @ deta
    N = t.dim
    basis, F = lifted_frame_coords(t, y, u)
    xi_closed = t.lift_to_coords(y, utb.xi(u))
    phi_closed = np.column_stack([t.lift_to_coords(y, utb.phi(b)) for b in basis]) @ np.linalg.inv(F)

    def xi_field(ys):
        Gs = t.metric(ys)
        return np.einsum("pab,pb->pa", np.linalg.inv(Gs), t.eta_form(ys))

    def weighted_xi(ys):
        return np.sqrt(np.linalg.det(t.metric(ys)))[:, None] * xi_field(ys)

    _, dW = jet(weighted_xi, y[None], cfg.h, cfg.order, second=False)
    div = float(np.trace(dW[0])) / np.sqrt(np.linalg.det(G))
    cov_eta = de - np.einsum("cab,c->ab", Gbar, e0)
    return {
        "eta-xi": abs(float(e0 @ xi_fd) - 1.0),
        "eta-metric-dual": float(np.max(np.abs(xi_fd - xi_closed))),
        "deta-phi": float(np.max(np.abs(phi_fd - phi_closed))),
        "phi-squared": float(np.max(np.abs(phi_fd @ phi_fd + np.eye(N) - np.outer(xi_fd, e0)))),
        "div-xi": abs(div),
        "nabla-eta-xi": float(np.max(np.abs(cov_eta @ xi_fd))),
    }


def validate_contact_structure(c: MetricChart, samples: int = 10, cfg: FDConfig = FDConfig(),
                               seed: int = 0, tol: float = 1e-6) -> ValidationReport:
    worst: dict[str, float] = {}
    for x, u in sample_points(c, samples, seed):
        t = build_t1m_chart(c, u, cfg)
        for k, val in contact_residuals(t, t.point(x, u), u).items():
            worst[k] = max(worst.get(k, 0.0), val)
    return ValidationReport(worst, tol)


# -- cross-validation and fitting ------------------------------------------------------

FORMULAS = ("conn-3.2", "curv-3.3", "ricci-3.4", "scalar-3.5")


@dataclass
class CrossValidation:
    formula: str
    report: ValidationReport
    samples: int
    # for scalar-3.5: which closed-form normalization agrees with the finite differences
    matching_normalization: str | None = None


def cross_validate(c: MetricChart, formula: str, samples: int = 10, cfg: FDConfig = FDConfig(),
                   seed: int = 0, tol: float = 1e-4) -> CrossValidation:
    """Max deviation between finite-difference T1M geometry and the closed-form formula."""
    pts = sample_points(c, samples, seed)
    if formula == "scalar-3.5":
        dev = {"trace-consistent": 0.0, "as-printed": 0.0}
        for x, u in pts:
            vals = scalar_values(c, x, u, cfg)
            for k in dev:
                dev[k] = max(dev[k], abs(vals["fd"] - vals[k]))
        match = min(dev, key=dev.get) if min(dev.values()) <= tol else None
        report = ValidationReport({"trace-consistent": dev["trace-consistent"]}, tol)
        report.violations["as-printed"] = dev["as-printed"]
        report.passed["as-printed"] = dev["as-printed"] <= tol
        return CrossValidation(formula, report, samples, match)
    fn = {"conn-3.2": connection_deviation, "curv-3.3": curvature_deviation,
          "ricci-3.4": ricci_deviation}.get(formula)
    if fn is None:
        raise ValueError(f"unknown formula {formula!r}; expected one of {FORMULAS}")
    worst = max(fn(c, x, u, cfg) for x, u in pts)
    return CrossValidation(formula, ValidationReport({formula: worst}, tol), samples)


@dataclass(frozen=True)
class AlphaBetaFit:
    alpha: float
    beta: float
    residual: float
    spread: float
    per_sample: tuple[tuple[float, float], ...]


def _fit_point(geo: T1MGeometry, eta_y: np.ndarray) -> tuple[float, float, float]:
    F = orthonormal_frame(geo.g)
    ric = F.T @ geo.ricci @ F
    e = F.T @ eta_y
    N = ric.shape[0]
    design = np.column_stack([np.eye(N).ravel(), np.outer(e, e).ravel()])
    (a, b), *_ = np.linalg.lstsq(design, ric.ravel(), rcond=None)
    misfit = ric - a * np.eye(N) - b * np.outer(e, e)
    return float(a), float(b), _misfit_norm(misfit)


def _misfit_norm(misfit: np.ndarray) -> float:
    """Largest |misfit(X, X)| over gbar-unit X, i.e. the spectral norm; independent of the frame."""
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (misfit + misfit.T)))))


def fit_alpha_beta(c: MetricChart, samples: int = 10, cfg: FDConfig = FDConfig(), seed: int = 0) -> AlphaBetaFit:
    """Least-squares fit of rhobar = alpha gbar + beta eta (x) eta at each sample point."""
    if samples < 10:
        raise ValueError("fit_alpha_beta needs at least 10 samples")
    fits = []
    for x, u in sample_points(c, samples, seed):
        t = build_t1m_chart(c, u, cfg)
        y = t.point(x, u)
        geo = geometry_at(t, y)
        if np.linalg.cond(geo.g) > 1e12:
            raise np.linalg.LinAlgError("degenerate T1M metric at a sample point")
        fits.append(_fit_point(geo, t.eta_form(y[None])[0]))
    arr = np.array(fits)
    a_mean, b_mean = arr[:, 0].mean(), arr[:, 1].mean()
    spread = float(np.max(np.abs(arr[:, 0] - a_mean) + np.abs(arr[:, 1] - b_mean)))
    return AlphaBetaFit(float(a_mean), float(b_mean), float(arr[:, 2].max()), spread,
                        tuple((float(a), float(b)) for a, b, _ in fits))


def base_invariants(c: MetricChart, samples: int = 10, cfg: FDConfig = FDConfig(), seed: int = 0) -> np.ndarray:
    """Rows (tau, |rho|^2, |R|^2) at fixed-seed base points."""
    rows = []
    for x in sample_base_points(c, samples, seed):
        m: CurvModel = model_fd(c, x, cfg, with_nabla=False)
        rows.append((m.tau, m.norm_rho, m.norm_R))
    return np.array(rows)


def closed_form_fit(c: MetricChart, samples: int = 10, cfg: FDConfig = FDConfig(), seed: int = 0) -> AlphaBetaFit:
    """The same least-squares fit applied to the closed-form rhobar at the oracle's base curvature."""
    fits = []
    for x, u in sample_points(c, samples, seed):
        m = model_fd(c, x, cfg, with_nabla=True)
        ric = utb.ricci_bar_matrix(m, u)
        N = ric.shape[0]
        e = np.zeros(N)
        e[-1] = 1.0  # the last frame vector is xi
        design = np.column_stack([np.eye(N).ravel(), np.outer(e, e).ravel()])
        (a, b), *_ = np.linalg.lstsq(design, ric.ravel(), rcond=None)
        fits.append((float(a), float(b), _misfit_norm(ric - a * np.eye(N) - b * np.outer(e, e))))
    arr = np.array(fits)
    a_mean, b_mean = arr[:, 0].mean(), arr[:, 1].mean()
    spread = float(np.max(np.abs(arr[:, 0] - a_mean) + np.abs(arr[:, 1] - b_mean)))
    return AlphaBetaFit(float(a_mean), float(b_mean), float(arr[:, 2].max()), spread,
                        tuple((float(a), float(b)) for a, b, _ in fits))
