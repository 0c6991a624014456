"""Closed-form geometry of the unit tangent bundle T1M with its standard contact metric structure.

A tangent vector of T1M at (p, u) is written X^t + Y^h: the tangential lift of
X (vertical lift of the u-orthogonal part of X) plus the horizontal lift of Y.
Everything is evaluated pointwise from a :class:`~unitbundle.models.CurvModel`
expressed in an orthonormal frame of T_pM.

The metric is gbar = g'/4 where g' is induced by the Sasaki metric, so
{2 e_i^t (e_i orthogonal to u), 2 e_i^h} is a gbar-orthonormal basis and
xi = 2 u^h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import (
    PreconditionError,
    check_unit,
    kulkarni_nomizu,
    norm_sq_curv,
    r_u_forms,
    sphere_moment,
)
from .models import CurvModel

LIFT_TOL = 1e-9


def _proj(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return x - np.dot(x, u) * u


@dataclass(frozen=True)
class LiftedVector:
    """t_part^t + h_part^h at the point (p, u); t_part is always orthogonal to u."""

    t_part: np.ndarray
    h_part: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        t = np.asarray(self.t_part, dtype=float)
        h = np.asarray(self.h_part, dtype=float)
        if not (t.shape == h.shape == u.shape):
            raise ValueError("lift components must share the base dimension")
        if abs(np.dot(t, u)) > LIFT_TOL * max(1.0, np.linalg.norm(t)):
            raise PreconditionError("tangential part is not orthogonal to u")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "t_part", t)
        object.__setattr__(self, "h_part", h)

    @classmethod
    def tangential(cls, x, u) -> "LiftedVector":
        u = np.asarray(u, dtype=float)
        return cls(_proj(np.asarray(x, dtype=float), u), np.zeros_like(u), u)

    @classmethod
    def horizontal(cls, x, u) -> "LiftedVector":
        u = np.asarray(u, dtype=float)
        return cls(np.zeros_like(u), np.asarray(x, dtype=float), u)

    @classmethod
    def lift(cls, x, u, kind: str) -> "LiftedVector":
        if kind == "t":
            return cls.tangential(x, u)
        if kind == "h":
            return cls.horizontal(x, u)
        raise ValueError(f"unknown lift {kind!r}")

    def __add__(self, other: "LiftedVector") -> "LiftedVector":
        return LiftedVector(self.t_part + other.t_part, self.h_part + other.h_part, self.u)

    def __sub__(self, other: "LiftedVector") -> "LiftedVector":
        return LiftedVector(self.t_part - other.t_part, self.h_part - other.h_part, self.u)

    def __mul__(self, s: float) -> "LiftedVector":
        return LiftedVector(s * self.t_part, s * self.h_part, self.u)

    __rmul__ = __mul__

    def __neg__(self) -> "LiftedVector":
        return self * -1.0

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.t_part, self.h_part])

    def close_to(self, other: "LiftedVector", tol: float) -> bool:
        return float(np.max(np.abs(self.as_array() - other.as_array()))) <= tol


def _lv(t, h, u) -> LiftedVector:
    """Lifted vector whose tangential part is projected (the t-lift kills the u-component)."""
    return LiftedVector(_proj(np.asarray(t, dtype=float), u), np.asarray(h, dtype=float), u)


# -- contact metric structure ------------------------------------------------


def xi(u) -> LiftedVector:
    u = check_unit(u)
    return LiftedVector.horizontal(2.0 * u, u)


def eta(v: LiftedVector) -> float:
    """eta(X^t) = 0, eta(X^h) = g(X, u)/2."""
    return 0.5 * float(np.dot(v.h_part, v.u))


def phi(v: LiftedVector) -> LiftedVector:
    """phi X^t = -X^h + g(X,u) xi/2, phi X^h = X^t."""
    u = v.u
    h_from_t = -v.t_part + np.dot(v.t_part, u) * u
    return _lv(v.h_part, h_from_t, u)


def gbar(v: LiftedVector, w: LiftedVector) -> float:
    """gbar(X^t,Y^t) = (g(X,Y) - g(X,u)g(Y,u))/4, gbar(X^t,Y^h) = 0, gbar(X^h,Y^h) = g(X,Y)/4."""
    return 0.25 * float(np.dot(v.t_part, w.t_part) + np.dot(v.h_part, w.h_part))


@dataclass(frozen=True)
class ContactData:
    xi: LiftedVector
    eta: float
    phi: LiftedVector
    gbar_self: float
    gbar_xi: float


def contact_tensors(u, X, lift: str) -> ContactData:
    """xi, eta(X^lift), phi(X^lift), gbar(X^lift, X^lift) and gbar(X^lift, xi) at (p, u)."""
    u = check_unit(u)
    v = LiftedVector.lift(X, u, lift)
    x = xi(u)
    return ContactData(x, eta(v), phi(v), gbar(v, v), gbar(v, x))


# -- Levi-Civita connection ----------------------------------------------------


def nabla_bar(case: str, X, Y, covYX, m: CurvModel, u) -> LiftedVector:
    """nabla-bar of lifted vector fields, with nabla_X Y supplied as ``covYX``.

    tt: -g(Y,u) X^t
    th: (R(u,X)Y)^h / 2
    ht: (nabla_X Y)^t + (R(u,Y)X)^h / 2
    hh: (nabla_X Y)^h - (R(X,Y)u)^t / 2
    """
    u = check_unit(u, m.n)
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    covYX = np.asarray(covYX, dtype=float)
    R = m.R.apply
    zero = np.zeros(m.n)
    if case == "tt":
        return _lv(-np.dot(Y, u) * X, zero, u)
    if case == "th":
        return _lv(zero, 0.5 * R(u, X, Y), u)
    if case == "ht":
        return _lv(covYX, 0.5 * R(u, Y, X), u)
    if case == "hh":
        return _lv(-0.5 * R(X, Y, u), covYX, u)
    raise ValueError(f"unknown connection case {case!r}")


# -- curvature -----------------------------------------------------------------

RIEMANN_CASES = ("ttt", "tth", "htt", "hth", "hht", "hhh")


def riemann_bar(case: str, X, Y, Z, m: CurvModel, u) -> LiftedVector:
    """Rbar(X^a, Y^b) Z^c for the lift pattern ``case`` = abc."""
    u = check_unit(u, m.n)
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    R = m.R.apply
    dR = m.dR.apply
    P = lambda v: _proj(v, u)  # noqa: E731
    zero = np.zeros(m.n)
    if case == "ttt":
        t = -np.dot(P(X), P(Z)) * P(Y) + np.dot(P(Y), P(Z)) * P(X)
        return _lv(t, zero, u)
    if case == "tth":
        h = R(P(X), P(Y), Z) + 0.25 * (R(u, X, R(u, Y, Z)) - R(u, Y, R(u, X, Z)))
        return _lv(zero, h, u)
    if case == "htt":
        h = -0.5 * R(P(Y), P(Z), X) - 0.25 * R(u, Y, R(u, Z, X))
        return _lv(zero, h, u)
    if case == "hth":
        t = 0.5 * R(X, Z, P(Y)) - 0.25 * R(X, R(u, Y, Z), u)
        h = 0.5 * dR(X, u, Y, Z)
        return _lv(t, h, u)
    if case == "hht":
        t = R(X, Y, P(Z)) + 0.25 * (R(Y, R(u, Z, X), u) - R(X, R(u, Z, Y), u))
        h = 0.5 * (dR(X, u, Z, Y) - dR(Y, u, Z, X))
        return _lv(t, h, u)
    if case == "hhh":
        h = (R(X, Y, Z) + 0.5 * R(u, R(X, Y, u), Z)
             - 0.25 * (R(u, R(Y, Z, u), X) - R(u, R(X, Z, u), Y)))
        t = 0.5 * dR(Z, X, Y, u)
        return _lv(t, h, u)
    raise ValueError(f"unknown curvature case {case!r}")


def riemann_bar_lifted(Xb: LiftedVector, Yb: LiftedVector, Zb: LiftedVector, m: CurvModel) -> LiftedVector:
    """Rbar(Xb, Yb) Zb for arbitrary lifted vectors, by multilinearity and antisymmetry."""
    u = Xb.u
    parts = lambda v: (("t", v.t_part), ("h", v.h_part))  # noqa: E731
    out = LiftedVector(np.zeros(m.n), np.zeros(m.n), u)
    for a, x in parts(Xb):
        for b, y in parts(Yb):
            for c, z in parts(Zb):
                if not (np.any(x) and np.any(y) and np.any(z)):
                    continue
                if a + b == "th":
                    out = out - riemann_bar("ht" + c, y, x, z, m, u)
                else:
                    out = out + riemann_bar(a + b + c, x, y, z, m, u)
    return out


# -- Ricci and scalar curvature ----------------------------------------------------


def _ricci_bar_parts(Xt, Xh, Yt, Yh, m: CurvModel, u: np.ndarray, A: np.ndarray, B: np.ndarray) -> float:
    n = m.n
    dr = m.drho.components
    tt = (n - 2) * np.dot(_proj(Xt, u), _proj(Yt, u)) + 0.25 * Xt @ A @ Yt

    def th(x, y):
        # (nabla_u rho)(x, y) - (nabla_x rho)(u, y)
        return 0.5 * (np.einsum("m,mjk,j,k->", u, dr, x, y) - np.einsum("m,mjk,j,k->", x, dr, u, y))

    hh = Xh @ m.rho.components @ Yh - 0.5 * Xh @ B @ Yh
    return float(tt + th(Xt, Yh) + th(Yt, Xh) + hh)


def ricci_bar(Xb: LiftedVector, Yb: LiftedVector, m: CurvModel, u=None) -> float:
    """rhobar(Xb, Yb).

    rhobar(X^t,Y^t) = (n-2)(g(X,Y) - g(X,u)g(Y,u)) + A(X,Y)/4
    rhobar(X^t,Y^h) = ((nabla_u rho)(X,Y) - (nabla_X rho)(u,Y))/2
    rhobar(X^h,Y^h) = rho(X,Y) - B(X,Y)/2
    """
    u = check_unit(Xb.u if u is None else u, m.n)
    if not (np.allclose(Xb.u, u) and np.allclose(Yb.u, u)):
        raise PreconditionError("lifted vectors live at a different point of the fiber")
    A, B = (f.components for f in r_u_forms(m.R, u))
    return _ricci_bar_parts(Xb.t_part, Xb.h_part, Yb.t_part, Yb.h_part, m, u, A, B)


def complete_frame(u) -> np.ndarray:
    """Orthonormal matrix whose last column is u."""
    u = check_unit(u)
    n = u.shape[0]
    M = np.column_stack([u, np.eye(n)])
    Q, _ = np.linalg.qr(M)
    Q = Q[:, :n]
    if np.dot(Q[:, 0], u) < 0:
        Q[:, 0] = -Q[:, 0]
    return np.column_stack([Q[:, 1:], Q[:, 0]])


def gbar_frame(u) -> list[LiftedVector]:
    """gbar-orthonormal basis 2e_1^t..2e_{n-1}^t, 2e_1^h..2e_n^h (the last one is xi)."""
    u = check_unit(u)
    E = complete_frame(u)
    n = u.shape[0]
    basis = [LiftedVector.tangential(2.0 * E[:, i], u) for i in range(n - 1)]
    basis += [LiftedVector.horizontal(2.0 * E[:, i], u) for i in range(n)]
    return basis


def ricci_bar_matrix(m: CurvModel, u) -> np.ndarray:
    """rhobar in the gbar-orthonormal basis of :func:`gbar_frame`."""
    u = check_unit(u, m.n)
    A, B = (f.components for f in r_u_forms(m.R, u))
    basis = gbar_frame(u)
    N = len(basis)
    out = np.empty((N, N))
    for i, a in enumerate(basis):
        for j, b in enumerate(basis[i:], start=i):
            out[i, j] = out[j, i] = _ricci_bar_parts(a.t_part, a.h_part, b.t_part, b.h_part, m, u, A, B)
    return out


def ricci_from_riemann_bar(Yb: LiftedVector, Zb: LiftedVector, m: CurvModel) -> float:
    """sum_a gbar(Rbar(E_a, Yb) Zb, E_a) over the gbar-orthonormal basis."""
    return float(sum(gbar(riemann_bar_lifted(E, Yb, Zb, m), E) for E in gbar_frame(Yb.u)))


def curvature_trace(m: CurvModel, u) -> float:
    """sum_{i,j} |R(u,e_i)e_j|^2, the trace of both quadratic forms along u."""
    A, _ = r_u_forms(m.R, u)
    return float(np.trace(A.components))


def scalar_bar(m: CurvModel, u, normalization: str = "trace-consistent") -> float:
    """Scalar curvature of T1M.

    ``as-printed``: tau + (n-1)(n-2) - (1/4) sum_{i,j} |R(u,e_i)e_j|^2.
    ``trace-consistent``: four times that, which is the trace of rhobar over a
    gbar-orthonormal basis.
    """
    u = check_unit(u, m.n)
    n = m.n
    printed = m.tau + (n - 1) * (n - 2) - 0.25 * curvature_trace(m, u)
    if normalization == "as-printed":
        return printed
    if normalization == "trace-consistent":
        return 4.0 * printed
    raise ValueError(f"unknown normalization {normalization!r}")


# -- eta-Einstein condition ------------------------------------------------------


@dataclass(frozen=True)
class EtaEinsteinReport:
    alpha: float
    beta: float
    residual_41: float
    residual_42: float
    residual_43: float
    constraint_410_residual: float
    tol: float

    @property
    def is_eta_einstein(self) -> bool:
        return max(self.residual_41, self.residual_42, self.residual_43) <= self.tol


def eta_einstein_forms(m: CurvModel, u, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deviation matrices of the three pointwise eta-Einstein conditions at u."""
    u = check_unit(u, m.n)
    n = m.n
    g = np.eye(n)
    uu = np.outer(u, u)
    A, B = (f.components for f in r_u_forms(m.R, u))
    d41 = A - (alpha - 4 * n + 8) * (g - uu)
    dr = m.drho.components
    # (nabla_u rho)(X,Y) - (nabla_X rho)(u,Y)
    d42 = np.einsum("m,mjk->jk", u, dr) - np.einsum("xjk,j->xk", dr, u)
    d43 = B - 2 * m.rho.components + 0.5 * alpha * g + 0.5 * beta * uu
    return d41, d42, d43


def eta_einstein_residual(m: CurvModel, u, alpha: float, beta: float, tol: float = 1e-10) -> EtaEinsteinReport:
    """Max-norm residuals of the three pointwise eta-Einstein conditions.

    ``tol`` is scaled by max(1, |R|_inf)^2 since the conditions are quadratic in R.
    """
    d41, d42, d43 = eta_einstein_forms(m, u, alpha, beta)
    return EtaEinsteinReport(
        alpha=float(alpha),
        beta=float(beta),
        residual_41=float(np.max(np.abs(d41))),
        residual_42=float(np.max(np.abs(d42))),
        residual_43=float(np.max(np.abs(d43))),
        constraint_410_residual=check_constraint_410(m),
        tol=tol * m.scale ** 2,
    )


def eta_einstein_matrix_residual(m: CurvModel, u, alpha: float, beta: float) -> float:
    """max |rhobar - alpha gbar - beta eta x eta| in the gbar-orthonormal basis."""
    rb = ricci_bar_matrix(m, u)
    N = rb.shape[0]
    target = alpha * np.eye(N)
    target[-1, -1] += beta  # eta(xi) = 1, eta vanishes on the rest of the basis
    return float(np.max(np.abs(rb - target)))


def solve_alpha_beta(m: CurvModel) -> tuple[float, float]:
    """Candidate (alpha, beta) from the trace identities under sum |R(u,e_j)e_i|^2 = |R|^2/n.

    alpha = |R|^2/(n(n-1)) + 4(n-2)
    beta  = 4 tau - 4n(n-2) - (3n-2)|R|^2/(n(n-1))
    """
    n = m.n
    R2 = m.norm_R
    alpha = R2 / (n * (n - 1)) + 4 * (n - 2)
    beta = 4 * m.tau - 4 * n * (n - 2) - (3 * n - 2) / (n * (n - 1)) * R2
    return float(alpha), float(beta)


def identity_49_sides(m: CurvModel, alpha: float, beta: float) -> tuple[float, float]:
    n = m.n
    lhs = (m.norm_rho + 1.5 * m.norm_R) / (n * (n + 2))
    rhs = 2 * m.tau / n - 0.5 * alpha - 0.5 * beta
    return lhs, rhs


def check_identity_49(m: CurvModel, alpha: float, beta: float) -> float:
    """|(|rho|^2 + 3|R|^2/2)/(n(n+2)) - (2 tau/n - alpha/2 - beta/2)|."""
    lhs, rhs = identity_49_sides(m, alpha, beta)
    return abs(lhs - rhs)


def sphere_average_43(m: CurvModel, alpha: float, beta: float, samples: int = 100_000, seed: int = 0) -> float:
    """Quadrature average of the X = Y = u diagonal of condition (4.3) deviation over unit u."""
    q = sphere_moment(m.R, "quadrature", samples=samples, seed=seed)
    return q - 2 * m.tau / m.n + 0.5 * alpha + 0.5 * beta


def constraint_410(n: int, norm_rho: float, norm_R: float, tau: float) -> float:
    return (2 * norm_rho - 3 * (n + 1) * norm_R + 4 * (n - 1) * (n + 2) * tau
            - 4 * n * (n - 1) * (n - 2) * (n + 2))


def check_constraint_410(m: CurvModel) -> float:
    """Signed residual of 2|rho|^2 - 3(n+1)|R|^2 = -4(n-1)(n+2)tau + 4n(n-1)(n-2)(n+2)."""
    return float(constraint_410(m.n, m.norm_rho, m.norm_R, m.tau))


def einstein_bounds(n: int, tau: float) -> bool:
    """n(n-1) <= tau <= n(n-1)(n-2)."""
    if n < 3:
        raise ValueError("the Einstein scalar-curvature bound needs n >= 3")
    return n * (n - 1) <= tau <= n * (n - 1) * (n - 2)


def einstein_quadratic_sides(m: CurvModel) -> tuple[float, float]:
    """Both sides of -3(n+1)|R + tau/(2n(n-1)) g o g|^2 = 4(n+2)/(n(n-1)) (tau - n(n-1))(tau - n(n-1)(n-2))."""
    n, tau = m.n, m.tau
    g = np.eye(n)
    W = m.R.components + tau / (2 * n * (n - 1)) * kulkarni_nomizu(g, g)
    lhs = -3 * (n + 1) * norm_sq_curv(W)
    rhs = 4 * (n + 2) / (n * (n - 1)) * (tau - n * (n - 1)) * (tau - n * (n - 1) * (n - 2))
    return float(lhs), float(rhs)


@dataclass(frozen=True)
class TraceResiduals:
    eq_4_24: float
    eq_4_25: float
    eq_4_26: float


def trace_identities(m: CurvModel, u, alpha: float, beta: float) -> TraceResiduals:
    """Residuals of the frame traces of the eta-Einstein conditions and their combination."""
    u = check_unit(u, m.n)
    n, tau = m.n, m.tau
    A, B = (f.components for f in r_u_forms(m.R, u))
    r24 = np.trace(A) - (alpha - 4 * n + 8) * (n - 1)
    r25 = np.trace(B) - (2 * tau - 0.5 * n * alpha - 0.5 * beta)
    r26 = (3 * n - 2) * alpha + beta - 4 * tau - 8 * (n - 1) * (n - 2)
    return TraceResiduals(abs(float(r24)), abs(float(r25)), abs(float(r26)))
