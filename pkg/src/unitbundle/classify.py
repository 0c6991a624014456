"""Dimension-specific decision procedures for when T1M is eta-Einstein.

Each classifier returns a :class:`Classification` whose certificate lists the
equation residuals that decided the verdict. Equation ids follow the
numbering used in the CLI report check-ids (``eq-4.10``, ``eq-5.16`` ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .curvature import ShapeError, SymTensor2
from .models import (
    CurvModel,
    STParams,
    constant_curvature,
    from_ricci_3d,
    singer_thorpe_4d,
    st_sign_assignments,
)
from .utb import check_constraint_410, eta_einstein_residual, solve_alpha_beta

DEFAULT_TOL = 1e-9


class Verdict(str, Enum):
    ETA_EINSTEIN = "eta-einstein-const-curv"
    NOT_ETA_EINSTEIN = "not-eta-einstein"
    CONTRADICTION = "contradiction"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    tau: float | None = None
    kappa: float | None = None
    branch: str | None = None
    certificate: tuple[tuple[str, float], ...] = field(default_factory=tuple)
    alpha: float | None = None
    beta: float | None = None
    tol: float = DEFAULT_TOL

    @property
    def is_eta_einstein(self) -> bool:
        return self.verdict is Verdict.ETA_EINSTEIN

    def residual(self, eq_id: str) -> float:
        for key, val in self.certificate:
            if key == eq_id:
                return val
        raise KeyError(eq_id)

    def label(self) -> str:
        if self.verdict is Verdict.ETA_EINSTEIN:
            return f"ConstCurv({self.kappa:g})"
        if self.verdict is Verdict.CONTRADICTION:
            return f"Contradiction({self.branch})"
        return "NotEtaEinstein"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "label": self.label(),
            "tau": self.tau,
            "kappa": self.kappa,
            "branch": self.branch,
            "alpha": self.alpha,
            "beta": self.beta,
            "certificate": [{"equation": k, "residual": v} for k, v in self.certificate],
        }


def _theorem1_certificate(m: CurvModel, tol: float):
    alpha, beta = solve_alpha_beta(m)
    u = np.eye(m.n)[-1]
    rep = eta_einstein_residual(m, u, alpha, beta, tol)
    cert = (("eq-4.1", rep.residual_41), ("eq-4.2", rep.residual_42), ("eq-4.3", rep.residual_43))
    return rep, cert


def classify_const_curv(n: int, kappa: float, tol: float = DEFAULT_TOL) -> Classification:
    """Constant curvature kappa in dimension n: decided by the pointwise conditions at the candidate (alpha, beta)."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    m = constant_curvature(n, kappa)
    rep, cert = _theorem1_certificate(m, tol)
    quad = kappa ** 2 - (n - 1) * kappa + (n - 2)
    cert = cert + (("eq-4.10", check_constraint_410(m)), ("const-curv-quadratic", quad))
    verdict = Verdict.ETA_EINSTEIN if rep.is_eta_einstein else Verdict.NOT_ETA_EINSTEIN
    return Classification(verdict, m.tau, float(kappa) if rep.is_eta_einstein else None, None,
                          cert, rep.alpha, rep.beta, tol)


def classify_dim2(kappa: float, tol: float = DEFAULT_TOL) -> Classification:
    """Surfaces of Gaussian curvature kappa: eta-Einstein iff the scalar constraint vanishes."""
    m = constant_curvature(2, kappa)
    c410 = check_constraint_410(m)
    ok = abs(c410) <= tol * m.scale ** 2
    alpha, beta = solve_alpha_beta(m)
    return Classification(
        Verdict.ETA_EINSTEIN if ok else Verdict.NOT_ETA_EINSTEIN,
        m.tau, float(kappa) if ok else None, None, (("eq-4.10", c410),), alpha, beta, tol,
    )


def dim3_lhs(rho: np.ndarray) -> float:
    """23 |rho - tau/3 g|^2 + (5/3)(tau - 6)^2."""
    tau = float(np.trace(rho))
    dev = rho - tau / 3.0 * np.eye(3)
    return 23.0 * float(np.sum(dev * dev)) + 5.0 / 3.0 * (tau - 6.0) ** 2


def classify_dim3(rho, tol: float = DEFAULT_TOL) -> Classification:
    """3-manifolds: eta-Einstein forces rho = 2g, i.e. constant curvature 1."""
    r = np.asarray(getattr(rho, "components", rho), dtype=float)
    if r.shape != (3, 3):
        raise ShapeError(f"classify_dim3 needs a 3x3 Ricci tensor, got {r.shape}")
    m = from_ricci_3d(SymTensor2(r))
    lhs = dim3_lhs(r)
    cert = (("eq-4-3", lhs), ("eq-4.10", check_constraint_410(m)))
    if lhs <= tol * m.scale ** 2:
        rep, c1 = _theorem1_certificate(m, tol)
        return Classification(Verdict.ETA_EINSTEIN, m.tau, 1.0, None, cert + c1, rep.alpha, rep.beta, tol)
    return Classification(Verdict.NOT_ETA_EINSTEIN, m.tau, None, None, cert, tol=tol)


# -- 4D Einstein, Singer-Thorpe case analysis --------------------------------------


def st_scale(p: STParams) -> float:
    return max(1.0, abs(p.a), abs(p.b), abs(p.c), abs(p.tau) / 12.0)


def quadratic_516(tau: float) -> float:
    """tau^2 - 6 tau + 48, which has no real root (discriminant -156)."""
    return tau * tau - 6.0 * tau + 48.0


DISCRIMINANT_516 = 36.0 - 4.0 * 48.0


def quadratic_517(tau: float) -> float:
    return (tau - 12.0) * (tau - 24.0)


def st_equal_pattern(p: STParams, tol: float = DEFAULT_TOL):
    """Which of a, b, c coincide.

    Returns (pattern, gaps) where pattern is 'equal', 'two-equal:<pair>',
    'distinct' or 'degenerate'. A gap counts as zero when <= tol * scale and
    as nonzero when > 10 tol * scale; anything between is ambiguous.
    """
    t = tol * st_scale(p)
    gaps = {"a-b": abs(p.a - p.b), "b-c": abs(p.b - p.c), "c-a": abs(p.c - p.a)}
    if any(t < g <= 10 * t for g in gaps.values()):
        return "degenerate", gaps
    equal = [k for k, g in gaps.items() if g <= t]
    if len(equal) == 3:
        return "equal", gaps
    if len(equal) == 1:
        return f"two-equal:{equal[0]}", gaps
    if not equal:
        return "distinct", gaps
    return "degenerate", gaps


def classify_4d_einstein(p, tol: float = DEFAULT_TOL) -> Classification:
    """4D Einstein base in a Singer-Thorpe basis: eta-Einstein only for curvature 1 or 2."""
    if not isinstance(p, STParams):
        p = STParams.from_sequence(p)
    m = singer_thorpe_4d(p)
    tau = p.tau
    s = st_scale(p)
    c410 = check_constraint_410(m)
    best = min(res for _, res in st_sign_assignments(p, tau))
    if best > tol * s:
        return Classification(Verdict.NOT_ETA_EINSTEIN, tau, None, "super-einstein",
                              (("eq-5.4", best), ("eq-4.10", c410)), tol=tol)

    pattern, gaps = st_equal_pattern(p, tol)
    if pattern == "degenerate":
        amb = min((g for g in gaps.values() if g > tol * s), default=0.0)
        return Classification(Verdict.CONTRADICTION, tau, None, "degenerate-branch",
                              (("branch-gap", amb),), tol=tol)

    if pattern == "equal":
        r517 = quadratic_517(tau)
        if abs(r517) <= tol * s ** 2:
            rep, cert = _theorem1_certificate(m, tol)
            return Classification(Verdict.ETA_EINSTEIN, tau, tau / 12.0, "equal",
                                  (("eq-5.17", r517), ("eq-4.10", c410)) + cert, rep.alpha, rep.beta, tol)
        return Classification(Verdict.NOT_ETA_EINSTEIN, tau, None, "equal",
                              (("eq-5.17", r517), ("eq-4.10", c410)), tol=tol)

    # (5.5)-(5.7): the three values 2(a^2+d^2), 2(b^2+e^2), 2(c^2+f^2) all equal alpha - 8
    vals = np.array([2 * (p.a ** 2 + p.d ** 2), 2 * (p.b ** 2 + p.e ** 2), 2 * (p.c ** 2 + p.f ** 2)])
    spread = float(vals.max() - vals.min())
    if spread > tol * s ** 2:
        return Classification(Verdict.NOT_ETA_EINSTEIN, tau, None, pattern,
                              (("eq-5.5-5.7", spread), ("eq-4.10", c410)), tol=tol)
    alpha = float(vals.mean() + 8.0)
    if pattern == "distinct":
        # (5.8)-(5.10) would force a = b = c
        return Classification(Verdict.CONTRADICTION, tau, None, "distinct-abc",
                              (("eq-5.8-5.10", min(gaps.values())), ("eq-4.10", c410)), alpha=alpha, tol=tol)
    return Classification(Verdict.CONTRADICTION, tau, None, pattern,
                          (("eq-5.16", quadratic_516(tau)), ("eq-5.16-discriminant", DISCRIMINANT_516),
                           ("eq-4.10", c410)), alpha=alpha, tol=tol)
