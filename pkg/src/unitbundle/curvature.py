"""Pointwise algebraic curvature tensors in an orthonormal frame.

Convention used throughout the package::

    R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    R_ijkl  = g(R(e_i, e_j) e_k, e_l)
    rho_jk  = sum_i R_ijki

so a space of constant sectional curvature kappa has
R(X,Y)Z = kappa (g(Y,Z) X - g(X,Z) Y), R_ijij = -kappa (i != j) and
rho = (n-1) kappa g.

All tensors are dense numpy arrays; symmetries are validated, never enforced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc, norm

UNIT_TOL = 1e-10


class ShapeError(ValueError):
    """Array shape does not match the declared dimension."""


class PreconditionError(ValueError):
    """An operation was called outside its domain (e.g. a non-unit vector)."""


def _as_array(a, rank: int, n: int | None = None) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != rank:
        raise ShapeError(f"expected rank-{rank} array, got shape {arr.shape}")
    dim = arr.shape[0]
    if any(s != dim for s in arr.shape):
        raise ShapeError(f"non-square rank-{rank} array of shape {arr.shape}")
    if n is not None and dim != n:
        raise ShapeError(f"expected dimension {n}, got {dim}")
    if dim < 2:
        raise ShapeError("dimension must be at least 2")
    return arr


@dataclass(frozen=True)
class FrameCurvature:
    """Components R_ijkl of a curvature tensor in an orthonormal frame."""

    components: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.components, 4)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def n(self) -> int:
        return self.components.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "FrameCurvature":
        return cls(np.zeros((n, n, n, n)))

    def apply(self, x, y, z) -> np.ndarray:
        """The vector R(x, y) z."""
        return np.einsum("ijkl,i,j,k->l", self.components, x, y, z)

    def __add__(self, other):
        return FrameCurvature(self.components + _components(other))

    def __mul__(self, s: float):
        return FrameCurvature(s * self.components)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric (0,2) tensor in an orthonormal frame (Ricci tensor, metric)."""

    components: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.components, 2)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def n(self) -> int:
        return self.components.shape[0]

    @classmethod
    def identity(cls, n: int, scale: float = 1.0) -> "SymTensor2":
        return cls(scale * np.eye(n))

    def asymmetry(self) -> float:
        c = self.components
        return float(np.max(np.abs(c - c.T)))


@dataclass(frozen=True)
class NablaRicci:
    """(nabla_{e_m} rho)(e_j, e_k) stored as components[m, j, k]."""

    components: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.components, 3)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def n(self) -> int:
        return self.components.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "NablaRicci":
        return cls(np.zeros((n, n, n)))


@dataclass(frozen=True)
class NablaCurvature:
    """(nabla_{e_m} R)(e_i, e_j, e_k, e_l) stored as components[m, i, j, k, l]."""

    components: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.components, 5)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def n(self) -> int:
        return self.components.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "NablaCurvature":
        return cls(np.zeros((n,) * 5))

    def apply(self, w, x, y, z) -> np.ndarray:
        """The vector (nabla_w R)(x, y) z."""
        return np.einsum("mijkl,m,i,j,k->l", self.components, w, x, y, z)

    def contract(self) -> NablaRicci:
        """nabla rho, i.e. the Ricci contraction of every slice."""
        return NablaRicci(np.einsum("mijki->mjk", self.components))


@dataclass
class ValidationReport:
    """Maximum absolute violation per invariant and the tolerance it was judged against."""

    violations: dict[str, float]
    tol: float
    passed: dict[str, bool] = field(init=False)

    def __post_init__(self):
        self.violations = {k: float(v) for k, v in self.violations.items()}
        self.passed = {k: v <= self.tol for k, v in self.violations.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    @property
    def worst(self) -> float:
        return max(self.violations.values(), default=0.0)


def _components(t) -> np.ndarray:
    return t.components if hasattr(t, "components") else np.asarray(t, dtype=float)


def curvature_violations(arr: np.ndarray) -> dict[str, float]:
    """Raw symmetry violations of a rank-4 array (no dimension checks)."""
    return {
        "antisymmetry_12": np.max(np.abs(arr + arr.transpose(1, 0, 2, 3))),
        "antisymmetry_34": np.max(np.abs(arr + arr.transpose(0, 1, 3, 2))),
        "pair_symmetry": np.max(np.abs(arr - arr.transpose(2, 3, 0, 1))),
        # R_ijkl + R_jkil + R_kijl
        "first_bianchi": np.max(
            np.abs(arr + arr.transpose(2, 0, 1, 3) + arr.transpose(1, 2, 0, 3))
        ),
    }


def validate_curvature(R, tol: float = 1e-12, n: int | None = None) -> ValidationReport:
    """Check antisymmetry, pair symmetry and first Bianchi.

    ``tol`` is absolute for unit-scale tensors and is scaled by max(1, |R|_inf).
    """
    arr = _as_array(_components(R), 4, n)
    scale = max(1.0, float(np.max(np.abs(arr))))
    return ValidationReport(curvature_violations(arr), tol * scale)


def ricci(R) -> SymTensor2:
    """rho(Y, Z) = sum_i R(e_i, Y, Z, e_i)."""
    arr = _as_array(_components(R), 4)
    return SymTensor2(np.einsum("ijki->jk", arr))


def scalar(rho) -> float:
    return float(np.trace(_as_array(_components(rho), 2)))


def norm_sq_curv(R) -> float:
    return float(np.sum(_as_array(_components(R), 4) ** 2))


def norm_sq_ricci(rho) -> float:
    return float(np.sum(_as_array(_components(rho), 2) ** 2))


def kulkarni_nomizu(h, k) -> np.ndarray:
    """(h o k)(X,Y,Z,W) = h(X,Z)k(Y,W) + h(Y,W)k(X,Z) - h(X,W)k(Y,Z) - h(Y,Z)k(X,W)."""
    h = _as_array(_components(h), 2)
    k = _as_array(_components(k), 2, h.shape[0])
    return (
        np.einsum("ik,jl->ijkl", h, k)
        + np.einsum("jl,ik->ijkl", h, k)
        - np.einsum("il,jk->ijkl", h, k)
        - np.einsum("jk,il->ijkl", h, k)
    )


def check_unit(u, n: int | None = None, tol: float = UNIT_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or (n is not None and u.shape[0] != n):
        raise ShapeError(f"bad vector shape {u.shape}")
    if abs(np.dot(u, u) - 1.0) > tol:
        raise PreconditionError(f"|u| = {np.linalg.norm(u)!r} is not 1")
    return u


def r_u_forms(R, u) -> tuple[SymTensor2, SymTensor2]:
    """The two quadratic forms of curvature along u.

    A(X,Y) = sum_i g(R(u,X)e_i, R(u,Y)e_i)
    B(X,Y) = sum_i g(R(u,e_i)X, R(u,e_i)Y)
    """
    arr = _as_array(_components(R), 4)
    u = check_unit(u, arr.shape[0])
    # Ru[x, i, l] = g(R(u, e_x) e_i, e_l)
    Ru = np.einsum("a,axil->xil", u, arr)
    A = np.einsum("xil,yil->xy", Ru, Ru)
    # Ru[i, x, l] also gives R(u, e_i) e_x
    B = np.einsum("ixl,iyl->xy", Ru, Ru)
    return SymTensor2(0.5 * (A + A.T)), SymTensor2(0.5 * (B + B.T))


def moment_integrand(R, us: np.ndarray) -> np.ndarray:
    """Q(u) = sum_i |R(u, e_i) u|^2 for each row u of ``us``."""
    arr = _as_array(_components(R), 4)
    v = np.einsum("sa,sc,aicl->sil", us, us, arr)
    return np.einsum("sil,sil->s", v, v)


def sphere_points(n: int, samples: int, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Halton points pushed to the unit sphere S^{n-1}."""
    pts = qmc.Halton(d=n, scramble=True, seed=seed).random(samples)
    z = norm.ppf(np.clip(pts, 1e-15, 1 - 1e-15))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sphere_moment(R, method: str = "exact-moment", samples: int = 100_000, seed: int = 0) -> float:
    """Average of Q(u) over the unit sphere.

    ``exact-moment`` contracts R against the isotropic fourth moment
    avg(u_a u_b u_c u_d) = (d_ab d_cd + d_ac d_bd + d_ad d_bc) / (n(n+2));
    ``quadrature`` averages Q over low-discrepancy sphere samples.
    """
    arr = _as_array(_components(R), 4)
    n = arr.shape[0]
    if method == "exact-moment":
        # Q(u) = u_a u_c u_b u_d T_acbd with T_acbd = sum_il R_aicl R_bidl
        T = np.einsum("aicl,bidl->acbd", arr, arr)
        total = (
            np.einsum("aacc->", T) + np.einsum("abab->", T) + np.einsum("abba->", T)
        )
        return float(total / (n * (n + 2)))
    if method == "quadrature":
        return float(np.mean(moment_integrand(arr, sphere_points(n, samples, seed))))
    raise ValueError(f"unknown sphere_moment method {method!r}")


def codazzi_asymmetry(dr) -> float:
    """Max |(nabla_a rho)(b,c) - (nabla_b rho)(a,c)| over the frame."""
    arr = _as_array(_components(dr), 3)
    return float(np.max(np.abs(arr - arr.transpose(1, 0, 2))))


def check_ricci_codazzi(dr, tol: float = 1e-12) -> bool:
    """True iff nabla rho is totally symmetric, i.e. Codazzi for all u, X, Y."""
    arr = _as_array(_components(dr), 3)
    last_pair = float(np.max(np.abs(arr - arr.transpose(0, 2, 1))))
    return max(codazzi_asymmetry(arr), last_pair) <= tol


def constant_curvature_components(n: int, kappa: float) -> np.ndarray:
    d = np.eye(n)
    return kappa * (np.einsum("jk,il->ijkl", d, d) - np.einsum("ik,jl->ijkl", d, d))
