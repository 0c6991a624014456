"""Base-manifold germs: pointwise curvature data for the spaces under study."""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .curvature import (
    FrameCurvature,
    NablaCurvature,
    NablaRicci,
    ShapeError,
    SymTensor2,
    constant_curvature_components,
    kulkarni_nomizu,
    norm_sq_curv,
    norm_sq_ricci,
    ricci,
    scalar,
    validate_curvature,
)

BIANCHI_TOL = 1e-12


@dataclass(frozen=True)
class CurvModel:
    """Curvature data (R, rho, tau, nabla R, nabla rho) at one point of a base manifold."""

    R: FrameCurvature
    dR: NablaCurvature | None = None
    label: str = ""
    rho: SymTensor2 = field(init=False)
    tau: float = field(init=False)
    drho: NablaRicci = field(init=False)

    def __post_init__(self):
        if not isinstance(self.R, FrameCurvature):
            object.__setattr__(self, "R", FrameCurvature(self.R))
        n = self.R.n
        dR = self.dR
        if dR is None:
            dR = NablaCurvature.zeros(n)
        elif not isinstance(dR, NablaCurvature):
            dR = NablaCurvature(dR)
        if dR.n != n:
            raise ShapeError(f"nabla R has dimension {dR.n}, R has {n}")
        rho = ricci(self.R)
        object.__setattr__(self, "dR", dR)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "tau", scalar(rho))
        object.__setattr__(self, "drho", dR.contract())

    @property
    def n(self) -> int:
        return self.R.n

    @property
    def norm_R(self) -> float:
        return norm_sq_curv(self.R)

    @property
    def norm_rho(self) -> float:
        return norm_sq_ricci(self.rho)

    @property
    def scale(self) -> float:
        """Curvature magnitude used to scale absolute tolerances."""
        return max(1.0, float(np.max(np.abs(self.R.components))))


@dataclass(frozen=True)
class STParams:
    """Singer-Thorpe sextuple of a 4D Einstein curvature tensor.

    f is normalized to -d-e when the first Bianchi identity holds within
    BIANCHI_TOL; a larger violation is rejected.
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def __post_init__(self):
        vals = [float(getattr(self, k)) for k in "abcdef"]
        for k, v in zip("abcdef", vals):
            object.__setattr__(self, k, v)
        if abs(vals[3] + vals[4] + vals[5]) > BIANCHI_TOL:
            raise ValueError(
                f"Singer-Thorpe parameters violate first Bianchi: d+e+f = {vals[3] + vals[4] + vals[5]!r}"
            )
        object.__setattr__(self, "f", -vals[3] - vals[4])

    @classmethod
    def from_sequence(cls, values) -> "STParams":
        values = [float(v) for v in values]
        if len(values) != 6:
            raise ValueError(f"expected 6 Singer-Thorpe parameters, got {len(values)}")
        return cls(*values)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    @property
    def tau(self) -> float:
        return -4.0 * (self.a + self.b + self.c)


def _set_with_symmetries(arr: np.ndarray, i: int, j: int, k: int, l: int, v: float) -> None:
    for (p, q, r, s), sign in (
        ((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1),
        ((k, l, i, j), 1), ((l, k, i, j), -1), ((k, l, j, i), -1), ((l, k, j, i), 1),
    ):
        arr[p, q, r, s] = sign * v


def constant_curvature(n: int, kappa: float) -> CurvModel:
    if n < 2:
        raise ValueError("dimension must be at least 2")
    return CurvModel(FrameCurvature(constant_curvature_components(n, kappa)),
                     label=f"constant-curvature:n={n},kappa={kappa!r}")


def from_ricci_3d(rho) -> CurvModel:
    """The 3D curvature tensor determined by its Ricci tensor.

    R(X,Y,Z,W) = g(X,W)rho(Y,Z) + g(Y,Z)rho(X,W) - g(X,Z)rho(Y,W) - g(Y,W)rho(X,Z)
                 + tau/2 (g(X,Z)g(Y,W) - g(Y,Z)g(X,W))
    """
    r = np.asarray(getattr(rho, "components", rho), dtype=float)
    if r.shape != (3, 3):
        raise ShapeError(f"from_ricci_3d needs a 3x3 Ricci tensor, got {r.shape}")
    if np.max(np.abs(r - r.T)) > 1e-12 * max(1.0, np.max(np.abs(r))):
        raise ValueError("Ricci tensor is not symmetric")
    tau = np.trace(r)
    g = np.eye(3)
    R = (
        np.einsum("il,jk->ijkl", g, r)
        + np.einsum("jk,il->ijkl", g, r)
        - np.einsum("ik,jl->ijkl", g, r)
        - np.einsum("jl,ik->ijkl", g, r)
        + 0.5 * tau * (np.einsum("ik,jl->ijkl", g, g) - np.einsum("jk,il->ijkl", g, g))
    )
    return CurvModel(FrameCurvature(R), label="from-ricci-3d")


def singer_thorpe_4d(p: STParams) -> CurvModel:
    """4D Einstein curvature in a Singer-Thorpe basis.

    R_1212 = R_3434 = a, R_1313 = R_2424 = b, R_1414 = R_2323 = c,
    R_1234 = d, R_1342 = e, R_1423 = f, and every component with exactly
    three distinct indices vanishes.
    """
    if not isinstance(p, STParams):
        p = STParams.from_sequence(p)
    R = np.zeros((4, 4, 4, 4))
    # zero-based indices
    for (i, j), v in (((0, 1), p.a), ((2, 3), p.a), ((0, 2), p.b), ((1, 3), p.b),
                      ((0, 3), p.c), ((1, 2), p.c)):
        _set_with_symmetries(R, i, j, i, j, v)
    _set_with_symmetries(R, 0, 1, 2, 3, p.d)
    _set_with_symmetries(R, 0, 2, 3, 1, p.e)
    _set_with_symmetries(R, 0, 3, 1, 2, p.f)
    return CurvModel(FrameCurvature(R), label="singer-thorpe:" + ",".join(repr(v) for v in p.as_tuple()))


def quadratic_contraction(R) -> np.ndarray:
    """R-check(X,Y) = sum_{i,j} g(R(X,e_i)e_j, R(Y,e_i)e_j)."""
    arr = getattr(R, "components", R)
    return np.einsum("aijl,bijl->ab", arr, arr)


def einstein_deviation(m: CurvModel) -> float:
    return float(np.max(np.abs(m.rho.components - (m.tau / m.n) * np.eye(m.n))))


def super_einstein_deviation(m: CurvModel) -> float:
    check = quadratic_contraction(m.R)
    return float(np.max(np.abs(check - (m.norm_R / m.n) * np.eye(m.n))))


def jacobi_square_deviation(m: CurvModel) -> float:
    """How far Q(u) = sum_i |R(u,e_i)u|^2 is from being constant on the unit sphere.

    Q(u) = T_abcd u_a u_b u_c u_d; Q is constant iff the symmetrized T is a
    multiple of the symmetrized d_ab d_cd.
    """
    n = m.n
    arr = m.R.components
    T = np.einsum("aicl,bidl->acbd", arr, arr)
    Ts = sum(T.transpose(p) for p in itertools.permutations(range(4))) / 24.0
    d = np.eye(n)
    S = (np.einsum("ab,cd->abcd", d, d) + np.einsum("ac,bd->abcd", d, d)
         + np.einsum("ad,bc->abcd", d, d)) / 3.0
    c = np.einsum("aabb->", Ts) / np.einsum("aabb->", S)
    return float(np.max(np.abs(Ts - c * S)))


def is_einstein(m: CurvModel, tol: float = 1e-10) -> bool:
    """rho = (tau/n) g within tol (scaled by the curvature magnitude)."""
    return einstein_deviation(m) <= tol * m.scale


def is_super_einstein(m: CurvModel, tol: float = 1e-10) -> bool:
    """Einstein, R-check = (|R|^2/n) g, and Q(u) = sum_i |R(u,e_i)u|^2 constant in u.

    In dimension 4 the R-check condition holds for every Einstein tensor; the
    Q-constancy is what the eta-Einstein condition at X = Y = u actually forces.
    """
    return (
        is_einstein(m, tol)
        and super_einstein_deviation(m) <= tol * m.scale ** 2
        and jacobi_square_deviation(m) <= tol * m.scale ** 2
    )


def st_super_einstein_residual(p: STParams, tau: float | None = None) -> float:
    """Max over the three relations of ||d| - |a + tau/12||, and likewise for e, f."""
    if tau is None:
        tau = p.tau
    elif abs(tau - p.tau) > 1e-9 * max(1.0, abs(tau)):
        raise ValueError(f"tau={tau!r} inconsistent with a+b+c (expected {p.tau!r})")
    t = tau / 12.0
    return max(abs(abs(p.d) - abs(p.a + t)), abs(abs(p.e) - abs(p.b + t)), abs(abs(p.f) - abs(p.c + t)))


def st_super_einstein_relations(p: STParams, tau: float | None = None, tol: float = 1e-9) -> bool:
    """The relations +-d = a + tau/12, +-e = b + tau/12, +-f = c + tau/12."""
    return st_super_einstein_residual(p, tau) <= tol * max(1.0, abs(p.tau) / 12.0)


def st_sign_assignments(p: STParams, tau: float | None = None):
    """Yield (signs, residual) for each of the eight sign choices in the super-Einstein relations."""
    if tau is None:
        tau = p.tau
    t = tau / 12.0
    for sd in (1, -1):
        for se in (1, -1):
            for sf in (1, -1):
                res = max(abs(sd * p.d - (p.a + t)), abs(se * p.e - (p.b + t)), abs(sf * p.f - (p.c + t)))
                yield (sd, se, sf), res


# -- random generators ------------------------------------------------------


def random_symmetric(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (a + a.T)


def random_curvature(n: int, rng: np.random.Generator, terms: int = 4, tol: float = 1e-12) -> FrameCurvature:
    """Random algebraic curvature tensor as a sum of h o h products."""
    for _ in range(100):
        R = np.zeros((n,) * 4)
        for _ in range(terms):
            h = random_symmetric(n, rng)
            R += rng.normal() * kulkarni_nomizu(h, h) / 4.0
        if validate_curvature(R, tol).ok:
            return FrameCurvature(R)
    raise RuntimeError("could not draw a valid curvature tensor")


def random_model(n: int, rng: np.random.Generator) -> CurvModel:
    return CurvModel(random_curvature(n, rng), label=f"random:n={n}")


def einstein_projection(R) -> FrameCurvature:
    """Remove the traceless Ricci part: R + rho_0 o g / (n-2), which has rho = (tau/n) g."""
    arr = np.asarray(getattr(R, "components", R), dtype=float)
    n = arr.shape[0]
    if n < 3:
        raise ValueError("Einstein projection needs n >= 3")
    rho = ricci(arr).components
    rho0 = rho - np.trace(rho) / n * np.eye(n)
    return FrameCurvature(arr + kulkarni_nomizu(rho0, np.eye(n)) / (n - 2))


def random_einstein_model(n: int, rng: np.random.Generator) -> CurvModel:
    return CurvModel(einstein_projection(random_curvature(n, rng)), label=f"random-einstein:n={n}")


def nabla_curvature_violations(arr: np.ndarray) -> dict[str, float]:
    """Slice-wise curvature symmetries plus the second Bianchi identity of a rank-5 array."""
    from .curvature import curvature_violations

    out: dict[str, float] = {}
    for sl in arr:
        for k, v in curvature_violations(sl).items():
            out[k] = max(out.get(k, 0.0), float(v))
    # (nabla_m R)_ijkl + (nabla_i R)_jmkl + (nabla_j R)_mikl
    cyc = arr + arr.transpose(1, 2, 0, 3, 4) + arr.transpose(2, 0, 1, 3, 4)
    out["second_bianchi"] = float(np.max(np.abs(cyc)))
    return out


@functools.lru_cache(maxsize=None)
def _nabla_curvature_basis(n: int) -> np.ndarray:
    from scipy.linalg import null_space

    N = n ** 5
    E = np.eye(N).reshape((N,) + (n,) * 5)
    rows = [
        E + E.transpose(0, 1, 3, 2, 4, 5),
        E + E.transpose(0, 1, 2, 3, 5, 4),
        E - E.transpose(0, 1, 4, 5, 2, 3),
        E + E.transpose(0, 1, 4, 2, 3, 5) + E.transpose(0, 1, 3, 4, 2, 5),
        E + E.transpose(0, 2, 3, 1, 4, 5) + E.transpose(0, 3, 1, 2, 4, 5),
    ]
    C = np.concatenate([r.reshape(N, N) for r in rows], axis=1)
    return null_space(C.T)


def random_nabla_curvature(n: int, rng: np.random.Generator) -> NablaCurvature:
    """Random rank-5 tensor obeying every algebraic identity of nabla R (n <= 4)."""
    if n > 4:
        raise ValueError("random nabla R is only generated for n <= 4")
    basis = _nabla_curvature_basis(n)
    return NablaCurvature((basis @ rng.normal(size=basis.shape[1])).reshape((n,) * 5))


def random_st_params(rng: np.random.Generator, scale: float = 1.0) -> STParams:
    a, b, c, d, e = rng.normal(scale=scale, size=5)
    return STParams(a, b, c, d, e, -d - e)


# -- serialization ----------------------------------------------------------


def model_to_record(m: CurvModel) -> dict:
    rec = {"n": m.n, "R": m.R.components.ravel().tolist(), "label": m.label}
    if np.any(m.dR.components):
        rec["dR"] = m.dR.components.ravel().tolist()
    return rec


def model_from_record(rec: dict) -> CurvModel:
    n = int(rec["n"])
    R = np.asarray(rec["R"], dtype=float)
    if R.size != n ** 4:
        raise ShapeError(f"record has {R.size} curvature components, expected {n ** 4}")
    dR = None
    if "dR" in rec:
        dR = np.asarray(rec["dR"], dtype=float).reshape((n,) * 5)
    return CurvModel(FrameCurvature(R.reshape((n,) * 4)), dR=dR, label=rec.get("label", ""))


def dumps_model(m: CurvModel) -> str:
    return json.dumps(model_to_record(m))


def loads_model(text: str) -> CurvModel:
    return model_from_record(json.loads(text))
