"""Central finite-difference jets and coordinate curvature from metric derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_FIRST = {
    2: ((-1, 1), (-0.5, 0.5)),
    4: ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
}
_SECOND_DIAG = {
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    4: {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12},
}


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference settings.

    ``h`` is the step in chart coordinates; ``nested_h`` (default 1e-2 * sqrt(h))
    is the outer step used when differentiating an already finite-differenced
    curvature tensor.
    """

    h: float = 1e-3
    order: int = 4
    nested_h: float | None = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("finite-difference step must be positive")
        if self.order not in _FIRST:
            raise ValueError(f"stencil order must be 2 or 4, got {self.order}")
        if self.nested_h is not None and not self.nested_h > 0:
            raise ValueError("nested step must be positive")

    @property
    def outer_h(self) -> float:
        return self.nested_h if self.nested_h is not None else 1e-2 * np.sqrt(self.h)

    @property
    def reach(self) -> int:
        """Stencil half-width in units of the step."""
        return self.order // 2


def jet(f, x: np.ndarray, h: float, order: int = 4, second: bool = True):
    """Value, gradient and Hessian of ``f`` at each row of ``x`` by central differences.

    ``f`` maps an array of points (..., N) to values (..., *S). Returns
    f0 (P, *S), df (P, N, *S) and, if ``second``, d2f (P, N, N, *S).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    P, N = x.shape
    offs, w1 = _FIRST[order]
    disp = [np.zeros(N)]
    axis_idx = {}
    for a in range(N):
        for p in offs:
            axis_idx[a, p] = len(disp)
            d = np.zeros(N)
            d[a] = p
            disp.append(d)
    pair_idx = {}
    if second:
        for a in range(N):
            for b in range(a + 1, N):
                for p in offs:
                    for q in offs:
                        pair_idx[a, b, p, q] = len(disp)
                        d = np.zeros(N)
                        d[a] = p
                        d[b] = q
                        disp.append(d)
    D = np.array(disp)
    pts = x[:, None, :] + h * D[None, :, :]
    vals = np.asarray(f(pts.reshape(-1, N)))
    vals = vals.reshape((P, len(D)) + vals.shape[1:])
    f0 = vals[:, 0]
    df = np.stack(
        [sum(w * vals[:, axis_idx[a, p]] for p, w in zip(offs, w1)) / h for a in range(N)], axis=1
    )
    if not second:
        return f0, df
    d2f = np.empty((P, N, N) + f0.shape[1:])
    w2 = _SECOND_DIAG[order]
    for a in range(N):
        d2f[:, a, a] = sum(w * (f0 if p == 0 else vals[:, axis_idx[a, p]]) for p, w in w2.items()) / h ** 2
        for b in range(a + 1, N):
            acc = sum(
                wp * wq * vals[:, pair_idx[a, b, p, q]]
                for p, wp in zip(offs, w1)
                for q, wq in zip(offs, w1)
            ) / h ** 2
            d2f[:, a, b] = acc
            d2f[:, b, a] = acc
    return f0, df, d2f


def directional_derivative(f, x: np.ndarray, direction: np.ndarray, h: float, order: int = 4):
    """d/dt f(x + t * direction) at t = 0 for a single point."""
    offs, w1 = _FIRST[order]
    pts = np.array([x + p * h * direction for p in offs])
    vals = np.asarray(f(pts))
    return sum(w * vals[i] for i, w in enumerate(w1)) / h


def christoffel_from_jet(g: np.ndarray, dg: np.ndarray):
    """Gamma^a_bc and the lowered Gamma_dbc from g_ab and dg[c, a, b] = d_c g_ab (leading batch dims allowed)."""
    ginv = np.linalg.inv(g)
    low = 0.5 * (
        np.einsum("...bdc->...dbc", dg) + np.einsum("...cdb->...dbc", dg) - dg
    )
    return np.einsum("...ad,...dbc->...abc", ginv, low), low, ginv


def riemann_from_jet(g: np.ndarray, dg: np.ndarray, d2g: np.ndarray):
    """Coordinate curvature from the 2-jet of a metric.

    Returns (Gamma, R_up, R_low) with R(d_c, d_d) d_b = R_up[a, b, c, d] d_a and
    R_low[i, j, k, l] = g(R(d_i, d_j) d_k, d_l).
    """
    Gam, low, ginv = christoffel_from_jet(g, dg)
    # d_e Gamma_dbc
    dlow = 0.5 * (
        np.einsum("...ebdc->...edbc", d2g) + np.einsum("...ecdb->...edbc", d2g) - d2g
    )
    dginv = -np.einsum("...ap,...epq,...qd->...ead", ginv, dg, ginv)
    dGam = np.einsum("...ead,...dbc->...eabc", dginv, low) + np.einsum("...ad,...edbc->...eabc", ginv, dlow)
    R_up = (
        np.einsum("...cadb->...abcd", dGam)
        - np.einsum("...dacb->...abcd", dGam)
        + np.einsum("...ace,...edb->...abcd", Gam, Gam)
        - np.einsum("...ade,...ecb->...abcd", Gam, Gam)
    )
    R_low = np.einsum("...la,...akij->...ijkl", g, R_up)
    return Gam, R_up, R_low


def ricci_from_riemann(R_up: np.ndarray) -> np.ndarray:
    """Ric(d_d, d_b) = R_up[c, b, c, d], the trace of X -> R(X, Y) Z."""
    return np.einsum("...cbcd->...db", R_up)


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Gram-Schmidt of the coordinate frame: columns E_i with E^T g E = I."""
    L = np.linalg.cholesky(g)
    return np.swapaxes(np.linalg.inv(L), -1, -2)
