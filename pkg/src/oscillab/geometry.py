"""Riemannian metrics on R^d (d = 1, 2) and their Laplace-Beltrami operators.

A metric is a callable taking a list of coordinates (floats, Taylor jets or
bivariate jets) and returning the matrix ``g_jk`` as nested lists, so that
derivatives of the coefficients come from jet arithmetic. The operator

    L u = |g|^(-1/2) d_j (|g|^(1/2) g^jk d_k u)
        = g^jk d_j d_k u - g^jk Gamma^l_jk d_l u

is available in both forms.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from . import taylor_jet as tj
from .analysis import SymbolEstimateReport, symbol_check


class SingularMetricError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class MetricField:
    dim: int
    g: Callable
    name: str = "custom"

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")

    def matrix(self, x) -> np.ndarray:
        pt = _as_point(x, self.dim)
        G = np.array(self.g(list(pt)), dtype=complex)
        return G.real if np.all(G.imag == 0) else G

    def check_positive(self, grid, tol: float = 1e-8) -> float:
        """Smallest eigenvalue of ``g`` over the grid (must exceed ``tol``)."""
        lo = min(float(np.linalg.eigvalsh(self.matrix(p)).min()) for p in grid)
        if lo <= tol:
            raise SingularMetricError(f"metric {self.name} degenerates on the grid (min eigenvalue {lo:.3e})")
        return lo


@dataclass(frozen=True)
class OperatorCoefficients:
    a: np.ndarray
    b: np.ndarray


def _as_point(x, dim: int) -> tuple[float, ...]:
    pt = tuple(np.atleast_1d(np.asarray(x, dtype=float)).tolist())
    if len(pt) != dim:
        raise ValueError(f"expected a point of dimension {dim}")
    return pt


def euclidean_metric(dim: int = 1) -> MetricField:
    def g(x):
        return [[1.0 if j == k else 0.0 for k in range(dim)] for j in range(dim)]

    return MetricField(dim, g, "euclidean")


def hyperboloid_metric(dim: int = 1) -> MetricField:
    """Metric induced on the graph ``t = sqrt(1 + |x|^2)``:
    ``g_jk = delta_jk + x_j x_k / (1 + |x|^2)``."""

    def g(x):
        r2 = 1.0
        for xi in x:
            r2 = r2 + xi * xi
        inv = tj.reciprocal(r2)
        return [[(1.0 if j == k else 0.0) + x[j] * x[k] * inv for k in range(dim)] for j in range(dim)]

    return MetricField(dim, g, f"hyperboloid{dim}")


def conformal_metric_1d(factor: Callable, name: str = "custom") -> MetricField:
    """``g_11 = factor(x)`` on the line."""
    return MetricField(1, lambda x: [[factor(x[0])]], name)


# -- jet helpers ------------------------------------------------------------


def _d(entry, axis: int):
    if isinstance(entry, tj.TaylorJet):
        return entry.coeffs[1] if axis == 0 else 0.0
    if isinstance(entry, tj.BiJet):
        return entry.partial(axis).value
    return 0.0


def _val(entry):
    return entry.value if isinstance(entry, (tj.TaylorJet, tj.BiJet)) else entry


def _det(G):
    if len(G) == 1:
        return G[0][0]
    return G[0][0] * G[1][1] - G[0][1] * G[1][0]


def _inverse(G):
    det = _det(G)
    if len(G) == 1:
        return [[tj.reciprocal(G[0][0]) if not isinstance(G[0][0], float) else 1.0 / G[0][0]]]
    inv = tj.reciprocal(det) if isinstance(det, (tj.TaylorJet, tj.BiJet)) else 1.0 / det
    return [[G[1][1] * inv, -G[0][1] * inv], [-G[1][0] * inv, G[0][0] * inv]]


def _numeric(G) -> np.ndarray:
    return np.array([[complex(_val(e)) for e in row] for row in G]).real


def inverse_metric(m: MetricField, x) -> np.ndarray:
    G = m.matrix(x)
    if abs(np.linalg.det(G)) < 1e-300:
        raise SingularMetricError(f"metric {m.name} is singular at {x}")
    return np.linalg.inv(G)


def christoffel(m: MetricField, x) -> np.ndarray:
    """``Gamma[l, i, j] = 1/2 g^kl (d_i g_kj + d_j g_ik - d_k g_ij)``."""
    pt = _as_point(x, m.dim)
    coords = tj.coordinate_jets(pt if m.dim > 1 else pt[0], 1)
    G = m.g(coords)
    dG = np.array([[[np.real(_d(G[k][j], i)) for j in range(m.dim)] for k in range(m.dim)] for i in range(m.dim)])
    ginv = inverse_metric(m, pt)
    n = m.dim
    gam = np.zeros((n, n, n))
    for l in range(n):
        for i in range(n):
            for j in range(n):
                gam[l, i, j] = 0.5 * sum(
                    ginv[k, l] * (dG[i, k, j] + dG[j, i, k] - dG[k, i, j]) for k in range(n)
                )
    return gam


def laplace_beltrami(m: MetricField, x) -> OperatorCoefficients:
    """``a = g^jk`` and ``b_l = -sum_jk g^jk Gamma^l_jk`` at ``x``."""
    ginv = inverse_metric(m, x)
    gam = christoffel(m, x)
    b = -np.einsum("jk,ljk->l", ginv, gam)
    return OperatorCoefficients(ginv, b)


def lb_expanded(m: MetricField, u: Callable, x) -> complex:
    """``g^jk d_j d_k u - g^jk Gamma^l_jk d_l u`` at ``x``; ``u`` takes a coordinate list."""
    pt = _as_point(x, m.dim)
    coords = tj.coordinate_jets(pt if m.dim > 1 else pt[0], 2)
    U = u(coords)
    coeffs = laplace_beltrami(m, pt)
    total = 0.0
    for j in range(m.dim):
        Uj = U.partial(j)
        total += coeffs.b[j] * Uj.value
        for k in range(m.dim):
            total += coeffs.a[j, k] * Uj.partial(k).value
    return complex(total)


def lb_divergence(m: MetricField, u: Callable, x) -> complex:
    """``|g|^(-1/2) d_j (|g|^(1/2) g^jk d_k u)`` at ``x`` by jet arithmetic."""
    pt = _as_point(x, m.dim)
    c2 = tj.coordinate_jets(pt if m.dim > 1 else pt[0], 2)
    c1 = tj.coordinate_jets(pt if m.dim > 1 else pt[0], 1)
    U = u(c2)
    grad = [U.partial(k) for k in range(m.dim)]
    G = m.g(c1)
    G = [[e if isinstance(e, (tj.TaylorJet, tj.BiJet)) else grad[0] * 0 + e for e in row] for row in G]
    vol = tj.sqrt(_det(G))
    ginv = _inverse(G)
    total = 0.0
    for j in range(m.dim):
        flux = vol * sum((ginv[j][k] * grad[k] for k in range(1, m.dim)), ginv[j][0] * grad[0])
        total += _d(flux, j)
    return complex(total / _val(vol))


# -- estimates --------------------------------------------------------------


def default_decay_grid(extent: float = 30.0, n: int = 60) -> np.ndarray:
    """Geometric spacing in ``|x|``, mirrored, plus the origin."""
    pos = np.geomspace(1e-2, extent, n)
    return np.concatenate([-pos[::-1], [0.0], pos])


def metric_decay_check(m: MetricField, K: int, grid=None) -> SymbolEstimateReport:
    """Symbol estimates for every component ``g_jk`` along each coordinate axis.

    In two dimensions each component is restricted to the lines through the
    origin along the axes. The verdict is the conjunction over components.
    """
    if K > 20:
        raise ValueError("K must be at most 20")
    grid = default_decay_grid() if grid is None else np.asarray(grid, dtype=float)
    reports = []
    for j in range(m.dim):
        for k in range(j, m.dim):
            for axis in range(m.dim):

                def comp(t, j=j, k=k, axis=axis):
                    pt = [t * 0.0 for _ in range(m.dim)]
                    pt[axis] = t
                    return m.g(pt)[j][k] + t * 0.0

                reports.append(symbol_check(comp, K, grid))
    constants = np.max([r.constants for r in reports], axis=0)
    rate = max(r.geometric_rate for r in reports)
    notes = tuple(n for r in reports for n in r.notes)
    return SymbolEstimateReport(
        constants,
        rate,
        all(r.verdict for r in reports),
        np.max([r.rates for r in reports], axis=0),
        max(r.half_grid_rate for r in reports),
        notes,
    )


def l1_shell_grid(R: float, r_max: float, n_r: int = 200, n_theta: int = 400) -> np.ndarray:
    """Points ``(x, xi)`` on diamonds ``|x| + |xi| = r`` for ``r`` geometric in ``[R, r_max]``.

    ``n_theta`` is rounded up to a multiple of 8 so edge midpoints are hit.
    """
    n_theta = 8 * math.ceil(n_theta / 8)
    t = np.arange(n_theta) * 4.0 / n_theta
    side = np.floor(t).astype(int)
    f = t - side
    ux = np.choose(side, [1 - f, -f, f - 1, f])
    uy = np.choose(side, [f, 1 - f, -f, f - 1])
    rs = np.geomspace(R, r_max, n_r)
    x = (rs[:, None] * ux[None, :]).ravel()
    xi = (rs[:, None] * uy[None, :]).ravel()
    return np.column_stack([x, xi])


def gamma_ellipticity(p: Callable, m: float, R: float, grid) -> float:
    """``min (1 + |x| + |xi|)^(-m) |p(x, xi)|`` over grid points with ``|x| + |xi| >= R``."""
    pts = np.asarray(grid, dtype=float)
    if pts.size == 0:
        raise ValueError("grid is empty")
    x, xi = pts[:, 0], pts[:, 1]
    r = np.abs(x) + np.abs(xi)
    if np.any(r < R * (1 - 1e-12)):
        raise ValueError("grid points must satisfy |x| + |xi| >= R")
    vals = np.abs(np.asarray(p(x, xi), dtype=complex)) * (1 + r) ** (-m)
    return float(vals.min())


def ellipticity_lower_bound(m: MetricField, grid) -> float:
    """``min xi^T g^-1 xi / |xi|^2`` = smallest eigenvalue of ``g^-1`` on the grid."""
    return min(float(np.linalg.eigvalsh(inverse_metric(m, p)).min()) for p in grid)


def inverse_defect(m: MetricField, grid) -> float:
    return max(float(np.max(np.abs(m.matrix(p) @ inverse_metric(m, p) - np.eye(m.dim)))) for p in grid)


def scattering_form(m: MetricField, r: float, eta: float = 0.0) -> dict[str, float]:
    """Polar components of a planar metric at ``x = r (cos eta, sin eta)``.

    ``g_rr = g(d_r, d_r)`` and ``g_eta = r^-2 g(d_eta, d_eta)``; both
    approach finite limits for an asymptotically conic metric.
    ``g(r d_r, r d_r)`` is returned too; it grows like ``r^2``.
    """
    if m.dim != 2:
        raise ValueError("scattering form needs a planar metric")
    e_r = np.array([math.cos(eta), math.sin(eta)])
    d_eta = r * np.array([-math.sin(eta), math.cos(eta)])
    G = m.matrix(r * e_r)
    g_rr = float(e_r @ G @ e_r)
    return {
        "g_rr": g_rr,
        "g_eta": float(d_eta @ G @ d_eta) / r**2,
        "g_r_dr": r * r * g_rr,
    }


def scattering_limits(m: MetricField, radii: Sequence[float] = (1e2, 1e3), eta: float = 0.3) -> dict[str, float]:
    """Differences of the polar components between the first two radii."""
    a, b = (scattering_form(m, r, eta) for r in radii[:2])
    return {
        "g_rr_change": abs(a["g_rr"] - b["g_rr"]),
        "g_eta_change": abs(a["g_eta"] - b["g_eta"]),
        "g_rr_limit": b["g_rr"],
        "g_eta_limit": b["g_eta"],
    }
