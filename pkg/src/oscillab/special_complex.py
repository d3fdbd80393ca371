"""``Erfc(z) = int_z^inf exp(-v^2) dv`` on the complex plane.

Only this normalization is exposed: ``Erfc(z) = (sqrt(pi)/2) erfc(z)`` in the
usual convention, so ``Erfc(0) = sqrt(pi)/2`` and ``Erfc' = -exp(-z^2)``.

Evaluation works in the right half-plane and reflects through
``Erfc(z) = sqrt(pi) - Erfc(-z)`` otherwise:

* ``|z| <= 2``: Maclaurin series of ``int_0^z exp(-v^2) dv``;
* ``|z| > 2`` and ``|arg z| <= 3pi/8``: Laplace continued fraction for
  ``2 exp(z^2) Erfc(z)``;
* the remaining wedge around the imaginary axis: Gauss-Legendre integration
  of ``exp(-v^2)`` along the ray from the series anchor at ``|v| = 2``.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .taylor_jet import BiJet, TaylorJet, exp as jexp

SQRT_PI = math.sqrt(math.pi)
HALF_SQRT_PI = SQRT_PI / 2
_EPS = np.finfo(float).eps
_SERIES_RADIUS = 2.0
_CF_ARG = 3 * math.pi / 8


class ErfcOverflowError(OverflowError):
    """``Erfc(z)`` exceeds double range (``Re z^2 < -700``)."""


class NoConvergenceError(RuntimeError):
    pass


class DerivativeUnderflowError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ErfcValue:
    value: complex
    regime: str
    est_error: float


def _series_integral(z: complex) -> tuple[complex, float]:
    """``int_0^z exp(-v^2) dv`` and an absolute error estimate."""
    z2 = z * z
    p = z
    total = z
    biggest = abs(z)
    n = 0
    while True:
        n += 1
        p *= -z2 / n
        term = p / (2 * n + 1)
        total += term
        biggest = max(biggest, abs(term))
        if abs(term) <= 1e-17 * abs(total) and n > abs(z2):
            break
        if n > 500:
            raise NoConvergenceError("Maclaurin series did not converge")
    return total, 4 * _EPS * biggest


def _laplace_cf(z: complex) -> tuple[complex, float]:
    """``F(z)`` with ``Erfc(z) = exp(-z^2) / (2 F(z))`` (modified Lentz)."""
    tiny = 1e-300
    f = z
    C = f
    D = 0.0
    for n in range(1, 20000):
        a = n / 2.0
        D = z + a * D
        D = tiny if D == 0 else D
        C = z + a / C
        C = tiny if C == 0 else C
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 2 * _EPS:
            return f, 4 * _EPS * n**0.5
    raise NoConvergenceError(f"continued fraction did not converge at z={z}")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _segment_integral(a: complex, b: complex, panels: int) -> complex:
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1] - edges[0]) / 2
    t = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(half * _GL_WEIGHTS, panels)
    v = a + (b - a) * t
    return (b - a) * np.sum(w * np.exp(-v * v))


def line_integral(a: complex, b: complex, panels: int | None = None) -> complex:
    """``int_a^b exp(-v^2) dv`` along the straight segment (Gauss-Legendre)."""
    a, b = complex(a), complex(b)
    if panels is None:
        L = abs(b - a)
        R = max(abs(a), abs(b), 1.0)
        panels = int(4 + 2 * L * R)
    return _segment_integral(a, b, panels)


def _right_half(z: complex) -> ErfcValue:
    r = abs(z)
    if r <= _SERIES_RADIUS:
        s, err = _series_integral(z)
        return ErfcValue(HALF_SQRT_PI - s, "series", err)
    if abs(math.atan2(z.imag, z.real)) <= _CF_ARG:
        F, rel = _laplace_cf(z)
        with np.errstate(under="ignore"):
            val = cmath.exp(-z * z) / (2 * F) if (-z * z).real > -745 else 0j
        return ErfcValue(val, "asymptotic", rel * abs(val))
    anchor = _SERIES_RADIUS * z / r
    s, err = _series_integral(anchor)
    base = HALF_SQRT_PI - s
    L = r - _SERIES_RADIUS
    panels = int(8 + 2 * L * r)
    coarse = _segment_integral(anchor, z, panels)
    fine = _segment_integral(anchor, z, 2 * panels)
    val = base - fine
    return ErfcValue(val, "path-integral", err + abs(fine - coarse) + 8 * _EPS * abs(fine))


def erfc_eval(z) -> ErfcValue:
    """``int_z^inf exp(-v^2) dv`` with regime tag and error estimate."""
    z = complex(z)
    if (z * z).real < -700:
        raise ErfcOverflowError(f"Erfc({z}) exceeds double range")
    if z.real >= 0:
        out = _right_half(z)
    else:
        w = _right_half(-z)
        out = ErfcValue(SQRT_PI - w.value, w.regime, w.est_error)
    if z.imag == 0:
        out = ErfcValue(complex(out.value.real, 0.0), out.regime, out.est_error)
    return out


def _erfc_values(z) -> np.ndarray | complex:
    arr = np.asarray(z, dtype=complex)
    flat = np.array([erfc_eval(v).value for v in arr.ravel()], dtype=complex)
    out = flat.reshape(arr.shape)
    return out[()] if out.ndim == 0 else out


def _jet_erfc(u: TaylorJet) -> TaylorJet:
    # E' = -exp(-u^2) u'
    g = jexp(-(u * u)).coeffs
    uc = u.coeffs
    n = u.order
    e = np.zeros(n + 1, dtype=complex)
    e[0] = erfc_eval(uc[0]).value
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        e[k] = -np.dot(j * uc[1 : k + 1], g[k - 1 :: -1][:k]) / k
    return u._like(e)


def erfc(x):
    """Polymorphic ``Erfc``: jets, arrays and scalars."""
    if isinstance(x, TaylorJet):
        return _jet_erfc(x)
    if isinstance(x, BiJet):
        return x.compose(erfc)
    return _erfc_values(x)


def erfc_derivative(z):
    return -np.exp(-np.asarray(z, dtype=complex) ** 2)


def erfc_reflect_check(z) -> tuple[float, float]:
    """Residuals of ``Erfc(conj z) = conj Erfc(z)`` and
    ``Erfc(-conj z) = sqrt(pi) - conj Erfc(z)``."""
    z = complex(z)
    e = erfc_eval(z).value
    r1 = abs(erfc_eval(z.conjugate()).value - e.conjugate())
    r2 = abs(erfc_eval(-z.conjugate()).value - (SQRT_PI - e.conjugate()))
    return r1, r2


@dataclass(frozen=True)
class SectorGrowthCheck:
    x: float
    y: float
    mu: float
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def erfc_sector_growth(x: float, y: float, mu: float) -> SectorGrowthCheck:
    """Compare ``|Erfc(x+iy)|`` with ``(1-mu) y exp(-x^2/mu^2 + mu^2 y^2)``."""
    if x < 0 or y <= 0 or not 0 < mu < 1:
        raise ValueError("need x >= 0, y > 0 and 0 < mu < 1")
    lhs = abs(erfc_eval(complex(x, y)).value)
    rhs = (1 - mu) * y * math.exp(-(x * x) / (mu * mu) + mu * mu * y * y)
    return SectorGrowthCheck(x, y, mu, lhs, rhs)


def hyperbola_integral_lower_bound(x: float, y: float, mu: float) -> float:
    """``int_{mu y}^y exp(-x^2 y^2 / t^2 + t^2) dt`` by Gauss-Legendre."""
    t = mu * y + (1 - mu) * y * (_GL_NODES + 1) / 2
    w = (1 - mu) * y / 2 * _GL_WEIGHTS
    return float(np.sum(w * np.exp(-(x * x * y * y) / (t * t) + t * t)))


def complex_newton(
    f: Callable,
    df: Callable,
    z0,
    tol: float = 1e-12,
    max_iter: int = 60,
    *,
    max_halvings: int = 8,
    step_tol: float = 0.0,
) -> complex:
    """Damped Newton iteration for a holomorphic ``f``.

    The step is halved (at most ``max_halvings`` times) while ``|f|`` does
    not decrease. Returns ``z`` with ``|f(z)| <= tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = complex(z0)
    fz = complex(f(z))
    for _ in range(max_iter):
        if abs(fz) <= tol:
            return z
        d = complex(df(z))
        if d == 0 or not np.isfinite(d) or abs(d) < 1e-300:
            raise DerivativeUnderflowError(f"derivative vanished at z={z}")
        step = fz / d
        for _ in range(max_halvings + 1):
            trial = z - step
            try:
                ft = complex(f(trial))
            except (ErfcOverflowError, OverflowError):
                ft = complex(np.inf)
            if np.isfinite(ft) and abs(ft) < abs(fz):
                break
            step /= 2
        else:
            # no decrease: accept the smallest step to escape flat regions
            pass
        if not np.isfinite(ft):
            raise NoConvergenceError(f"Newton left the representable region near z={z}")
        z, fz = trial, ft
        if step_tol and abs(step) < step_tol and abs(fz) <= 1e3 * tol:
            return z
    if abs(fz) <= tol:
        return z
    raise NoConvergenceError(f"no convergence after {max_iter} iterations (|f|={abs(fz):.2e})")
