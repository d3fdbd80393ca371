"""Closed-form solutions of perturbed oscillator equations and their poles.

Three families:

* ``A``: ``-u'' + V u = 0`` with ``V = x^2 + 3 + (2x^2 - 6)/(x^2 + 1)^2`` and
  ``u = exp(-x^2/2) / (1 + x^2)``;
* ``B(theta)``: ``-u'' + V u = 0`` with ``u = cosh(a x)^-2 exp(-x^2/2)``,
  ``a = exp(-i theta)``, and
  ``V = x^2 - 1 - 2a^2 + 4a x tanh(a x) + 6a^2 tanh(a x)^2``;
* ``C(k, u0)``: ``u'' - x^2 u + u = (d/dx - x) u^k`` with ``u(0) = u0`` and
  ``u = exp(-x^2/2) [lam + sqrt(2k-2) Erfc(sqrt((k-1)/2) x)]^(1/(1-k))``,
  ``lam = u0^(1-k) - sqrt(pi (k-1)/2)``.

Every evaluator accepts scalars, numpy arrays and Taylor jets.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import taylor_jet as tj
from .special_complex import (
    SQRT_PI,
    ErfcOverflowError,
    NoConvergenceError,
    DerivativeUnderflowError,
    complex_newton,
    erfc,
    erfc_eval,
)

POLE_LIMIT = 1e10

CASE_B_POLE_NOTE = (
    "published pole formula z = exp(i(theta+pi/2)) (2m+1) pi differs by a factor 2 "
    "from the computed zero set of cosh(exp(-i theta) z), "
    "z = exp(i(theta+pi/2)) (2m+1) pi/2; reported roots are the computed ones"
)
CASE_B_POTENTIAL_NOTE = (
    "the tanh^2 term of the published potential carries a spurious factor x; "
    "V = x^2 - 1 - 2a^2 + 4a x tanh(a x) + 6a^2 tanh^2(a x) is the potential "
    "for which cosh^-2(a x) exp(-x^2/2) solves -u'' + V u = 0"
)


class PoleProximityError(ValueError):
    """The solution is too large to evaluate a meaningful residual."""


class RootSearchError(RuntimeError):
    """Fewer roots than requested were found."""


@dataclass(frozen=True)
class ClosedFormCase:
    tag: str
    theta: float = 0.0
    k: int = 0
    u0: float = 0.0
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.tag not in ("A", "B", "C"):
            raise ValueError(f"unknown case {self.tag!r}")
        if self.tag == "B" and not -math.pi / 2 < self.theta < math.pi / 2:
            raise ValueError("case B needs theta in (-pi/2, pi/2)")
        if self.tag == "C":
            if self.k < 2:
                raise ValueError("case C needs k >= 2")
            if not 0 < self.u0 < case_c_u0_bound(self.k):
                raise ValueError(
                    f"case C needs 0 < u0 < {case_c_u0_bound(self.k):.6g} so that lam > 0"
                )

    @property
    def lam(self) -> complex:
        """The eigenvalue parameter; for case C the constant ``lam``."""
        if self.tag == "C":
            return self.u0 ** (1 - self.k) - math.sqrt(math.pi * (self.k - 1) / 2)
        return 0.0

    @property
    def rotation(self) -> complex:
        return complex(math.cos(self.theta), -math.sin(self.theta))

    def potential(self, z):
        if self.tag == "A":
            z2 = z * z
            return z2 + 3 + (2 * z2 - 6) * tj.reciprocal((z2 + 1) * (z2 + 1))
        if self.tag == "B":
            a = self.rotation
            t = tj.tanh(a * z)
            return z * z - 1 - 2 * a * a + 4 * a * z * t + 6 * a * a * t * t
        # case C is written with the harmonic oscillator at eigenvalue 1
        return z * z

    def bracket(self, z):
        """``lam + sqrt(2k-2) Erfc(sqrt((k-1)/2) z)`` (case C)."""
        k = self.k
        return self.lam + math.sqrt(2 * k - 2) * erfc(math.sqrt((k - 1) / 2) * z)

    def solution(self, z):
        if self.tag == "A":
            return tj.exp(-z * z / 2) * tj.reciprocal(z * z + 1)
        if self.tag == "B":
            c = tj.cosh(self.rotation * z)
            return tj.exp(-z * z / 2) * tj.reciprocal(c * c)
        return tj.exp(-z * z / 2) * tj.power(self.bracket(z), 1.0 / (1 - self.k))

    def describe(self) -> dict:
        out = {"tag": self.tag}
        if self.tag == "B":
            out["theta"] = self.theta
        if self.tag == "C":
            out.update(k=self.k, u0=self.u0, lam=self.lam)
        return out


def case_c_u0_bound(k: int) -> float:
    """Largest ``u0`` with ``lam > 0``: ``(pi (k-1)/2)^(1/(2-2k))``."""
    return (math.pi * (k - 1) / 2) ** (1 / (2 - 2 * k))


def case_a() -> ClosedFormCase:
    return ClosedFormCase("A")


def case_b(theta: float = 0.0) -> ClosedFormCase:
    return ClosedFormCase("B", theta=theta, notes=(CASE_B_POTENTIAL_NOTE,))


def case_c(k: int, u0: float) -> ClosedFormCase:
    return ClosedFormCase("C", k=k, u0=u0)


def residual(case: ClosedFormCase, z) -> complex:
    """Pointwise defect of the case's equation at ``z``.

    A and B: ``-u'' + V u``. C: ``u'' - z^2 u + u - (u^k)' + z u^k``.
    """
    z = complex(z)
    if case.tag in ("A", "B"):
        x = tj.jet_variable(z, 2)
        u = case.solution(x)
        if abs(u.value) > POLE_LIMIT:
            raise PoleProximityError(f"|u({z})| = {abs(u.value):.3g} near a pole")
        V = case.potential(z)
        u2 = 2 * u.coeffs[2]
        return complex(-u2 + V * u.value)
    x = tj.jet_variable(z, 3)
    u = case.solution(x)
    if abs(u.value) > POLE_LIMIT:
        raise PoleProximityError(f"|u({z})| = {abs(u.value):.3g} near a singularity")
    uk = u ** case.k
    u2 = 2 * u.coeffs[2]
    duk = uk.coeffs[1]
    return complex(u2 - z * z * u.value + u.value - duk + z * uk.value)


def case_c_initial_check(k: int, u0: float) -> float:
    """``|u(0) - u0|`` for the case-C closed form."""
    return abs(case_c(k, u0).solution(0.0) - u0)


# -- singularities ----------------------------------------------------------


def _dedupe(roots, tol: float = 1e-6):
    out = []
    for r in roots:
        if not any(abs(abs(r) - abs(q)) < tol and abs(np.angle(r) - np.angle(q)) < tol for q in out):
            out.append(r)
    return sorted(out, key=lambda r: (abs(r), np.angle(r)))


def case_b_poles(case: ClosedFormCase, count: int, tol: float = 1e-13) -> list[complex]:
    """Zeros of ``cosh(a z)`` on the ray ``arg z = theta + pi/2``.

    Seeds sit at ``(2m+1) pi/2`` along the ray and are polished by Newton.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    a = case.rotation
    direction = complex(math.cos(case.theta + math.pi / 2), math.sin(case.theta + math.pi / 2))

    def f(z):
        return np.cosh(a * z)

    def df(z):
        return a * np.sinh(a * z)

    roots = []
    for m in range(count):
        seed = (2 * m + 1) * math.pi / 2 * direction
        try:
            z = complex_newton(f, df, seed, tol=tol, max_iter=100)
        except (NoConvergenceError, DerivativeUnderflowError):
            continue
        if (z / direction).real > 0:
            roots.append(z)
    found = _dedupe(roots)
    if len(found) < count:
        raise RootSearchError(f"found {len(found)} of {count} poles")
    return found[:count]


def case_c_root_function(case: ClosedFormCase):
    """``(f, f')`` for ``f(z) = lam + sqrt(2k-2) Erfc(sqrt((k-1)/2) z)``."""
    k = case.k
    s = math.sqrt((k - 1) / 2)
    amp = math.sqrt(2 * k - 2)
    lam = case.lam

    def f(z):
        return lam + amp * erfc_eval(s * z).value

    def df(z):
        return -amp * s * np.exp(-(s * z) ** 2)

    return f, df


def asymptotic_seeds(case: ClosedFormCase, count: int) -> list[complex]:
    """Approximate case-C roots from ``Erfc(w) ~ exp(-w^2) / (2w)``.

    With ``beta = lam / sqrt(2k-2)`` the root equation becomes
    ``w^2 = i pi (2m+1) - log(2 beta w)``, solved by fixed-point iteration
    for ``m = 0..count-1``; ``z = w / sqrt((k-1)/2)``.
    """
    s = math.sqrt((case.k - 1) / 2)
    beta = case.lam / math.sqrt(2 * case.k - 2)
    out = []
    for m in range(count):
        w = cmath.sqrt(1j * math.pi * (2 * m + 1))
        for _ in range(50):
            w = cmath.sqrt(1j * math.pi * (2 * m + 1) - cmath.log(2 * beta * w))
        out.append(w / s)
    return out


def case_c_singularities(
    case: ClosedFormCase,
    count: int,
    *,
    moduli=None,
    args=None,
    tol: float = 1e-12,
) -> list[complex]:
    """Roots of the case-C bracket in the sector ``pi/4 < arg z <= pi/2``.

    Newton is seeded on a ladder of moduli times arguments
    ``pi/4 + j pi/16``, ``j = 1..4``, plus one asymptotic seed per root
    index (:func:`asymptotic_seeds`); roots are deduplicated and sorted by
    modulus. Roots that Newton reaches outside the sector are dropped.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return []
    if moduli is None:
        moduli = np.arange(1.0, 12.0 + 1e-9, 0.25)
    if args is None:
        args = [math.pi / 4 + j * math.pi / 16 for j in range(1, 5)]
    f, df = case_c_root_function(case)
    seeds = [r * complex(math.cos(phi), math.sin(phi)) for r in moduli for phi in args]
    seeds += asymptotic_seeds(case, count + 4)
    # both terms of f are of size lam at a root
    ftol = tol * max(1.0, abs(case.lam))
    roots = []
    for z0 in seeds:
        try:
            z = complex_newton(f, df, z0, tol=ftol, max_iter=80, step_tol=1e-13 * abs(z0))
        except (NoConvergenceError, DerivativeUnderflowError, ErfcOverflowError):
            continue
        if math.pi / 4 < np.angle(z) <= math.pi / 2 + 1e-12:
            roots.append(z)
    found = _dedupe(roots)
    if len(found) < count:
        raise RootSearchError(f"found {len(found)} of {count} singularities")
    return found[:count]


def predict_singularities(case: ClosedFormCase, count: int, **kwargs) -> list[complex]:
    if case.tag == "B":
        return case_b_poles(case, count, **kwargs)
    if case.tag == "C":
        return case_c_singularities(case, count, **kwargs)
    raise ValueError("only cases B and C have predicted singularities")


def singularity_argument_trend(case: ClosedFormCase, count: int, **kwargs) -> np.ndarray:
    """Arguments of the first ``count`` case-C singularities by modulus."""
    if case.tag != "C":
        raise ValueError("the argument trend is defined for case C")
    if count == 0:
        return np.zeros(0)
    roots = case_c_singularities(case, count, **kwargs)
    return np.angle(np.array(roots))


def count_zeros(
    f, boundary, *, max_jump: float = 0.5, max_step: float = 0.02, max_points: int = 500000
) -> int:
    """Winding number of ``f`` along a closed polygon.

    ``boundary`` is a sequence of vertices traversed counterclockwise. Edges
    are first cut into pieces no longer than ``max_step`` (so phase windings
    cannot alias), then bisected until phase increments stay below
    ``max_jump``.
    For ``f`` holomorphic inside, this counts its zeros.
    """
    verts = [complex(v) for v in boundary]
    verts.append(verts[0])
    total = 0.0
    used = 0
    dense = []
    for a, b in zip(verts[:-1], verts[1:]):
        pieces = max(1, int(math.ceil(abs(b - a) / max_step)))
        dense.extend(a + (b - a) * np.arange(pieces) / pieces)
    dense.append(verts[0])
    vals = [complex(f(v)) for v in dense]
    if not all(vals):
        raise ValueError("f vanishes on the contour")
    for a, b, fa, fb in zip(dense[:-1], dense[1:], vals[:-1], vals[1:]):
        stack = [(a, b, fa, fb)]
        while stack:
            p, q, fp, fq = stack.pop()
            d = np.angle(fq / fp)
            if abs(d) > max_jump and abs(q - p) > 1e-12:
                m = (p + q) / 2
                fm = complex(f(m))
                if fm == 0:
                    raise ValueError("f vanishes on the contour")
                used += 1
                if used > max_points:
                    raise RuntimeError("contour refinement budget exhausted")
                stack.append((m, q, fm, fq))
                stack.append((p, m, fp, fm))
            else:
                total += d
    return int(round(total / (2 * math.pi)))


def sector_boundary(r_min: float, r_max: float, phi_min: float, phi_max: float, n: int = 64):
    """Counterclockwise polygon around ``{r_min<|z|<r_max, phi_min<arg z<phi_max}``."""
    radial = np.linspace(r_min, r_max, n)
    outer = r_max * np.exp(1j * np.linspace(phi_min, phi_max, n))
    inner = r_min * np.exp(1j * np.linspace(phi_max, phi_min, n))
    lower = radial * np.exp(1j * phi_min)
    upper = radial[::-1] * np.exp(1j * phi_max)
    return np.concatenate([lower, outer[1:], upper[1:], inner[1:-1]])
