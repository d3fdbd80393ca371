"""Combinatorial and operator identities, checked exactly or in coefficients.

Multi-index inequalities are enumerated exhaustively with integer
arithmetic. Operator identities act on Hermite coefficient vectors through a
polynomial symbol ``p(x, xi) = sum a_jk x^j xi^k`` quantized on the left,
``p(x, D) = sum a_jk x^j D^k`` with ``D = -i d/dx``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import taylor_jet as tj
from .hermite import HermiteExpansion, apply_monomial, ladder_d, ladder_x
from .special_complex import SQRT_PI, erfc_eval, erfc_reflect_check


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    cases: int
    failures: int
    max_defect: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0


# -- multi-indices ----------------------------------------------------------


def multi_indices(d: int, top: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(top + 1), repeat=d)


def below(alpha) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(range(a + 1) for a in alpha))


def mfact(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def mbinom(alpha, beta) -> int:
    return math.prod(math.comb(a, b) for a, b in zip(alpha, beta))


def _decompositions(alpha, parts: int):
    """All ordered ``(delta_1, ..., delta_parts)`` with sum ``alpha``."""
    if parts == 1:
        yield (tuple(alpha),)
        return
    for first in below(alpha):
        rest = tuple(a - f for a, f in zip(alpha, first))
        for tail in _decompositions(rest, parts - 1):
            yield (first,) + tail


def check_binomial_bound(dims=(1, 2, 3), top: int = 5) -> IdentityCheck:
    """``C(alpha, beta) <= 2^|alpha|``."""
    n = bad = 0
    for d in dims:
        for a in multi_indices(d, top):
            for b in below(a):
                n += 1
                bad += mbinom(a, b) > 2 ** sum(a)
    return IdentityCheck("binomial <= 2^|alpha|", n, bad)


def check_vandermonde(dims=(1, 2, 3), top: int = 5) -> IdentityCheck:
    """``sum_{|a'|=j, a'<=a} C(a, a') = C(|a|, j)``."""
    n = bad = 0
    for d in dims:
        for a in multi_indices(d, top):
            totals = {}
            for b in below(a):
                totals[sum(b)] = totals.get(sum(b), 0) + mbinom(a, b)
            for j in range(sum(a) + 1):
                n += 1
                bad += totals.get(j, 0) != math.comb(sum(a), j)
    return IdentityCheck("Vandermonde sum", n, bad)


def check_binomial_total(dims=(1, 2, 3), top: int = 5) -> IdentityCheck:
    """``C(alpha, beta) <= C(|alpha|, |beta|)``."""
    n = bad = 0
    for d in dims:
        for a in multi_indices(d, top):
            for b in below(a):
                n += 1
                bad += mbinom(a, b) > math.comb(sum(a), sum(b))
    return IdentityCheck("binomial <= total binomial", n, bad)


def check_multinomial(dims=(1, 2, 3), top: int = 5, parts=(2, 3)) -> IdentityCheck:
    """``alpha! / prod delta_i! <= |alpha|! / prod |delta_i|!``."""
    n = bad = 0
    for d in dims:
        for a in multi_indices(d, top):
            lhs_num = mfact(a)
            rhs_num = math.factorial(sum(a))
            for p in parts:
                for deltas in _decompositions(a, p):
                    n += 1
                    lhs = Fraction(lhs_num, math.prod(mfact(x) for x in deltas))
                    rhs = Fraction(rhs_num, math.prod(math.factorial(sum(x)) for x in deltas))
                    bad += lhs > rhs
    return IdentityCheck("multinomial <= total multinomial", n, bad)


def check_falling_factorial(dims=(1, 2, 3), top: int = 5) -> IdentityCheck:
    """``alpha! / (alpha-beta)! <= |alpha|! / |alpha-beta|!``."""
    n = bad = 0
    for d in dims:
        for a in multi_indices(d, top):
            for b in below(a):
                n += 1
                rest = tuple(x - y for x, y in zip(a, b))
                lhs = Fraction(mfact(a), mfact(rest))
                rhs = Fraction(math.factorial(sum(a)), math.factorial(sum(rest)))
                bad += lhs > rhs
    return IdentityCheck("falling factorial bound", n, bad)


def check_double_factorial_bound(top: int = 30) -> IdentityCheck:
    """``(a + 2g)! <= 2^(a + 4g) a! g!^2`` on the line."""
    n = bad = 0
    for a in range(top + 1):
        for g in range(top + 1):
            n += 1
            bad += math.factorial(a + 2 * g) > 2 ** (a + 4 * g) * math.factorial(a) * math.factorial(g) ** 2
    return IdentityCheck("(a+2g)! bound", n, bad)


# -- inverse Leibniz --------------------------------------------------------


def _poly_deriv(c: list[int], k: int = 1) -> list[int]:
    for _ in range(k):
        c = [i * c[i] for i in range(1, len(c))] or [0]
    return c


def _poly_shift(c: list[int], m: int) -> list[int]:
    return [0] * m + list(c)


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def _trim(c: list[int]) -> list[int]:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def inverse_leibniz_sides(alpha: int, beta: int, f: list[int]) -> tuple[list[int], list[int]]:
    """Both sides of the inverse Leibniz formula for an integer polynomial ``f``:

    ``x^b d^a f = sum_g (-1)^g b!/(b-g)! C(a, g) d^(a-g) (x^(b-g) f)``.
    """
    lhs = _poly_shift(_poly_deriv(f, alpha), beta)
    rhs = [0]
    for g in range(min(alpha, beta) + 1):
        coef = (-1) ** g * math.perm(beta, g) * math.comb(alpha, g)
        term = _poly_deriv(_poly_shift(f, beta - g), alpha - g)
        rhs = _poly_add(rhs, [coef * t for t in term])
    return _trim(lhs), _trim(rhs)


def check_inverse_leibniz(top: int = 6, degree: int = 8, seed: int = 0, trials: int = 5) -> IdentityCheck:
    rng = np.random.default_rng(seed)
    n = bad = 0
    for _ in range(trials):
        f = [int(v) for v in rng.integers(-9, 10, size=degree + 1)]
        for a in range(top + 1):
            for b in range(top + 1):
                n += 1
                lhs, rhs = inverse_leibniz_sides(a, b, f)
                bad += lhs != rhs
    return IdentityCheck("inverse Leibniz (exact polynomials)", n, bad)


def inverse_leibniz_jet_defect(alpha: int, beta: int, f: Callable, x0: float) -> float:
    """Same identity evaluated at ``x0`` with Taylor jets of a general ``f``."""
    order = alpha + beta + 2
    X = tj.jet_variable(x0, order)
    F = f(X)
    d = F
    for _ in range(alpha):
        d = d.derivative()
    lhs = x0**beta * d.value
    rhs = 0.0
    for g in range(min(alpha, beta) + 1):
        coef = (-1) ** g * math.perm(beta, g) * math.comb(alpha, g)
        t = X**(beta - g) * F
        for _ in range(alpha - g):
            t = t.derivative()
        rhs += coef * t.value
    return abs(lhs - rhs) / max(1.0, abs(lhs))


# -- symbols and quantization -----------------------------------------------

Symbol = dict  # {(j, k): coefficient} for x^j xi^k


def quantize(p: Symbol, u: HermiteExpansion) -> HermiteExpansion:
    """``p(x, D) u`` with ``D = -i d/dx``, coefficients exact."""
    out = HermiteExpansion.zeros(1)
    for (j, k), a in p.items():
        if a != 0:
            out = out + apply_monomial(u, k, j) * (a * (-1j) ** k)
    return out


def symbol_dxi(p: Symbol, order: int) -> Symbol:
    """``D_xi^order p`` with ``D_xi = -i d/dxi``."""
    out = {}
    for (j, k), a in p.items():
        if k >= order:
            out[(j, k - order)] = out.get((j, k - order), 0) + a * math.perm(k, order) * (-1j) ** order
    return out


def symbol_dx(p: Symbol, order: int) -> Symbol:
    out = {}
    for (j, k), a in p.items():
        if j >= order:
            out[(j - order, k)] = out.get((j - order, k), 0) + a * math.perm(j, order)
    return out


def _power_x(u: HermiteExpansion, m: int) -> HermiteExpansion:
    for _ in range(m):
        u = ladder_x(u)
    return u


def _power_d(u: HermiteExpansion, m: int) -> HermiteExpansion:
    for _ in range(m):
        u = ladder_d(u)
    return u


def _defect(a: HermiteExpansion, b: HermiteExpansion) -> float:
    n = max(a.basis_size, b.basis_size)
    scale = max(1.0, float(np.max(np.abs(a.padded(n).coeffs))))
    return float(np.max(np.abs((a - b).coeffs))) / scale


def multiplication_identity_defect(p: Symbol, u: HermiteExpansion, beta: int) -> float:
    """``x^b p(x,D) u`` against ``sum_g (-1)^g C(b,g) (D_xi^g p)(x,D) (x^(b-g) u)``."""
    lhs = _power_x(quantize(p, u), beta)
    rhs = HermiteExpansion.zeros(1)
    for g in range(beta + 1):
        rhs = rhs + quantize(symbol_dxi(p, g), _power_x(u, beta - g)) * ((-1) ** g * math.comb(beta, g))
    return _defect(lhs, rhs)


def derivative_identity_defect(p: Symbol, u: HermiteExpansion, alpha: int) -> float:
    """``d^a p(x,D) u`` against ``sum_d C(a,d) (dx^d p)(x,D) d^(a-d) u``."""
    lhs = _power_d(quantize(p, u), alpha)
    rhs = HermiteExpansion.zeros(1)
    for d in range(alpha + 1):
        rhs = rhs + quantize(symbol_dx(p, d), _power_d(u, alpha - d)) * math.comb(alpha, d)
    return _defect(lhs, rhs)


X_D_SYMBOL: Symbol = {(1, 1): 1j}  # x d/dx = x (i D)


def check_operator_identities(p: Symbol = X_D_SYMBOL, top: int = 4, N: int = 16, seed: int = 0, tol: float = 1e-12):
    rng = np.random.default_rng(seed)
    u = HermiteExpansion(rng.normal(size=N) + 1j * rng.normal(size=N))
    m_def = max(multiplication_identity_defect(p, u, b) for b in range(top + 1))
    d_def = max(derivative_identity_defect(p, u, a) for a in range(top + 1))
    return (
        IdentityCheck("x^b p(x,D) expansion", top + 1, int(m_def > tol), m_def),
        IdentityCheck("d^a p(x,D) expansion", top + 1, int(d_def > tol), d_def),
    )


def commutator_defect(u: HermiteExpansion) -> float:
    """``max |x u' - (x u)' + u|`` in coefficients, relative to ``max |u|``."""
    lhs = ladder_x(ladder_d(u)) - ladder_d(ladder_x(u))
    ref = (-u).padded(lhs.basis_size)
    return float(np.max(np.abs((lhs - ref).coeffs))) / max(1.0, float(np.max(np.abs(u.coeffs))))


# -- jets against finite differences ----------------------------------------

FD_FUNCTIONS: dict[str, tuple[Callable, Callable]] = {
    "tanh": (tj.tanh, mpmath.tanh),
    "1/(1+x^2)": (lambda x: tj.reciprocal(1 + x * x), lambda x: 1 / (1 + x * x)),
    "exp(-x^2/2)": (lambda x: tj.exp(-x * x / 2), lambda x: mpmath.exp(-x * x / 2)),
}


def jet_fd_relative_error(name: str, x0: float, k: int, h: float = 1e-2, floor: float = 1e-3) -> float:
    """Relative error of the jet derivative against a Richardson-extrapolated
    central difference evaluated with 40 significant digits.

    The error is measured relative to ``max(|f^(k)(x0)|, floor * M)`` with
    ``M`` the largest of ``|f^(j)(x0)|``, ``j <= k``, so isolated zeros of the
    k-th derivative do not divide by zero.
    """
    jet_f, mp_f = FD_FUNCTIONS[name]
    d = np.real(tj.jet_derivatives(jet_f, float(x0), k))
    with mpmath.workdps(40):
        fd = float(tj.richardson_derivative(mp_f, mpmath.mpf(x0), k, mpmath.mpf(h)))
    scale = max(abs(d[k]), floor * float(np.max(np.abs(d))))
    return abs(d[k] - fd) / scale


# -- Erfc suites ------------------------------------------------------------


def erfc_reflection_suite(points) -> IdentityCheck:
    worst = 0.0
    for z in points:
        r1, r2 = erfc_reflect_check(z)
        scale = max(1.0, abs(erfc_eval(z).value))
        worst = max(worst, r1 / scale, r2 / scale)
    return IdentityCheck("Erfc reflections", len(points), int(worst > 1e-12), worst)


def erfc_imaginary_axis(y: float) -> dict[str, complex]:
    """``Erfc(iy)`` computed, the path-integral form ``sqrt(pi)/2 - i int_0^y e^{t^2} dt``
    and the same expression without the factor ``i``."""
    with mpmath.workdps(30):
        integral = float(mpmath.quad(lambda t: mpmath.exp(t * t), [0, y]))
    return {
        "computed": erfc_eval(1j * y).value,
        "path_integral": complex(SQRT_PI / 2, -integral),
        "without_i": complex(SQRT_PI / 2 - integral, 0.0),
    }
