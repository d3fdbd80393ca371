"""Truncated Taylor arithmetic over complex scalars.

A :class:`TaylorJet` holds the normalized Taylor coefficients
``coeffs[k] = f^(k)(x0) / k!`` of a function at a base point. Arithmetic and
the elementary functions below propagate jets exactly (up to rounding) through
the standard power-series recurrences, so high-order derivatives of closed
form expressions come out without any differencing.

The elementary functions (:func:`exp`, :func:`tanh`, ...) are polymorphic: a
jet goes through the recurrence, a :class:`BiJet` through composition, and
anything else through numpy. Evaluators written with them therefore work on
scalars, arrays and jets alike.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from numbers import Number

import numpy as np

MAX_ORDER = 64


class SingularCompositionError(ValueError):
    """Raised when a function is composed with a jet at a singular point."""


class TaylorJet:
    """Univariate truncated power series at ``base_point``."""

    __slots__ = ("base_point", "coeffs")
    __array_priority__ = 100

    def __init__(self, base_point, coeffs):
        self.base_point = complex(base_point)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a non-empty vector")

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> complex:
        return self.coeffs[0]

    def __repr__(self) -> str:
        return f"TaylorJet(base_point={self.base_point!r}, order={self.order})"

    def _like(self, coeffs) -> TaylorJet:
        return TaylorJet(self.base_point, coeffs)

    def _coerce(self, other) -> TaylorJet | None:
        if isinstance(other, TaylorJet):
            if other.order != self.order or other.base_point != self.base_point:
                raise ValueError("jets must share base point and order")
            return other
        if isinstance(other, (Number, np.number)):
            c = np.zeros(self.order + 1, dtype=complex)
            c[0] = other
            return self._like(c)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._like(self.coeffs + o.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._like(self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._like(o.coeffs - self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (Number, np.number)):
            return self._like(self.coeffs * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.order + 1
        return self._like(np.convolve(self.coeffs, o.coeffs)[:n])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Number, np.number)):
            return self._like(self.coeffs / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * reciprocal(o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * reciprocal(self)

    def __pow__(self, a):
        if isinstance(a, (int, np.integer)) and a >= 0:
            result = self._coerce(1.0)
            base = self
            n = int(a)
            while n:
                if n & 1:
                    result = result * base
                base = base * base
                n >>= 1
            return result
        return power(self, a)

    def derivative(self) -> TaylorJet:
        """Jet of f' (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1)
        return self._like(self.coeffs[1:] * k)

    def partial(self, axis: int = 0) -> TaylorJet:
        if axis != 0:
            raise ValueError("univariate jet has a single axis")
        return self.derivative()

    def derivatives(self) -> np.ndarray:
        """Return ``[f(x0), f'(x0), ..., f^(order)(x0)]``."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coeffs * fact

    def log_abs_derivatives(self) -> np.ndarray:
        """``log|f^(k)(x0)|`` without forming k! explicitly."""
        k = np.arange(self.order + 1)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.coeffs)) + np.array([math.lgamma(i + 1) for i in k])


def jet_variable(x0, order: int, *, allow_high_order: bool = False) -> TaylorJet:
    """The identity function expanded at ``x0``."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > MAX_ORDER and not allow_high_order:
        raise ValueError(f"order {order} exceeds {MAX_ORDER}; pass allow_high_order=True")
    c = np.zeros(order + 1, dtype=complex)
    c[0] = x0
    if order >= 1:
        c[1] = 1.0
    return TaylorJet(x0, c)


def jet_constant(value, like: TaylorJet) -> TaylorJet:
    return like._coerce(value)


# -- recurrences ------------------------------------------------------------


def _jet_exp(u: TaylorJet) -> TaylorJet:
    n = u.order
    uc = u.coeffs
    e = np.zeros(n + 1, dtype=complex)
    e[0] = np.exp(uc[0])
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        e[k] = np.dot(j * uc[1 : k + 1], e[k - 1 :: -1][: k]) / k
    return u._like(e)


def _jet_tanh(u: TaylorJet) -> TaylorJet:
    # t' = (1 - t^2) u'
    n = u.order
    uc = u.coeffs
    t = np.zeros(n + 1, dtype=complex)
    s = np.zeros(n + 1, dtype=complex)
    t[0] = np.tanh(uc[0])
    s[0] = 1.0 - t[0] * t[0]
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        t[k] = np.dot(j * uc[1 : k + 1], s[k - 1 :: -1][:k]) / k
        s[k] = -np.dot(t[: k + 1], t[k::-1])
    return u._like(t)


def _jet_cosh_sinh(u: TaylorJet) -> tuple[TaylorJet, TaylorJet]:
    n = u.order
    uc = u.coeffs
    c = np.zeros(n + 1, dtype=complex)
    s = np.zeros(n + 1, dtype=complex)
    c[0] = np.cosh(uc[0])
    s[0] = np.sinh(uc[0])
    for k in range(1, n + 1):
        ju = np.arange(1, k + 1) * uc[1 : k + 1]
        c[k] = np.dot(ju, s[k - 1 :: -1][:k]) / k
        s[k] = np.dot(ju, c[k - 1 :: -1][:k]) / k
    return u._like(c), u._like(s)


def _jet_reciprocal(u: TaylorJet) -> TaylorJet:
    uc = u.coeffs
    if uc[0] == 0:
        raise SingularCompositionError("reciprocal of a jet with zero constant term")
    n = u.order
    r = np.zeros(n + 1, dtype=complex)
    r[0] = 1.0 / uc[0]
    for k in range(1, n + 1):
        r[k] = -np.dot(uc[1 : k + 1], r[k - 1 :: -1][:k]) / uc[0]
    return u._like(r)


def _jet_power(u: TaylorJet, a: float) -> TaylorJet:
    # u p' = a p u'  =>  k u0 p_k = sum_j (a j - (k - j)) u_j p_{k-j}
    uc = u.coeffs
    if uc[0] == 0:
        raise SingularCompositionError("non-integer power of a jet with zero constant term")
    n = u.order
    p = np.zeros(n + 1, dtype=complex)
    p[0] = np.power(uc[0], a)
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        p[k] = np.dot((a * j - (k - j)) * uc[1 : k + 1], p[k - 1 :: -1][:k]) / (k * uc[0])
    return u._like(p)


# -- polymorphic elementaries ----------------------------------------------


def exp(x):
    if isinstance(x, TaylorJet):
        return _jet_exp(x)
    if isinstance(x, BiJet):
        return x.compose(exp)
    return np.exp(x)


def tanh(x):
    if isinstance(x, TaylorJet):
        return _jet_tanh(x)
    if isinstance(x, BiJet):
        return x.compose(tanh)
    return np.tanh(x)


def cosh(x):
    if isinstance(x, TaylorJet):
        return _jet_cosh_sinh(x)[0]
    if isinstance(x, BiJet):
        return x.compose(cosh)
    return np.cosh(x)


def sinh(x):
    if isinstance(x, TaylorJet):
        return _jet_cosh_sinh(x)[1]
    if isinstance(x, BiJet):
        return x.compose(sinh)
    return np.sinh(x)


def reciprocal(x):
    if isinstance(x, TaylorJet):
        return _jet_reciprocal(x)
    if isinstance(x, BiJet):
        return x.compose(reciprocal)
    return 1.0 / x


def power(x, a: float):
    """Principal-branch power ``x**a``."""
    if isinstance(x, TaylorJet):
        if float(a).is_integer() and a >= 0:
            return x ** int(a)
        return _jet_power(x, float(a))
    if isinstance(x, BiJet):
        return x.compose(lambda t: power(t, a))
    if not float(a).is_integer() and not np.iscomplexobj(x):
        x = np.asarray(x, dtype=complex)
    return np.power(x, a)


def sqrt(x):
    return power(x, 0.5)


ELEMENTARY = {
    "exp": exp,
    "tanh": tanh,
    "cosh": cosh,
    "sinh": sinh,
    "reciprocal": reciprocal,
    "sqrt": sqrt,
}


def jet_apply(tag: str, x: TaylorJet, a: float | None = None) -> TaylorJet:
    """Apply the elementary function named ``tag`` to a jet.

    ``tag`` is one of ``exp, tanh, cosh, sinh, reciprocal, sqrt, power``;
    ``power`` needs the exponent ``a``.
    """
    if tag == "power":
        if a is None:
            raise ValueError("power needs an exponent")
        return power(x, a)
    try:
        fn = ELEMENTARY[tag]
    except KeyError:
        raise ValueError(f"unknown elementary function {tag!r}") from None
    return fn(x)


def jet_derivatives(f: Callable, x0, K: int, *, allow_high_order: bool = False) -> np.ndarray:
    """Return ``[f(x0), f'(x0), ..., f^(K)(x0)]`` for a jet-expressible ``f``."""
    x = jet_variable(x0, K, allow_high_order=allow_high_order)
    y = f(x)
    if not isinstance(y, TaylorJet):
        # constant expression
        out = np.zeros(K + 1, dtype=complex)
        out[0] = y
        return out
    return y.derivatives()


# -- bivariate jets ---------------------------------------------------------


class BiJet:
    """Truncated bivariate Taylor series, total degree <= ``order``.

    ``coeffs[i, j]`` multiplies ``dx**i * dy**j``. Elementary functions act
    by composing their univariate jet at the constant term with the
    nilpotent remainder.
    """

    __slots__ = ("base_point", "coeffs")
    __array_priority__ = 100

    def __init__(self, base_point, coeffs):
        self.base_point = tuple(complex(b) for b in base_point)
        c = np.asarray(coeffs, dtype=complex)
        n = c.shape[0]
        mask = np.add.outer(np.arange(n), np.arange(n)) < n
        self.coeffs = np.where(mask, c, 0)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self) -> complex:
        return self.coeffs[0, 0]

    def _like(self, c) -> BiJet:
        return BiJet(self.base_point, c)

    def _coerce(self, other) -> BiJet | None:
        if isinstance(other, BiJet):
            if other.order != self.order or other.base_point != self.base_point:
                raise ValueError("jets must share base point and order")
            return other
        if isinstance(other, (Number, np.number)):
            c = np.zeros_like(self.coeffs)
            c[0, 0] = other
            return self._like(c)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._like(self.coeffs + o.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._like(self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._like(o.coeffs - self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (Number, np.number)):
            return self._like(self.coeffs * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.order + 1
        out = np.zeros((n, n), dtype=complex)
        a, b = self.coeffs, o.coeffs
        for i in range(n):
            for j in range(n - i):
                if a[i, j] != 0:
                    out[i:, j:] += a[i, j] * b[: n - i, : n - j]
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Number, np.number)):
            return self._like(self.coeffs / other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * reciprocal(o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * reciprocal(self)

    def __pow__(self, a):
        if isinstance(a, (int, np.integer)) and a >= 0:
            result = self._coerce(1.0)
            for _ in range(int(a)):
                result = result * self
            return result
        return power(self, a)

    def compose(self, f: Callable) -> BiJet:
        """``f(self)`` via the univariate jet of ``f`` at the constant term."""
        n = self.order
        outer = f(jet_variable(self.value, n))
        a = outer.coeffs
        delta = self - self.value
        result = self._coerce(a[n])
        for k in range(n - 1, -1, -1):
            result = result * delta + a[k]
        return result

    def partial(self, axis: int) -> BiJet:
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        n = self.order
        out = np.zeros((n, n), dtype=complex)
        if axis == 0:
            i = np.arange(1, n + 1)[:, None]
            out[:, :] = (self.coeffs[1:, :n] * i)
        elif axis == 1:
            j = np.arange(1, n + 1)[None, :]
            out[:, :] = (self.coeffs[:n, 1:] * j)
        else:
            raise ValueError("axis must be 0 or 1")
        return BiJet(self.base_point, out)


def bijet_variables(point, order: int) -> tuple[BiJet, BiJet]:
    """Coordinate functions ``(x, y)`` expanded at ``point``."""
    x0, y0 = point
    n = order + 1
    cx = np.zeros((n, n), dtype=complex)
    cy = np.zeros((n, n), dtype=complex)
    cx[0, 0] = x0
    cy[0, 0] = y0
    if order >= 1:
        cx[1, 0] = 1.0
        cy[0, 1] = 1.0
    return BiJet(point, cx), BiJet(point, cy)


def coordinate_jets(point, order: int) -> list:
    """Coordinate jets for a 1-D (scalar) or 2-D point."""
    if np.ndim(point) == 0:
        return [jet_variable(point, order)]
    pt = tuple(point)
    if len(pt) == 1:
        return [jet_variable(pt[0], order)]
    if len(pt) == 2:
        return list(bijet_variables(pt, order))
    raise ValueError("only dimensions 1 and 2 are supported")


def richardson_derivative(f: Callable, x0, k: int, h: float = 1e-2):
    """k-th derivative by central differences with one Richardson step.

    The order-matched stencil has error O(h^2); combining steps ``h`` and
    ``h/2`` gives O(h^4). ``f`` may work in extended precision (e.g. mpmath
    numbers), which high ``k`` needs since cancellation grows like
    ``2^k / h^k``.
    """

    def central(step):
        total = 0
        for j in range(k + 1):
            total += (-1) ** j * math.comb(k, j) * f(x0 + (k / 2 - j) * step)
        return total / step**k

    return (4 * central(h / 2) - central(h)) / 3
