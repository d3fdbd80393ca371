"""Orthonormal Hermite functions and ladder-operator algebra.

``h_n(x) = p_n(x) exp(-x^2/2)`` with ``-h_n'' + x^2 h_n = (2n + 1) h_n`` and
``<h_m, h_n> = delta_mn``. A :class:`HermiteExpansion` is a coefficient vector
in this basis; multiplication by ``x`` and differentiation act on it exactly
through

    x h_n  =  sqrt((n+1)/2) h_{n+1} + sqrt(n/2) h_{n-1}
    h_n'   = -sqrt((n+1)/2) h_{n+1} + sqrt(n/2) h_{n-1}

so both operators lengthen the vector by one and never truncate.
"""

from __future__ import annotations

import warnings
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

PI_QUARTER = np.pi ** -0.25
_RESCALE = 1e150
_LOG_RESCALE = np.log(_RESCALE)


class HermiteOverflowError(OverflowError):
    """h_n(z) is not representable; evaluate with ``log=True`` instead."""


class QuadratureDegreeWarning(UserWarning):
    """The expansion tail is not negligible at the requested basis size."""


def _scaled_recurrence(N: int, z: np.ndarray):
    """Polynomial parts of h_0..h_{N-1} with per-point log scales.

    Returns ``(v, logscale)`` with ``h_n(z) = v[n] * exp(logscale[n] - z^2/2)``.
    """
    dtype = complex if np.iscomplexobj(z) else float
    v = np.zeros((N,) + z.shape, dtype=dtype)
    logscale = np.zeros((N,) + z.shape)
    scale = np.zeros(z.shape)
    v[0] = PI_QUARTER
    if N > 1:
        v[1] = np.sqrt(2.0) * z * PI_QUARTER
    for n in range(1, N - 1):
        v[n + 1] = np.sqrt(2.0 / (n + 1)) * z * v[n] - np.sqrt(n / (n + 1)) * v[n - 1]
        big = np.abs(v[n + 1]) > _RESCALE
        if np.any(big):
            v[n + 1] = np.where(big, v[n + 1] / _RESCALE, v[n + 1])
            v[n] = np.where(big, v[n] / _RESCALE, v[n])
            scale = scale + np.where(big, _LOG_RESCALE, 0.0)
            # v[n] now carries the new scale as well
            logscale[n] = np.where(big, scale, logscale[n])
        logscale[n + 1] = scale
    return v, logscale


def hermite_functions(N: int, z, *, log: bool = False) -> np.ndarray:
    """Values ``h_n(z)`` for ``n < N``, shape ``(N,) + shape(z)``.

    Real input gives real output. With ``log=True`` the complex logarithm
    ``log|h_n| + i arg h_n`` is returned, which stays finite far into the
    complex plane where the values themselves overflow.
    """
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        z = z.astype(float)
    if N < 1:
        return np.zeros((0,) + z.shape, dtype=z.dtype)
    v, logscale = _scaled_recurrence(N, z)
    expo = logscale - z * z / 2
    if log:
        with np.errstate(divide="ignore"):
            return np.log(v.astype(complex)) + expo
    re = np.real(expo)
    if np.any((re > 709.0) & (v != 0)):
        raise HermiteOverflowError("h_n(z) overflows; use log=True")
    with np.errstate(under="ignore"):
        return v * np.exp(expo)


def hermite_eval(n: int, z, *, log: bool = False):
    """``h_n(z)`` for a single index; entire in ``z``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = hermite_functions(n + 1, z, log=log)[n]
    return out[()] if np.ndim(out) == 0 else out


def hermite_derivatives(N: int, z) -> np.ndarray:
    """Values ``h_n'(z)`` for ``n < N`` via the ladder relation."""
    H = hermite_functions(N + 1, z)
    n = np.arange(N).reshape((N,) + (1,) * np.ndim(z))
    dH = -np.sqrt((n + 1) / 2.0) * H[1 : N + 1]
    dH[1:] += np.sqrt(n[1:] / 2.0) * H[: N - 1]
    return dH


@dataclass(frozen=True)
class HermiteExpansion:
    """``sum_n coeffs[n] h_n``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "coeffs", c)

    @property
    def basis_size(self) -> int:
        return self.coeffs.size

    def __call__(self, z):
        return synth(self, z)

    def __add__(self, other: HermiteExpansion) -> HermiteExpansion:
        n = max(self.basis_size, other.basis_size)
        return HermiteExpansion(self.padded(n).coeffs + other.padded(n).coeffs)

    def __sub__(self, other: HermiteExpansion) -> HermiteExpansion:
        n = max(self.basis_size, other.basis_size)
        return HermiteExpansion(self.padded(n).coeffs - other.padded(n).coeffs)

    def __mul__(self, scalar) -> HermiteExpansion:
        return HermiteExpansion(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> HermiteExpansion:
        return HermiteExpansion(-self.coeffs)

    def padded(self, n: int) -> HermiteExpansion:
        if n < self.basis_size:
            raise ValueError("padding cannot shorten an expansion")
        c = np.zeros(n, dtype=complex)
        c[: self.basis_size] = self.coeffs
        return HermiteExpansion(c)

    def truncated(self, n: int) -> HermiteExpansion:
        return HermiteExpansion(self.coeffs[:n].copy())

    def norm(self) -> float:
        """L2 norm by Parseval."""
        return float(np.linalg.norm(self.coeffs))

    @classmethod
    def unit(cls, n: int, size: int | None = None) -> HermiteExpansion:
        c = np.zeros(size or n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @classmethod
    def zeros(cls, size: int) -> HermiteExpansion:
        return cls(np.zeros(size, dtype=complex))


def ladder_x(u: HermiteExpansion) -> HermiteExpansion:
    """Coefficients of ``x u`` (length N + 1)."""
    c = u.coeffs
    N = c.size
    out = np.zeros(N + 1, dtype=complex)
    n = np.arange(N)
    out[1:] += np.sqrt((n + 1) / 2.0) * c
    out[: N - 1] += np.sqrt(n[1:] / 2.0) * c[1:]
    return HermiteExpansion(out)


def ladder_d(u: HermiteExpansion) -> HermiteExpansion:
    """Coefficients of ``u'`` (length N + 1)."""
    c = u.coeffs
    N = c.size
    out = np.zeros(N + 1, dtype=complex)
    n = np.arange(N)
    out[1:] -= np.sqrt((n + 1) / 2.0) * c
    out[: N - 1] += np.sqrt(n[1:] / 2.0) * c[1:]
    return HermiteExpansion(out)


def apply_monomial(u: HermiteExpansion, alpha: int, beta: int) -> HermiteExpansion:
    """Coefficients of ``x^beta d^alpha u`` (derivatives applied first)."""
    for _ in range(alpha):
        u = ladder_d(u)
    for _ in range(beta):
        u = ladder_x(u)
    return u


def harmonic_action(u: HermiteExpansion) -> HermiteExpansion:
    """``-u'' + x^2 u``, diagonal with entries 2n + 1."""
    n = np.arange(u.basis_size)
    return HermiteExpansion((2 * n + 1) * u.coeffs)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight ``exp(-x^2)``."""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def function_weights(self) -> np.ndarray:
        """``weights * exp(nodes^2)`` for integrating plain ``f(x) dx``.

        Computed as the reciprocal Christoffel sums ``1 / sum_n h_n(x_j)^2``,
        which stay finite where ``exp(x_j^2)`` would overflow.
        """
        return _function_weights(self.size)

    def integrate(self, f: Callable) -> complex:
        """Approximate ``int f(x) exp(-x^2) dx``."""
        return np.sum(self.weights * f(self.nodes))


@lru_cache(maxsize=64)
def _golub_welsch(N: int):
    k = np.arange(1, N)
    off = np.sqrt(k / 2.0)
    nodes, vecs = eigh_tridiagonal(np.zeros(N), off)
    weights = np.sqrt(np.pi) * vecs[0, :] ** 2
    # exact symmetry of the rule
    nodes = (nodes - nodes[::-1]) / 2
    weights = (weights + weights[::-1]) / 2
    return nodes, weights


@lru_cache(maxsize=64)
def _function_weights(N: int) -> np.ndarray:
    nodes, _ = _golub_welsch(N)
    H = hermite_functions(N, nodes)
    fw = 1.0 / np.sum(H * H, axis=0)
    fw.setflags(write=False)
    return fw


def gauss_hermite_rule(N: int) -> QuadratureRule:
    """N-point rule, exact for polynomials of degree <= 2N - 1.

    Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of
    the Hermite polynomials, weights ``sqrt(pi)`` times the squared first
    eigenvector components (Golub-Welsch).
    """
    if N < 1:
        raise ValueError("N must be positive")
    nodes, weights = _golub_welsch(N)
    return QuadratureRule(nodes.copy(), weights.copy(), 2 * N - 1)


@lru_cache(maxsize=32)
def _projection_matrix(N: int, M: int):
    nodes, _ = _golub_welsch(M)
    H = hermite_functions(N, nodes)
    P = H * _function_weights(M)[None, :]
    P.setflags(write=False)
    return nodes, P


def expand(f: Callable, N: int, *, quad_points: int | None = None) -> HermiteExpansion:
    """Coefficients ``<f, h_n>`` for ``n < N`` by Gauss-Hermite quadrature.

    ``f`` is evaluated on an array of nodes. The default rule has ``2N``
    points. Warns with :class:`QuadratureDegreeWarning` when the last
    coefficient is not below ``1e-8`` of the largest.
    """
    if N < 1:
        raise ValueError("N must be positive")
    M = quad_points or 2 * N
    nodes, P = _projection_matrix(N, M)
    c = P @ np.asarray(f(nodes), dtype=complex)
    cmax = np.max(np.abs(c))
    if cmax > 0 and abs(c[-1]) > 1e-8 * cmax:
        warnings.warn(
            f"tail coefficient |c[{N - 1}]| = {abs(c[-1]):.2e} exceeds 1e-8 of max; "
            "increase the basis size",
            QuadratureDegreeWarning,
            stacklevel=2,
        )
    return HermiteExpansion(c)


def synth(u: HermiteExpansion, z):
    """Evaluate ``sum_n c_n h_n(z)`` (complex ``z`` allowed)."""
    z = np.asarray(z)
    H = hermite_functions(u.basis_size, z)
    out = np.tensordot(u.coeffs, H, axes=(0, 0))
    return out[()] if out.ndim == 0 else out


def synth_log(u: HermiteExpansion, z):
    """``log u(z)`` evaluated with log-scaled basis values."""
    z = np.asarray(z)
    L = hermite_functions(u.basis_size, z, log=True)
    shift = np.max(np.real(L), axis=0)
    with np.errstate(under="ignore"):
        s = np.tensordot(u.coeffs, np.exp(L - shift), axes=(0, 0))
    with np.errstate(divide="ignore"):
        out = np.log(s) + shift
    return out[()] if out.ndim == 0 else out
