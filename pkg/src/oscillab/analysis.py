"""Analyticity and decay diagnostics.

Norms ``||x^b d^a u||`` are computed in coefficient space with the exact
ladder actions, so high-order products never alias. On top of that sit the
weighted sums

    S_N^{s,eps}[u] = sum_{a+b <= N} eps^(a+b) ||x^b d^a u||_{Q^s} / M(a, b),
    M(a, b) = sqrt(a!) sqrt(max(a, b)!),

Gaussian decay fits, sector scans in ``{|y| < eps (1 + |x|)}``, a
constructive ``(eps, c, C)`` certificate and a symbol-class estimate checker.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import taylor_jet as tj
from .hermite import HermiteExpansion, expand, ladder_d, ladder_x, synth, QuadratureDegreeWarning

log = logging.getLogger(__name__)

HEADROOM = 64
SINGULAR_LIMIT = 1e10


class HeadroomError(ValueError):
    """Requested ``a + b + s`` exceeds the padding headroom."""


class DegenerateSampleError(ValueError):
    pass


class JetSingularityError(ArithmeticError):
    pass


# -- norms ------------------------------------------------------------------


def log_big_m(alpha: int, beta: int) -> float:
    if alpha < 0 or beta < 0:
        raise ValueError("indices must be nonnegative")
    return 0.5 * (math.lgamma(alpha + 1) + math.lgamma(max(alpha, beta) + 1))


def big_m(alpha: int, beta: int) -> float:
    """``sqrt(alpha!) * sqrt(max(alpha, beta)!)``."""
    if alpha < 0 or beta < 0:
        raise ValueError("indices must be nonnegative")
    if alpha + beta > 30:
        return math.exp(log_big_m(alpha, beta))
    return math.sqrt(math.factorial(alpha) * math.factorial(max(alpha, beta)))


def _check_headroom(total: int, headroom: int):
    if total > headroom:
        raise HeadroomError(f"a + b + s = {total} exceeds headroom {headroom}")


def _qs_norm(w: HermiteExpansion, s: int) -> float:
    """``sum_{a'+b' <= s} ||x^b' d^a' w||``."""
    total = 0.0
    d = w
    for a in range(s + 1):
        v = d
        for b in range(s - a + 1):
            total += v.norm()
            v = ladder_x(v)
        d = ladder_d(d)
    return total


def mixed_norm(u: HermiteExpansion, alpha: int, beta: int, s: int = 0, *, headroom: int = HEADROOM) -> float:
    """``||x^beta d^alpha u||_{Q^s}``, exact via ladder algebra and Parseval."""
    if min(alpha, beta, s) < 0:
        raise ValueError("indices must be nonnegative")
    _check_headroom(alpha + beta + s, headroom)
    w = u
    for _ in range(alpha):
        w = ladder_d(w)
    for _ in range(beta):
        w = ladder_x(w)
    return _qs_norm(w, s)


def shell_sums(u: HermiteExpansion, s: int, N: int, *, headroom: int = HEADROOM) -> np.ndarray:
    """``T_k = sum_{a+b=k} ||x^b d^a u||_{Q^s} / M(a, b)`` for ``k = 0..N``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    _check_headroom(N + s, headroom)
    T = np.zeros(N + 1)
    d = u
    for a in range(N + 1):
        w = d
        for b in range(N - a + 1):
            T[a + b] += _qs_norm(w, s) / big_m(a, b)
            w = ladder_x(w)
        d = ladder_d(d)
    return T


def weighted_sum(u: HermiteExpansion, s: int, eps: float, N: int, *, headroom: int = HEADROOM) -> float:
    """``S_N^{s,eps}[u]``."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    T = shell_sums(u, s, N, headroom=headroom)
    return float(sum(eps**k * T[k] for k in range(N + 1)))


def shells_converge(T: np.ndarray, eps: float, window: int, ratio: float = 0.9) -> bool:
    """Ratio test ``eps T_{k+1} / T_k <= ratio`` over the last ``window`` shells."""
    if eps == 0:
        return True
    n = len(T) - 1
    for k in range(max(0, n - window), n):
        if T[k + 1] == 0:
            continue
        if T[k] == 0 or eps * T[k + 1] / T[k] > ratio:
            return False
    return True


def epsilon_threshold(
    u: HermiteExpansion,
    s: int,
    N_max: int,
    *,
    eps_max: float = 1e3,
    rel_tol: float = 1e-10,
    headroom: int = HEADROOM,
) -> float:
    """Largest ``eps`` for which the shell sums of ``S^{s,eps}`` pass the ratio test.

    Bisection on the empirical verdict; the verdict is monotone in ``eps``.
    Returns 0 (with a warning) when every positive ``eps`` fails.
    """
    if N_max < 8:
        raise ValueError("N_max must be at least 8")
    T = shell_sums(u, s, N_max, headroom=headroom)
    window = N_max // 2
    if shells_converge(T, eps_max, window):
        return eps_max
    lo, hi = 0.0, eps_max
    while hi - lo > rel_tol * max(hi, 1e-300):
        mid = (lo + hi) / 2
        if shells_converge(T, mid, window):
            lo = mid
        else:
            hi = mid
        if hi < 1e-300:
            break
    if lo == 0.0:
        warnings.warn("weighted sums diverge for every eps > 0", RuntimeWarning, stacklevel=2)
    return lo


@dataclass
class NormLedger:
    s: int
    entries: dict[tuple[int, int], float] = field(default_factory=dict)
    sums: dict[tuple[float, int], float] = field(default_factory=dict)

    def to_rows(self) -> list[dict]:
        rows = [{"alpha": a, "beta": b, "norm": v} for (a, b), v in sorted(self.entries.items())]
        rows += [{"eps": e, "N": n, "sum": v} for (e, n), v in sorted(self.sums.items())]
        return rows


def build_norm_ledger(u: HermiteExpansion, s: int, order: int, eps_values: Iterable[float], Ns: Iterable[int]) -> NormLedger:
    led = NormLedger(s)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            led.entries[(a, b)] = mixed_norm(u, a, b, s)
    for N in Ns:
        T = shell_sums(u, s, N)
        for e in eps_values:
            led.sums[(float(e), int(N))] = float(sum(e**k * T[k] for k in range(N + 1)))
    return led


def schauder_ratio(u: HermiteExpansion, v: HermiteExpansion, s: int) -> float:
    """``||u v||_{Q^s} / (||u||_{Q^s} ||v||_{Q^s})`` with a dealiased product."""
    if s < 1:
        raise ValueError("s must be at least 1")
    nu, nv = _qs_norm(u, s), _qs_norm(v, s)
    if nu == 0 or nv == 0:
        return 0.0
    n_out = 2 * (u.basis_size + v.basis_size) + 16
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuadratureDegreeWarning)
        uv = expand(lambda x: synth(u, x) * synth(v, x), n_out, quad_points=2 * n_out)
    return _qs_norm(uv, s) / (nu * nv)


# -- decay ------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    c: float
    C: float
    r2: float
    n_used: int

    def __iter__(self):
        return iter((self.c, self.C, self.r2))


def decay_fit(samples: Sequence[tuple[float, complex]]) -> DecayFit:
    """Least-squares fit of ``log|v| ~ log C - c x^2``."""
    pts = [(float(x), abs(v)) for x, v in samples if abs(v) > 1e-300 and np.isfinite(abs(v))]
    if not pts:
        raise DegenerateSampleError("every sample underflowed")
    if len(pts) < 8:
        raise DegenerateSampleError(f"need at least 8 usable samples, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    # the regressor is x^2, so its span is what keeps the fit well posed
    x2 = x * x
    if x2.min() > 0 and x2.max() / x2.min() < 2:
        raise DegenerateSampleError("x^2 must span a ratio of at least 2")
    X = np.column_stack([np.ones_like(x), -x * x])
    (a, c), *_ = np.linalg.lstsq(X, y, rcond=None)
    fit = X @ np.array([a, c])
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(c), float(math.exp(a)), r2, len(pts))


def sample_on(f: Callable, lo: float, hi: float, n: int = 41) -> list[tuple[float, complex]]:
    x = np.linspace(lo, hi, n)
    return list(zip(x.tolist(), np.asarray(f(x), dtype=complex).tolist()))


# -- sector scans -----------------------------------------------------------


@dataclass(frozen=True)
class SectorScan:
    eps: float
    c: float
    n_points: int
    sup_value: float
    sup_point: complex
    singular_point: complex | None
    violations: int
    bound: float | None
    overflow_points: int = 0

    @property
    def flagged(self) -> bool:
        return self.singular_point is not None


def sector_grid(eps: float, x_max: float, rays: int, n_x: int) -> np.ndarray:
    x = np.linspace(0.0, x_max, n_x)
    x = np.concatenate([-x[:0:-1], x])
    taus = eps * np.arange(1, rays + 1) / rays
    taus = np.concatenate([-taus[::-1], [0.0], taus])
    return (x[None, :] + 1j * taus[:, None] * (1 + np.abs(x))[None, :]).ravel()


def _in_sector(z: complex, eps: float, x_max: float) -> bool:
    return abs(z.imag) < eps * (1 + abs(z.real)) and abs(z.real) <= x_max


def _local_maxima(logs: np.ndarray, n_rows: int) -> list[int]:
    """Flat indices of grid points not exceeded by any of their 8 neighbours,
    largest first."""
    L = np.nan_to_num(logs, nan=np.inf).reshape(n_rows, -1)
    P = np.pad(L, 1, constant_values=-np.inf)
    peak = np.ones_like(L, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                peak &= L >= P[1 + di : 1 + di + L.shape[0], 1 + dj : 1 + dj + L.shape[1]]
    idx = np.flatnonzero(peak.ravel())
    return [int(j) for j in idx[np.argsort(-L.ravel()[idx], kind="stable")]]


def _locate_pole(u: Callable, z0: complex, eps: float, x_max: float) -> complex | None:
    """Newton on ``1/u`` from ``z0``.

    Returns the limit point when the iteration converges (relative step below
    1e-9) to a point inside the sector where ``|u| > 1e10``.
    """
    z = complex(z0)
    for _ in range(80):
        with np.errstate(all="ignore"):
            g = 1 / complex(u(z))
        if g == 0 or not np.isfinite(g):
            return z if _in_sector(z, eps, x_max) else None
        h = 1e-6 * max(1.0, abs(z))
        with np.errstate(all="ignore"):
            gp = (1 / complex(u(z + h)) - 1 / complex(u(z - h))) / (2 * h)
        if gp == 0 or not np.isfinite(gp):
            return None
        step = g / gp
        if abs(step) > 1.0:
            step = step / abs(step)
        z = z - step
        if not _in_sector(z, eps * 1.05, x_max * 1.05):
            return None
        if abs(step) < 1e-9 * max(1.0, abs(z)):
            with np.errstate(all="ignore"):
                big = not abs(complex(u(z))) <= SINGULAR_LIMIT
            return z if big and _in_sector(z, eps, x_max) else None
    return None


def sector_scan(
    u: Callable,
    eps: float,
    c: float,
    x_max: float,
    rays: int,
    *,
    n_x: int = 41,
    bound: float | None = None,
    probes: int = 5,
) -> SectorScan:
    """Sample ``u`` on ``z = x + i tau (1 + |x|)``, ``|tau| <= eps``, ``|x| <= x_max``.

    Reports ``sup log|u(z)| + c x^2``; with ``bound`` given, counts points
    where ``|u(z)| > bound exp(-c x^2)``. Grid points with ``|u| > 1e10`` are
    counted; they may be poles or just Gaussian growth at large ``|y|``. To
    tell them apart, Newton on ``1/u`` is started from each of them in scan
    order and from the largest local maxima of ``|u|`` on the grid; the first limit point
    inside the sector with ``|u| > 1e10`` is the singularity flag.
    """
    if eps <= 0 or rays < 1:
        raise ValueError("need eps > 0 and rays >= 1")
    z = sector_grid(eps, x_max, rays, n_x)
    with np.errstate(all="ignore"):
        vals = np.asarray(u(z), dtype=complex)
        logs = np.log(np.abs(vals))
    score = logs + c * z.real**2
    bad = ~np.isfinite(vals) | (np.abs(vals) > SINGULAR_LIMIT)
    starts = list(np.flatnonzero(bad)[:probes])
    starts += [j for j in _local_maxima(logs, 2 * rays + 1)[: 2 * probes] if j not in starts]
    singular = None
    for j in starts:
        singular = _locate_pole(u, complex(z[j]), eps, x_max)
        if singular is not None:
            break
    finite = np.isfinite(score)
    j = int(np.argmax(np.where(finite, score, -np.inf))) if finite.any() else 0
    sup = float(score[j]) if finite.any() else math.inf
    violations = 0
    if bound is not None:
        with np.errstate(divide="ignore"):
            violations = int(np.sum(~finite | (score > math.log(bound))))
    return SectorScan(eps, c, z.size, sup, complex(z[j]), singular, violations, bound, int(bad.sum()))


# -- constructive sector certificate ---------------------------------------


@dataclass(frozen=True)
class SectorCertificate:
    """Claim ``|u(x+iy)| <= C exp(-c x^2)`` for ``|y| < epsilon (1 + |x|)``."""

    epsilon: float
    c: float
    C: float
    source_order: int
    C1: float
    weight_rate: float = 0.0
    trace: tuple[tuple[str, float], ...] = ()

    @property
    def backed(self) -> bool:
        """The derivative bounds were measured with a Gaussian weight at least ``c``."""
        return self.weight_rate >= self.c


def _root(v: float, n: int) -> float:
    """``v^(1/n)`` with the binary exponent split off first, so that
    ``_root(2^n v, n) == 2 _root(v, n)`` holds exactly."""
    if v == 0:
        return 0.0
    m, e = math.frexp(v)
    q, r = divmod(e, n)
    return math.ldexp((m * 2.0**r) ** (1.0 / n), q)


def sector_certificate(derivative_bounds: Sequence[float], order: int, *, weight_rate: float = 0.0) -> SectorCertificate:
    """Certificate from bounds ``b_a >= |d^a u(x)| <x>^a exp(w x^2) / a!``.

    ``C1 = max_a b_a^(1/(a+1))`` makes ``|d^a u(x)| <= C1^(a+1) a! <x>^-a exp(-w x^2)``.
    Summing the Taylor series at ``x`` with ``|y| < (1+|x|)/(2e C1)`` and
    ``(1+|x|) <= sqrt(2) <x>`` gives a geometric series of ratio at most
    ``sqrt(2)/(2e)``, hence ``C = 2 C1``. The returned rate is
    ``c = 1/(8 C1^2)``; it is backed by the bounds when ``w >= c``.
    """
    if order < 2:
        raise ValueError("at least derivatives up to order 2 are needed")
    b = np.asarray(derivative_bounds, dtype=float)[: order + 1]
    if b.size < order + 1:
        raise ValueError(f"need {order + 1} bounds, got {b.size}")
    if not np.all(np.isfinite(b)) or np.any(b < 0):
        raise ValueError("derivative bounds must be finite and nonnegative")
    roots = [_root(float(b[a]), a + 1) for a in range(order + 1)]
    C1 = max(roots)
    if C1 == 0:
        raise ValueError("all bounds vanish")
    eps = 1.0 / (2 * math.e * C1)
    c = 1.0 / (8 * C1 * C1)
    C = 2 * C1
    trace = (
        ("C1", C1),
        ("argmax_order", float(int(np.argmax(roots)))),
        ("taylor_ratio_bound", math.sqrt(2) / (2 * math.e)),
        ("weight_rate", weight_rate),
    )
    return SectorCertificate(eps, c, C, order, C1, weight_rate, trace)


def _default_grid():
    return np.linspace(-12.0, 12.0, 481)


def measure_sector_bounds(f, order: int, weight_rate: float = 0.0, grid=None) -> np.ndarray:
    """``b_a = max_x |d^a f(x)| <x>^a exp(w x^2) / a!`` for ``a <= order``.

    ``f`` is a :class:`HermiteExpansion` (derivatives by ladder algebra) or a
    jet-polymorphic callable.
    """
    x = _default_grid() if grid is None else np.asarray(grid, dtype=float)
    weight = np.sqrt(1 + x * x)
    gauss = np.exp(weight_rate * x * x)
    out = np.zeros(order + 1)
    if isinstance(f, HermiteExpansion):
        d = f
        for a in range(order + 1):
            vals = np.abs(synth(d, x)) * weight**a * gauss / math.factorial(a)
            out[a] = float(vals.max())
            d = ladder_d(d)
        return out
    coeffs = np.array([f(tj.jet_variable(float(xi), order)).coeffs for xi in x])
    for a in range(order + 1):
        out[a] = float(np.max(np.abs(coeffs[:, a]) * weight**a * gauss))
    return out


def certify_sector(f, order: int = 12, grid=None, rounds: int = 2) -> SectorCertificate:
    """Measure, choose ``c``, remeasure at that weight; repeat ``rounds`` times."""
    b = measure_sector_bounds(f, order, 0.0, grid)
    cert = sector_certificate(b, order, weight_rate=0.0)
    for _ in range(rounds):
        w = cert.c
        b = measure_sector_bounds(f, order, w, grid)
        cert = sector_certificate(b, order, weight_rate=w)
        if cert.backed:
            break
    return cert


def trace_hsect_constants(C0: float) -> dict[str, float]:
    """Constants of the sector-extension argument starting from
    ``|x^b d^a u| <= C0^(a+b+1) M(a, b)`` with ``C0 >= 1`` on the line.

    Weighted step: summing ``(c x^2)^n / n!`` against the ``b + 2n`` bounds and
    ``(a + 2n)! <= 2^(a+4n) a! n!^2`` gives ``2 C0 (sqrt2 C0^2)^a a! / (1 - 4 c C0^2)``;
    with ``c = 1/(8 C0^2)`` this is at most ``C5^(a+1) a!``, ``C5 = 2 C0^2``.
    Japanese-bracket step: ``<x>^a <= 2^(a/2) (1 + |x|^a)`` gives ``C6 = 2 C5``.
    """
    if not C0 >= 1:
        raise ValueError("the chain assumes C0 >= 1")
    C5 = 2 * C0 * C0
    C6 = 2 * C5
    c_weighted = 1 / (8 * C0 * C0)
    cert = sector_certificate([C6 ** (a + 1) for a in range(3)], 2)
    return {
        "C0": C0,
        "C5": C5,
        "C6": C6,
        "c_weighted": c_weighted,
        "epsilon": cert.epsilon,
        "c": cert.c,
        "C": cert.C,
    }


# -- symbol estimates -------------------------------------------------------


@dataclass(frozen=True)
class SymbolEstimateReport:
    constants: np.ndarray
    geometric_rate: float
    verdict: bool
    rates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    half_grid_rate: float = math.nan
    notes: tuple[str, ...] = ()


def _symbol_constants(f, K: int, x: np.ndarray) -> np.ndarray:
    C = np.zeros(K + 1)
    for xi in x:
        try:
            with np.errstate(all="raise"):
                coeffs = f(tj.jet_variable(float(xi), K)).coeffs
        except (tj.SingularCompositionError, FloatingPointError, ZeroDivisionError) as exc:
            raise JetSingularityError(f"jet of f is singular at x = {xi}") from exc
        if not np.all(np.isfinite(coeffs)):
            raise JetSingularityError(f"non-finite jet at x = {xi}")
        w = math.sqrt(1 + xi * xi) ** np.arange(K + 1)
        C = np.maximum(C, np.abs(coeffs) * w)
    return C


def _rates(C: np.ndarray) -> np.ndarray:
    return np.array([C[a] ** (1.0 / (a + 1)) for a in range(C.size)])


def symbol_check(f, K: int, grid) -> SymbolEstimateReport:
    """Measure ``C_a = max_x |d^a f(x)| <x>^a / a!`` for ``a <= K`` with jets.

    ``geometric_rate = max_a C_a^(1/(a+1))``. The verdict requires the
    nonzero rates for ``a`` in ``[K/2, K]`` to agree within a factor 2, and
    the geometric rate to stay within a factor 2 when the grid extent is
    halved (a rate that keeps growing with the grid is not a constant).
    """
    if K > 40:
        raise ValueError("K must be at most 40")
    x = np.asarray(grid, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("grid is empty")
    C = _symbol_constants(f, K, x)
    rates = _rates(C)
    rate = float(rates.max())
    tail = rates[K // 2 :]
    tail = tail[tail > 0]
    stable_tail = tail.size == 0 or tail.max() <= 2 * tail.min()
    extent = np.max(np.abs(x))
    half = x[np.abs(x) <= extent / 2]
    notes = []
    if half.size:
        half_rate = float(_rates(_symbol_constants(f, K, half)).max())
    else:
        half_rate = rate
    stable_grid = half_rate > 0 and rate <= 2 * half_rate or rate == 0
    if not stable_tail:
        notes.append("rates in [K/2, K] spread by more than a factor 2")
    if not stable_grid:
        notes.append("geometric rate grows with the grid extent")
    verdict = bool(np.isfinite(rate) and stable_tail and stable_grid)
    return SymbolEstimateReport(C, rate, verdict, rates, half_rate, tuple(notes))
