"""Hermite-Galerkin solvers for ``-u'' + W u`` problems on the line.

Linear problems are assembled as dense matrices in the Hermite basis: the
harmonic part ``-d^2 + x^2`` is exactly diagonal (``2n + 1``) and the rest
``W - x^2`` is projected by Gauss-Hermite quadrature.

Nonlinear problems ``(A - lam) u = F[u]`` with
``F[u] = sum a(x) u^h (u')^l`` are solved by damped Newton on the
coefficient vector; ``F`` is evaluated pseudospectrally on a ``3N/2``-node
grid and projected back.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .hermite import (
    HermiteExpansion,
    _function_weights,
    _golub_welsch,
    expand,
    hermite_derivatives,
    hermite_functions,
)

log = logging.getLogger(__name__)


class SingularJacobianError(np.linalg.LinAlgError):
    def __init__(self, cond: float):
        super().__init__(f"Newton Jacobian is singular (condition number {cond:.3e})")
        self.cond = cond


class NewtonDivergenceError(RuntimeError):
    def __init__(self, message: str, history: list[float]):
        super().__init__(message)
        self.history = history


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    potential_tag: str = "custom"

    @property
    def basis_size(self) -> int:
        return self.entries.shape[0]

    def hermitian_defect(self) -> float:
        A = self.entries
        return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return self.hermitian_defect() <= tol


def _harmonic(x):
    return x * x


def assemble(W: Callable | None, N: int, tag: str | None = None, *, quad_points: int | None = None) -> OperatorMatrix:
    """Galerkin matrix of ``-d^2/dx^2 + W`` on ``h_0 .. h_{N-1}``.

    ``W=None`` means the harmonic potential ``x^2``. ``W`` is called on an
    array of quadrature nodes.
    """
    if N < 4:
        raise ValueError("N must be at least 4")
    A = np.diag(2.0 * np.arange(N) + 1).astype(complex)
    if W is not None and W is not _harmonic:
        M = quad_points or 2 * N
        nodes, _ = _golub_welsch(M)
        H = hermite_functions(N, nodes)
        q = np.asarray(W(nodes), dtype=complex) - nodes * nodes
        Q = (H * (_function_weights(M) * q)[None, :]) @ H.T
        if not np.any(np.iscomplex(q)):
            # the exact projection is symmetric; remove rounding asymmetry
            Q = (Q + Q.T) / 2
        A = A + Q
    if tag is None:
        tag = "harmonic" if W is None or W is _harmonic else getattr(W, "__name__", "custom")
    return OperatorMatrix(A, tag)


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: HermiteExpansion


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    j = int(np.argmax(np.abs(v)))
    return v * (abs(v[j]) / v[j])


def eigen_solve(A: OperatorMatrix, count: int, target: complex | None = None) -> list[EigenPair]:
    """Lowest ``count`` eigenpairs by real part, or nearest to ``target``.

    Hermitian matrices go through a symmetric solver and give real
    eigenvalues. Eigenvectors are L2-normalized with the largest
    coefficient real and positive.
    """
    N = A.basis_size
    if count < 0 or count > N:
        raise ValueError(f"count must lie in [0, {N}]")
    if count == 0:
        return []
    M = A.entries
    try:
        if A.is_hermitian():
            herm = (M + M.conj().T) / 2
            if np.all(np.isreal(herm)):
                herm = herm.real
            vals, vecs = np.linalg.eigh(herm)
            vals = vals.astype(complex)
        else:
            vals, vecs = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigen-iteration did not converge: {exc}") from exc
    if target is None:
        order = np.lexsort((vals.imag, vals.real))
    else:
        order = np.argsort(np.abs(vals - target), kind="stable")
    out = []
    for j in order[:count]:
        out.append(EigenPair(complex(vals[j]), HermiteExpansion(_fix_phase(vecs[:, j]))))
    return out


# -- nonlinear problems -----------------------------------------------------


@dataclass(frozen=True)
class NewtonConfig:
    tol_residual: float = 1e-11
    max_iter: int = 20
    damping_max_halvings: int = 8
    continuation_steps: int = 5
    max_condition: float = 1e13

    def __post_init__(self):
        if not self.tol_residual > 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class NonlinearTerm:
    """``a(x) u^h (u')^l``; ``a`` is a constant or a callable of ``x``."""

    coeff: float | complex | Callable = 1.0
    power: int = 1
    dpower: int = 0

    def __post_init__(self):
        if self.power < 0 or self.dpower < 0:
            raise ValueError("powers must be nonnegative")

    def weight(self, x):
        return self.coeff(x) if callable(self.coeff) else self.coeff * np.ones_like(x)

    def values(self, x, u, du):
        return self.weight(x) * u**self.power * du**self.dpower

    def partials(self, x, u, du):
        """``(dF/du, dF/du')`` pointwise."""
        a = self.weight(x)
        h, l = self.power, self.dpower
        fu = h * a * u ** max(h - 1, 0) * du**l if h else np.zeros_like(u)
        fd = l * a * u**h * du ** max(l - 1, 0) if l else np.zeros_like(u)
        return fu, fd


@dataclass(frozen=True)
class Equation:
    """``(-d^2 + W - lam) u = F[u]`` with optional point constraint ``u(x0) = v``."""

    N: int
    W: Callable | None = None
    lam: complex = 0.0
    terms: tuple[NonlinearTerm, ...] = ()
    pin: tuple[float, float] | None = None
    tag: str = "custom"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def _setup(self):
        if not self._cache:
            A = assemble(self.W, self.N).entries - self.lam * np.eye(self.N)
            M = max(self.N + 1, math.ceil(3 * self.N / 2))
            nodes, _ = _golub_welsch(M)
            H = hermite_functions(self.N, nodes)
            Hd = hermite_derivatives(self.N, nodes)
            P = H * _function_weights(M)[None, :]
            self._cache.update(A=A, nodes=nodes, H=H, Hd=Hd, P=P)
            if self.pin is not None:
                self._cache["pin_row"] = hermite_functions(self.N, np.array([self.pin[0]]))[:, 0]
        return self._cache

    def _nodal(self, c):
        s = self._setup()
        return s["nodes"], s["H"].T @ c, s["Hd"].T @ c

    def forcing(self, c) -> np.ndarray:
        """Hermite coefficients of ``F[u]``."""
        x, u, du = self._nodal(c)
        f = np.zeros_like(u)
        for t in self.terms:
            f = f + t.values(x, u, du)
        return self._setup()["P"] @ f

    def residual(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=complex)
        s = self._setup()
        r = s["A"] @ c - self.forcing(c)
        if self.pin is not None:
            r = np.append(r, s["pin_row"] @ c - self.pin[1])
        return r

    def jacobian(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=complex)
        s = self._setup()
        x, u, du = self._nodal(c)
        fu = np.zeros_like(u)
        fd = np.zeros_like(u)
        for t in self.terms:
            a, b = t.partials(x, u, du)
            fu = fu + a
            fd = fd + b
        J = s["A"] - s["P"] @ (fu[:, None] * s["H"].T + fd[:, None] * s["Hd"].T)
        if self.pin is not None:
            J = np.vstack([J, s["pin_row"][None, :]])
        return J

    def residual_norm(self, c) -> float:
        return float(np.linalg.norm(self.residual(c)))


def case_c_equation(k: int, u0: float, N: int) -> Equation:
    """``u'' - x^2 u + u = (d/dx - x) u^k`` with ``u(0) = u0``.

    In operator form ``(-d^2 + x^2 - 1) u = -k u^(k-1) u' + x u^k``. The
    Galerkin row against ``h_0`` vanishes identically for every ``u``
    (``h_0`` spans the kernel of both the operator and the adjoint of
    ``d/dx - x``), so the solution family is fixed by the pin ``u(0) = u0``.
    """
    terms = (
        NonlinearTerm(-float(k), k - 1, 1),
        NonlinearTerm(lambda x: x, k, 0),
    )
    return Equation(N=N, W=None, lam=1.0, terms=terms, pin=(0.0, u0), tag=f"C(k={k}, u0={u0})")


@dataclass(frozen=True)
class NewtonResult:
    solution: HermiteExpansion
    iterations: int
    residual_norm: float
    history: tuple[float, ...]
    condition: float


def nonlinear_solve(eq: Equation, guess: HermiteExpansion, cfg: NewtonConfig | None = None) -> NewtonResult:
    """Damped Newton (Gauss-Newton when pinned) on the Galerkin residual."""
    cfg = cfg or NewtonConfig()
    if guess.basis_size > eq.N:
        raise ValueError("guess is longer than the basis")
    c = guess.padded(eq.N).coeffs.copy()
    r = eq.residual(c)
    rn = float(np.linalg.norm(r))
    history = [rn]
    cond = 1.0
    it = 0
    while rn > cfg.tol_residual:
        if it >= cfg.max_iter:
            raise NewtonDivergenceError(
                f"Newton did not reach {cfg.tol_residual:.1e} in {cfg.max_iter} iterations "
                f"(residual {rn:.3e})",
                history,
            )
        J = eq.jacobian(c)
        sv = np.linalg.svd(J, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
        if cond > cfg.max_condition:
            raise SingularJacobianError(cond)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        for _ in range(cfg.damping_max_halvings + 1):
            trial = c + t * step
            r_trial = eq.residual(trial)
            rn_trial = float(np.linalg.norm(r_trial))
            if np.isfinite(rn_trial) and rn_trial < rn:
                break
            t /= 2
        else:
            raise NewtonDivergenceError(f"no residual decrease after damping (residual {rn:.3e})", history)
        c, r, rn = trial, r_trial, rn_trial
        it += 1
        history.append(rn)
        log.debug("newton iter %d residual %.3e step %.3g", it, rn, t)
    return NewtonResult(HermiteExpansion(c), it, rn, tuple(history), cond)


def continuation(
    equation_at: Callable[[float], Equation],
    params: Sequence[float],
    guess: HermiteExpansion,
    cfg: NewtonConfig | None = None,
) -> list[NewtonResult]:
    """Solve along ``params``, seeding each solve with the previous solution."""
    out = []
    for p in params:
        res = nonlinear_solve(equation_at(p), guess, cfg)
        out.append(res)
        guess = res.solution
    return out


def case_c_continuation(k: int, u0_start: float, u0_end: float, N: int, cfg: NewtonConfig | None = None):
    """Continue the case-C branch in ``u0`` from a Gaussian guess at ``u0_start``."""
    cfg = cfg or NewtonConfig()
    params = np.linspace(u0_start, u0_end, cfg.continuation_steps + 1)
    guess = expand(lambda x: u0_start * np.exp(-x * x / 2), N)
    return continuation(lambda p: case_c_equation(k, float(p), N), params, guess, cfg)
