"""Acceptance criteria, each at its stated tolerance.

Every criterion records one PASS/FAIL line; ``conftest.py`` prints them at the
end of the run, and ``python3 tests/test_acceptance.py`` prints them directly.
Criteria 2 and 6 contain requirements that do not hold mathematically or
numerically; they are asserted unchanged and marked as strict expected
failures, so any future pass is reported as an error.
"""

import cmath
import math
import sys
import time

import mpmath
import numpy as np
import pytest
from numpy.polynomial import hermite as nph
from numpy.polynomial import polynomial as npp

from oscillab import identities as ids
from oscillab import taylor_jet as tj
from oscillab.analysis import (
    certify_sector,
    decay_fit,
    epsilon_threshold,
    mixed_norm,
    sample_on,
    sector_certificate,
    sector_scan,
    symbol_check,
    weighted_sum,
)
from oscillab.catalog import (
    CASE_B_POLE_NOTE,
    case_a,
    case_b,
    case_c,
    case_c_root_function,
    predict_singularities,
    residual,
)
from oscillab.experiments import run
from oscillab.geometry import christoffel, euclidean_metric, gamma_ellipticity, hyperboloid_metric, l1_shell_grid, metric_decay_check
from oscillab.hermite import HermiteExpansion, expand, synth
from oscillab.reports import SingularitiesConfig
from oscillab.solver import NewtonConfig, assemble, case_c_equation, eigen_solve, nonlinear_solve
from oscillab.special_complex import SQRT_PI, erfc_eval, erfc_sector_growth

RESULTS: dict[int, str] = {}


def record(n: int, checks: dict[str, tuple[bool, str]]) -> bool:
    ok = all(p for p, _ in checks.values())
    detail = "; ".join(f"{k} {'ok' if p else 'FAILED'} ({v})" for k, (p, v) in checks.items())
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


def failed(checks):
    return [k for k, (p, _) in checks.items() if not p]


def grid_l2(f, lo=-12.0, hi=12.0, n=4801):
    x = np.linspace(lo, hi, n)
    return math.sqrt(np.sum(np.abs(f(x)) ** 2) * (x[1] - x[0]))


def mixed_norm_by_quadrature(n, alpha, beta):
    """||x^b d^a h_n|| from numpy Hermite polynomials and Gauss-Hermite nodes.

    ``h_n = c H_n(x) e^{-x^2/2}``; ``d(p e^{-x^2/2}) = (p' - x p) e^{-x^2/2}``.
    """
    coef = np.zeros(n + 1)
    coef[n] = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
    p = nph.herm2poly(coef)
    for _ in range(alpha):
        p = npp.polysub(npp.polyder(p), npp.polymulx(p))
    for _ in range(beta):
        p = npp.polymulx(p)
    x, w = nph.hermgauss(len(p) + 2)
    return math.sqrt(float(np.sum(w * npp.polyval(x, p) ** 2)))


# -- 1 ----------------------------------------------------------------------


def test_criterion_1_harmonic_spectrum():
    t0 = time.perf_counter()
    vals = np.array([p.value for p in eigen_solve(assemble(None, 32), 5)])
    elapsed = time.perf_counter() - t0
    dev = float(np.max(np.abs(vals - np.arange(1, 10, 2))))
    checks = {
        "eigenvalues 1..9": (dev <= 1e-10, f"max dev {dev:.1e}"),
        "runtime < 1 s": (elapsed < 1.0, f"{elapsed * 1e3:.1f} ms"),
    }
    assert record(1, checks), failed(checks)


# -- 2 ----------------------------------------------------------------------


def _criterion_2():
    pair = eigen_solve(assemble(case_a().potential, 80), 1, target=0)[0]
    ua = lambda x: np.exp(-x * x / 2) / (1 + x * x)  # noqa: E731
    norm = grid_l2(ua)
    inner_x = np.linspace(-12, 12, 4801)
    v = synth(pair.vector, inner_x)
    overlap = abs(np.sum(np.conj(v) * ua(inner_x)) * (inner_x[1] - inner_x[0])) / norm
    vnorm = grid_l2(lambda x: synth(pair.vector, x))
    dist = math.sqrt(max(vnorm**2 + 1 - 2 * overlap, 0.0))
    return {
        "|lambda_min| <= 1e-6": (abs(pair.value) <= 1e-6, f"{abs(pair.value):.1e}"),
        "eigenvector L2 distance <= 1e-6": (dist <= 1e-6, f"{dist:.1e}"),
    }


def test_criterion_2_eigenvalue_part():
    checks = _criterion_2()
    assert checks["|lambda_min| <= 1e-6"][0]


@pytest.mark.xfail(
    strict=True,
    reason="u_A has poles at +-i, so its Hermite coefficients decay like exp(-c sqrt(n)); "
    "at N = 80 the truncation alone leaves an L2 distance of about 6.5e-6",
)
def test_criterion_2_case_a_zero_mode():
    checks = _criterion_2()
    assert record(2, checks), failed(checks)


def test_criterion_2_truncation_floor():
    # the distance is bounded below by the weight of u_A outside the basis
    c = expand(case_a().solution, 200, quad_points=400).coeffs
    c = c / np.linalg.norm(c)
    assert np.linalg.norm(c[80:]) > 1e-6


# -- 3 ----------------------------------------------------------------------


def test_criterion_3_case_c_closed_form():
    xs = np.linspace(-3, 3, 21)
    checks = {}
    for k, u0 in [(2, 0.4), (3, 0.3)]:
        C = case_c(k, u0)
        worst = max(abs(residual(C, x)) for x in xs)
        u_at_0 = abs(C.solution(0.0) - u0)
        checks[f"residual k={k}"] = (worst <= 1e-9, f"{worst:.1e}")
        checks[f"u(0) k={k}"] = (u_at_0 <= 1e-12, f"{u_at_0:.1e}")
    assert record(3, checks), failed(checks)


# -- 4 ----------------------------------------------------------------------


def test_criterion_4_nonlinear_solver():
    N = 64
    truth = expand(lambda x: np.real(case_c(3, 0.3).solution(x)), N)
    rng = np.random.default_rng(0)
    guess = HermiteExpansion(truth.coeffs * (1 + 0.01 * rng.normal(size=N)))
    res = nonlinear_solve(case_c_equation(3, 0.3, N), guess, NewtonConfig(max_iter=8))
    err = grid_l2(lambda x: np.real(synth(res.solution, x)) - np.real(case_c(3, 0.3).solution(x)))
    checks = {
        "iterations <= 8": (res.iterations <= 8, str(res.iterations)),
        "L2 error <= 1e-6": (err <= 1e-6, f"{err:.1e}"),
    }
    assert record(4, checks), failed(checks)


# -- 5 ----------------------------------------------------------------------


def test_criterion_5_singularity_sequence():
    C = case_c(3, 0.3)
    roots = predict_singularities(C, 8)
    f, _ = case_c_root_function(C)
    worst = max(abs(f(r)) for r in roots)
    last = sorted(roots, key=abs)[-3:]
    args = np.angle(last)
    inside = bool(np.all((args > math.pi / 4) & (args < math.pi / 4 + 0.15)))
    decreasing = bool(np.all(np.diff(args) < 0))
    checks = {
        ">= 6 roots": (len(roots) >= 6, str(len(roots))),
        "residual <= 1e-9": (worst <= 1e-9, f"{worst:.1e}"),
        "last three args in (pi/4, pi/4+0.15)": (inside, ", ".join(f"{a:.4f}" for a in args)),
        "args decreasing": (decreasing, ""),
    }
    assert record(5, checks), failed(checks)


# -- 6 ----------------------------------------------------------------------


def _blow_up_radius(phi):
    for r in np.arange(0.05, 8.0, 0.05):
        if abs(erfc_eval(r * cmath.exp(1j * phi)).value) > 1e6:
            return float(r)
    return None


def _criterion_6():
    checks = {}
    e0 = abs(erfc_eval(0).value - SQRT_PI / 2)
    checks["Erfc(0)"] = (e0 <= 1e-12, f"{e0:.1e}")
    rng = np.random.default_rng(0)
    refl = ids.erfc_reflection_suite([complex(*v) for v in rng.uniform(-4, 4, size=(20, 2))])
    checks["reflections"] = (refl.max_defect <= 1e-12 and refl.cases == 20, f"{refl.max_defect:.1e} relative")
    ok = True
    for r in (5.0, 10.0, 20.0):
        for phi in np.linspace(-math.pi / 4, math.pi / 4, 9):
            z = r * cmath.exp(1j * phi)
            R = erfc_eval(z).value * 2 * z * cmath.exp(z * z) - 1
            ok &= abs(R) <= 1 / (math.sqrt(2) * r * r)
    checks["remainder bound"] = (ok, "27 points")
    for label, phi in (("pi/4+0.1", math.pi / 4 + 0.1), ("pi/2", math.pi / 2)):
        r = _blow_up_radius(phi)
        checks[f"blow-up along {label}"] = (r is not None, f"|z| = {r}" if r else "not before |z| = 8")
    ok = True
    for _ in range(50):
        y = rng.uniform(0.1, 6)
        x = rng.uniform(0, 2) * y
        mu = rng.uniform(0.05, 0.95)
        ok &= erfc_sector_growth(x, y, mu).holds
    checks["hyperbola lower bound"] = (ok, "50 samples")
    return checks


def test_criterion_6_without_blow_up_along_diagonal_ray():
    checks = _criterion_6()
    assert failed(checks) == ["blow-up along pi/4+0.1"] or not failed(checks)


@pytest.mark.xfail(
    strict=True,
    reason="along arg z = pi/4 + 0.1, |Erfc| grows like exp(sin(0.2)|z|^2)/(2|z|) "
    "and first exceeds 1e6 near |z| = 9.1",
)
def test_criterion_6_erfc_engine():
    checks = _criterion_6()
    assert record(6, checks), failed(checks)


def test_criterion_6_blow_up_radius_by_mpmath():
    phi = math.pi / 4 + 0.1
    with mpmath.workdps(30):
        at8 = abs(mpmath.erfc(8 * mpmath.expjpi(phi / math.pi)) * mpmath.sqrt(mpmath.pi) / 2)
        at95 = abs(mpmath.erfc(9.5 * mpmath.expjpi(phi / math.pi)) * mpmath.sqrt(mpmath.pi) / 2)
    assert at8 < 1e6 < at95


# -- 7 ----------------------------------------------------------------------


def test_criterion_7_gaussian_decay():
    h0 = decay_fit(sample_on(lambda x: synth(HermiteExpansion.unit(0), x), 2, 5)).c
    cc = decay_fit(sample_on(lambda x: np.real(case_c(3, 0.3).solution(x)), 2, 5)).c
    checks = {
        "h0 c = 0.500 +- 0.001": (abs(h0 - 0.5) <= 1e-3, f"{h0:.6f}"),
        "case C c in [0.45, 0.55]": (0.45 <= cc <= 0.55, f"{cc:.4f}"),
    }
    assert record(7, checks), failed(checks)


# -- 8 ----------------------------------------------------------------------


def test_criterion_8_norm_machinery():
    worst = 0.0
    for n in (0, 3):
        u = HermiteExpansion.unit(n)
        for a in range(4):
            for b in range(4):
                worst = max(worst, abs(mixed_norm(u, a, b) - mixed_norm_by_quadrature(n, a, b)))
    eps = 0.3
    s1 = abs(weighted_sum(HermiteExpansion.unit(0), 0, eps, 1) - (1 + eps * math.sqrt(2)))
    thr = epsilon_threshold(HermiteExpansion.unit(0), 0, 24)
    checks = {
        "ladder vs quadrature": (worst <= 1e-8, f"{worst:.1e}"),
        "S_1 = 1 + eps sqrt2": (s1 <= 1e-12, f"{s1:.1e}"),
        "threshold(h0) > 0": (thr > 0, f"{thr:.4f}"),
    }
    assert record(8, checks), failed(checks)


# -- 9 ----------------------------------------------------------------------


def test_criterion_9_sector_certificate():
    h0 = HermiteExpansion.unit(0)
    cert = certify_sector(h0, 12)
    scan = sector_scan(lambda z: synth(h0, z), cert.epsilon, cert.c, 8, 5, n_x=46, bound=cert.C)
    bounds = [1.3, 0.7, 0.9, 0.2]
    a = sector_certificate(bounds, 3)
    b = sector_certificate([v * 2 ** (k + 1) for k, v in enumerate(bounds)], 3)
    checks = {
        "zero violations": (scan.violations == 0 and not scan.flagged, f"{scan.n_points} points"),
        "grid of 10^3 points": (scan.n_points >= 1000, str(scan.n_points)),
        "doubling halves eps": (a.epsilon / b.epsilon == 2.0, repr(a.epsilon / b.epsilon)),
    }
    assert record(9, checks), failed(checks)


# -- 10 ---------------------------------------------------------------------


def test_criterion_10_symbols_and_metrics():
    grid = np.arange(-20, 20.0001, 0.25)
    ell = gamma_ellipticity(lambda x, xi: x * x + xi * xi, 2, 1, l1_shell_grid(1.0, 50.0))
    checks = {
        "tanh": (symbol_check(tj.tanh, 16, grid).verdict, "true expected"),
        "1/(1+x^2)": (symbol_check(lambda z: tj.reciprocal(1 + z * z), 16, grid).verdict, "true expected"),
        "exp": (not symbol_check(tj.exp, 12, grid).verdict, "false expected"),
        "hyperboloid decay": (metric_decay_check(hyperboloid_metric(1), 12).verdict, "true expected"),
        "ellipticity 0.125": (abs(ell - 0.125) <= 1e-3, f"{ell:.6f}"),
        "Euclidean Christoffels": (not np.any(christoffel(euclidean_metric(2), (0.3, 1.7))), "exact 0"),
        "hyperboloid g11(1)": (hyperboloid_metric(1).matrix(1.0)[0, 0] == 1.5, "exact 1.5"),
    }
    assert record(10, checks), failed(checks)


# -- 11 ---------------------------------------------------------------------


def test_criterion_11_identity_suites():
    combin = [
        ids.check_inverse_leibniz(),
        ids.check_binomial_bound(),
        ids.check_vandermonde(),
        ids.check_binomial_total(),
        ids.check_multinomial(),
        ids.check_falling_factorial(),
    ]
    mult, deriv = ids.check_operator_identities(tol=1e-12)
    rng = np.random.default_rng(0)
    comm = max(ids.commutator_defect(HermiteExpansion(rng.normal(size=16))) for _ in range(10))
    fd = max(
        ids.jet_fd_relative_error(name, x0, k)
        for name in ids.FD_FUNCTIONS
        for x0 in (-1.0, 0.3, 1.7)
        for k in range(1, 9)
    )
    checks = {
        "combinatorial": (all(c.passed for c in combin), f"{sum(c.cases for c in combin)} cases"),
        "operator identities": (mult.passed and deriv.passed, f"{max(mult.max_defect, deriv.max_defect):.1e}"),
        "commutator": (comm <= 1e-14, f"{comm:.1e}"),
        "jet vs FD": (fd <= 1e-4, f"{fd:.1e}"),
    }
    assert record(11, checks), failed(checks)


# -- 12 ---------------------------------------------------------------------


def test_criterion_12_case_b_pole_audit():
    B = case_b(0.0)
    poles = predict_singularities(B, 4)
    worst = max(abs(cmath.cosh(p)) for p in poles)
    computed = np.allclose(poles, [1j * (2 * m + 1) * math.pi / 2 for m in range(4)], atol=1e-10)
    report, _ = run(SingularitiesConfig(case="B", theta=0.0, count=4))
    checks = {
        "residual <= 1e-10": (worst <= 1e-10, f"{worst:.1e}"),
        "poles at (2m+1) i pi/2": (computed, "unaltered"),
        "discrepancy note in report": (CASE_B_POLE_NOTE in report.notes, ""),
    }
    assert record(12, checks), failed(checks)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(0 if all("PASS" in v for v in RESULTS.values()) and len(RESULTS) == 12 else 1)
