import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscillab import taylor_jet as tj
from oscillab.geometry import (
    MetricField,
    SingularMetricError,
    christoffel,
    conformal_metric_1d,
    default_decay_grid,
    ellipticity_lower_bound,
    euclidean_metric,
    gamma_ellipticity,
    hyperboloid_metric,
    inverse_defect,
    l1_shell_grid,
    laplace_beltrami,
    lb_divergence,
    lb_expanded,
    metric_decay_check,
    scattering_form,
    scattering_limits,
)

HYP1 = hyperboloid_metric(1)
HYP2 = hyperboloid_metric(2)


def g11(x):
    return (1 + 2 * x * x) / (1 + x * x)


def gauss_1d(c):
    return tj.exp(-c[0] * c[0] / 2) if isinstance(c, list) else tj.exp(-c * c / 2)


def gauss_2d(c):
    x, y = c
    return tj.exp(-(x * x + y * y) / 2) * (1 + 0.3 * x)


def mp_hyp2(x):
    r2 = 1 + x[0] ** 2 + x[1] ** 2
    return [[1 + x[0] ** 2 / r2, x[0] * x[1] / r2], [x[0] * x[1] / r2, 1 + x[1] ** 2 / r2]]


class TestMetrics:
    def test_hyperboloid_values(self):
        assert HYP1.matrix(0.0)[0, 0] == 1.0
        assert HYP1.matrix(1.0)[0, 0] == 1.5
        assert np.allclose(HYP2.matrix((1.0, 0.0)), [[1.5, 0], [0, 1]], rtol=0, atol=0)

    def test_dimension(self):
        with pytest.raises(ValueError):
            hyperboloid_metric(3)
        with pytest.raises(ValueError):
            HYP2.matrix(1.0)

    def test_positive_and_singular(self):
        grid = [(x, y) for x in np.linspace(-5, 5, 7) for y in np.linspace(-5, 5, 7)]
        assert HYP2.check_positive(grid) >= 1.0 - 1e-12
        bad = conformal_metric_1d(lambda x: x * x, "degenerate")
        with pytest.raises(SingularMetricError):
            bad.check_positive([[0.0]])

    def test_inverse_consistency(self):
        grid = [(x, y) for x in np.linspace(-30, 30, 9) for y in np.linspace(-30, 30, 9)]
        assert inverse_defect(HYP2, grid) <= 1e-12

    def test_ellipticity_bound(self):
        grid = [(x, y) for x in np.geomspace(0.01, 1e3, 9) for y in (-3.0, 0.0, 50.0)]
        assert ellipticity_lower_bound(HYP2, grid) >= 0.5


class TestChristoffel:
    def test_euclidean_exactly_zero(self):
        for m, x in [(euclidean_metric(1), 0.7), (euclidean_metric(2), (0.3, -1.0))]:
            assert not np.any(christoffel(m, x))

    def test_hyperboloid_origin(self):
        assert christoffel(HYP1, 0.0)[0, 0, 0] == 0.0

    @pytest.mark.parametrize("x", [0.5, 1.0, -2.0, 7.5])
    def test_hyperboloid_1d_against_mpmath(self, x):
        with mpmath.workdps(30):
            ref = float(mpmath.diff(g11, mpmath.mpf(x)) / (2 * g11(mpmath.mpf(x))))
        assert christoffel(HYP1, x)[0, 0, 0] == pytest.approx(ref, rel=1e-13)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-4, 4), st.floats(-4, 4))
    def test_2d_symmetric_and_matches_mpmath(self, a, b):
        gam = christoffel(HYP2, (a, b))
        assert np.array_equal(gam, np.transpose(gam, (0, 2, 1)))
        with mpmath.workdps(30):
            pt = [mpmath.mpf(a), mpmath.mpf(b)]
            G = mpmath.matrix(mp_hyp2(pt))
            Ginv = G**-1

            def dg(i, k, j):
                def f(t):
                    q = list(pt)
                    q[i] = t
                    return mp_hyp2(q)[k][j]

                return mpmath.diff(f, pt[i])

            for l in range(2):
                for i in range(2):
                    for j in range(2):
                        ref = 0.5 * sum(Ginv[k, l] * (dg(i, k, j) + dg(j, i, k) - dg(k, i, j)) for k in range(2))
                        assert abs(gam[l, i, j] - float(ref)) < 1e-12


class TestLaplaceBeltrami:
    def test_euclidean(self):
        c = laplace_beltrami(euclidean_metric(2), (0.4, 0.2))
        assert np.array_equal(c.a, np.eye(2)) and not np.any(c.b)

    def test_hyperboloid_at_one(self):
        c = laplace_beltrami(HYP1, 1.0)
        assert c.a[0, 0] == pytest.approx(2 / 3, rel=1e-15)
        # b = -g^11 Gamma^1_11 = -g'/(2 g^2)
        with mpmath.workdps(30):
            ref = -float(mpmath.diff(g11, 1) / (2 * g11(mpmath.mpf(1)) ** 2))
        assert c.b[0] == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("x", [-2.0, -0.5, 0.0, 0.7, 3.0])
    def test_forms_agree_1d(self, x):
        for m in (euclidean_metric(1), HYP1):
            lhs = lb_expanded(m, gauss_1d, x)
            rhs = lb_divergence(m, gauss_1d, x)
            assert abs(lhs - rhs) <= 1e-9

    def test_1d_against_mpmath(self):
        x = 0.8
        u = lambda t: mpmath.exp(-t * t / 2)  # noqa: E731
        with mpmath.workdps(30):
            flux = lambda t: mpmath.sqrt(g11(t)) / g11(t) * mpmath.diff(u, t)  # noqa: E731
            ref = float(mpmath.diff(flux, mpmath.mpf(x)) / mpmath.sqrt(g11(mpmath.mpf(x))))
        assert abs(lb_expanded(HYP1, gauss_1d, x) - ref) < 1e-12

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_forms_agree_2d(self, a, b):
        for m in (euclidean_metric(2), HYP2):
            assert abs(lb_expanded(m, gauss_2d, (a, b)) - lb_divergence(m, gauss_2d, (a, b))) <= 1e-9

    def test_euclidean_2d_is_laplacian(self):
        x, y = 0.3, -0.6
        u = lambda c: tj.exp(-(c[0] * c[0] + c[1] * c[1]) / 2)  # noqa: E731
        r2 = x * x + y * y
        assert abs(lb_expanded(euclidean_metric(2), u, (x, y)) - (r2 - 2) * math.exp(-r2 / 2)) < 1e-14


class TestDecay:
    def test_hyperboloid(self):
        assert metric_decay_check(HYP1, 12).verdict
        assert metric_decay_check(HYP2, 8, np.linspace(-30, 30, 61)).verdict

    def test_euclidean(self):
        rep = metric_decay_check(euclidean_metric(1), 8)
        assert rep.verdict and not np.any(rep.constants[1:])

    def test_growing(self):
        m = conformal_metric_1d(lambda x: 1 + x * x, "growing")
        assert not metric_decay_check(m, 12).verdict

    def test_k_limit(self):
        with pytest.raises(ValueError):
            metric_decay_check(HYP1, 21)

    def test_grid(self):
        g = default_decay_grid(30, 60)
        assert g.size == 121 and g.max() == 30 and 0.0 in g


class TestGammaEllipticity:
    grid = l1_shell_grid(1.0, 50.0)

    def test_harmonic(self):
        assert abs(gamma_ellipticity(lambda x, xi: x * x + xi * xi, 2, 1, self.grid) - 0.125) <= 1e-3

    def test_shifted_is_larger(self):
        assert gamma_ellipticity(lambda x, xi: x * x + xi * xi + 10, 2, 1, self.grid) > 0.125

    def test_not_elliptic(self):
        # the diamond grid contains the points (x, 0), where xi^2 vanishes
        vals = [gamma_ellipticity(lambda x, xi: xi * xi, 2, 1, l1_shell_grid(1, r)) for r in (10, 100, 1000)]
        assert vals == [0.0, 0.0, 0.0]
        # off the axis the infimum still decays with the extent
        off = [gamma_ellipticity(lambda x, xi: xi * xi + 1, 2, 1, l1_shell_grid(1, r)) for r in (10, 100, 1000)]
        assert off[0] > off[1] > off[2]

    def test_grid_hits_diagonal(self):
        assert np.any(np.all(np.isclose(self.grid, [0.5, 0.5], atol=1e-14), axis=1))

    def test_rejects_inner_points(self):
        with pytest.raises(ValueError):
            gamma_ellipticity(lambda x, xi: x, 2, 1, np.array([[0.1, 0.1]]))
        with pytest.raises(ValueError):
            gamma_ellipticity(lambda x, xi: x, 2, 1, np.zeros((0, 2)))


class TestScattering:
    def test_limits(self):
        lim = scattering_limits(HYP2)
        assert lim["g_rr_change"] < 1e-3 and lim["g_eta_change"] < 1e-12
        assert lim["g_rr_limit"] == pytest.approx(2.0, abs=1e-3)
        assert lim["g_eta_limit"] == pytest.approx(1.0, abs=1e-12)

    def test_r_dr_grows(self):
        a = scattering_form(HYP2, 1e2)["g_r_dr"]
        b = scattering_form(HYP2, 1e3)["g_r_dr"]
        assert b / a == pytest.approx(100, rel=1e-3)

    def test_needs_plane(self):
        with pytest.raises(ValueError):
            scattering_form(HYP1, 10.0)

    def test_custom_metric_field(self):
        m = MetricField(1, lambda x: [[2.0]], "constant")
        assert laplace_beltrami(m, 3.0).a[0, 0] == 0.5
