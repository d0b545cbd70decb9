import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from contamix.kernels import (
    Kernel,
    QuadratureSpec,
    cross_inner,
    cross_inner_many,
    default_quadrature,
    mc_inner,
    pdf,
    pdf_many,
    sample,
    self_inner,
)

from conftest import simpson_oracle

GAUSS = Kernel("gaussian")
LAPLACE = Kernel("laplace")
CAUCHY = Kernel("cauchy")
SKEW = Kernel("skew_gaussian", alpha=10.0)

# window wide enough for 1e-8 agreement; Cauchy needs a huge one (x^-4 tails)
# and Laplace extra panels (integrand kinks at 0 and mu slow Simpson to ~h^3)
ORACLE_WINDOWS = {"gaussian": 12.0, "laplace": 30.0, "cauchy": 2000.0, "skew_gaussian": 12.0}
ORACLE_PANELS = {"gaussian": 2 ** 15, "laplace": 2 ** 20, "cauchy": 2 ** 21, "skew_gaussian": 2 ** 15}


def oracle_cross(kernel: Kernel, mu: float) -> float:
    L = ORACLE_WINDOWS[kernel.family]
    lo = min(0.0, mu) - L
    hi = max(0.0, mu) + L
    return simpson_oracle(
        lambda xs: pdf_many(kernel, xs) * pdf_many(kernel, xs - mu),
        lo, hi, ORACLE_PANELS[kernel.family],
    )


class TestValidation:
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            Kernel("triangular")

    def test_skew_needs_nonzero_alpha(self):
        with pytest.raises(ValueError):
            Kernel("skew_gaussian")
        with pytest.raises(ValueError):
            Kernel("skew_gaussian", alpha=0.0)

    def test_alpha_rejected_elsewhere(self):
        with pytest.raises(ValueError):
            Kernel("gaussian", alpha=2.0)

    def test_dim_only_gaussian(self):
        Kernel("gaussian", dim=3)
        with pytest.raises(ValueError):
            Kernel("laplace", dim=2)

    def test_quadrature_spec(self):
        with pytest.raises(ValueError):
            QuadratureSpec(half_width=-1.0)
        with pytest.raises(ValueError):
            QuadratureSpec(half_width=10.0, panels=7)

    def test_pdf_dimension_mismatch(self):
        with pytest.raises(ValueError):
            pdf(GAUSS, [1.0, 2.0])
        with pytest.raises(ValueError):
            pdf(Kernel("gaussian", dim=3), [1.0, 2.0])


class TestPdf:
    def test_gaussian_at_zero(self):
        assert pdf(GAUSS, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-12)

    def test_laplace_at_zero(self):
        assert pdf(LAPLACE, 0.0) == 0.5

    def test_cauchy_at_zero(self):
        assert pdf(CAUCHY, 0.0) == pytest.approx(1.0 / math.pi, abs=1e-12)

    def test_gaussian_product_density(self):
        k3 = Kernel("gaussian", dim=3)
        x = np.array([0.3, -1.2, 0.7])
        expected = np.prod([pdf(GAUSS, v) for v in x])
        assert pdf(k3, x) == pytest.approx(expected, rel=1e-14)

    def test_integrates_to_one(self, any_kernel):
        total, err = integrate.quad(lambda x: pdf(any_kernel, x), -np.inf, np.inf, limit=200)
        assert abs(total - 1.0) < 1e-6


class TestSelfInner:
    def test_gaussian(self):
        assert self_inner(GAUSS) == pytest.approx((4 * math.pi) ** -0.5, abs=1e-15)

    def test_laplace(self):
        assert self_inner(LAPLACE) == 0.25

    def test_cauchy(self):
        assert self_inner(CAUCHY) == pytest.approx(1.0 / (2 * math.pi), abs=1e-15)

    def test_matches_cross_at_zero(self, any_kernel):
        assert abs(cross_inner(any_kernel, 0.0) - self_inner(any_kernel)) < 1e-14


class TestCrossInner:
    def test_gaussian_known_value(self):
        assert cross_inner(GAUSS, 2.0) == pytest.approx((4 * math.pi) ** -0.5 * math.exp(-1.0), abs=1e-12)

    def test_laplace_known_value(self):
        assert cross_inner(LAPLACE, 1.0) == pytest.approx(math.exp(-1.0) / 2.0, abs=1e-12)

    def test_cauchy_known_value(self):
        assert cross_inner(CAUCHY, 2.0) == pytest.approx(1.0 / (4 * math.pi), abs=1e-12)

    def test_closed_forms_match_quadrature(self, closed_form_kernel):
        for mu in (0.0, 0.5, 1.0, 2.0, 5.0):
            assert abs(cross_inner(closed_form_kernel, mu) - oracle_cross(closed_form_kernel, mu)) < 1e-8

    def test_gaussian_dim3(self):
        k3 = Kernel("gaussian", dim=3)
        mu = np.array([1.0, -2.0, 0.5])
        expected = (4 * math.pi) ** -1.5 * math.exp(-float(mu @ mu) / 4.0)
        assert cross_inner(k3, mu) == pytest.approx(expected, rel=1e-14)

    def test_skew_matches_mc_oracle(self):
        est, se = mc_inner(SKEW, 1.0, 10 ** 7, seed=20260809)
        assert abs(cross_inner(SKEW, 1.0) - est) < 3.0 * se

    def test_symmetry(self, any_kernel):
        # the autocorrelation of any density is even in the shift
        for mu in (0.25, 1.0, 3.0):
            assert cross_inner(any_kernel, mu) == pytest.approx(cross_inner(any_kernel, -mu), rel=1e-12)

    def test_cauchy_schwarz_strict(self, any_kernel):
        s = self_inner(any_kernel)
        for mu in (0.1, 0.5, 1.0, 2.0, 10.0):
            assert abs(cross_inner(any_kernel, mu)) < s

    def test_decay_at_50(self):
        s_g = self_inner(GAUSS)
        assert cross_inner(GAUSS, 50.0) < 1e-6 * s_g
        assert cross_inner(LAPLACE, 50.0) < 1e-6 * self_inner(LAPLACE)
        assert cross_inner(CAUCHY, 50.0) < 1e-2 * self_inner(CAUCHY)

    def test_cross_inner_many_matches_scalar(self, any_kernel):
        mus = np.array([-2.0, -0.5, 0.3, 1.7])
        many = cross_inner_many(any_kernel, mus)
        for m, v in zip(mus, many):
            assert v == pytest.approx(cross_inner(any_kernel, m), rel=1e-14)

    @given(st.floats(min_value=-8.0, max_value=8.0))
    @settings(max_examples=100, deadline=None)
    def test_bounded_by_self_inner(self, mu):
        assert cross_inner(GAUSS, mu) <= self_inner(GAUSS) + 1e-15


class TestMcInner:
    def test_gaussian_zero_shift(self):
        est, se = mc_inner(GAUSS, 0.0, 10 ** 6, seed=3)
        assert abs(est - (4 * math.pi) ** -0.5) < 4.0 * se

    def test_single_draw(self, any_kernel):
        est, se = mc_inner(any_kernel, 0.7, 1, seed=5)
        x1 = sample(any_kernel, 1, seed=5)[0]
        assert est == pytest.approx(pdf(any_kernel, x1 - 0.7), rel=1e-14)
        assert math.isnan(se)

    def test_deterministic(self):
        assert mc_inner(SKEW, 0.5, 1000, seed=11) == mc_inner(SKEW, 0.5, 1000, seed=11)


class TestSample:
    def test_empty(self, any_kernel):
        assert sample(any_kernel, 0, seed=1).shape[0] == 0

    def test_deterministic(self, any_kernel):
        a = sample(any_kernel, 100, seed=9)
        b = sample(any_kernel, 100, seed=9)
        assert np.array_equal(a, b)

    def test_cauchy_median(self):
        x = sample(CAUCHY, 10 ** 5, seed=2)
        assert abs(np.median(x)) < 0.02

    def test_laplace_moments(self):
        x = sample(LAPLACE, 10 ** 5, seed=4)
        assert abs(x.mean()) < 0.02
        assert abs(x.var() - 2.0) < 0.1

    def test_skew_mean(self):
        # E X = delta sqrt(2/pi) under the |Z1|-representation
        x = sample(SKEW, 10 ** 5, seed=6)
        delta = 10.0 / math.sqrt(101.0)
        assert x.mean() == pytest.approx(delta * math.sqrt(2 / math.pi), abs=0.02)

    def test_gaussian_dim(self):
        x = sample(Kernel("gaussian", dim=3), 50, seed=8)
        assert x.shape == (50, 3)


class TestQuadratureDefaults:
    def test_windows(self):
        assert default_quadrature(GAUSS).half_width == 12.0
        assert default_quadrature(LAPLACE).half_width == 30.0
        assert default_quadrature(SKEW).half_width == 12.0

    def test_cauchy_has_none(self):
        with pytest.raises(ValueError):
            default_quadrature(CAUCHY)

    def test_skew_quadrature_converged(self):
        # doubling the panel count moves the value by far less than 1e-8
        coarse = cross_inner(SKEW, 1.3)
        fine = cross_inner(SKEW, 1.3, QuadratureSpec(half_width=12.0, panels=2 ** 15))
        assert abs(coarse - fine) < 1e-8

    def test_tail_mass_below_tolerance(self):
        # the default windows leave less tail mass than the declared tolerance
        from scipy import integrate

        for kernel in (GAUSS, LAPLACE, SKEW):
            spec = default_quadrature(kernel)
            tail, _ = integrate.quad(lambda x: pdf(kernel, x), spec.half_width, np.inf)
            tail_lo, _ = integrate.quad(lambda x: pdf(kernel, x), -np.inf, -spec.half_width)
            assert tail + tail_lo < spec.tail_tolerance
