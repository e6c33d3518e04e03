"""Radial (n >= 2) sphere-kernel integrals and lower bounds."""

import numpy as np
import pytest

from nonlocal_lab.errors import AlphaOutOfRange, DomainError, HypothesisViolation
from nonlocal_lab.radial import (RadialProfile, hardy_step_condition,
                                 radial_fractional_gradient,
                                 sphere_kernel_integral, verify_radial_bounds)


@pytest.fixture(scope="module")
def gauss_profile():
    return RadialProfile.from_callables(
        2, lambda r: np.exp(-r * r), lambda r: -2 * r * np.exp(-r * r),
        monotone="nonincreasing")


class TestSphereKernel:
    def test_zero_at_zero(self):
        # mirror-paired quadrature nodes cancel exactly
        assert sphere_kernel_integral(0.0, 2, 1.0) == 0.0
        assert sphere_kernel_integral(0.0, 3, 0.5) == 0.0

    def test_positive_and_linear_lower_bound(self):
        for n, alpha in ((2, 1.0), (3, 0.5), (2, 1.5)):
            ratios = [sphere_kernel_integral(e, n, alpha) / e
                      for e in np.linspace(0.05, 0.9, 12)]
            assert min(ratios) > 0.0

    def test_monotone_growth_n2_alpha1(self):
        vals = [sphere_kernel_integral(e, 2, 1.0)
                for e in np.linspace(0.0, 0.9, 10)]
        assert np.all(np.diff(vals) > 0)

    def test_two_resolutions_agree(self):
        for e in (0.3, 0.85):
            lo = sphere_kernel_integral(e, 3, 0.5, 256)
            hi = sphere_kernel_integral(e, 3, 0.5, 512)
            assert abs(lo - hi) <= 1e-3 * abs(hi)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            sphere_kernel_integral(1.0, 2, 1.0)
        with pytest.raises(DomainError):
            sphere_kernel_integral(0.5, 5, 1.0)
        with pytest.raises(AlphaOutOfRange):
            sphere_kernel_integral(0.5, 2, 2.5)


class TestRadialGradient:
    def test_zero_profile(self, gauss_profile):
        zero = RadialProfile(2, gauss_profile.radii,
                             0.0 * gauss_profile.radii, 0.0 * gauss_profile.radii)
        assert radial_fractional_gradient(zero, 1.0, 1.0) == 0.0

    def test_positive_for_nonincreasing(self, gauss_profile):
        v = radial_fractional_gradient(gauss_profile, 1.0, 1.0)
        assert v > 0.0

    def test_pointwise_nonnegative(self, gauss_profile):
        for r in (0.3, 0.8, 1.5, 3.0):
            assert radial_fractional_gradient(gauss_profile, r, 0.5) >= 0.0

    def test_scaling_relation(self, gauss_profile):
        # V[g(l .)](r) = l^(1-a) V[g](l r), checked at l=2, r=1/2
        lam = 2.0
        scaled = RadialProfile.from_callables(
            2, lambda r: np.exp(-(lam * r) ** 2),
            lambda r: -2 * lam * lam * r * np.exp(-(lam * r) ** 2),
            monotone="nonincreasing")
        for alpha in (0.5, 1.0):
            lhs = radial_fractional_gradient(scaled, 0.5, alpha)
            rhs = lam ** (1 - alpha) * radial_fractional_gradient(gauss_profile, 1.0, alpha)
            assert abs(lhs - rhs) / abs(rhs) < 1e-3

    def test_self_convergence(self, gauss_profile):
        fine = RadialProfile.from_callables(
            2, lambda r: np.exp(-r * r), lambda r: -2 * r * np.exp(-r * r),
            n_points=3072, monotone="nonincreasing")
        v1 = radial_fractional_gradient(gauss_profile, 1.0, 1.0)
        v2 = radial_fractional_gradient(fine, 1.0, 1.0, n_nodes=512)
        assert abs(v1 - v2) / abs(v2) < 1e-3


class TestRadialBounds:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_gaussian_fitted_ratios_positive(self, gauss_profile, alpha):
        pw, gl = verify_radial_bounds(gauss_profile, alpha, 0.0)
        assert pw.verdict == "holds" and pw.achieved_ratio > 0
        assert gl.verdict == "holds" and gl.achieved_ratio > 0

    def test_requires_monotone(self, gauss_profile):
        prof = RadialProfile(3, gauss_profile.radii, gauss_profile.values,
                             gauss_profile.derivative, monotone="unknown")
        with pytest.raises(HypothesisViolation):
            verify_radial_bounds(prof, 1.0, 0.0)

    def test_dimension_3(self):
        prof = RadialProfile.from_callables(
            3, lambda r: np.exp(-r * r), lambda r: -2 * r * np.exp(-r * r),
            monotone="nonincreasing")
        pw, gl = verify_radial_bounds(prof, 0.5, 0.2)
        assert pw.verdict == "holds" and gl.verdict == "holds"


class TestHardyStepCondition:
    def test_reference_point(self):
        # n=2, alpha=1, delta=0: 2*3*(2/5)^2 = 0.96 < 1
        assert hardy_step_condition(2, 1.0, 0.0)

    def test_sweep(self):
        for n in (2, 3, 4):
            for alpha in (0.5, 1.0, 1.5):
                for delta in (-0.4, 0.0, 0.4):
                    assert hardy_step_condition(n, alpha, delta)

    def test_degenerate_line_fails(self):
        # delta = alpha - 2 collapses the strict inequality to equality
        assert not hardy_step_condition(4, 1.5, -0.5)
