"""Counterexample construction: negative functional without monotonicity."""

import numpy as np
import pytest

from nonlocal_lab.counterexample import construct_counterexample, smooth_bump
from nonlocal_lab.errors import HypothesisViolation
from nonlocal_lab.operators import pv_hilbert_at


@pytest.fixture(scope="module")
def result():
    return construct_counterexample(1.0)


class TestConstruction:
    def test_functional_negative(self, result):
        assert result.functional_value < 0.0

    def test_cross_term_positive(self, result):
        assert result.cross_term > 0.0

    def test_affine_in_t(self, result):
        assert result.collinearity_residual <= 1e-6

    def test_supports(self, result):
        xa = result.phi_A.grid.nodes
        inside_a = np.abs(result.phi_A.values) > 0
        assert np.all(np.abs(xa[inside_a]) < 1.0)
        assert np.all(np.abs(xa[inside_a]) > 0.0)
        inside_b = np.abs(result.phi_B.values) > 0
        assert np.all(np.abs(xa[inside_b]) > 1.1)
        assert np.all(np.abs(xa[inside_b]) < 3.0)

    def test_x0_close_to_one(self, result):
        assert 0.0 < result.x0 < 1.0

    def test_hilbert_of_outer_bump_smooth_inside(self, result):
        # no PV singularity on (0,1): values and divided differences bounded
        x = result.phi_B.grid.nodes
        pts = x[(x > 0.05) & (x < 0.95)][::64]
        hv = pv_hilbert_at(result.phi_B, pts)
        assert np.all(np.isfinite(hv))
        slopes = np.diff(hv) / np.diff(pts)
        assert np.max(np.abs(slopes)) < 10.0

    def test_sigma_recorded(self, result):
        assert result.sigma == 1.0

    def test_invalid_sigma(self):
        with pytest.raises(HypothesisViolation):
            construct_counterexample(-1.0)


class TestBump:
    def test_compact_support(self):
        x = np.linspace(-5, 5, 1001)
        b = smooth_bump(x, 2.0, 0.5)
        assert np.all(b[(np.abs(x) <= 1.5) | (np.abs(x) >= 2.5)] == 0.0)
        assert np.max(b) > 0.3

    def test_even(self):
        x = np.linspace(-5, 5, 1001)
        b = smooth_bump(x, 2.0, 0.5)
        assert np.allclose(b, b[::-1])
