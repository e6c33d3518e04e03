"""Operator fidelity: Hilbert transform, fractional Laplacian, drift."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import dawsn
from scipy.special import gamma as gamma_fn

from nonlocal_lab import (SampledFunction, alpha_kernel_h, build_grid,
                          calibrate_singular_constant, drift_velocity,
                          fractional_laplacian, hilbert_transform)
from nonlocal_lab.errors import (AlphaOutOfRange, DiagonalSingularity,
                                 GammaOutOfRange, MethodDomainMismatch)
from nonlocal_lab.operators import (OperatorSpec, calibrate_drift_constant,
                                    kernel_drift_at, pv_hilbert_at,
                                    singular_fraclap_at)


def gaussian_on(n, L):
    g = build_grid("periodic_uniform", n, L)
    return SampledFunction.from_callable(g, lambda x: np.exp(-x * x), parity="even")


class TestHilbertSpectral:
    def test_cos_to_sin(self):
        g = build_grid("periodic_uniform", 4096, math.pi)
        f = SampledFunction.from_callable(g, np.cos, parity="even")
        Hf = hilbert_transform(f)
        assert np.max(np.abs(Hf.values - np.sin(g.nodes))) < 1e-10
        assert Hf.parity == "odd"

    def test_constant_annihilated(self):
        g = build_grid("periodic_uniform", 256, 2.0)
        f = SampledFunction.from_callable(g, lambda x: np.ones_like(x), parity="even")
        assert np.max(np.abs(hilbert_transform(f).values)) == 0.0

    def test_h_squared_is_minus_identity(self):
        g = build_grid("periodic_uniform", 4096, math.pi)
        f = SampledFunction.from_callable(g, lambda x: np.sin(3 * x) + np.cos(2 * x))
        HHf = hilbert_transform(hilbert_transform(f))
        assert np.max(np.abs(HHf.values + f.values)) < 1e-10

    def test_gaussian_vs_dawson(self):
        # oracle: H(e^-x^2) = 2/sqrt(pi) * dawsn; periodization ~ x/L^2
        f = gaussian_on(16384, 400.0)
        Hf = hilbert_transform(f)
        x = f.grid.nodes
        band = np.abs(x) <= 15.0
        err = np.max(np.abs(Hf.values[band] - 2 / math.sqrt(math.pi) * dawsn(x[band])))
        assert err < 1e-4 * 0.61

    def test_even_maps_to_odd_with_zero_at_origin(self):
        f = gaussian_on(2048, 20.0)
        Hf = hilbert_transform(f)
        i0 = np.argmin(np.abs(f.grid.nodes))
        assert Hf.values[i0] == 0.0
        assert Hf.parity == "odd"

    @given(st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=15, deadline=None)
    def test_antisymmetry(self, seed):
        rng = np.random.default_rng(seed)
        g = build_grid("periodic_uniform", 256, math.pi)
        a = rng.normal(size=4)
        fv = sum(a[k] * np.cos((k + 1) * g.nodes) for k in range(4))
        gv = rng.normal(size=256)
        gv -= gv.mean()
        f1 = SampledFunction(g, fv)
        f2 = SampledFunction(g, gv)
        lhs = np.sum(hilbert_transform(f1).values * gv)
        rhs = -np.sum(fv * hilbert_transform(f2).values)
        assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))

    def test_spectral_requires_periodic(self):
        g = build_grid("half_line_graded", 64, 1.0)
        f = SampledFunction.from_callable(g, lambda x: x)
        with pytest.raises(MethodDomainMismatch):
            hilbert_transform(f, "spectral")


class TestHilbertPV:
    def test_conjugate_poisson_pair(self):
        # oracle: H(1/(1+x^2)) = x/(1+x^2), sup norm 1/2
        g = build_grid("periodic_uniform", 4096, 200.0)
        f = SampledFunction.from_callable(g, lambda x: 1 / (1 + x * x), parity="even")
        pts = g.nodes[np.abs(g.nodes) <= 20.0]
        hv = pv_hilbert_at(f, pts)
        assert np.max(np.abs(hv - pts / (1 + pts ** 2))) / 0.5 < 1e-5

    def test_cross_method_agreement_on_gaussian(self):
        f = gaussian_on(16384, 400.0)
        pts = f.grid.nodes[np.abs(f.grid.nodes) <= 15.0][::4]
        pv = pv_hilbert_at(f, pts)
        spec = np.interp(pts, f.grid.nodes, hilbert_transform(f).values)
        assert np.max(np.abs(pv - spec)) / 0.61 < 1e-4

    def test_half_line_even(self):
        g = build_grid("half_line_graded", 2048, 30.0)
        f = SampledFunction.from_callable(g, lambda x: np.exp(-x * x), parity="even")
        sel = g.nodes[(g.nodes > 0.05) & (g.nodes < 10)][::30]
        hv = pv_hilbert_at(f, sel)
        assert np.max(np.abs(hv - 2 / math.sqrt(math.pi) * dawsn(sel))) < 5e-4

    def test_half_line_odd_vs_quad_oracle(self):
        g = build_grid("half_line_graded", 2048, 30.0)
        f = SampledFunction.from_callable(g, lambda x: x * np.exp(-x * x), parity="odd")
        pts = np.array([0.5, 1.0, 2.0, 4.0])

        def oracle(x):
            fn = lambda u: u * np.exp(-u * u)
            val, _ = quad(lambda t: (fn(x - t) - fn(x + t)) / t, 1e-12, 60, limit=400)
            return val / math.pi

        target = np.array([oracle(x) for x in pts])
        assert np.max(np.abs(pv_hilbert_at(f, pts) - target)) < 5e-4

    def test_half_line_requires_parity(self):
        g = build_grid("half_line_graded", 256, 10.0)
        f = SampledFunction.from_callable(g, lambda x: np.exp(-x))
        with pytest.raises(MethodDomainMismatch):
            hilbert_transform(f, "pv_quadrature")


class TestHilbertLogKernel:
    def test_gaussian_periodic(self):
        f = gaussian_on(8192, 30.0)
        Hf = hilbert_transform(f, "logkernel_even")
        x = f.grid.nodes
        band = np.abs(x) < 10
        err = np.max(np.abs(Hf.values[band] - 2 / math.sqrt(math.pi) * dawsn(x[band])))
        assert err < 1e-4
        assert Hf.parity == "odd"

    def test_gaussian_graded(self):
        g = build_grid("half_line_graded", 2048, 30.0)
        f = SampledFunction.from_callable(g, lambda x: np.exp(-x * x), parity="even")
        Hf = hilbert_transform(f, "logkernel_even")
        band = (g.nodes > 0.02) & (g.nodes < 10)
        err = np.max(np.abs(Hf.values[band] - 2 / math.sqrt(math.pi) * dawsn(g.nodes[band])))
        assert err < 1e-3

    def test_rejects_non_even(self):
        g = build_grid("periodic_uniform", 256, math.pi)
        f = SampledFunction.from_callable(g, np.sin, parity="odd")
        with pytest.raises(MethodDomainMismatch):
            hilbert_transform(f, "logkernel_even")


class TestFractionalLaplacian:
    def test_plane_wave_eigenfunction(self):
        g = build_grid("periodic_uniform", 1024, math.pi)
        f = SampledFunction.from_callable(g, lambda x: np.cos(3 * x))
        for gamma in (0.3, 1.0, 1.7):
            L = fractional_laplacian(f, gamma)
            assert np.max(np.abs(L.values - 3 ** gamma * np.cos(3 * g.nodes))) < 1e-10

    def test_gamma_2_is_minus_second_derivative(self):
        g = build_grid("periodic_uniform", 512, math.pi)
        f = SampledFunction.from_callable(g, np.cos)
        L = fractional_laplacian(f, 2.0)
        assert np.max(np.abs(L.values - np.cos(g.nodes))) < 1e-9

    def test_cross_method_gamma_1(self):
        # spectral vs calibrated singular integral on [-10, 10]
        f = gaussian_on(8192, 120.0)
        spec = fractional_laplacian(f, 1.0)
        sing = fractional_laplacian(f, 1.0, "singular_integral")
        band = np.abs(f.grid.nodes) <= 10.0
        rel = np.max(np.abs(sing.values[band] - spec.values[band])) / np.max(np.abs(spec.values))
        assert rel < 1e-4

    def test_gamma_out_of_range(self):
        g = build_grid("periodic_uniform", 256, 2.0)
        f = SampledFunction.from_callable(g, np.cos)
        with pytest.raises(GammaOutOfRange):
            fractional_laplacian(f, 2.5)
        with pytest.raises(GammaOutOfRange):
            fractional_laplacian(f, 2.0, "singular_integral")

    def test_parity_preserved(self):
        f = gaussian_on(1024, 20.0)
        assert fractional_laplacian(f, 1.3).parity == "even"


class TestCalibration:
    def test_gamma_1_is_inv_pi(self):
        c = calibrate_singular_constant(1.0)
        assert abs(c.value - 1 / math.pi) < 1e-3
        assert c.calibration_residual <= 1e-5

    def test_gamma_1_brute_force_poisson_kernel(self):
        # independent check: Lambda(1/(1+x^2)) = (1-x^2)/(1+x^2)^2, so
        # C_1 = exact / unnormalized PV integral, quadrature by scipy
        def raw_integral(x):
            fn = lambda y: 1 / (1 + y * y)
            val, _ = quad(lambda t: (2 * fn(x) - fn(x - t) - fn(x + t)) / t ** 2,
                          1e-8, 400.0, limit=400)
            return val + 2 * fn(x) / 400.0   # analytic truncation tail
        xs = [0.0, 0.7, 1.9]
        ratios = [(1 - x * x) / (1 + x * x) ** 2 / raw_integral(x) for x in xs]
        c = calibrate_singular_constant(1.0)
        for r in ratios:
            assert abs(r - c.value) < 1e-3

    def test_classical_constant_formula(self):
        # classical normalization 2^g Gamma((1+g)/2) / (sqrt(pi) |Gamma(-g/2)|)
        for gamma in (0.5, 1.5):
            exact = (2 ** gamma * gamma_fn((1 + gamma) / 2)
                     / (math.sqrt(math.pi) * abs(gamma_fn(-gamma / 2))))
            c = calibrate_singular_constant(gamma)
            assert abs(c.value - exact) / exact < 1e-4

    def test_small_gamma(self):
        c = calibrate_singular_constant(0.05)
        assert 0 < c.value < 0.1
        assert c.calibration_residual <= 1e-3

    def test_grid_independence(self):
        from nonlocal_lab.operators import _gaussian_symbol_reference
        g = build_grid("periodic_uniform", 4096, 30.0)
        f = SampledFunction.from_callable(g, lambda x: np.exp(-x * x), parity="even")
        inside = np.nonzero(np.abs(g.nodes) <= 3.0)[0]
        sample = g.nodes[inside[np.linspace(0, len(inside) - 1, 100).astype(int)]]
        a = _gaussian_symbol_reference(1.0, sample)
        b = singular_fraclap_at(f, sample, 1.0)
        v2 = float(np.dot(a, b) / np.dot(b, b))
        assert abs(v2 - calibrate_singular_constant(1.0).value) / v2 < 1e-3


class TestDrift:
    def test_alpha_1_equals_minus_hilbert(self):
        g = build_grid("periodic_uniform", 2048, 30.0)
        f = SampledFunction.from_callable(
            g, lambda x: np.exp(-x * x) * np.cos(3 * x), parity="even")
        d = drift_velocity(f, 1.0)
        h = hilbert_transform(f)
        assert np.max(np.abs(d.values + h.values)) < 1e-13

    def test_single_mode_alpha_half(self):
        # i k |k|^-1/2 on cos(4x): modes +-4 give -2 sin(4x)
        g = build_grid("periodic_uniform", 512, math.pi)
        f = SampledFunction.from_callable(g, lambda x: np.cos(4 * x))
        d = drift_velocity(f, 0.5)
        assert np.max(np.abs(d.values + 2.0 * np.sin(4 * g.nodes))) < 1e-12

    def test_constant_annihilated(self):
        g = build_grid("periodic_uniform", 256, 2.0)
        f = SampledFunction.from_callable(g, lambda x: np.full_like(x, 3.0), parity="even")
        assert np.max(np.abs(drift_velocity(f, 0.7).values)) == 0.0

    def test_alpha_out_of_range(self):
        g = build_grid("periodic_uniform", 256, 2.0)
        f = SampledFunction.from_callable(g, np.cos)
        with pytest.raises(AlphaOutOfRange):
            drift_velocity(f, 2.0)

    @pytest.mark.parametrize("alpha,tol", [(0.5, 2e-3), (1.3, 5e-3)])
    def test_kernel_oracle_matches_symbol(self, alpha, tol):
        from nonlocal_lab.operators import _gaussian_drift_reference
        f = gaussian_on(4096, 30.0)
        pts = f.grid.nodes[(f.grid.nodes >= 0.5) & (f.grid.nodes <= 4.0)][::16]
        ref = _gaussian_drift_reference(alpha, pts)
        kd = kernel_drift_at(f, pts, alpha, calibrate_drift_constant(alpha))
        assert np.max(np.abs(kd - ref)) < tol


class TestAlphaKernel:
    def test_hand_value(self):
        # alpha=0.5, x=2, y=1: -(1/2)(1 + 3^(-3/2))
        expected = -0.5 * (1.0 + 3.0 ** -1.5)
        assert abs(alpha_kernel_h(2.0, 1.0, 0.5) - expected) < 1e-15

    def test_origin_slope_positive(self):
        # d/dx h(0+, y) > 0: finite difference at x = 1e-6, y = 1
        slope = (alpha_kernel_h(2e-6, 1.0, 0.4) - alpha_kernel_h(1e-6, 1.0, 0.4)) / 1e-6
        assert slope > 0
        # h(0+, y) itself tends to 0
        assert abs(alpha_kernel_h(1e-9, 1.0, 0.4)) < 1e-6

    @given(st.floats(min_value=0.05, max_value=1.95),
           st.floats(min_value=0.1, max_value=5.0),
           st.floats(min_value=0.1, max_value=5.0),
           st.floats(min_value=0.2, max_value=8.0))
    @settings(max_examples=60, deadline=None)
    def test_homogeneity(self, alpha, x, y, lam):
        if abs(alpha - 1.0) < 0.02 or abs(x - y) < 1e-6:
            return
        lhs = alpha_kernel_h(lam * x, lam * y, alpha)
        rhs = lam ** (alpha - 2.0) * alpha_kernel_h(x, y, alpha)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))

    def test_homogeneity_pinned(self):
        lhs = alpha_kernel_h(6.0, 3.0, 0.3)
        rhs = 3.0 ** (0.3 - 2.0) * alpha_kernel_h(2.0, 1.0, 0.3)
        assert abs(lhs - rhs) < 1e-12 * abs(rhs)

    def test_diagonal_raises(self):
        with pytest.raises(DiagonalSingularity):
            alpha_kernel_h(1.0, 1.0, 0.5)

    def test_alpha_1_excluded(self):
        with pytest.raises(AlphaOutOfRange):
            alpha_kernel_h(2.0, 1.0, 1.0)

    @pytest.mark.parametrize("alpha", [0.3, 0.7, 1.3, 1.8])
    def test_monotonicity_of_h_over_x(self, alpha):
        # numerical x-derivative of h(x,y)/x >= -1e-8 on a log-spaced grid,
        # stencils crossing the diagonal excluded
        xs = np.geomspace(1e-2, 1e2, 100)
        ys = np.geomspace(1e-2, 1e2, 100)
        for y in ys:
            ratio = np.array([alpha_kernel_h(x, y, alpha) / x
                              if abs(x - y) > 1e-12 else np.nan for x in xs])
            d = (ratio[2:] - ratio[:-2]) / (xs[2:] - xs[:-2])
            crosses = (xs[:-2] < y) & (xs[2:] > y)
            ok = ~crosses & np.isfinite(d)
            assert np.all(d[ok] >= -1e-8)


class TestOperatorSpec:
    def test_validation(self):
        OperatorSpec("hilbert")
        OperatorSpec("drift", alpha=0.5, sign_convention="paper_section4")
        with pytest.raises(GammaOutOfRange):
            OperatorSpec("fractional_laplacian", gamma=3.0)
        with pytest.raises(AlphaOutOfRange):
            OperatorSpec("drift", alpha=2.0)
