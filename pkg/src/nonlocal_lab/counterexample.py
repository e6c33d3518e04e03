"""Monotonicity is necessary: construction of an even compactly supported
f = phi_A + t phi_B whose weighted functional
    K(f) = -int_0^1 (H f)(x) f'(x) x^-sigma dx
is negative, so the monotone-function inequality cannot hold without the
monotonicity hypothesis.

Recipe: pick an even bump phi_B supported in 1.1 < |x| < 3 making
(L phi_B)(1) - sigma (H phi_B)(1) negative (L = the gamma = 1 fractional
Laplacian), slide x0 < 1 until the same quantity with the 1/x0 factor is
negative there, center a narrow bump phi_A at x0, and grow t.  K is affine
in t because phi_B is flat on (0,1), so a large enough t wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SampledFunction, build_grid, integrate_positive
from .errors import HypothesisViolation, SearchFailed
from .operators import (calibrate_singular_constant, pv_hilbert_at,
                        singular_fraclap_at, spectral_derivative)

SUPPORT_INNER = 1.1
SUPPORT_OUTER = 3.0
MAX_SCAN_STEPS = 1000


@dataclass(frozen=True)
class CounterexampleResult:
    """The constructed function and the (negative) functional value."""

    phi_A: SampledFunction
    phi_B: SampledFunction
    t: float
    x0: float
    sigma: float
    cross_term: float          # int_0^inf (H phi_B) phi_A' x^-sigma dx > 0
    functional_value: float    # K(phi_A + t phi_B) < 0
    collinearity_residual: float

    def __post_init__(self):
        if not self.functional_value < 0:
            raise HypothesisViolation("constructed functional value is not negative")
        if not self.cross_term > 0:
            raise HypothesisViolation("cross term is not positive")


def smooth_bump(x, center: float, width: float):
    """C-infinity bump exp(-1/(1-u^2)) in u = (|x|-center)/width (even)."""
    u = (np.abs(x) - center) / width
    out = np.zeros_like(np.asarray(x, dtype=float))
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def _functional(f: SampledFunction, hf: np.ndarray, sigma: float) -> float:
    """K(f) = -int_0^1 (H f) f' x^-sigma dx from precomputed H f values."""
    x = f.grid.nodes[f.grid.positive()]
    fp = spectral_derivative(f).values[f.grid.positive()]
    sel = x <= 1.0
    return integrate_positive(x[sel], -hf[sel] * fp[sel] * x[sel] ** (-sigma))


def construct_counterexample(sigma: float, n_points: int = 65536,
                             box: float = 16.0) -> CounterexampleResult:
    """Build the counterexample for the given sigma > 0.

    All operator evaluations go through calibrated quadrature (PV rule for
    H, calibrated singular integral for the gamma = 1 Laplacian).
    """
    if sigma <= 0:
        raise HypothesisViolation("sigma must be positive")
    grid = build_grid("periodic_uniform", n_points, box)
    x = grid.nodes
    h = grid.spacing
    pos = grid.positive()
    xp = x[pos]
    c1 = calibrate_singular_constant(1.0).value

    # (i) bump phi_B with (L phi_B)(1) - sigma (H phi_B)(1) < 0
    phi_B = None
    centers = np.linspace(SUPPORT_INNER + 0.25, SUPPORT_OUTER - 0.35, 24)
    for steps, center in enumerate(centers):
        if steps >= MAX_SCAN_STEPS:
            break
        width = min(center - SUPPORT_INNER - 1e-3, SUPPORT_OUTER - center - 1e-3, 0.45)
        cand = SampledFunction(grid, smooth_bump(x, center, width), "even", "unknown")
        lam1 = singular_fraclap_at(cand, np.array([1.0]), 1.0, c1)[0]
        hb1 = pv_hilbert_at(cand, np.array([1.0]))[0]
        if lam1 - sigma * hb1 < 0.0:
            phi_B = cand
            break
    if phi_B is None:
        raise SearchFailed("no bump center produced a negative boundary value")

    # (ii) slide x0 downward from 1 until
    # (L phi_B)(x0) - (sigma/x0)(H phi_B)(x0) < 0 on the whole bump support;
    # the scan starts where the width-0.05 bump of step (iii) is resolvable
    target_width = 0.05
    below_one = xp[xp <= 1.0 - 2.0 * target_width][::-1]
    x0 = None
    for steps, cand_x0 in enumerate(below_one[::8]):
        if steps >= MAX_SCAN_STEPS:
            break
        probes = np.array([cand_x0 - target_width / 2, cand_x0,
                           cand_x0 + target_width / 2])
        lam = singular_fraclap_at(phi_B, np.round(probes / h) * h, 1.0, c1)
        hb = pv_hilbert_at(phi_B, np.round(probes / h) * h)
        if np.all(lam - (sigma / probes) * hb < 0.0):
            x0 = float(cand_x0)
            break
    if x0 is None:
        raise SearchFailed("no x0 < 1 with a negative localized value")

    # (iii) narrow bump at x0, supported inside (0, 1)
    width_a = min(target_width, (1.0 - x0) / 2.0)
    phi_A = SampledFunction(grid, smooth_bump(x, x0, width_a), "even", "unknown")

    # (iv) evaluate K(phi_A + t phi_B) doubling t; K is affine in t since
    # phi_B is flat on (0, 1), so only H phi_A and H phi_B enter there
    fpA = spectral_derivative(phi_A).values[pos]
    live = np.nonzero((np.abs(fpA) > 1e-14 * np.max(np.abs(fpA))) & (xp <= 1.0))[0]
    ha = np.zeros(len(xp))
    hb_vals = np.zeros(len(xp))
    ha[live] = pv_hilbert_at(phi_A, xp[live])
    hb_vals[live] = pv_hilbert_at(phi_B, xp[live])

    def K(t: float) -> float:
        f = SampledFunction(grid, phi_A.values + t * phi_B.values, "even", "unknown")
        return _functional(f, ha + t * hb_vals, sigma)

    k1, k2, k3 = K(1.0), K(2.0), K(3.0)
    collin = abs(k2 - (k1 + k3) / 2.0) / max(abs(k1), abs(k3), 1.0)

    t = 1.0
    value = k1
    for steps in range(60):
        if value < 0.0:
            break
        t *= 2.0
        value = K(t)
    else:
        raise SearchFailed("functional did not turn negative while doubling t")

    # cross term int_0^inf (H phi_B) phi_A' x^-sigma dx, supported in (0, 1)
    sel = xp <= 1.0
    cross = integrate_positive(
        xp[sel], hb_vals[sel] * fpA[sel] * xp[sel] ** (-sigma))

    return CounterexampleResult(phi_A, phi_B, t, x0, sigma,
                                cross, value, collin)
