"""Weighted-inequality verification harnesses.

Conventions shared by every check here:

* test functions live on periodic boxes wide enough that decay certifies
  the whole-line interpretation; g' and H g are spectral, with the PV
  quadrature path used for pointwise claims where periodization of H
  would not be dominated by the inequality margin;
* integrals over (0, inf) displayed with 1/x-type weights are evaluated
  as half-line integrals (the source proofs equate the two readings);
* truncation tails where the integrand approaches a plateau are added in
  closed form;
* inequalities whose constants are printed get them asserted, inequalities
  with implicit constants run in fitted-constant mode: only positivity and
  uniformity of the empirical ratio are asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (SampledFunction, cumulative_primitive,
                   first_cell_primitive, integrate_positive)
from .errors import (AlphaOutOfRange, DeltaOutOfRange, GammaOutOfRange,
                     HypothesisViolation, NegativeInput, NonIntegrable)
from .operators import (drift_velocity, fractional_laplacian, hilbert_transform,
                        pv_hilbert_at, spectral_derivative)
from .reports import InequalityReport

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# shared plumbing


def positive_view(f: SampledFunction):
    """(x, values) at strictly positive nodes of a periodic grid."""
    idx = f.grid.positive()
    return f.grid.nodes[idx], f.values[idx]


def value_at_origin(f: SampledFunction) -> float:
    return float(f.values[int(np.argmin(np.abs(f.grid.nodes)))])


def half_line_integral(x: np.ndarray, v: np.ndarray,
                       tail: float = 0.0) -> tuple[float, float]:
    """Integral over (0, inf) of samples v at positive nodes x plus an
    analytic tail; the error estimate is the coarse/fine disagreement."""
    fine = integrate_positive(x, v)
    sub = np.arange(len(x) - 1, -1, -2)[::-1]
    coarse = integrate_positive(x[sub], v[sub])
    return fine + tail, abs(fine - coarse)


def plateau_power_tail(plateau: float, X: float, exponent: float) -> float:
    """int_X^inf plateau * x^(-exponent) dx for exponent > 1."""
    if plateau == 0.0:
        return 0.0
    if exponent <= 1.0:
        raise NonIntegrable(f"tail exponent {exponent} not integrable")
    return plateau * X ** (1.0 - exponent) / (exponent - 1.0)


def _require_even(f: SampledFunction, who: str) -> None:
    if f.parity != "even":
        raise HypothesisViolation(f"{who} requires an even function")


def pv_hilbert_on_support(g: SampledFunction, gp: np.ndarray | None = None
                          ) -> np.ndarray:
    """H g at positive nodes by PV quadrature, evaluated only where g'
    is non-negligible (zero elsewhere: every use multiplies by g').

    Periodization-free, so inequality margins and scaling invariances are
    not polluted by the box; the cutoff error is below 1e-13 relative.
    """
    x, _ = positive_view(g)
    if gp is None:
        gp = positive_view(spectral_derivative(g))[1]
    mask = (np.abs(gp) > 1e-14 * (np.max(np.abs(gp)) + 1e-300)) \
        & (x <= 0.95 * g.grid.half_length)
    out = np.zeros(len(x))
    if np.any(mask):
        out[mask] = pv_hilbert_at(g, x[mask])
    return out


# ---------------------------------------------------------------------------
# pointwise lower bound for the Hilbert transform


@dataclass(frozen=True)
class PointwiseBoundReport:
    """Margins of H g(x) >= (2/pi)(1/x) int_0^x (g(y)-g(x)) dy per node
    (or the mirrored form for nondecreasing f)."""

    nodes: np.ndarray
    transform_side: np.ndarray
    average_side: np.ndarray
    min_margin: float
    scale: float
    holds: bool


def check_pointwise_lower_bound(g: SampledFunction,
                                x_max: float | None = None,
                                margin_tol: float = 1e-6) -> PointwiseBoundReport:
    """Pointwise bound relating H g to the running average of g - g(x).

    Nonincreasing g:  H g(x)  >= (2/pi)(1/x) int_0^x (g(y) - g(x)) dy.
    Nondecreasing f: -H f(x)  >= (2/pi)(1/x) int_0^x (f(x) - f(y)) dy.
    The transform is evaluated by PV quadrature so periodization cannot
    eat the margin at large x.
    """
    _require_even(g, "pointwise lower bound")
    if g.monotone_on_positive not in ("nonincreasing", "nondecreasing"):
        raise HypothesisViolation("monotone flag must be set for the pointwise bound")
    sign = 1.0 if g.monotone_on_positive == "nonincreasing" else -1.0
    x, gv = positive_view(g)
    L = g.grid.half_length
    cut = min(x_max if x_max is not None else math.inf, L / 3.0)
    sel = x <= cut
    xs, gs = x[sel], gv[sel]

    if sign > 0:
        decayer = g                    # lhs = +H g, g itself decays
    else:
        # f nondecreasing to a plateau: lhs = -H f = +H(plateau - f)
        plateau = float(g.values[0])   # node at -L
        decayer = SampledFunction(g.grid, plateau - g.values, "even", "unknown")
    lhs = pv_hilbert_at(decayer, xs)

    F = cumulative_primitive(g)
    Fx = np.interp(xs, *positive_view(F))
    avg = (2.0 / math.pi) * sign * (Fx / xs - gs)

    margin = lhs - avg
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(avg))), 1e-30)
    min_margin = float(np.min(margin))
    return PointwiseBoundReport(xs, lhs, avg, min_margin, scale,
                                min_margin >= -margin_tol * scale)


# ---------------------------------------------------------------------------
# the weighted Hilbert inequality with explicit constant


def ccf_constant(delta: float) -> float:
    """(1+delta)^2 / (pi (3+delta))."""
    return (1.0 + delta) ** 2 / (math.pi * (3.0 + delta))


def ccf_remark_constant(delta: float) -> float:
    """The direct-argument constant (3+delta-2 sqrt(2+delta))/pi (weaker)."""
    return (3.0 + delta - 2.0 * math.sqrt(2.0 + delta)) / math.pi


def verify_ccf(g: SampledFunction, delta: float,
               hg: np.ndarray | None = None) -> InequalityReport:
    """-int_0^inf g' (H g) x^-(1+delta) dx
       >= C_delta int_0^inf (g(x)-g(0))^2 x^-(2+delta) dx."""
    if not (-1.0 < delta < 1.0):
        raise DeltaOutOfRange(f"delta={delta} outside (-1, 1)")
    _require_even(g, "the weighted Hilbert inequality")
    x, gv = positive_view(g)
    g0 = value_at_origin(g)
    gp = positive_view(spectral_derivative(g))[1]
    if hg is None:
        hg = pv_hilbert_on_support(g, gp)

    lhs, err_l = half_line_integral(x, -gp * hg * x ** (-1.0 - delta))
    plateau = (gv[-1] - g0) ** 2
    rhs, err_r = half_line_integral(
        x, (gv - g0) ** 2 * x ** (-2.0 - delta),
        tail=plateau_power_tail(plateau, float(x[-1]), 2.0 + delta))

    const = ccf_constant(delta)
    err = err_l + const * err_r
    ratio = lhs / rhs if rhs else math.inf
    verdict = "holds" if lhs >= const * rhs - 10.0 * err else "fails"
    return InequalityReport(
        name="hilbert_weighted_lower_bound",
        parameters={"delta": delta, "remark_constant": ccf_remark_constant(delta)},
        lhs=lhs, rhs=rhs, paper_constant=const, achieved_ratio=ratio,
        verdict=verdict, quadrature_error_estimate=err)


# ---------------------------------------------------------------------------
# Hardy


def verify_hardy(f: SampledFunction, p: float, r_tilde: float) -> InequalityReport:
    """int_0^inf F(x)^p x^(p-r-3) dx <= (p/r)^p int_0^inf f(t)^p t^(p-r-1) dt,
    F(x) = int_0^x f.  Orientation: lhs <= constant * rhs."""
    if p < 1.0 or r_tilde <= 0.0:
        raise HypothesisViolation("needs p >= 1 and r_tilde > 0")
    if float(np.min(f.values)) < -1e-12 * (f.sup_norm + 1e-300):
        raise NegativeInput("Hardy inequality needs nonnegative samples")
    if f.grid.kind == "periodic_uniform":
        x, fv = positive_view(f)
    else:
        x, fv = f.grid.nodes, np.maximum(f.values, 0.0)
    F = np.concatenate(([0.0], np.cumsum((fv[1:] + fv[:-1]) / 2.0 * np.diff(x))))
    F += first_cell_primitive(x[0], x[1], fv[0], fv[1])

    const = (p / r_tilde) ** p
    try:
        mass = float(F[-1])
        lhs, err_l = half_line_integral(
            x, F ** p * x ** (p - r_tilde - 3.0),
            tail=plateau_power_tail(mass ** p, float(x[-1]), r_tilde + 3.0 - p))
        rhs, err_r = half_line_integral(x, fv ** p * x ** (p - r_tilde - 1.0))
    except NonIntegrable:
        return InequalityReport(
            name="hardy", parameters={"p": p, "r_tilde": r_tilde},
            paper_constant=const, verdict="inconclusive",
            quadrature_error_estimate=math.inf)
    err = err_l + const * err_r
    ratio = lhs / rhs if rhs else 0.0
    verdict = "holds" if lhs <= const * rhs + 10.0 * err else "fails"
    return InequalityReport(
        name="hardy", parameters={"p": p, "r_tilde": r_tilde},
        lhs=lhs, rhs=rhs, paper_constant=const, achieved_ratio=ratio,
        verdict=verdict, quadrature_error_estimate=err)


# ---------------------------------------------------------------------------
# the monotone-function inequality and its proof constant


def kiselev_proof_constant(p: float, sigma: float) -> float:
    """Constant produced by the real-variable proof chain.

    p = 1:  (sqrt(1+sigma) - 1)^2 / pi          (optimal split weight)
    p > 1:  (2/pi) ((1+sigma)/(p+1)) c1 (1 - beta/(1+sigma)), beta = 1+sigma/2,
            c1 = min over s in [0,1) with 1 - beta s^(p+1) > 0 of
                 (1-s)^(p+1) / (1 - beta s^(p+1)),
            located by golden-section to 1e-8.
    """
    if p < 1.0 or sigma <= 0.0:
        raise HypothesisViolation("needs p >= 1 and sigma > 0")
    if p == 1.0:
        return (math.sqrt(1.0 + sigma) - 1.0) ** 2 / math.pi
    beta = 1.0 + sigma / 2.0
    s_star = beta ** (-1.0 / (p + 1.0))

    def ratio(s: float) -> float:
        return (1.0 - s) ** (p + 1.0) / (1.0 - beta * s ** (p + 1.0))

    lo, hi = 0.0, s_star * (1.0 - 1e-12)
    while hi - lo > 1e-8:
        m1 = hi - GOLDEN * (hi - lo)
        m2 = lo + GOLDEN * (hi - lo)
        if ratio(m1) <= ratio(m2):
            hi = m2
        else:
            lo = m1
    c1 = ratio((lo + hi) / 2.0)
    return (2.0 / math.pi) * ((1.0 + sigma) / (p + 1.0)) * c1 * (1.0 - beta / (1.0 + sigma))


def kiselev_hilbert_values(f: SampledFunction) -> np.ndarray:
    """H f at positive nodes for f tending to a plateau, via the decaying
    complement: H f = -H(plateau - f).  Reusable across sigma and domain."""
    plateau = float(f.values[0])
    decayer = SampledFunction(f.grid, plateau - f.values, "even", "unknown")
    fp = positive_view(spectral_derivative(f))[1]
    return -pv_hilbert_on_support(decayer, fp)


def verify_kiselev(f: SampledFunction, p: float, sigma: float,
                   domain: str = "unit",
                   hf: np.ndarray | None = None) -> InequalityReport:
    """-int_D (H f) f' f^(p-1) x^-sigma dx >= C0 int_D f^(p+1) x^-(1+sigma) dx
    for even nondecreasing f with f(0) = 0; D = (0,1) or (0,inf)."""
    if domain not in ("unit", "half_line"):
        raise HypothesisViolation(f"unknown domain {domain!r}")
    if p < 1.0 or sigma <= 0.0:
        raise HypothesisViolation("needs p >= 1 and sigma > 0")
    _require_even(f, "the monotone-function inequality")
    if f.monotone_on_positive != "nondecreasing":
        raise HypothesisViolation("f must carry the nondecreasing flag")
    if abs(value_at_origin(f)) > 1e-10 * (f.sup_norm + 1e-300):
        raise HypothesisViolation("f(0) must vanish")

    x, fv = positive_view(f)
    fp = positive_view(spectral_derivative(f))[1]
    if hf is None:
        plateau = float(f.values[0])
        decayer = SampledFunction(f.grid, plateau - f.values, "even", "unknown")
        hf = -pv_hilbert_on_support(decayer, fp)

    if domain == "unit":
        sel = x <= 1.0
        xs = x[sel]
        lhs_v = -hf[sel] * fp[sel] * np.maximum(fv[sel], 0.0) ** (p - 1.0) * xs ** (-sigma)
        rhs_v = np.maximum(fv[sel], 0.0) ** (p + 1.0) * xs ** (-1.0 - sigma)
        lhs = integrate_positive(xs, lhs_v)
        rhs = integrate_positive(xs, rhs_v)
        sub = np.arange(len(xs) - 1, -1, -2)[::-1]
        err = (abs(lhs - integrate_positive(xs[sub], lhs_v[sub]))
               + abs(rhs - integrate_positive(xs[sub], rhs_v[sub])))
    else:
        lhs_v = -hf * fp * np.maximum(fv, 0.0) ** (p - 1.0) * x ** (-sigma)
        plateau = float(fv[-1]) ** (p + 1.0)
        lhs, err_l = half_line_integral(x, lhs_v)
        rhs, err_r = half_line_integral(
            x, np.maximum(fv, 0.0) ** (p + 1.0) * x ** (-1.0 - sigma),
            tail=plateau_power_tail(plateau, float(x[-1]), 1.0 + sigma))
        err = err_l + err_r

    const = kiselev_proof_constant(p, sigma)
    ratio = lhs / rhs if rhs else math.inf
    verdict = "holds" if lhs >= const * rhs - 10.0 * err else "fails"
    return InequalityReport(
        name="monotone_weighted_lower_bound",
        parameters={"p": p, "sigma": sigma,
                    "domain_unit": 1.0 if domain == "unit" else 0.0},
        lhs=lhs, rhs=rhs, paper_constant=const, achieved_ratio=ratio,
        verdict=verdict, quadrature_error_estimate=err)


def kiselev_integrand_min(f: SampledFunction, n_eval: int = 2000) -> float:
    """min over (0, inf) of -H f * f' for even nondecreasing f: nonnegative
    in exact arithmetic; PV quadrature keeps the check sharp."""
    _require_even(f, "integrand sign check")
    x, _ = positive_view(f)
    fp = positive_view(spectral_derivative(f))[1]
    keep = np.abs(fp) > 1e-12 * (np.max(np.abs(fp)) + 1e-300)
    xs = x[keep]
    if len(xs) > n_eval:
        xs = xs[np.linspace(0, len(xs) - 1, n_eval).astype(int)]
    plateau = float(f.values[0])
    decayer = SampledFunction(f.grid, plateau - f.values, "even", "unknown")
    hf = -pv_hilbert_at(decayer, xs)
    fps = np.interp(xs, x, fp)
    return float(np.min(-hf * fps))


# ---------------------------------------------------------------------------
# exact identity for the 1/x weight and its exponential-weight variants


@dataclass(frozen=True)
class IdentityReport:
    """Dual-path evaluation of the 1/x-weight identity."""

    lhs: float
    rhs_term1: float
    rhs_term2: float
    residual: float
    weaker_bound_holds: bool
    remark_bound_holds: bool
    inconclusive: bool = False


def _pair_difference_square_integral(x: np.ndarray, gv: np.ndarray,
                                     gp: np.ndarray, g0: float) -> float:
    """(1/pi) iint (g(x)-g(y))^2 / ((x-y)^2 (x+y)) dx dy over (0,inf)^2.

    Rows run over the window where g is active, columns over the whole
    box (off-window rows are recovered by symmetry of the integrand), the
    diagonal is patched by its continuous limit g'(x)^2/(2x), and the
    beyond-box plateau tail K(x, Y) = int_Y^inf dy/((y-x)^2 (y+x)) is
    added in closed form (twice: once per symmetric region).
    """
    sup = float(np.max(np.abs(gv))) + 1e-300
    active = np.nonzero(np.abs(gv) > 1e-6 * sup)[0]
    cut = min(len(x) - 1, (active[-1] + 8) if len(active) else 8)
    xf = np.concatenate(([0.0], x))          # full column set, origin included
    gf = np.concatenate(([g0], gv))
    rows = np.arange(cut + 2)                # row window, origin included
    xr, gr = xf[rows], gf[rows]
    gpr = np.concatenate(([0.0], gp))[rows]
    dx = xr[:, None] - xf[None, :]
    sm = xr[:, None] + xf[None, :]
    dg = gr[:, None] - gf[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ker = dg ** 2 / (dx ** 2 * sm)
    ker[rows, rows] = gpr ** 2 / (2.0 * np.maximum(xr, 1e-300))
    ker[0, 0] = 0.0                          # integrand vanishes at the corner
    X2 = xr[-1]
    inner_full = np.trapezoid(ker, xf, axis=1)
    far = xf > X2
    inner_far = np.trapezoid(ker[:, far], xf[far], axis=1) if np.count_nonzero(far) > 1 else 0.0
    # beyond-box tail: (g(x) - g(y))^2 ~ (g(x) - g(edge))^2
    Y = float(xf[-1]) + (xf[-1] - xf[-2]) / 2.0
    small = xr < 0.05 * Y
    K = np.empty_like(xr)
    xs = xr[~small]
    K[~small] = (1.0 / (2.0 * xs * (Y - xs))
                 - np.log((Y + xs) / (Y - xs)) / (4.0 * xs ** 2))
    K[small] = (1.0 / (2.0 * Y ** 2) + xr[small] / (3.0 * Y ** 3)
                + xr[small] ** 2 / (2.0 * Y ** 4))
    tail = (gr - gf[-1]) ** 2 * K
    # row x <= X2 full + symmetric recovery of rows x > X2 (their in-window
    # columns equal the window rows' far columns) + two plateau tails
    total = np.trapezoid(inner_full + inner_far + 2.0 * tail, xr)
    return float(total / math.pi)


def lemma41_identity(g: SampledFunction,
                     hg: np.ndarray | None = None) -> IdentityReport:
    """-int_0^inf g'(x) H g(x) / x dx
       = (1/pi) int_0^inf (g(0)-g(y))^2/y^2 dy
       + (1/pi) iint (g(x)-g(y))^2 / ((x-y)^2 (x+y)) dx dy,
    with the weaker lower bounds implied by dropping the double integral
    (constant 1/pi) or bounding it (extra (3 - 2 sqrt(2))/pi)."""
    _require_even(g, "the exact 1/x identity")
    x, gv = positive_view(g)
    g0 = value_at_origin(g)
    gp = positive_view(spectral_derivative(g))[1]
    if hg is None:
        hg = pv_hilbert_on_support(g, gp)

    lhs, err_l = half_line_integral(x, -gp * hg / x)
    plateau = (gv[-1] - g0) ** 2
    term1_int, err_1 = half_line_integral(
        x, (gv - g0) ** 2 / x ** 2,
        tail=plateau_power_tail(plateau, float(x[-1]), 2.0))
    term1 = term1_int / math.pi
    try:
        term2 = _pair_difference_square_integral(x, gv, gp, g0)
    except (FloatingPointError, NonIntegrable):
        return IdentityReport(lhs, term1, math.nan, math.nan, False, False, True)
    residual = abs(lhs - (term1 + term2)) / max(abs(lhs), 1e-300)
    tol = 10.0 * (err_l + err_1) / max(abs(lhs), 1e-300) + 1e-3
    weaker = lhs >= term1 - 10.0 * (err_l + err_1)
    remark = lhs >= (1.0 + (3.0 - 2.0 * math.sqrt(2.0))) * term1 - 10.0 * (err_l + err_1)
    # the remark adds (3-2sqrt2)/pi on top of the main 1/pi term
    return IdentityReport(lhs, term1, term2, residual, weaker, remark,
                          inconclusive=residual > tol)


def verify_lemma43(g: SampledFunction,
                   hg: np.ndarray | None = None) -> InequalityReport:
    """-int_0^inf g' (H g) e^-x / x dx
       >= (1/(2 pi)) int_0^inf (g(0)-g(x))^2/x^2 dx - 1000 ||g||_inf^2."""
    _require_even(g, "the exponential-weight lower bound")
    x, gv = positive_view(g)
    g0 = value_at_origin(g)
    gp = positive_view(spectral_derivative(g))[1]
    if hg is None:
        hg = pv_hilbert_on_support(g, gp)
    lhs, err_l = half_line_integral(x, -gp * hg * np.exp(-x) / x)
    plateau = (gv[-1] - g0) ** 2
    quad_term, err_q = half_line_integral(
        x, (gv - g0) ** 2 / x ** 2,
        tail=plateau_power_tail(plateau, float(x[-1]), 2.0))
    rhs = quad_term / (2.0 * math.pi) - 1000.0 * g.sup_norm ** 2
    err = err_l + err_q / (2.0 * math.pi)
    verdict = "holds" if lhs >= rhs - 10.0 * err else "fails"
    return InequalityReport(
        name="exp_weight_lower_bound",
        parameters={"slack_constant": 1000.0},
        lhs=lhs, rhs=rhs, paper_constant=1.0 / (2.0 * math.pi),
        achieved_ratio=lhs - rhs, verdict=verdict,
        quadrature_error_estimate=err)


def verify_lemma44(g: SampledFunction, gamma: float) -> InequalityReport:
    """|int_0^inf (L^g g(0) - L^g g(x))/x e^-x dx|
       <= C_gamma int_0^inf |g(0)-g(x)| x^-(1+gamma) log(10 + 1/x) dx,
    C_gamma implicit: the report carries the finite ratio lhs/rhs."""
    if not (0.0 < gamma < 1.0):
        raise GammaOutOfRange(f"gamma={gamma} outside (0, 1)")
    _require_even(g, "the dissipation comparison bound")
    x, gv = positive_view(g)
    g0 = value_at_origin(g)
    lam = fractional_laplacian(g, gamma)
    lx = positive_view(lam)[1]
    l0 = value_at_origin(lam)
    lhs_val, err_l = half_line_integral(x, (l0 - lx) / x * np.exp(-x))
    lhs = abs(lhs_val)
    X = float(x[-1])
    plateau = abs(gv[-1] - g0) * math.log(10.0 + 1.0 / X)
    rhs, err_r = half_line_integral(
        x, np.abs(gv - g0) * x ** (-1.0 - gamma) * np.log(10.0 + 1.0 / x),
        tail=plateau_power_tail(plateau, X, 1.0 + gamma))
    ratio = lhs / rhs if rhs else 0.0
    verdict = "holds" if math.isfinite(ratio) else "inconclusive"
    return InequalityReport(
        name="dissipation_comparison",
        parameters={"gamma": gamma},
        lhs=lhs, rhs=rhs, paper_constant=None, achieved_ratio=ratio,
        verdict=verdict, quadrature_error_estimate=err_l + err_r)


def lemma44_scale_band(fn, gamma: float, box: float = 60.0, n: int = 8192,
                       scales=(0.25, 1.0, 4.0)) -> float:
    """max/min of the lemma-4.4 ratio across g(lambda x): bounded (<= 50)
    because the implicit constant is scale-uniform."""
    from .core import build_grid
    ratios = []
    for lam in scales:
        grid = build_grid("periodic_uniform", n, box)
        g = SampledFunction.from_callable(
            grid, lambda x, lam=lam: fn(lam * x), parity="even")
        ratios.append(verify_lemma44(g, gamma).achieved_ratio)
    return max(ratios) / min(ratios)


# ---------------------------------------------------------------------------
# drift-family lower bounds (implicit constants: fitted mode)


def verify_alpha(g: SampledFunction, alpha: float,
                 weighted: bool = False) -> InequalityReport:
    """int_0^inf drift(g)(x) g'(x) / x [e^-x] dx against
    int_0^inf (g(0)-g(x))^2 x^-(3-alpha) dx in fitted-constant mode.

    drift = Lambda^-alpha d/dx (= -Lambda^-(alpha-1) H); at alpha = 1 the
    left side reduces to the Hilbert-case integral of the 1/x identity.
    """
    if not (0.0 < alpha < 2.0):
        raise AlphaOutOfRange(f"alpha={alpha} outside (0, 2)")
    _require_even(g, "the drift-family lower bound")
    x, gv = positive_view(g)
    g0 = value_at_origin(g)
    gp = positive_view(spectral_derivative(g))[1]
    dv = positive_view(drift_velocity(g, alpha))[1]
    w = np.exp(-x) if weighted else np.ones_like(x)
    lhs, err_l = half_line_integral(x, dv * gp / x * w)
    # the quadratic side carries no exponential weight in either mode
    plateau = (gv[-1] - g0) ** 2
    rhs, err_r = half_line_integral(
        x, (gv - g0) ** 2 * x ** (alpha - 3.0),
        tail=plateau_power_tail(plateau, float(x[-1]), 3.0 - alpha))
    ratio = lhs / rhs if rhs else math.inf
    verdict = "holds" if (lhs > 0 and math.isfinite(ratio) and ratio > 0) else "fails"
    return InequalityReport(
        name="drift_weighted_lower_bound",
        parameters={"alpha": alpha, "weighted": 1.0 if weighted else 0.0},
        lhs=lhs, rhs=rhs, paper_constant=None, achieved_ratio=ratio,
        verdict=verdict, quadrature_error_estimate=err_l + err_r)


@dataclass(frozen=True)
class FittedFamilyResult:
    """Shared fitted constants across a test family."""

    alpha: float
    weighted: bool
    fitted_lower: float        # c with lhs >= c rhs (- C sup^2 if weighted)
    fitted_slack: float        # C (0 in the unweighted mode)
    reports: list = field(default_factory=list)

    @property
    def positive(self) -> bool:
        return self.fitted_lower > 0 and math.isfinite(self.fitted_slack)


def alpha_family_fit(alpha: float, members, weighted: bool = False) -> FittedFamilyResult:
    """Fit (c, C): lhs_i >= c rhs_i - C sup_i^2 across the family, with c
    half the smallest positive ratio and C the smallest compatible slack."""
    reports = []
    sups = []
    for mem in members:
        g = mem.sample()
        reports.append(verify_alpha(g, alpha, weighted))
        sups.append(g.sup_norm)
    ratios = [r.lhs / r.rhs for r in reports if r.rhs > 0]
    if not weighted:
        c = min(ratios)
        return FittedFamilyResult(alpha, weighted, c, 0.0, reports)
    positive = [r for r in ratios if r > 0]
    c = (min(positive) / 2.0) if positive else 1e-12
    slack = max(max((c * r.rhs - r.lhs) / s ** 2
                    for r, s in zip(reports, sups)), 0.0)
    return FittedFamilyResult(alpha, weighted, c, slack, reports)
