"""Singular and nonlocal operators on sampled functions.

Fourier-multiplier conventions: the Hilbert transform is the multiplier
-i*sgn(k), the fractional Laplacian |k|^gamma, and the drift velocity
i*k*|k|^(-alpha).  All multipliers send the mean (k = 0) to zero, and odd
multipliers zero the unpaired Nyquist mode.

Whole-line operators evaluated on a periodic box carry a periodization
error that scales like x/L^2 whenever the operator output decays only
algebraically; the quadrature paths (pv_quadrature, singular_integral,
kernel_drift_at) do not, and serve as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import SampledFunction, build_grid
from .errors import (AlphaOutOfRange, CalibrationFailed, DiagonalSingularity,
                     DomainError, GammaOutOfRange, MethodDomainMismatch)

HILBERT_METHODS = ("spectral", "pv_quadrature", "logkernel_even")
FRACLAP_METHODS = ("spectral", "singular_integral")


@dataclass(frozen=True)
class OperatorSpec:
    """Which nonlocal operator a model uses, and with which sign convention
    the velocity enters the transport term (+H theta vs -H theta)."""

    kind: str                       # hilbert | fractional_laplacian | drift
    gamma: float = 1.0              # fractional_laplacian only, (0, 2]
    alpha: float = 1.0              # drift only, (0, 2)
    sign_convention: str = "paper_eq11"

    def __post_init__(self):
        if self.kind not in ("hilbert", "fractional_laplacian", "drift"):
            raise MethodDomainMismatch(f"unknown operator kind {self.kind!r}")
        if self.kind == "fractional_laplacian" and not (0.0 < self.gamma <= 2.0):
            raise GammaOutOfRange(f"gamma={self.gamma} outside (0, 2]")
        if self.kind == "drift" and not (0.0 < self.alpha < 2.0):
            raise AlphaOutOfRange(f"alpha={self.alpha} outside (0, 2)")
        if self.sign_convention not in ("paper_eq11", "paper_section4"):
            raise MethodDomainMismatch(
                f"unknown sign convention {self.sign_convention!r}")


@dataclass(frozen=True)
class SingularConstant:
    """Normalization of the singular-integral form of |k|^gamma, calibrated
    against the spectral definition on a Gaussian."""

    gamma: float
    value: float
    calibration_residual: float


@lru_cache(maxsize=64)
def _wavenumbers(n: int, half_length: float) -> np.ndarray:
    k = np.fft.fftfreq(n, d=2.0 * half_length / n) * 2.0 * np.pi
    k.setflags(write=False)
    return k


def _flip(parity: str) -> str:
    return {"even": "odd", "odd": "even", "none": "none"}[parity]


def _require_periodic(f: SampledFunction, what: str) -> None:
    if f.grid.kind != "periodic_uniform":
        raise MethodDomainMismatch(f"{what} requires a periodic grid")


def _apply_multiplier(f: SampledFunction, mult: np.ndarray,
                      parity_out: str) -> SampledFunction:
    out = np.fft.ifft(mult * np.fft.fft(f.values)).real
    if parity_out != "none" and f.parity != "none":
        # output parity is exact for parity-definite multipliers; remove
        # the fft roundoff that would trip the constructor's validation
        m = f.grid.mirror_index()
        sign = 1.0 if parity_out == "even" else -1.0
        out = (out + sign * out[m]) / 2.0
    return SampledFunction(f.grid, out, parity_out, "unknown")


def _node_offsets(f: SampledFunction, points: np.ndarray) -> np.ndarray:
    h = f.grid.spacing
    idx = np.rint((points - f.grid.nodes[0]) / h).astype(int)
    if np.max(np.abs(points - (f.grid.nodes[0] + idx * h))) > 1e-9 * h:
        raise MethodDomainMismatch("quadrature paths evaluate at grid nodes only")
    return idx


# ---------------------------------------------------------------------------
# derivatives


def spectral_derivative(f: SampledFunction) -> SampledFunction:
    _require_periodic(f, "spectral differentiation")
    k = _wavenumbers(f.grid.n_points, f.grid.half_length)
    mult = 1j * k.astype(complex)
    mult[np.abs(k) == np.max(np.abs(k))] = 0.0
    return _apply_multiplier(f, mult, _flip(f.parity))


def fd4_derivative(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """4th-order finite differences on arbitrary nodes (5-point stencils)."""
    n = len(x)
    out = np.empty(n)
    for i in range(n):
        j = min(max(i - 2, 0), n - 5)
        xs = x[j:j + 5] - x[i]
        s = np.max(np.abs(xs))
        V = (xs / s)[:, None] ** np.arange(5)[None, :]
        c = np.linalg.solve(V, v[j:j + 5])
        out[i] = c[1] / s
    return out


# ---------------------------------------------------------------------------
# Hilbert transform


def _hilbert_spectral(f: SampledFunction) -> SampledFunction:
    k = _wavenumbers(f.grid.n_points, f.grid.half_length)
    mult = -1j * np.sign(k)
    mult[np.abs(k) == np.max(np.abs(k))] = 0.0
    return _apply_multiplier(f, mult, _flip(f.parity))


def pv_hilbert_at(f: SampledFunction, points) -> np.ndarray:
    """PV quadrature of (1/pi) int f(y)/(x-y) dy at grid nodes.

    Periodic grids use the alternate-point rule: only nodes an odd number
    of steps from x enter with weight 2h, so the symmetric pairs
    y = x +- (2m+1)h cancel the singularity and no node hits it.
    Half-line grids use the parity-reduced kernels on (0, inf) with the
    removable singularity at y = x patched by its limit value.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    nodes = f.grid.nodes
    vals = f.values
    if f.grid.kind == "periodic_uniform":
        h = f.grid.spacing
        offsets = _node_offsets(f, pts)
        parity_idx = np.arange(f.grid.n_points) % 2
        out = np.empty(len(pts))
        for m, i in enumerate(offsets):
            mask = parity_idx != (i % 2)
            out[m] = (2.0 * h / np.pi) * np.sum(vals[mask] / (pts[m] - nodes[mask]))
        return out
    if f.parity == "even":
        prod = vals          # H g(x) = (2x/pi) int (g(y)-g(x))/(x^2-y^2) dy
    elif f.parity == "odd":
        prod = nodes * vals  # H f(x) = (2/pi) int (y f(y)-x f(x))/(x^2-y^2) dy
    else:
        raise MethodDomainMismatch(
            "pv_quadrature on a half-line grid needs even or odd parity")
    dprod = fd4_derivative(nodes, prod)
    Y = nodes[-1]
    out = np.empty(len(pts))
    for m, xp in enumerate(pts):
        px = np.interp(xp, nodes, prod)
        with np.errstate(divide="ignore", invalid="ignore"):
            ker = (prod - px) / (xp ** 2 - nodes ** 2)
        sing = int(np.argmin(np.abs(nodes - xp)))
        ker[sing] = -np.interp(xp, nodes, dprod) / (2.0 * xp)
        ker[~np.isfinite(ker)] = 0.0
        scale = (2.0 * xp / np.pi) if f.parity == "even" else (2.0 / np.pi)
        # analytic tail of the -prod(x)/(x^2-y^2) part beyond the last node
        tail = px / (2.0 * xp) * math.log((Y + xp) / (Y - xp)) if xp < Y else 0.0
        out[m] = scale * (np.trapezoid(ker, nodes) + tail)
    return out


def _antider_log(u: np.ndarray) -> np.ndarray:
    """Antiderivative of log|u|, i.e. u (log|u| - 1), continuous through 0."""
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = u * (np.log(au) - 1.0)
    return np.where(au == 0.0, 0.0, out)


def _antider_ulog(u: np.ndarray) -> np.ndarray:
    """Antiderivative of u log|u|, i.e. u^2/2 (log|u| - 1/2)."""
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 0.5 * u * u * (np.log(au) - 0.5)
    return np.where(au == 0.0, 0.0, out)


def _hilbert_logkernel(f: SampledFunction) -> SampledFunction:
    """Even-parity route H g(x) = (1/pi) int_0^inf log|(x-y)/(x+y)| g'(y) dy.

    g' is taken piecewise linear between nodes and each cell is integrated
    against the log kernel in closed form, so the integrable singularity
    at y = x costs no accuracy.
    """
    if f.parity != "even":
        raise MethodDomainMismatch("logkernel_even requires even parity")
    if f.grid.kind == "periodic_uniform":
        gp_full = spectral_derivative(f).values
        pos = f.grid.positive()
        y = np.concatenate(([0.0], f.grid.nodes[pos]))
        gp = np.concatenate(([0.0], gp_full[pos]))
    else:
        y = np.concatenate(([0.0], f.grid.nodes))
        gp = np.concatenate(([0.0], fd4_derivative(f.grid.nodes, f.values)))
    a, b = y[:-1], y[1:]
    va, vb = gp[:-1], gp[1:]
    slope = (vb - va) / (b - a)
    out_pos = np.empty(len(y) - 1)
    for m in range(1, len(y)):
        xp = y[m]
        vlin = va + slope * (xp - a)          # cell-linear g' extrapolated to x
        minus = (vlin * (_antider_log(b - xp) - _antider_log(a - xp))
                 + slope * (_antider_ulog(b - xp) - _antider_ulog(a - xp)))
        vlin_p = va + slope * (-xp - a)
        plus = (vlin_p * (_antider_log(b + xp) - _antider_log(a + xp))
                + slope * (_antider_ulog(b + xp) - _antider_ulog(a + xp)))
        out_pos[m - 1] = (np.sum(minus) - np.sum(plus)) / np.pi
    if f.grid.kind == "half_line_graded":
        return SampledFunction(f.grid, out_pos, "odd", "unknown")
    out = np.zeros(f.grid.n_points)
    out[f.grid.positive()] = out_pos
    out = out - out[f.grid.mirror_index()]   # odd extension to negative nodes
    return SampledFunction(f.grid, out, "odd", "unknown")


def hilbert_transform(f: SampledFunction, method: str = "spectral") -> SampledFunction:
    """Hilbert transform (1/pi) PV int f(y)/(x-y) dy; output parity flips.

    spectral: periodic grids, multiplier -i sgn(k), mean -> 0.
    pv_quadrature: any grid with decaying samples (parity needed off-box).
    logkernel_even: even functions with an accessible derivative.
    """
    if method not in HILBERT_METHODS:
        raise MethodDomainMismatch(f"unknown Hilbert method {method!r}")
    if method == "spectral":
        _require_periodic(f, "spectral Hilbert transform")
        return _hilbert_spectral(f)
    if method == "logkernel_even":
        return _hilbert_logkernel(f)
    vals = pv_hilbert_at(f, f.grid.nodes)
    return SampledFunction(f.grid, vals, _flip(f.parity), "unknown")


# ---------------------------------------------------------------------------
# fractional Laplacian


def _fraclap_spectral(f: SampledFunction, gamma: float) -> SampledFunction:
    k = _wavenumbers(f.grid.n_points, f.grid.half_length)
    mult = (np.abs(k) ** gamma).astype(complex)
    return _apply_multiplier(f, mult, f.parity)


def singular_fraclap_at(f: SampledFunction, points, gamma: float,
                        constant: float = 1.0) -> np.ndarray:
    """constant * int_0^inf (2 f(x) - f(x-t) - f(x+t)) / t^(1+gamma) dt
    at grid nodes (the unnormalized singular-integral form of |k|^gamma).

    A Gaussian-mollified t^2 f''(x) subtraction removes the corner at
    t = 0; the pure 2 f(x) tail beyond the sampled lattice is added in
    closed form so slowly converging small-gamma tails stay accurate.
    Requires decaying f (zero extension beyond the box).
    """
    _require_periodic(f, "singular-integral fractional Laplacian")
    if not (0.0 < gamma < 2.0):
        raise GammaOutOfRange(f"gamma={gamma} outside (0, 2) for singular_integral")
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    idx = _node_offsets(f, pts)
    nodes, vals = f.grid.nodes, f.values
    n, h = f.grid.n_points, f.grid.spacing
    k = _wavenumbers(n, f.grid.half_length)
    fpp = np.fft.ifft(-(k ** 2) * np.fft.fft(vals)).real

    jmax = n
    t = h * np.arange(1, jmax + 1)
    moll = t * t * np.exp(-t * t)
    tpow = t ** (1.0 + gamma)
    padded = np.zeros(3 * n)
    padded[n:2 * n] = vals
    mom = 0.5 * math.gamma((2.0 - gamma) / 2.0)  # int_0^inf t^(1-g) e^(-t^2) dt
    out = np.empty(len(pts))
    for m, i in enumerate(idx):
        c = n + i
        sym = 2.0 * vals[i] - padded[c - jmax:c][::-1] - padded[c + 1:c + jmax + 1]
        smooth = (sym + fpp[i] * moll) / tpow
        integral = h * (np.sum(smooth) - 0.5 * smooth[-1])
        tail = 2.0 * vals[i] * t[-1] ** (-gamma) / gamma
        out[m] = constant * (integral - fpp[i] * mom + tail)
    return out


def fractional_laplacian(f: SampledFunction, gamma: float,
                         method: str = "spectral") -> SampledFunction:
    """Lambda^gamma f: multiplier |k|^gamma, or the calibrated singular
    integral C_gamma PV int (f(x)-f(y))/|x-y|^(1+gamma) dy (gamma < 2)."""
    if method not in FRACLAP_METHODS:
        raise MethodDomainMismatch(f"unknown fractional-Laplacian method {method!r}")
    if method == "spectral":
        if not (0.0 < gamma <= 2.0):
            raise GammaOutOfRange(f"gamma={gamma} outside (0, 2]")
        _require_periodic(f, "spectral fractional Laplacian")
        return _fraclap_spectral(f, gamma)
    const = calibrate_singular_constant(gamma).value
    vals = singular_fraclap_at(f, f.grid.nodes, gamma, const)
    return SampledFunction(f.grid, vals, f.parity, "unknown")


def _gaussian_symbol_reference(gamma: float, xs: np.ndarray) -> np.ndarray:
    """Lambda^gamma of exp(-x^2) through the exact continuous transform:
    (1/sqrt(pi)) int_0^inf xi^gamma exp(-xi^2/4) cos(x xi) dxi.

    Free of box periodization, so it anchors calibration uniformly in gamma.
    """
    from scipy.integrate import quad
    out = np.empty(len(xs))
    for i, xv in enumerate(xs):
        val, _ = quad(lambda xi: xi ** gamma * math.exp(-xi * xi / 4.0)
                      * math.cos(xv * xi), 0.0, 30.0, limit=200)
        out[i] = val / math.sqrt(math.pi)
    return out


@lru_cache(maxsize=32)
def calibrate_singular_constant(gamma: float) -> SingularConstant:
    """Least-squares ratio between the Fourier-symbol Lambda^gamma of a
    Gaussian and its unnormalized singular integral over a 100-point sample."""
    if not (0.0 < gamma < 2.0):
        raise GammaOutOfRange(f"gamma={gamma} outside (0, 2)")
    grid = build_grid("periodic_uniform", 8192, 30.0)
    g = SampledFunction.from_callable(grid, lambda x: np.exp(-x * x), parity="even")
    inside = np.nonzero(np.abs(grid.nodes) <= 3.0)[0]
    sample = grid.nodes[inside[np.linspace(0, len(inside) - 1, 100).astype(int)]]
    a = _gaussian_symbol_reference(gamma, sample)
    b = singular_fraclap_at(g, sample, gamma)
    value = float(np.dot(a, b) / np.dot(b, b))
    residual = float(np.sqrt(np.sum((a - value * b) ** 2) / np.sum(a ** 2)))
    if residual > 1e-3:
        raise CalibrationFailed(
            f"gamma={gamma}: calibration residual {residual:.3e} exceeds 1e-3")
    return SingularConstant(gamma, value, residual)


# ---------------------------------------------------------------------------
# drift velocity (interpolates through the Hilbert case at alpha = 1)


def drift_velocity(f: SampledFunction, alpha: float) -> SampledFunction:
    """Velocity with Fourier symbol i*k*|k|^(-alpha), zero mode -> 0.

    At alpha = 1 the symbol is i*sgn(k) and the output equals -H f exactly.
    """
    if not (0.0 < alpha < 2.0):
        raise AlphaOutOfRange(f"alpha={alpha} outside (0, 2)")
    _require_periodic(f, "drift velocity")
    k = _wavenumbers(f.grid.n_points, f.grid.half_length)
    mult = np.zeros(len(k), dtype=complex)
    nz = k != 0.0
    mult[nz] = 1j * k[nz] * np.abs(k[nz]) ** (-alpha)
    mult[np.abs(k) == np.max(np.abs(k))] = 0.0
    return _apply_multiplier(f, mult, _flip(f.parity))


# ---------------------------------------------------------------------------
# closed-form kernel behind the alpha-model lower bounds


def alpha_kernel_h(x, y, alpha: float):
    """Kernel h(x, y) of the physical-space drift representation
    drift(g)(x) = C_alpha int_0^inf h(x,y) (g(y) - g(x)) dy   (x, y > 0):

    0 < alpha < 1:  -(1-alpha) (|x-y|^-(2-alpha) sgn(x-y) + (x+y)^-(2-alpha))
    1 < alpha < 2:  -(sgn(x-y) |x-y|^(eps-1) + (x+y)^(eps-1)),  eps = alpha-1
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(xa <= 0) or np.any(ya <= 0):
        raise DomainError("kernel defined for x, y > 0 only")
    d = xa - ya
    if np.any(d == 0):
        raise DiagonalSingularity("kernel is singular on the diagonal x == y")
    if 0.0 < alpha < 1.0:
        out = -(1.0 - alpha) * (np.abs(d) ** (alpha - 2.0) * np.sign(d)
                                + (xa + ya) ** (alpha - 2.0))
    elif 1.0 < alpha < 2.0:
        eps = alpha - 1.0
        out = -(np.sign(d) * np.abs(d) ** (eps - 1.0) + (xa + ya) ** (eps - 1.0))
    else:
        raise AlphaOutOfRange(f"alpha={alpha} outside (0,1) or (1,2)")
    return out if out.ndim else float(out)


def kernel_drift_at(f: SampledFunction, points, alpha: float,
                    constant: float = 1.0) -> np.ndarray:
    """Quadrature of constant * int_0^inf h(x,y) (g(y)-g(x)) dy for even g
    on a periodic grid: the physical-space oracle for drift_velocity.

    The |x-y|^(alpha-2)-singular part is paired into
    c * t^(alpha-2) * (g(x+t) - g(x-t)) and integrated cell by cell with
    exact power moments against the piecewise-linear difference, so the
    symmetric pairs cancel the singularity without losing order.
    Evaluation points must be grid nodes with 2h <= x <= L/2.
    """
    if not (0.0 < alpha < 2.0) or alpha == 1.0:
        raise AlphaOutOfRange("kernel path needs alpha in (0,1) or (1,2)")
    _require_periodic(f, "kernel drift")
    if f.parity != "even":
        raise MethodDomainMismatch("kernel drift requires even parity")
    nodes, vals, h = f.grid.nodes, f.values, f.grid.spacing
    i0 = int(np.argmin(np.abs(nodes)))
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    L = f.grid.half_length
    if np.any(pts < 2.0 * h - 1e-12 * h) or np.any(pts > 0.45 * L):
        raise DomainError("kernel drift evaluation needs 2h <= x <= 0.45 L")
    idx = _node_offsets(f, pts)
    pos = f.grid.positive()
    y, gv = nodes[pos], vals[pos]
    Y = y[-1]
    coeff = (1.0 - alpha) if alpha < 1.0 else 1.0
    p = alpha - 2.0
    out = np.empty(len(pts))
    for m, i in enumerate(idx):
        xp = nodes[i]
        gx = vals[i]
        ip = i - i0                      # steps from the origin node
        # paired singular part c*t^p*(g(x+t)-g(x-t)) on t in (0, x):
        # exact power moments against the piecewise-linear difference
        j = np.arange(0, ip + 1)
        tj = h * j
        phi = vals[i0 + ip + j] - vals[i0 + ip - j]
        a, b = tj[:-1], tj[1:]
        slope = (phi[1:] - phi[:-1]) / h
        c0 = phi[:-1] - slope * a        # phi(t) = c0 + slope*t per cell
        with np.errstate(divide="ignore"):
            mom1 = (b ** (p + 1) - np.where(a > 0, a ** (p + 1), 0.0)) / (p + 1)
        mom2 = (b ** (p + 2) - a ** (p + 2)) / (p + 2)
        # first cell: c0 = phi(0) = 0 exactly, only the slope moment enters
        sing = coeff * (np.sum(c0[1:] * mom1[1:] + slope[1:] * mom2[1:])
                        + slope[0] * mom2[0])
        # unpaired branch y >= 2x (t >= x), off-diagonal, trapezoid
        far = y >= 2.0 * xp - 0.5 * h
        sing += np.trapezoid(coeff * (y[far] - xp) ** p * (gv[far] - gx), y[far])
        # smooth -(x+y)^p part over the whole half-line
        smooth = -coeff * (xp + y) ** p * (gv - gx)
        total = sing + np.trapezoid(smooth, y)
        # beyond the last node g ~ 0; the two power tails only converge
        # combined: int_Y^inf [(y-x)^p - (y+x)^p] dy
        tail = -gx * coeff * ((Y + xp) ** (p + 1) - (Y - xp) ** (p + 1)) / (p + 1)
        out[m] = constant * (total + tail)
    return out


def _gaussian_drift_reference(alpha: float, xs: np.ndarray) -> np.ndarray:
    """Drift of exp(-x^2) through the exact continuous transform:
    -(1/sqrt(pi)) int_0^inf k^(1-alpha) exp(-k^2/4) sin(x k) dk."""
    from scipy.integrate import quad
    out = np.empty(len(xs))
    for i, xv in enumerate(xs):
        val, _ = quad(lambda k: k ** (1.0 - alpha) * math.exp(-k * k / 4.0)
                      * math.sin(xv * k), 0.0, 40.0, limit=200)
        out[i] = -val / math.sqrt(math.pi)
    return out


@lru_cache(maxsize=32)
def calibrate_drift_constant(alpha: float) -> float:
    """Fit the positive constant linking kernel_drift_at to the symbol
    definition of the drift on a Gaussian (the paper leaves it implicit)."""
    grid = build_grid("periodic_uniform", 4096, 30.0)
    g = SampledFunction.from_callable(grid, lambda x: np.exp(-x * x), parity="even")
    pts = grid.nodes[(grid.nodes >= 0.25) & (grid.nodes <= 3.0)][::8]
    ref = _gaussian_drift_reference(alpha, pts)
    raw = kernel_drift_at(g, pts, alpha)
    return float(np.dot(ref, raw) / np.dot(raw, raw))
