"""Grids, sampled functions, weights and singular-endpoint quadrature.

Everything here is immutable after construction and all operations are
pure, so values can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import exp1

from .errors import DomainError, NonIntegrable, ParityError

GRID_KINDS = ("half_line_graded", "periodic_uniform")
WEIGHT_FAMILIES = ("power", "power_exp", "exp_over_x")

#: default node counts (periodic boxes, graded half-lines)
DEFAULT_PERIODIC_N = 4096
DEFAULT_GRADED_N = 2048
#: default geometric grading toward 0; 0.97**2047 ~ 1e-27 * L
DEFAULT_GRADING_RATIO = 0.97
#: default truncation of (0, inf) integrals carrying an exp(-x) factor
DEFAULT_EXP_TRUNCATION = 40.0
#: default truncation for pure power-weight tails of decaying functions
DEFAULT_POWER_TRUNCATION = 1.0e4


def _readonly(a) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Grid1D:
    """1D quadrature grid, either a periodic box [-L, L) or a geometrically
    graded half-line (0, L]."""

    kind: str
    n_points: int
    half_length: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", _readonly(self.nodes))
        object.__setattr__(self, "weights", _readonly(self.weights))
        if self.kind not in GRID_KINDS:
            raise DomainError(f"unknown grid kind {self.kind!r}")
        if len(self.nodes) != self.n_points or len(self.weights) != self.n_points:
            raise DomainError("nodes/weights length mismatch")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(self.weights < 0):
            raise DomainError("weights must be nonnegative")

    @property
    def spacing(self) -> float:
        """Uniform spacing (periodic grids only)."""
        if self.kind != "periodic_uniform":
            raise DomainError("spacing is defined for periodic grids only")
        return 2.0 * self.half_length / self.n_points

    def positive(self) -> np.ndarray:
        """Indices of strictly positive nodes, in increasing order."""
        return np.nonzero(self.nodes > 0)[0]

    def mirror_index(self) -> np.ndarray:
        """Index j' with node[j'] == -node[j] (mod 2L) on periodic grids."""
        if self.kind != "periodic_uniform":
            raise DomainError("mirror_index is defined for periodic grids only")
        n = self.n_points
        return (-np.arange(n)) % n


def build_grid(kind: str, n_points: int, half_length: float,
               grading_ratio: float = DEFAULT_GRADING_RATIO) -> Grid1D:
    """Build a quadrature grid.

    Periodic grids get uniform trapezoid weights 2L/n; graded grids get
    composite trapezoid weights with the (0, x_0] cell folded into the
    first weight.
    """
    if half_length <= 0:
        raise DomainError("half_length must be positive")
    if n_points < 8:
        raise DomainError("n_points must be at least 8")
    if kind == "periodic_uniform":
        if n_points & (n_points - 1):
            raise DomainError("periodic grids require a power-of-two n_points")
        h = 2.0 * half_length / n_points
        nodes = -half_length + h * np.arange(n_points)
        weights = np.full(n_points, h)
        return Grid1D(kind, n_points, half_length, nodes, weights)
    if kind == "half_line_graded":
        if not (0.0 < grading_ratio < 1.0):
            raise DomainError("grading_ratio must lie in (0, 1)")
        nodes = half_length * grading_ratio ** np.arange(n_points - 1, -1, -1)
        weights = np.empty(n_points)
        weights[1:-1] = (nodes[2:] - nodes[:-2]) / 2.0
        # fold the (0, x_0] cell in as a rectangle of height f(x_0)
        weights[0] = nodes[0] + (nodes[1] - nodes[0]) / 2.0
        weights[-1] = (nodes[-1] - nodes[-2]) / 2.0
        return Grid1D(kind, n_points, half_length, nodes, weights)
    raise DomainError(f"unknown grid kind {kind!r}")


@dataclass(frozen=True)
class SampledFunction:
    """Real function sampled on a grid, with symmetry metadata.

    parity describes the implied extension to the whole line; the
    monotonicity flag refers to behaviour on (0, inf).
    """

    grid: Grid1D
    values: np.ndarray
    parity: str = "none"
    monotone_on_positive: str = "unknown"
    sup_norm: float = field(init=False)

    def __post_init__(self):
        vals = _readonly(self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.grid.n_points:
            raise DomainError("values length must match grid")
        if self.parity not in ("even", "odd", "none"):
            raise ParityError(f"unknown parity {self.parity!r}")
        if self.monotone_on_positive not in ("nonincreasing", "nondecreasing", "unknown"):
            raise DomainError(f"unknown monotonicity flag {self.monotone_on_positive!r}")
        object.__setattr__(self, "sup_norm", float(np.max(np.abs(vals))) if len(vals) else 0.0)
        if self.parity != "none" and self.grid.kind == "periodic_uniform":
            m = self.grid.mirror_index()
            sign = 1.0 if self.parity == "even" else -1.0
            dev = float(np.max(np.abs(vals - sign * vals[m])))
            if dev > 1e-12 * (self.sup_norm + 1e-300):
                raise ParityError(
                    f"claimed {self.parity} parity violated by {dev:.3e}")

    @classmethod
    def from_callable(cls, grid: Grid1D, fn: Callable[[np.ndarray], np.ndarray],
                      parity: str = "none",
                      monotone_on_positive: str = "unknown") -> "SampledFunction":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float),
                   parity, monotone_on_positive)

    def with_values(self, values, parity: str | None = None) -> "SampledFunction":
        return SampledFunction(self.grid, values,
                               self.parity if parity is None else parity,
                               "unknown")


@dataclass(frozen=True)
class WeightSpec:
    """Weight function on (0, inf), evaluated at |x| on the whole line.

    power:      x  ->  x**(-exponent)
    power_exp:  x  ->  x**(-exponent) * exp(-x)
    exp_over_x: x  ->  exp(-x) / x
    """

    family: str
    exponent: float = 0.0
    description: str = ""

    def __post_init__(self):
        if self.family not in WEIGHT_FAMILIES:
            raise DomainError(f"unknown weight family {self.family!r}")
        if not self.description:
            object.__setattr__(self, "description", self._describe())

    def _describe(self) -> str:
        if self.family == "power":
            return f"x^-{self.exponent:g}; singularity order {self.exponent:g} at 0, power decay at inf"
        if self.family == "power_exp":
            return f"x^-{self.exponent:g} e^-x; singularity order {self.exponent:g} at 0, exponential decay"
        return "e^-x/x; singularity order 1 at 0, exponential decay"

    @property
    def singularity_order(self) -> float:
        """Power-law blow-up order at x -> 0+."""
        return 1.0 if self.family == "exp_over_x" else self.exponent

    def __call__(self, x) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", over="ignore"):
            if self.family == "power":
                return ax ** (-self.exponent)
            if self.family == "power_exp":
                return ax ** (-self.exponent) * np.exp(-ax)
            return np.exp(-ax) / ax

    def tail_integral(self, lower: float) -> float:
        """Upper bound for the integral of the weight over (lower, inf)."""
        if lower <= 0:
            return math.inf
        if self.family == "power":
            if self.exponent <= 1:
                return math.inf
            return lower ** (1.0 - self.exponent) / (self.exponent - 1.0)
        if self.family == "power_exp":
            return lower ** (-self.exponent) * math.exp(-lower)
        return float(exp1(lower))


class QuadratureResult(NamedTuple):
    value: float
    error_estimate: float


def _composite_quartic(x: np.ndarray, v: np.ndarray) -> float:
    """4th-order composite rule on arbitrary increasing nodes.

    Each cell [x_i, x_{i+1}] is integrated with the cubic through the four
    nearest nodes (batched Vandermonde solve); falls back to trapezoid for
    very short inputs.
    """
    n = len(x)
    if n < 4:
        return float(np.trapezoid(v, x))
    cells = n - 1
    j = np.clip(np.arange(cells) - 1, 0, n - 4)          # stencil start per cell
    idx = j[:, None] + np.arange(4)[None, :]
    ts = x[idx] - x[:cells, None]                        # shift cell start to 0
    span = x[idx[:, 3]] - x[idx[:, 0]]                   # rescale for conditioning
    u = ts / span[:, None]
    V = u[:, :, None] ** np.arange(4)[None, None, :]
    coef = np.linalg.solve(V, v[idx][:, :, None])[:, :, 0]
    dx = np.diff(x)
    r = (dx / span)[:, None] ** np.arange(1, 5)[None, :] / np.arange(1, 5)[None, :]
    return float(np.sum(coef * r * span[:, None]))


def first_cell_primitive(x0: float, x1: float, v0: float, v1: float) -> float:
    """Integral of f over (0, x0) from the local power model f ~ c x^k
    fitted through the two smallest samples (rectangle when degenerate)."""
    if v0 <= 0.0 or v1 <= 0.0 or v0 == v1:
        return v0 * x0
    k = min(max(math.log(v1 / v0) / math.log(x1 / x0), 0.0), 8.0)
    return v0 * x0 / (k + 1.0)


def _corner_power_model(x0: float, x1: float, v0: float, v1: float):
    """Integral over (0, x0) of the local power model c*x^k fitted through
    the two smallest integrand samples.  Returns None when the samples are
    numerically zero; raises NonIntegrable when the fitted model diverges.
    """
    if abs(v0) < 1e-300 or abs(v1) < 1e-300:
        return 0.0
    if v0 * v1 < 0:
        # sign change inside the corner cell: integrand is heading to 0
        return 0.0
    k = math.log(abs(v1) / abs(v0)) / math.log(x1 / x0)
    k = min(k, 8.0)
    if k <= -1.0:
        raise NonIntegrable(
            f"integrand behaves like x^{k:.3f} at the origin; not integrable")
    return v0 * x0 / (k + 1.0)


def integrate_positive(x: np.ndarray, v: np.ndarray, *, from_zero: bool = True,
                       order: int = 4) -> float:
    """Integral over (0, x[-1]] of samples v at positive nodes x.

    The (0, x[0]) corner cell uses the fitted power-law model so that
    integrands vanishing algebraically at 0 lose no accuracy.
    """
    base = _composite_quartic(x, v) if order >= 4 else float(np.trapezoid(v, x))
    corner = _corner_power_model(x[0], x[1], v[0], v[1]) if from_zero else 0.0
    return base + corner


def weighted_integral(f: SampledFunction, w: WeightSpec,
                      lower: float = 0.0, upper: float = math.inf) -> QuadratureResult:
    """Quadrature of f * w over (lower, upper) with an attached error
    estimate (coarse/fine disagreement plus tail bound).

    Weights singular at 0 require the integrand f*w to stay integrable
    there; the first cell is handled by a local power-law model and a
    divergent fit raises NonIntegrable.
    """
    if lower >= upper:
        raise DomainError(f"lower bound {lower} must be below upper bound {upper}")
    nodes = f.grid.nodes
    vals = f.values
    hi = min(upper, nodes[-1])
    sel = (nodes >= lower) & (nodes <= hi)
    if lower <= 0.0 < hi:
        sel &= ~np.isclose(nodes, 0.0)   # node at exactly 0 handled separately
    x = nodes[sel]
    if len(x) < 4:
        raise DomainError("fewer than 4 nodes inside the integration range")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        integrand = vals[sel] * w(x)
    if not np.all(np.isfinite(integrand)):
        raise NonIntegrable("integrand not finite inside the integration range")

    singular_corner = (lower == 0.0 and x[0] > 0 and w.singularity_order > 0)
    fine = integrate_positive(x, integrand, from_zero=singular_corner)
    sub = np.arange(len(x) - 1, -1, -2)[::-1]   # every other node, endpoint kept
    coarse = integrate_positive(x[sub], integrand[sub], from_zero=singular_corner)
    err = abs(fine - coarse)

    if upper > nodes[-1]:
        # certified tail bound |f| * int_L^inf w
        edge = float(np.max(np.abs(vals[sel][-4:])))
        err += edge * w.tail_integral(float(nodes[-1]))

    # cancellation-aware scale: relative to the integrand's L1 mass
    scale = max(abs(fine), float(np.trapezoid(np.abs(integrand), x)), 1e-30)
    if err > 1e-3 * scale and err > 1e-14:
        raise NonIntegrable(
            f"quadrature estimates disagree by {err:.3e} (value {fine:.3e})")
    return QuadratureResult(float(fine), float(err))


def cumulative_primitive(f: SampledFunction) -> SampledFunction:
    """F(x) = integral of f from 0 to x at every node (signed for x < 0).

    Composite trapezoid: second order, exact for constants, and cell
    increments inherit the sign of f so F is monotone when f >= 0.
    """
    nodes = f.grid.nodes
    vals = f.values
    if f.grid.kind == "half_line_graded":
        F = np.empty_like(vals)
        # power-model first cell: exact for f ~ c x^k, keeps F(x_0) >= 0
        F[0] = first_cell_primitive(nodes[0], nodes[1], vals[0], vals[1])
        F[1:] = F[0] + np.cumsum((vals[1:] + vals[:-1]) / 2.0 * np.diff(nodes))
    else:
        i0 = int(np.argmin(np.abs(nodes)))
        if abs(nodes[i0]) > 1e-12 * f.grid.half_length:
            raise DomainError("periodic grid has no node at the origin")
        F = np.zeros_like(vals)
        inc = (vals[1:] + vals[:-1]) / 2.0 * np.diff(nodes)
        F[i0 + 1:] = np.cumsum(inc[i0:])
        F[:i0] = -np.cumsum(inc[:i0][::-1])[::-1]
    parity = {"even": "odd", "odd": "even", "none": "none"}[f.parity]
    pos = nodes >= 0 if f.grid.kind == "periodic_uniform" else slice(None)
    monotone = "nondecreasing" if np.all(vals[pos] >= 0) else "unknown"
    try:
        return SampledFunction(f.grid, F, parity, monotone)
    except ParityError:
        # nonzero total mass: the signed primitive has a seam jump on the
        # periodic box and the flipped parity does not globally hold
        return SampledFunction(f.grid, F, "none", monotone)
