"""Pseudo-spectral time integration of the 1D nonlocal transport models.

Models (all on a periodic box wide enough to certify decay):
    ccf_eq11:         theta_t + (H theta) theta_x = -kappa L^gamma theta
    section4_hilbert: theta_t - (H theta) theta_x = -kappa L^gamma theta
    alpha_model:      theta_t + drift(theta) theta_x = -kappa L^gamma theta,
                      drift symbol i k |k|^-alpha (contains section4 at a=1)

Time stepping is RK4 on the advection term with the dissipation handled
exactly by the integrating factor exp(-kappa |k|^gamma t); the nonlinear
product is dealiased by the 2/3 rule and even parity is reprojected every
step.  The blow-up functional
    J(t) = int_0^inf (theta(t,0) - theta(t,x)) e^-x / x dx
is monitored along with max |theta_x| and sup |theta|; runs stop on
resolution loss (tail of the retained spectrum above 1e-6 of the energy),
CFL collapse, or t_end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Grid1D, SampledFunction, build_grid
from .errors import (CFLCollapse, DomainError, InsufficientDecay,
                     InsufficientSamples, ParityError)
from .reports import format_float

MODELS = ("ccf_eq11", "section4_hilbert", "alpha_model")
MONITORS = ("J_functional", "max_gradient", "max_principle", "riccati")


@dataclass(frozen=True)
class SimulationConfig:
    model: str = "ccf_eq11"
    kappa: float = 0.0
    gamma: float = 1.0              # dissipation exponent; ignored when kappa = 0
    alpha: float = 0.5              # alpha_model only
    grid: Grid1D | None = None      # periodic; defaults to 4096 nodes, L = 40 pi
    dt_initial: float = 1e-2
    t_end: float = 1.0
    cfl_safety: float = 0.4
    dealias: bool = True
    monitors: frozenset = frozenset(MONITORS)
    advection: bool = True          # test hook: False freezes the velocity at 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if self.kappa < 0:
            raise DomainError("kappa must be nonnegative")
        if self.kappa > 0 and not (0.0 < self.gamma <= 2.0):
            raise DomainError("gamma must lie in (0, 2] for dissipative runs")
        if self.model == "alpha_model" and not (0.0 < self.alpha < 2.0):
            raise DomainError("alpha must lie in (0, 2)")
        if not (0.0 < self.cfl_safety < 1.0):
            raise DomainError("cfl_safety must lie in (0, 1)")
        if self.dt_initial <= 0 or self.t_end <= 0:
            raise DomainError("dt_initial and t_end must be positive")
        if self.grid is None:
            object.__setattr__(self, "grid",
                               build_grid("periodic_uniform", 4096, 40.0 * math.pi))
        if self.grid.kind != "periodic_uniform":
            raise DomainError("simulation needs a periodic grid")
        object.__setattr__(self, "monitors", frozenset(self.monitors))
        for m in self.monitors:
            if m not in MONITORS:
                raise DomainError(f"unknown monitor {m!r}")
        if self.kappa == 0.0 and not self.monitors:
            raise DomainError(
                "inviscid runs are singularity studies: enable blow-up monitors")

    def manifest(self) -> dict:
        return {
            "model": self.model, "kappa": self.kappa, "gamma": self.gamma,
            "alpha": self.alpha, "n_points": self.grid.n_points,
            "box_half_length": self.grid.half_length,
            "dt_initial": self.dt_initial, "t_end": self.t_end,
            "cfl_safety": self.cfl_safety, "dealias": self.dealias,
            "monitors": sorted(self.monitors), "advection": self.advection,
        }


@dataclass(frozen=True)
class SimulationState:
    t: float
    theta: SampledFunction
    J: float
    max_grad: float
    sup: float
    resolved: bool
    dt_last: float = 0.0


@dataclass
class TimeSeries:
    """Per-step monitor records; resolution loss marks later rows advisory."""

    t: list = field(default_factory=list)
    J: list = field(default_factory=list)
    max_grad: list = field(default_factory=list)
    sup: list = field(default_factory=list)
    resolved: list = field(default_factory=list)
    terminal_event: str = "t_end"

    def append(self, state: SimulationState) -> None:
        self.t.append(state.t)
        self.J.append(state.J)
        self.max_grad.append(state.max_grad)
        self.sup.append(state.sup)
        self.resolved.append(state.resolved)

    def dJdt(self) -> np.ndarray:
        t = np.asarray(self.t)
        J = np.asarray(self.J)
        out = np.gradient(J, t) if len(t) >= 3 else np.zeros_like(J)
        return out

    def to_csv(self, path) -> None:
        dj = self.dJdt()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,J,dJdt,max_grad,sup,resolved\n")
            for i in range(len(self.t)):
                fh.write(",".join([
                    format_float(self.t[i]), format_float(self.J[i]),
                    format_float(float(dj[i])), format_float(self.max_grad[i]),
                    format_float(self.sup[i]),
                    "true" if self.resolved[i] else "false"]) + "\n")


class _Engine:
    """Spectral workspace bound to one (config, grid) pair."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        grid = config.grid
        self.n = grid.n_points
        self.x = grid.nodes
        self.h = grid.spacing
        self.k = np.fft.fftfreq(self.n, d=self.h) * 2.0 * math.pi
        self.ik = 1j * self.k
        kmax = float(np.max(np.abs(self.k)))
        self.ik[np.abs(self.k) == kmax] = 0.0
        self.mirror = grid.mirror_index()
        # velocity multiplier per model
        ak = np.zeros(self.n, dtype=complex)
        nz = self.k != 0.0
        if config.model == "ccf_eq11":
            ak[nz] = -1j * np.sign(self.k[nz])
        elif config.model == "section4_hilbert":
            ak[nz] = 1j * np.sign(self.k[nz])
        else:
            ak[nz] = 1j * self.k[nz] * np.abs(self.k[nz]) ** (-config.alpha)
        ak[np.abs(self.k) == kmax] = 0.0
        self.vel_mult = ak
        self.symbol = config.kappa * np.abs(self.k) ** config.gamma \
            if config.kappa > 0 else np.zeros(self.n)
        # 2/3-rule mask on the retained band
        self.cutoff = (2.0 / 3.0) * kmax
        self.dealias_mask = np.abs(self.k) <= self.cutoff
        # resolution flag: top third of the retained spectrum
        active = self.cutoff if config.dealias else kmax
        self.tail_mask = np.abs(self.k) > (2.0 / 3.0) * active
        self.exp_weight = None   # cached e^-x / x profile for J

    def velocity_hat(self, theta_hat: np.ndarray) -> np.ndarray:
        return self.vel_mult * theta_hat

    def nonlinear(self, theta_hat: np.ndarray) -> np.ndarray:
        """-(v theta_x) in spectral space, 2/3-rule dealiased."""
        if not self.config.advection:
            return np.zeros_like(theta_hat)
        if self.config.dealias:
            theta_hat = theta_hat * self.dealias_mask
        v = np.fft.ifft(self.velocity_hat(theta_hat)).real
        tx = np.fft.ifft(self.ik * theta_hat).real
        out = -np.fft.fft(v * tx)
        if self.config.dealias:
            out = out * self.dealias_mask
        return out

    def project_even(self, theta: np.ndarray) -> np.ndarray:
        return (theta + theta[self.mirror]) / 2.0

    def blowup_functional(self, theta: np.ndarray) -> float:
        """J = int_0^inf (theta(0) - theta(x)) e^-x / x dx; the first two
        cells use the even-parity Taylor model (the integrand is O(x))."""
        if self.exp_weight is None:
            pos = self.x > 0
            xp = self.x[pos]
            a = 2.0 * self.h
            keep = xp >= a * (1.0 - 1e-9)
            self.xp = xp[keep]
            self.pos = np.nonzero(pos)[0][keep]
            self.exp_weight = np.exp(-self.xp) / self.xp
            # analytic integral of x e^-x over the Taylor window (0, 2h)
            self.first_mom = 1.0 - (1.0 + a) * math.exp(-a)
        i0 = self.n // 2
        t0v = theta[i0]
        core = np.trapezoid((t0v - theta[self.pos]) * self.exp_weight, self.xp)
        # curvature at the origin from the spectral second derivative
        tpp0 = float(np.fft.ifft(-(self.k ** 2) * np.fft.fft(theta)).real[i0])
        return float(core - tpp0 / 2.0 * self.first_mom)

    def monitors(self, t: float, theta: np.ndarray, dt_last: float) -> SimulationState:
        th = np.fft.fft(theta)
        grad = np.fft.ifft(self.ik * th).real
        energy = np.abs(th[1:]) ** 2
        tail = np.sum(np.abs(th[self.tail_mask]) ** 2)
        resolved = bool(tail <= 1e-6 * (np.sum(energy) + 1e-300))
        J = self.blowup_functional(theta) if "J_functional" in self.config.monitors else 0.0
        sf = SampledFunction(self.config.grid, theta, "none", "unknown")
        return SimulationState(t, sf, J, float(np.max(np.abs(grad))),
                               float(np.max(np.abs(theta))), resolved, dt_last)


def initialize(config: SimulationConfig, theta0) -> SimulationState:
    """Sample theta0 (a callable of x), validate parity and decay, and
    evaluate all monitors at t = 0."""
    theta = np.asarray(theta0(config.grid.nodes), dtype=float)
    eng = _Engine(config)
    if np.max(np.abs(theta - theta[eng.mirror])) > 1e-12 * (np.max(np.abs(theta)) + 1e-300):
        raise ParityError("theta0 must be even")
    edge = max(abs(theta[0]), abs(theta[-1]))
    if config.monitors and edge > 1e-12 * (np.max(np.abs(theta)) + 1e-300):
        raise InsufficientDecay(
            f"boundary value {edge:.2e}: whole-line monitors need decay "
            "(disable monitors for box-periodic studies)")
    return eng.monitors(0.0, theta, 0.0)


def _step_once(eng: _Engine, theta_hat: np.ndarray, dt: float) -> np.ndarray:
    """One RK4 step with exact integrating factor for the dissipation."""
    E = np.exp(-0.5 * dt * eng.symbol)
    E2 = E * E
    a = eng.nonlinear(theta_hat)
    b = eng.nonlinear(E * (theta_hat + 0.5 * dt * a))
    c = eng.nonlinear(E * theta_hat + 0.5 * dt * b)
    d = eng.nonlinear(E2 * theta_hat + dt * E * c)
    return (E2 * theta_hat
            + dt / 6.0 * (E2 * a + 2.0 * E * (b + c) + d))


def step(state: SimulationState, config: SimulationConfig,
         engine: _Engine | None = None) -> SimulationState:
    """Advance one adaptive step: dt = min(dt_initial, cfl h / max |v|)."""
    eng = engine if engine is not None else _Engine(config)
    theta = state.theta.values
    th = np.fft.fft(theta)
    v = np.fft.ifft(eng.velocity_hat(th)).real if config.advection else 0.0 * theta
    vmax = float(np.max(np.abs(v)))
    dt = config.dt_initial if vmax == 0.0 else min(
        config.dt_initial, config.cfl_safety * eng.h / vmax)
    dt = min(dt, config.t_end - state.t)
    if dt < 1e-12 * config.t_end:
        raise CFLCollapse(f"dt underflow at t={state.t:.6g} (max |v| = {vmax:.3g})")
    new_hat = _step_once(eng, th, dt)
    theta_new = eng.project_even(np.fft.ifft(new_hat).real)
    return eng.monitors(state.t + dt, theta_new, dt)


def run_with_monitors(config: SimulationConfig, theta0) -> TimeSeries:
    """Integrate to t_end, CFL collapse, or resolution loss, recording the
    monitors every step."""
    state = initialize(config, theta0)
    eng = _Engine(config)
    series = TimeSeries()
    series.append(state)
    while state.t < config.t_end - 1e-12:
        try:
            state = step(state, config, eng)
        except CFLCollapse:
            series.terminal_event = "cfl_collapse"
            break
        series.append(state)
        if not state.resolved:
            series.terminal_event = "resolution_loss"
            break
    return series


@dataclass(frozen=True)
class RiccatiReport:
    """Smallest C2 >= 0 with dJ/dt >= J^2/(2 pi) - C2 (sup0 + 1)^2 along
    the resolved samples, plus its stability across a resolution doubling."""

    fitted_c2: float
    threshold: float              # A = sqrt(2 pi C2)
    fitted_c2_refined: float
    stable: bool
    verdict: str


def _fit_c2(series: TimeSeries, sup0: float) -> float:
    t = np.asarray(series.t)
    J = np.asarray(series.J)
    ok = np.asarray(series.resolved)
    if np.count_nonzero(ok) < 5:
        raise InsufficientSamples("need at least 5 resolved samples")
    dj = series.dJdt()
    deficit = J[ok] ** 2 / (2.0 * math.pi) - dj[ok]
    return float(max(0.0, np.max(deficit) / (sup0 + 1.0) ** 2))


def riccati_check(series: TimeSeries, config: SimulationConfig, theta0,
                  tolerance: float = 0.2) -> RiccatiReport:
    """Fit C2 on the given series, rerun at doubled resolution, and accept
    when the two fits agree within the tolerance band."""
    if "J_functional" not in config.monitors:
        raise InsufficientSamples("riccati check needs the J monitor")
    sup0 = float(np.max(np.abs(theta0(config.grid.nodes))))
    c2 = _fit_c2(series, sup0)
    fine_grid = build_grid("periodic_uniform", 2 * config.grid.n_points,
                           config.grid.half_length)
    fine = replace(config, grid=fine_grid)
    series2 = run_with_monitors(fine, theta0)
    c2f = _fit_c2(series2, sup0)
    scale = max(abs(c2), abs(c2f), 1e-12)
    stable = abs(c2 - c2f) <= tolerance * scale
    return RiccatiReport(c2, math.sqrt(2.0 * math.pi * c2), c2f, stable,
                         "holds" if (math.isfinite(c2) and stable) else "inconclusive")


def write_run(series: TimeSeries, config: SimulationConfig, out_dir,
              extra: dict | None = None) -> None:
    """CSV time series plus a JSON manifest echoing the configuration."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series.to_csv(out / "series.csv")
    meta = {"config": config.manifest(), "terminal_event": series.terminal_event}
    if extra:
        meta.update(extra)
    with open(out / "run.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
