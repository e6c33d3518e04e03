"""Deterministic test-function families.

Every verification harness runs over fixed families of even functions:
Gaussians, rational decays and mollified plateaus, plus amplitude
variants.  A seed perturbs widths reproducibly; seed 0 means the pinned
reference family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import SampledFunction, build_grid


@dataclass(frozen=True)
class FamilyMember:
    """One even test function with the grid it wants to live on."""

    label: str
    fn: Callable[[np.ndarray], np.ndarray]
    box: float           # periodic half-length that certifies decay
    n_points: int

    def sample(self, monotone: str = "nonincreasing") -> SampledFunction:
        grid = build_grid("periodic_uniform", self.n_points, self.box)
        return SampledFunction.from_callable(grid, self.fn, parity="even",
                                             monotone_on_positive=monotone)


def _gaussian(w, amp=1.0):
    return lambda x: amp * np.exp(-(x / w) ** 2)


def _rational(w, m, amp=1.0):
    return lambda x: amp * (1.0 + (x / w) ** 2) ** (-m)


def _plateau(a, w, amp=1.0):
    # smooth even plateau of radius ~a, shoulder width ~w, nonincreasing in |x|
    return lambda x: amp * 0.5 * (1.0 + np.tanh((a * a - x * x) / (w * a)))


def even_nonincreasing_family(seed: int = 0, size: int = 50) -> list[FamilyMember]:
    """Even, nonincreasing-on-(0,inf) functions: Gaussians, rational decays,
    mollified plateaus, with amplitude variants; `size` members."""
    rng = np.random.default_rng(seed)

    def jitter():
        return 1.0 + (0.05 * rng.uniform(-1, 1) if seed else 0.0)

    members: list[FamilyMember] = []
    for i, w in enumerate(np.geomspace(0.4, 5.0, 14)):
        members.append(FamilyMember(f"gauss_w{i}", _gaussian(w * jitter()), 60.0, 8192))
    for m in (1, 2, 3):
        for w in (0.6, 1.0, 1.8, 3.0):
            members.append(FamilyMember(
                f"rational_m{m}_w{w}", _rational(w * jitter(), m), 60.0, 8192))
    for a, w in ((1.0, 0.5), (2.0, 0.5), (2.0, 1.0), (3.0, 1.0),
                 (1.5, 0.3), (4.0, 1.0), (1.0, 0.2), (2.5, 0.7)):
        n = 32768 if w <= 0.3 else 8192   # resolve sharp shoulders
        members.append(FamilyMember(
            f"plateau_a{a}_w{w}", _plateau(a * jitter(), w), 60.0, n))
    for amp in (0.7, 1.3, 2.5):
        members.append(FamilyMember(f"gauss_amp{amp}", _gaussian(1.0, amp), 60.0, 8192))
        members.append(FamilyMember(f"rational_amp{amp}", _rational(1.5, 2, amp), 60.0, 8192))
        members.append(FamilyMember(f"plateau_amp{amp}", _plateau(2.0, 0.5, amp), 60.0, 8192))
    while len(members) < size:
        w = float(rng.uniform(0.5, 4.0)) if seed else 0.8 + 0.13 * len(members)
        members.append(FamilyMember(f"gauss_extra{len(members)}", _gaussian(w), 60.0, 8192))
    return members[:size]


def monotone_nondecreasing_family(seed: int = 0, size: int = 50) -> list[FamilyMember]:
    """f = g(0) - g for g in the nonincreasing family: even, f(0) = 0,
    nondecreasing on (0, inf), bounded."""
    base = even_nonincreasing_family(seed, size)
    out = []
    for mem in base:
        g = mem.fn

        def f(x, g=g):
            return g(np.zeros_like(x)) - g(x)

        out.append(FamilyMember("flip_" + mem.label, f, mem.box, mem.n_points))
    return out


def hardy_nonneg_family(seed: int = 0) -> list[FamilyMember]:
    """Nonnegative functions on (0, inf) vanishing superlinearly at 0 (so
    every weight pair stays integrable), pinned at unit scale: the printed
    inequality is scale-coherent only at p = 2, and for p = 1 it requires
    the mass to sit away from the origin."""
    members = [
        FamilyMember("x2_gauss", lambda x: x ** 2 * np.exp(-x * x), 40.0, 2048),
        FamilyMember("x2_exp", lambda x: x ** 2 * np.exp(-x), 40.0, 2048),
        FamilyMember("x3_gauss", lambda x: np.abs(x) ** 3 * np.exp(-x * x), 40.0, 2048),
        FamilyMember("bump_12", lambda x: np.maximum(0.0, (x - 1.0) * (2.0 - x)) ** 2, 40.0, 2048),
        FamilyMember("x2_rational_wide", lambda x: x ** 2 / (1 + (x / 2.0) ** 2) ** 3, 40.0, 2048),
    ]
    if seed:
        rng = np.random.default_rng(seed)
        s = 1.0 + 0.05 * rng.uniform(-1, 1)
        members.append(FamilyMember(
            "x2_gauss_jit", lambda x: x ** 2 * np.exp(-(x * s) ** 2), 40.0, 2048))
    return members
