"""Inequality check records and their JSON-lines serialization.

The wire format is pinned: field order name, params, lhs, rhs,
paper_constant, ratio, verdict, err_est; every number rendered with 17
significant digits so identical runs produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

VERDICTS = ("holds", "fails", "inconclusive")


def format_float(x: float) -> str:
    """17-significant-digit rendering, round-trip exact for IEEE doubles."""
    if x != x:
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of one weighted-inequality check.

    achieved_ratio is lhs/rhs for 'lhs >= C rhs' checks and rhs/lhs for
    'lhs <= C rhs' checks, so that in both orientations the verdict holds
    iff the ratio clears paper_constant within 10x the quadrature error.
    """

    name: str
    parameters: dict = field(default_factory=dict)
    lhs: float = 0.0
    rhs: float = 0.0
    paper_constant: float | None = None
    achieved_ratio: float = math.nan
    verdict: str = "inconclusive"
    quadrature_error_estimate: float = 0.0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def to_json_line(self) -> str:
        parts = [f'"name": {json.dumps(self.name)}']
        inner = ", ".join(f"{json.dumps(k)}: {format_float(v)}"
                          for k, v in self.parameters.items())
        parts.append(f'"params": {{{inner}}}')
        parts.append(f'"lhs": {format_float(self.lhs)}')
        parts.append(f'"rhs": {format_float(self.rhs)}')
        pc = "null" if self.paper_constant is None else format_float(self.paper_constant)
        parts.append(f'"paper_constant": {pc}')
        parts.append(f'"ratio": {format_float(self.achieved_ratio)}')
        parts.append(f'"verdict": {json.dumps(self.verdict)}')
        parts.append(f'"err_est": {format_float(self.quadrature_error_estimate)}')
        return "{" + ", ".join(parts) + "}"


def verdict_from_margin(lhs: float, bound: float, tolerance: float) -> str:
    """holds iff lhs >= bound - tolerance (the orientation is normalized
    by the caller)."""
    return "holds" if lhs >= bound - tolerance else "fails"


def write_jsonl(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json_line() + "\n")
