"""Command-line front door.

Subcommands:
    verify          run the inequality and radial suites, emit JSONL reports
    simulate        run one transport simulation, emit CSV + JSON manifest
    counterexample  build the non-monotone counterexample, emit JSON
    report          render a JSONL report file as a plain-text table

Exit codes: 0 all verdicts hold, 1 some verdict fails, 2 usage error,
3 numerically inconclusive results (quadrature disagreement, not a
falsified inequality).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import pathlib
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import families
from .counterexample import construct_counterexample
from .errors import NonlocalLabError
from .inequalities import (ccf_constant, kiselev_hilbert_values, lemma41_identity,
                           pv_hilbert_on_support, verify_alpha, verify_ccf,
                           verify_hardy, verify_kiselev, verify_lemma43,
                           verify_lemma44)
from .radial import RadialProfile, hardy_step_condition, verify_radial_bounds
from .reports import InequalityReport, format_float, write_jsonl
from .simulate import SimulationConfig, run_with_monitors, write_run
from .core import build_grid


def _max_workers() -> int:
    env = os.environ.get("NONLOCAL_LAB_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _family_subset(seed: int, size: int = 6):
    """Small deterministic slice of the even family for suite runs."""
    fam = families.even_nonincreasing_family(seed)
    return [fam[i] for i in (0, 5, 13, 17, 26, 38)][:size]


def _suite_items(args) -> list:
    """(name, thunk) pairs; each thunk returns a list of InequalityReports."""
    seed = args.seed
    deltas = args.delta if args.delta else [-0.5, 0.0, 0.5]
    sigmas = args.sigma if args.sigma else [0.5, 1.0, 2.0]
    ps = args.p if args.p else [1.0, 2.0]
    alphas = args.alpha if args.alpha else [0.5, 1.5]
    items = []

    def ccf_item():
        out = []
        for mem in _family_subset(seed):
            g = mem.sample()
            hg = pv_hilbert_on_support(g)
            for d in deltas:
                out.append(verify_ccf(g, d, hg))
        return out

    def hardy_item():
        from .core import SampledFunction
        out = []
        pairs = [(p, r) for p in ps for r in (args.rtilde if args.rtilde else [1.0, 2.0])]
        for mem in families.hardy_nonneg_family(seed):
            grid = build_grid("half_line_graded", 2048, 40.0)
            sf = SampledFunction.from_callable(grid, mem.fn)
            for p, r in pairs:
                out.append(verify_hardy(sf, p, r))
        return out

    def kiselev_item():
        out = []
        for mem in families.monotone_nondecreasing_family(seed)[:6]:
            f = mem.sample(monotone="nondecreasing")
            hf = kiselev_hilbert_values(f)
            for s in sigmas:
                for p in ps:
                    out.append(verify_kiselev(f, p, s, "half_line", hf))
        return out

    def lemma4_item():
        out = []
        for mem in _family_subset(seed, 3):
            g = mem.sample()
            hg = pv_hilbert_on_support(g)
            ident = lemma41_identity(g, hg)
            out.append(InequalityReport(
                name="exact_identity_1_over_x",
                parameters={"residual": ident.residual},
                lhs=ident.lhs, rhs=ident.rhs_term1 + ident.rhs_term2,
                paper_constant=1.0 / math.pi,
                achieved_ratio=ident.residual,
                verdict="inconclusive" if ident.inconclusive else "holds",
                quadrature_error_estimate=ident.residual))
            out.append(verify_lemma43(g, hg))
            out.append(verify_lemma44(g, 0.4))
        return out

    def alpha_item():
        out = []
        for mem in _family_subset(seed, 3):
            g = mem.sample()
            for a in alphas:
                out.append(verify_alpha(g, a))
                out.append(verify_alpha(g, a, weighted=True))
        return out

    def radial_item():
        out = []
        prof = RadialProfile.from_callables(
            2, lambda r: np.exp(-r * r), lambda r: -2 * r * np.exp(-r * r),
            monotone="nonincreasing")
        for a in (0.5, 1.0, 1.5):
            pw, gl = verify_radial_bounds(prof, a, 0.0)
            out.extend([pw, gl])
        cond = all(hardy_step_condition(n, a, d)
                   for n in (2, 3, 4) for a in (0.5, 1.0, 1.5)
                   for d in (-0.4, 0.0, 0.4))
        out.append(InequalityReport(
            name="radial_hardy_step_condition", parameters={},
            lhs=1.0, rhs=0.0, paper_constant=None,
            achieved_ratio=1.0 if cond else 0.0,
            verdict="holds" if cond else "fails",
            quadrature_error_estimate=0.0))
        return out

    table = [("ccf", ccf_item), ("hardy", hardy_item), ("kiselev", kiselev_item),
             ("lemma4", lemma4_item), ("alpha", alpha_item), ("radial", radial_item)]
    if args.only:
        table = [(n, f) for n, f in table if n == args.only]
        if not table:
            raise SystemExit(2)
    return table


def cmd_verify(args) -> int:
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    items = _suite_items(args)
    results: dict[str, list] = {}
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        futures = {name: pool.submit(fn) for name, fn in items}
        for name, fut in futures.items():
            results[name] = fut.result()
    reports = [r for name, _ in items for r in results[name]]
    write_jsonl(reports, out_dir / "reports.jsonl")
    manifest = {
        "command": "verify", "seed": args.seed, "only": args.only,
        "delta": args.delta, "sigma": args.sigma, "p": args.p,
        "rtilde": args.rtilde, "alpha": args.alpha,
        "n_reports": len(reports),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    verdicts = [r.verdict for r in reports]
    for r in reports:
        print(f"{r.name:36s} {r.verdict:12s} ratio={format_float(r.achieved_ratio)}")
    if any(v == "fails" for v in verdicts):
        return 1
    if any(v == "inconclusive" for v in verdicts):
        return 3
    return 0


def cmd_simulate(args) -> int:
    aliases = {"ccf": "ccf_eq11", "eq11": "ccf_eq11", "ccf_eq11": "ccf_eq11",
               "section4": "section4_hilbert", "section4_hilbert": "section4_hilbert",
               "alpha": "alpha_model", "alpha_model": "alpha_model"}
    if args.model not in aliases:
        print(f"unknown model {args.model!r}", file=sys.stderr)
        return 2
    grid = build_grid("periodic_uniform", args.grid_size, args.box)
    config = SimulationConfig(
        model=aliases[args.model], kappa=args.kappa, gamma=args.gamma,
        alpha=args.alpha, grid=grid, dt_initial=args.dt, t_end=args.t_end,
        dealias=True)
    amp = args.amp
    theta0 = lambda x: amp * np.exp(-x * x)
    series = run_with_monitors(config, theta0)
    write_run(series, config, args.out, extra={"amp": amp, "seed": args.seed})
    print(f"terminal event: {series.terminal_event}; "
          f"{len(series.t)} steps to t={format_float(series.t[-1])}")
    return 0


def cmd_counterexample(args) -> int:
    result = construct_counterexample(args.sigma)
    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pos = result.phi_A.grid.positive()
    payload = {
        "sigma": result.sigma,
        "t": result.t,
        "x0": result.x0,
        "cross_term": result.cross_term,
        "functional_value": result.functional_value,
        "collinearity_residual": result.collinearity_residual,
        "x": [float(v) for v in result.phi_A.grid.nodes[pos][::16]],
        "phi_A": [float(v) for v in result.phi_A.values[pos][::16]],
        "phi_B": [float(v) for v in result.phi_B.values[pos][::16]],
    }
    with open(out_dir / "counterexample.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"functional value {format_float(result.functional_value)} at t={result.t}")
    return 0


def cmd_report(args) -> int:
    path = pathlib.Path(args.infile)
    if not path.exists():
        print(f"no such report file: {path}", file=sys.stderr)
        return 2
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    header = f"{'name':36s} {'verdict':12s} {'lhs':>13s} {'rhs':>13s} {'ratio':>13s}"
    print(header)
    print("-" * len(header))
    for r in rows:
        print(f"{r['name']:36s} {r['verdict']:12s} "
              f"{r['lhs']:13.6g} {r['rhs']:13.6g} {r['ratio']:13.6g}")
    bad = sum(1 for r in rows if r["verdict"] == "fails")
    print(f"{len(rows)} checks, {bad} failing")
    return 0 if bad == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonlocal-lab",
                                 description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--delta", type=float, action="append")
    v.add_argument("--sigma", type=float, action="append")
    v.add_argument("--p", type=float, action="append")
    v.add_argument("--rtilde", type=float, action="append")
    v.add_argument("--alpha", type=float, action="append")
    v.add_argument("--only", type=str, default=None,
                   choices=["ccf", "hardy", "kiselev", "lemma4", "alpha", "radial"])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", type=str, default="out")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("simulate", help="run one transport simulation")
    s.add_argument("--model", type=str, default="ccf_eq11")
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--amp", type=float, default=1.0)
    s.add_argument("--t-end", type=float, default=0.5)
    s.add_argument("--dt", type=float, default=5e-3)
    s.add_argument("--grid-size", type=int, default=4096)
    s.add_argument("--box", type=float, default=40.0 * math.pi)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=str, default="out/run")
    s.set_defaults(fn=cmd_simulate)

    c = sub.add_parser("counterexample", help="construct the non-monotone counterexample")
    c.add_argument("--sigma", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", type=str, default="out")
    c.set_defaults(fn=cmd_counterexample)

    r = sub.add_parser("report", help="render a JSONL report as text")
    r.add_argument("infile", type=str)
    r.set_defaults(fn=cmd_report)
    return ap


def run_command(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except NonlocalLabError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
