"""Command-line front end: radius queries, sweeps, chain runs, region searches.

Data files are deterministic (no timestamps; run metadata goes to a
``<out>.meta.json`` sidecar).  Numeric fields are serialized with 9
significant digits.  Exit codes: 0 success, 2 usage/config error, 3 solver
failure.
"""

import argparse
import json
import math
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, report as report_mod
from .errors import (
    InvalidBloch,
    InvalidDirection,
    InvalidMixtureWeights,
    InvalidParams,
    NoCrossing,
    NonHermitian,
    NumericalFailure,
    SolverStall,
    UnknownCase,
    UnknownCaseLink,
)
from .measurements import StrategyMixture, luders_update
from .scenario import ChainConfig, run_chain
from .search import SweepSpec, four_party_region, max_method_gap, sweep, two_way_sharing_window
from .states import StateParams, state_family
from .steering import (
    analytic_radius,
    assemblage_from_directions,
    assemblage_from_mixture,
    mixture_radius,
    steering_radius,
)

USAGE_ERRORS = (
    InvalidBloch,
    InvalidDirection,
    InvalidMixtureWeights,
    InvalidParams,
    NonHermitian,
    UnknownCase,
    UnknownCaseLink,
    ValueError,
)
SOLVER_ERRORS = (SolverStall, NumericalFailure, NoCrossing)

SWEEP_COLUMNS = ("schema", "param_name", "param_value", "R_AB", "R_BA", "R_AC", "R_CA",
                 "class_AB", "class_AC", "method", "status")
RADIUS_COLUMNS = ("schema", "strategy", "link", "W", "theta", "method", "radius", "status")
CHAIN_COLUMNS = ("schema", "link", "party", "R_forward", "R_backward", "class", "status")
REGION_COLUMNS = ("schema", "scenario", "record", "p1", "lo", "hi",
                  "R_AB1", "R_B1A", "R_AB2", "R_B2A", "R_AC", "R_CA")

XZ = (np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]))


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _csv_text(columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def _emit(args, columns, rows, schema):
    for row in rows:
        row.setdefault("schema", schema)
    text = _csv_text(columns, rows)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
        meta = {"tool": "steersim", "version": __version__, "schema": schema,
                "argv": sys.argv[1:], "written_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
        Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    else:
        sys.stdout.write(text)
    json_path = getattr(args, "json", None)
    if json_path:
        doc = {"meta": {"tool": "steersim", "version": __version__, "schema": schema},
               "rows": [{c: row.get(c) for c in columns} for row in rows]}
        Path(json_path).write_text(json.dumps(doc, indent=2, default=_fmt) + "\n")


def _theta(args, value):
    if value is None:
        return None
    return math.radians(value) if getattr(args, "deg", False) else value


def _parse_mix(text):
    """Mixture pair/triple like "1,3" or "1,2,3" -> tuple of case ids."""
    cases = tuple(int(tok) for tok in text.split(","))
    if len(cases) not in (2, 3) or len(set(cases)) != len(cases):
        raise ValueError(f"mixture must list 2 or 3 distinct cases, got {text!r}")
    for c in cases:
        if c not in (1, 2, 3):
            raise UnknownCase(f"case must be 1, 2, or 3, got {c}")
    return cases


def _mix_weights(cases, p, q):
    """(case-1 weight, case-2 weight) from the listed cases and -p/-q flags."""
    if len(cases) == 2:
        if p is None:
            raise ValueError("two-case mixture needs --p (weight of the first listed case)")
        weights = {cases[0]: p, cases[1]: 1.0 - p}
    else:
        if p is None or q is None:
            raise ValueError("three-case mixture needs --p and --q")
        weights = {cases[0]: p, cases[1]: q, cases[2]: 1.0 - p - q}
    return weights.get(1, 0.0), weights.get(2, 0.0)


_BOB_REPEAT = re.compile(r"^x(\d+)$")


def _parse_bob(tok):
    tok = tok.strip()
    if tok.startswith("case"):
        return StrategyMixture.deterministic(int(tok[4:]))
    if tok.startswith("mix:"):
        weights = {}
        rest = None
        for part in tok[4:].split(","):
            if "@" in part:
                c, w = part.split("@")
                weights[int(c)] = float(w)
            elif rest is None:
                rest = int(part)
            else:
                raise ValueError(f"mixture spec {tok!r} has two remainder cases")
        if rest is not None:
            weights[rest] = 1.0 - sum(weights.values())
        p, q = weights.get(1, 0.0), weights.get(2, 0.0)
        if abs(weights.get(3, 1.0 - p - q) - (1.0 - p - q)) > 1e-12:
            raise InvalidMixtureWeights(f"weights in {tok!r} do not sum to 1")
        return StrategyMixture.from_case_weights(p, q)
    raise ValueError(f"cannot parse bob spec {tok!r} (use caseN or mix:...)")


def _parse_bobs(tokens):
    bobs = []
    for tok in tokens:
        m = _BOB_REPEAT.match(tok.strip())
        if m:
            if not bobs:
                raise ValueError("repetition token before any bob spec")
            n = int(m.group(1))
            bobs.extend(bobs[-1:] * (n - 1))
        else:
            bobs.append(_parse_bob(tok))
    return tuple(bobs)


def _load_config(args, parser_defaults=("out", "json", "plot")):
    path = getattr(args, "config", None)
    if not path:
        return
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (s.strip() for s in line.split("=", 1))
        else:
            key, _, value = line.partition(" ")
            value = value.strip()
        key = key.replace("-", "_")
        if key == "from":
            key = "lo"
        if key == "to":
            key = "hi"
        if not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        current = getattr(args, key)
        if current not in (None, False):
            continue  # explicit flags win over the config file
        if value.lower() in ("true", "false"):
            setattr(args, key, value.lower() == "true")
            continue
        for cast in (int, float):
            try:
                if cast is int and ("." in value or "e" in value.lower()):
                    raise ValueError
                setattr(args, key, cast(value))
                break
            except ValueError:
                continue
        else:
            setattr(args, key, value)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_radius(args):
    _load_config(args)
    theta = _theta(args, args.theta)
    if args.W is None or theta is None:
        raise ValueError("radius needs --W and --theta")
    params = StateParams(args.W, theta)
    if (args.case is None) == (args.mix is None):
        raise ValueError("specify exactly one of --case or --mix")
    if args.case is not None:
        p, q = {1: (1.0, 0.0), 2: (0.0, 1.0), 3: (0.0, 0.0)}[args.case]
        strategy = f"case{args.case}"
    else:
        cases = _parse_mix(args.mix)
        p, q = _mix_weights(cases, args.p, args.q)
        strategy = "mix:" + "&".join(str(c) for c in cases) + f"@p={_fmt(args.p)}"
        if args.q:
            strategy += f"&q={_fmt(args.q)}"
    methods = ("analytic", "numeric") if args.method == "both" else (args.method,)
    rows = []
    for method in methods:
        if method == "analytic":
            r = analytic_radius(1, "AB", params) if args.link == "AB" \
                else mixture_radius(args.link, p, q, params)
        else:
            rho = state_family(params)
            mixture = StrategyMixture.from_case_weights(p, q)
            if args.link == "AB":
                asm = assemblage_from_directions(rho, "A", XZ)
            elif args.link == "BA":
                asm = assemblage_from_mixture(rho, mixture)
            else:
                rho_ac = luders_update(rho, mixture)
                side = "A" if args.link == "AC" else "B"
                asm = assemblage_from_directions(rho_ac, side, XZ)
            r = steering_radius(asm).radius
        rows.append({"strategy": strategy, "link": args.link, "W": params.W,
                     "theta": params.theta, "method": method, "radius": float(r),
                     "status": "ok"})
    _emit(args, RADIUS_COLUMNS, rows, "steersim.radius/1")
    return 0


def cmd_sweep(args):
    _load_config(args)
    theta = _theta(args, args.theta)
    lo, hi = args.lo, args.hi
    if args.var == "theta" and getattr(args, "deg", False):
        lo, hi = math.radians(lo), math.radians(hi)
    mix_pair = _parse_mix(args.mix) if args.mix else None
    if mix_pair is not None and len(mix_pair) != 2:
        raise ValueError("sweeps support two-case mixtures")
    spec = SweepSpec(variable=args.var, lo=lo, hi=hi, steps=args.steps, W=args.W,
                     theta=theta, case=args.case, mix_pair=mix_pair, p=args.p,
                     method=args.method)
    rows = sweep(spec)
    _emit(args, SWEEP_COLUMNS, rows, "steersim.sweep/1")
    if args.method == "both":
        gaps = max_method_gap(rows)
        sys.stderr.write("max |analytic - numeric|: "
                         + ", ".join(f"{k}={v:.3g}" for k, v in gaps.items()) + "\n")
    if args.plot:
        report_mod.plot_sweep(rows, args.plot)
    if not any(r["status"] == "ok" for r in rows):
        return 3
    return 0


def cmd_chain(args):
    _load_config(args)
    theta = _theta(args, args.theta)
    if args.W is None or theta is None:
        raise ValueError("chain needs --W and --theta")
    bobs_arg = args.bobs
    if isinstance(bobs_arg, str):  # from a config file
        bobs_arg = bobs_arg.split()
    tokens = list(bobs_arg or [])
    numbered = [(i, spec) for i, spec in enumerate(
        (getattr(args, f"bob{i}") for i in range(1, 7)), start=1) if spec]
    if numbered and tokens:
        raise ValueError("use either --bobs or --bobN, not both")
    if numbered:
        tokens = [spec for _, spec in sorted(numbered)]
    if not tokens:
        raise ValueError("chain needs at least --bobs or --bob1")
    bobs = _parse_bobs(tokens)
    config = ChainConfig(initial=StateParams(args.W, theta), bobs=bobs,
                         disclosure=bool(args.disclosure))
    chain = run_chain(config)
    rows = []
    for i, rec in enumerate(chain.links, start=1):
        rows.append({"link": i, "party": rec.party, "R_forward": rec.r_forward,
                     "R_backward": rec.r_backward, "class": rec.steering_class.value,
                     "status": "ok"})
    _emit(args, CHAIN_COLUMNS, rows, "steersim.chain/1")
    if args.plot:
        report_mod.plot_chain(chain, args.plot)
    return 0


def cmd_region(args):
    _load_config(args)
    rows = []
    if args.scenario == "four-party":
        region = four_party_region(bool(args.disclosure),
                                   verify_witness=not args.no_verify)
        rows.append({"scenario": args.scenario, "record": "p1_bound", "p1": region.p1_max})
        for p1, lo, hi in region.samples:
            rows.append({"scenario": args.scenario, "record": "sample",
                         "p1": p1, "lo": lo, "hi": hi})
        if region.witness:
            w = region.witness
            radii = w["radii"]
            rows.append({"scenario": args.scenario, "record": "witness",
                         "p1": w["p1"], "lo": w["p2"], "hi": w["p2"],
                         "R_AB1": radii[0], "R_B1A": radii[1], "R_AB2": radii[2],
                         "R_B2A": radii[3], "R_AC": radii[4], "R_CA": radii[5]})
            if "numeric_radii" in w:
                nr = w["numeric_radii"]
                rows.append({"scenario": args.scenario, "record": "witness_numeric",
                             "p1": w["p1"], "lo": w["p2"], "hi": w["p2"],
                             "R_AB1": nr[0], "R_B1A": nr[1], "R_AB2": nr[2],
                             "R_B2A": nr[3], "R_AC": nr[4], "R_CA": nr[5]})
        _emit(args, REGION_COLUMNS, rows, "steersim.region/1")
        if args.plot:
            report_mod.plot_region(region, args.plot)
        return 0
    if args.scenario == "window":
        theta = _theta(args, args.theta)
        if args.W is None or theta is None or not args.mix:
            raise ValueError("window scenario needs --mix, --W, --theta")
        pair = _parse_mix(args.mix)
        if len(pair) != 2:
            raise ValueError("window scenario takes a two-case mixture")
        params = StateParams(args.W, theta)
        window = two_way_sharing_window(params, pair)
        if window is None:
            rows.append({"scenario": args.scenario, "record": "empty"})
        else:
            lo, hi = window
            rows.append({"scenario": args.scenario, "record": "window", "lo": lo, "hi": hi})
            mid = 0.5 * (lo + hi)
            pw, qw = {pair[0]: mid, pair[1]: 1.0 - mid}.get(1, 0.0), \
                     {pair[0]: mid, pair[1]: 1.0 - mid}.get(2, 0.0)
            rows.append({"scenario": args.scenario, "record": "witness",
                         "p1": mid,
                         "R_AB1": analytic_radius(1, "AB", params),
                         "R_B1A": mixture_radius("BA", pw, qw, params),
                         "R_AC": mixture_radius("AC", pw, qw, params),
                         "R_CA": mixture_radius("CA", pw, qw, params)})
        _emit(args, REGION_COLUMNS, rows, "steersim.region/1")
        return 0
    raise ValueError(f"unknown scenario {args.scenario!r}")


def cmd_report(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    steps = 41 if args.quick else 101
    made = []

    def emit(name, columns, rows, schema):
        path = outdir / f"{name}.csv"
        for row in rows:
            row.setdefault("schema", schema)
        path.write_text(_csv_text(columns, rows))
        made.append(str(path))
        return rows

    for case in (1, 2, 3):
        for label, theta in (("sym", math.pi / 4), ("asym", math.pi / 8)):
            spec = SweepSpec("W", 0.0, 1.0, steps, theta=theta, case=case)
            rows = emit(f"radii_case{case}_{label}", SWEEP_COLUMNS, sweep(spec),
                        "steersim.sweep/1")
            fig = outdir / f"radii_case{case}_{label}.png"
            report_mod.plot_sweep(rows, fig, title=f"case {case}, theta = {'pi/4' if label == 'sym' else 'pi/8'}")
            made.append(str(fig))
    for pair, W, theta, label in (((1, 3), 0.9955, math.pi / 4, "mix13_sym"),
                                  ((1, 3), 0.9931, math.pi / 8, "mix13_asym"),
                                  ((1, 2), 0.9955, math.pi / 4, "mix12_sym")):
        spec = SweepSpec("p", 0.0, 1.0, steps, W=W, theta=theta, mix_pair=pair)
        rows = emit(f"radii_{label}", SWEEP_COLUMNS, sweep(spec), "steersim.sweep/1")
        fig = outdir / f"radii_{label}.png"
        report_mod.plot_sweep(rows, fig, title=f"mixture {pair[0]}&{pair[1]}, W = {W}")
        made.append(str(fig))
    n_bobs = 4 if args.quick else 10
    config = ChainConfig(initial=StateParams(1.0, math.pi / 4),
                         bobs=(StrategyMixture.deterministic(3),) * n_bobs)
    chain = run_chain(config)
    rows = [{"link": i, "party": rec.party, "R_forward": rec.r_forward,
             "R_backward": rec.r_backward, "class": rec.steering_class.value,
             "status": "ok"} for i, rec in enumerate(chain.links, start=1)]
    emit("chain_case3", CHAIN_COLUMNS, rows, "steersim.chain/1")
    fig = outdir / "chain_case3.png"
    report_mod.plot_chain(chain, fig, title="pure case-3 chain, W = 1, theta = pi/4")
    made.append(str(fig))
    for disclosure, label in ((False, "undisclosed"), (True, "disclosed")):
        region = four_party_region(disclosure, verify_witness=not args.quick)
        rows = [{"scenario": "four-party", "record": "p1_bound", "p1": region.p1_max}]
        rows += [{"scenario": "four-party", "record": "sample", "p1": p1, "lo": lo, "hi": hi}
                 for p1, lo, hi in region.samples]
        emit(f"region_{label}", REGION_COLUMNS, rows, "steersim.region/1")
        fig = outdir / f"region_{label}.png"
        report_mod.plot_region(region, fig, title=f"four-party sharing region ({label})")
        made.append(str(fig))
    sys.stderr.write("wrote:\n" + "\n".join(f"  {p}" for p in made) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="steersim",
        description="Steering radii for sequential projective-measurement sharing scenarios.",
    )
    parser.add_argument("--version", action="version", version=f"steersim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value file mirroring the flag names")
        p.add_argument("--deg", action="store_true", help="angles are given in degrees")
        p.add_argument("--out", help="write CSV here instead of stdout")
        p.add_argument("--json", help="also write a JSON mirror here")

    p = sub.add_parser("radius", help="single steering radius for a strategy and link")
    common(p)
    p.add_argument("--case", type=int, choices=(1, 2, 3))
    p.add_argument("--mix", help="mixture cases, e.g. 1,3 (use --p/--q for weights)")
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--link", required=True, choices=("AB", "BA", "AC", "CA"))
    p.add_argument("--W", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--method", default="analytic", choices=("analytic", "numeric", "both"))
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("sweep", help="radii over a parameter grid (CSV)")
    common(p)
    p.add_argument("--var", required=True, choices=("W", "p", "theta"))
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--case", type=int, choices=(1, 2, 3))
    p.add_argument("--mix")
    p.add_argument("--p", type=float)
    p.add_argument("--W", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--method", default="analytic", choices=("analytic", "numeric", "both"))
    p.add_argument("--plot", help="also render the sweep to this image file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("chain", help="full sequential chain with per-link radii")
    common(p)
    p.add_argument("--W", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--bobs", nargs="+",
                   help="bob specs: caseN, mix:1@0.1,3, xN repeats the previous spec")
    for i in range(1, 7):
        p.add_argument(f"--bob{i}", help=argparse.SUPPRESS)
    p.add_argument("--disclosure", action="store_true",
                   help="each Bob discloses his strategy branch to Alice")
    p.add_argument("--plot", help="render radii along the chain to this image file")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("region", help="two-way sharing regions and windows")
    common(p)
    p.add_argument("--scenario", required=True, choices=("four-party", "window"))
    p.add_argument("--disclosure", action="store_true")
    p.add_argument("--mix", help="two-case mixture for the window scenario, e.g. 1,3")
    p.add_argument("--W", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--no-verify", action="store_true",
                   help="skip the numeric re-verification of the witness point")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("report", help="standard set of CSV tables and figures")
    p.add_argument("--outdir", required=True)
    p.add_argument("--quick", action="store_true", help="coarser grids, shorter chain")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        sys.stderr.write(f"steersim: error: {exc}\n")
        return 2
    except SOLVER_ERRORS as exc:
        sys.stderr.write(f"steersim: solver failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
