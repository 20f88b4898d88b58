"""Boundary finding and region mapping: thresholds, sweeps, sharing windows."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NoCrossing
from .measurements import StrategyMixture
from .scenario import ChainConfig, four_party_radii, run_chain
from .states import StateParams
from .steering import analytic_radius, classify, mixture_radius
from . import steering as _steering
from .measurements import luders_update
from .states import state_family

LINK_NAMES = ("AB", "BA", "AC", "CA")


def worker_count():
    """Worker cap from STEER_THREADS (default: machine parallelism)."""
    env = os.environ.get("STEER_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: variable in {"W", "p", "theta"} over [lo, hi]."""

    variable: str
    lo: float
    hi: float
    steps: int
    W: float | None = None
    theta: float | None = None
    case: int | None = None
    mix_pair: tuple | None = None  # e.g. (1, 3): weight p on case 1, rest on case 3
    p: float | None = None  # fixed mixture weight when variable != "p"
    links: tuple = LINK_NAMES
    method: str = "analytic"  # analytic | numeric | both

    def __post_init__(self):
        if self.variable not in ("W", "p", "theta"):
            raise ValueError(f"variable must be W, p, or theta, got {self.variable!r}")
        if not (self.lo < self.hi):
            raise ValueError("need lo < hi")
        if self.steps < 2:
            raise ValueError("need steps >= 2")
        if self.method not in ("analytic", "numeric", "both"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.variable == "p" and self.mix_pair is None:
            raise ValueError("sweeping p requires a mixture pair")
        if self.case is None and self.mix_pair is None:
            raise ValueError("specify a case or a mixture pair")
        if self.case is not None and self.mix_pair is not None:
            raise ValueError("case and mixture pair are mutually exclusive")


def _pair_weights(pair, p):
    """(weight of case 1, weight of case 2) for weight p on pair[0]."""
    w = {pair[0]: p, pair[1]: 1.0 - p}
    return w.get(1, 0.0), w.get(2, 0.0)


def _point_weights(spec, value):
    """(W, theta, p1_weight, q2_weight) at one grid point."""
    W = spec.W if spec.variable != "W" else value
    theta = spec.theta if spec.variable != "theta" else value
    if spec.case is not None:
        p, q = _steering._CASE_WEIGHTS[spec.case]
    else:
        pw = spec.p if spec.variable != "p" else value
        if pw is None:
            raise ValueError("mixture sweep needs a weight p")
        p, q = _pair_weights(spec.mix_pair, pw)
    if W is None or theta is None:
        raise ValueError("W and theta must be fixed or swept")
    return W, theta, p, q


def _analytic_radii(W, theta, p, q):
    params = StateParams(W, theta)
    return {
        "AB": analytic_radius(1, "AB", params),
        "BA": mixture_radius("BA", p, q, params),
        "AC": mixture_radius("AC", p, q, params),
        "CA": mixture_radius("CA", p, q, params),
    }


def _numeric_radii(W, theta, p, q, options=_steering.DEFAULT_OPTIONS):
    params = StateParams(W, theta)
    rho = state_family(params)
    mixture = StrategyMixture.from_case_weights(p, q)
    out = {}
    out["AB"] = _steering.steering_radius(
        _steering.assemblage_from_directions(rho, "A", ((1.0, 0, 0), (0, 0, 1.0))), options
    ).radius
    out["BA"] = _steering.steering_radius(
        _steering.assemblage_from_mixture(rho, mixture), options).radius
    rho_ac = luders_update(rho, mixture)
    out["AC"] = _steering.steering_radius(
        _steering.assemblage_from_directions(rho_ac, "A", ((1.0, 0, 0), (0, 0, 1.0))), options
    ).radius
    out["CA"] = _steering.steering_radius(
        _steering.assemblage_from_directions(rho_ac, "B", ((1.0, 0, 0), (0, 0, 1.0))), options
    ).radius
    return out


def _sweep_point(spec, value):
    rows = []
    methods = ("analytic", "numeric") if spec.method == "both" else (spec.method,)
    for method in methods:
        row = {
            "param_name": spec.variable,
            "param_value": float(value),
            "method": method,
            "status": "ok",
        }
        try:
            W, theta, p, q = _point_weights(spec, value)
            radii = _analytic_radii(W, theta, p, q) if method == "analytic" \
                else _numeric_radii(W, theta, p, q)
            for link in LINK_NAMES:
                row[f"R_{link}"] = radii[link]
            row["class_AB"] = classify(radii["AB"], radii["BA"]).value
            row["class_AC"] = classify(radii["AC"], radii["CA"]).value
        except Exception as exc:  # per-row failure: flag and continue
            row["status"] = f"failed: {type(exc).__name__}"
            for link in LINK_NAMES:
                row.setdefault(f"R_{link}", float("nan"))
            row.setdefault("class_AB", "")
            row.setdefault("class_AC", "")
        rows.append(row)
    return rows


def sweep(spec):
    """Evaluate the sweep grid; one row per (grid point, method), in order.

    Rows of failed points carry a ``status`` flag instead of aborting the
    sweep.  Grid points are evaluated concurrently (STEER_THREADS workers)
    and re-assembled in ascending parameter order.
    """
    grid = np.linspace(spec.lo, spec.hi, spec.steps)
    workers = worker_count()
    if workers > 1 and spec.method in ("numeric", "both") and spec.steps > 4:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda v: _sweep_point(spec, v), grid))
    else:
        chunks = [_sweep_point(spec, v) for v in grid]
    rows = []
    for chunk in chunks:
        rows.extend(chunk)
    return rows


def max_method_gap(rows):
    """Largest |analytic - numeric| per link over paired method=both rows."""
    gaps = {}
    analytic = [r for r in rows if r["method"] == "analytic" and r["status"] == "ok"]
    numeric = [r for r in rows if r["method"] == "numeric" and r["status"] == "ok"]
    by_param = {r["param_value"]: r for r in numeric}
    for link in LINK_NAMES:
        worst = 0.0
        for row in analytic:
            other = by_param.get(row["param_value"])
            if other:
                worst = max(worst, abs(row[f"R_{link}"] - other[f"R_{link}"]))
        gaps[link] = worst
    return gaps


def threshold_scan(radius_fn, param_range, tol=1e-9, samples=64):
    """Parameter value where radius_fn crosses 1, by sampling then bisection.

    Raises NoCrossing when R - 1 has constant sign over the range; asserts
    approximate monotonicity of the sampled values.
    """
    lo, hi = param_range
    grid = np.linspace(lo, hi, samples)
    vals = np.array([radius_fn(x) - 1.0 for x in grid])
    diffs = np.diff(vals)
    if not ((diffs >= -1e-9).all() or (diffs <= 1e-9).all()):
        raise ValueError("radius is not monotone on the scan range")
    signs = np.sign(vals)
    change = np.nonzero(signs[:-1] * signs[1:] <= 0)[0]
    if vals[0] == 0.0 and (signs[1:] > 0).all():
        return float(grid[0])
    if len(change) == 0:
        raise NoCrossing("R - 1 does not change sign on the range")
    a, b = grid[change[0]], grid[change[0] + 1]
    fa = radius_fn(a) - 1.0
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = radius_fn(mid) - 1.0
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return float(0.5 * (a + b))


def _window_radii_fn(params, pair):
    r_ab = analytic_radius(1, "AB", params)

    def radii(p):
        pw, qw = _pair_weights(pair, p)
        return (
            r_ab,
            mixture_radius("BA", pw, qw, params),
            mixture_radius("AC", pw, qw, params),
            mixture_radius("CA", pw, qw, params),
        )

    return radii


def two_way_sharing_window(params, pair, grid_steps=201, tol=1e-6):
    """Maximal weight interval where both pairs of parties are two-way steerable.

    ``pair`` is a 2-tuple of case ids; the swept weight p sits on the first
    case, 1 - p on the second.  Returns (lo, hi) or None when no interior
    point achieves two-way steering on both links.
    """
    radii = _window_radii_fn(params, pair)

    def margin(p):
        return min(radii(p)) - 1.0

    grid = np.linspace(0.0, 1.0, grid_steps)
    vals = np.array([margin(p) for p in grid])
    inside = vals > 0.0
    if not inside.any():
        return None
    runs = []
    start = None
    for i, flag in enumerate(inside):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(grid) - 1))
    best = max(runs, key=lambda r: r[1] - r[0])

    def bisect(a, b):
        # margin(a) and margin(b) straddle 0 (non-strictly on the outside)
        fa = margin(a)
        while b - a > tol:
            mid = 0.5 * (a + b)
            fm = margin(mid)
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        return 0.5 * (a + b)

    i0, i1 = best
    lo = grid[0] if i0 == 0 else bisect(grid[i0 - 1], grid[i0])
    hi = grid[-1] if i1 == len(grid) - 1 else bisect(grid[i1], grid[i1 + 1])
    return float(lo), float(hi)


@dataclass(frozen=True)
class RegionResult:
    """Sampled description of a parameter region plus a verified witness."""

    disclosure: bool
    p1_max: float
    samples: tuple  # of (p1, p2_lo, p2_hi)
    witness: dict = field(default_factory=dict)


def _p2_window(p1, disclosure):
    """(lower, upper) bounds on p2 from the backward-2 and final-link radii."""

    def r_b2a(p2):
        return four_party_radii(p1, 0.0, p2, 0.0, disclosure)[3]

    def r_ac(p2):
        return four_party_radii(p1, 0.0, p2, 0.0, disclosure)[4]

    def bisect(fn, a, b):
        fa = fn(a) - 1.0
        for _ in range(80):
            mid = 0.5 * (a + b)
            fm = fn(mid) - 1.0
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        return 0.5 * (a + b)

    if r_b2a(0.0) > 1.0:
        lo = 0.0
    elif r_b2a(1.0) <= 1.0:
        return None
    else:
        lo = bisect(r_b2a, 0.0, 1.0)
    if r_ac(1.0) > 1.0:
        hi = 1.0
    elif r_ac(0.0) <= 1.0:
        return None
    else:
        hi = bisect(r_ac, 0.0, 1.0)
    if hi <= lo:
        return None
    return lo, hi


def four_party_region(disclosure, verify_witness=True, options=_steering.DEFAULT_OPTIONS):
    """(p1, p2) region at q1 = q2 = 0 where all six chain radii exceed 1.

    The region is found from the six closed-form inequalities themselves
    (no constants imported from elsewhere): for each p1 the admissible p2
    interval is bracketed by the backward-2 radius rising through 1 and the
    final-link radius falling through 1; the p1 bound is where that window
    closes.  A log-spaced scan from 1e-6 locates the closure, which is then
    bisected.  The witness point is re-verified with the numeric solver.
    """
    p1_cap = 2.0 - np.sqrt(3.0)  # forward-2 radius stays above 1 below this

    def window_width(p1):
        win = _p2_window(p1, disclosure)
        return -1.0 if win is None else win[1] - win[0]

    grid = np.geomspace(1e-6, p1_cap, 300)
    open_idx = np.array([window_width(p) > 0 for p in grid])
    if not open_idx.any():
        raise NoCrossing("no open p2 window found on the p1 scan")
    last_open = np.nonzero(open_idx)[0].max()
    a = grid[last_open]
    b = grid[last_open + 1] if last_open + 1 < len(grid) else p1_cap
    for _ in range(60):
        mid = 0.5 * (a + b)
        if window_width(mid) > 0:
            a = mid
        else:
            b = mid
    p1_max = 0.5 * (a + b)

    samples = []
    for p1 in np.geomspace(p1_max / 100.0, p1_max * 0.98, 9):
        win = _p2_window(p1, disclosure)
        if win is not None:
            samples.append((float(p1), float(win[0]), float(win[1])))

    witness = {}
    p1_w = p1_max / 2.0
    win = _p2_window(p1_w, disclosure)
    if win is not None:
        p2_w = 0.5 * (win[0] + win[1])
        radii = four_party_radii(p1_w, 0.0, p2_w, 0.0, disclosure)
        witness = {
            "p1": float(p1_w),
            "p2": float(p2_w),
            "radii": tuple(float(r) for r in radii),
            "margin": float(min(radii) - 1.0),
        }
        if verify_witness:
            config = ChainConfig(
                initial=StateParams(1.0, np.pi / 4),
                bobs=(
                    StrategyMixture.from_case_weights(p1_w, 0.0),
                    StrategyMixture.from_case_weights(p2_w, 0.0),
                ),
                disclosure=disclosure,
            )
            report = run_chain(config, options)
            numeric = report.radii()
            witness["numeric_radii"] = tuple(float(r) for r in numeric)
            witness["numeric_all_steerable"] = bool(all(r > 1.0 for r in numeric))
    return RegionResult(disclosure, float(p1_max), tuple(samples), witness)
