"""Assemblages, local-hidden-state feasibility, and steering radii.

Two independent routes to the radius are provided:

* ``steering_radius`` — bisection over a convex feasibility problem solved
  by alternating projections (see ``_pocs``).  Works for any two-outcome
  assemblage and assumes nothing about the optimum.
* ``analytic_radius`` / ``mixture_radius`` — exact closed-form minimax for
  the shipped state family and strategies, via a one-parameter reduction
  of the reconstruction relations (see ``_minimax_xz``).

Measurement directions default to {x, z}; an optional great-circle scan
(``scan_directions``) is available to probe that choice.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _pocs
from .errors import InvalidMixtureWeights, SolverStall, UnknownCaseLink
from .measurements import effect
from .qmath import I2, PAULIS, unit_direction
from .states import StateParams

DEGENERATE_TOL = 1e-12

LINKS = ("AB", "BA", "AC", "CA")


class Cell(NamedTuple):
    prob: float
    bloch: np.ndarray  # normalized conditional Bloch vector (zeros if degenerate)

    @property
    def degenerate(self):
        return self.prob < DEGENERATE_TOL

    @property
    def unnormalized(self):
        return self.prob * self.bloch


@dataclass(frozen=True)
class Assemblage:
    """Conditional-state ensemble {p(a|x), v(a|x)} of the steered party."""

    cells: dict  # (setting, outcome) -> Cell
    n_settings: int

    def cell(self, setting, outcome):
        return self.cells[(setting, outcome)]

    def setting_prob_sums(self):
        return [
            sum(c.prob for (x, _), c in self.cells.items() if x == s)
            for s in range(self.n_settings)
        ]

    def no_signaling_residual(self):
        """Max distance between the per-setting sums of unnormalized vectors."""
        sums = []
        for s in range(self.n_settings):
            total = np.zeros(3)
            for (x, _), c in self.cells.items():
                if x == s:
                    total += c.unnormalized
            sums.append(total)
        worst = 0.0
        for i in range(len(sums)):
            for j in range(i + 1, len(sums)):
                worst = max(worst, float(np.linalg.norm(sums[i] - sums[j])))
        return worst

    def validate(self, prob_tol=1e-10, ns_tol=1e-9):
        for s, total in enumerate(self.setting_prob_sums()):
            if abs(total - 1.0) > prob_tol:
                raise ValueError(f"setting {s} outcome probabilities sum to {total:.12f}")
        res = self.no_signaling_residual()
        if res > ns_tol:
            raise ValueError(f"no-signaling violated by {res:.3e}")
        return res


@dataclass(frozen=True)
class LhsEnsemble:
    """Hidden-state ensemble indexed by deterministic response functions."""

    members: tuple  # of (prob, bloch ndarray)

    @property
    def max_length(self):
        return max((float(np.linalg.norm(v)) for _, v in self.members), default=0.0)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    ensemble: LhsEnsemble | None
    residual: float
    iterations: int


@dataclass(frozen=True)
class SteeringRadiusResult:
    radius: float
    ensemble: LhsEnsemble
    iterations: int
    residual: float


class SteeringClass(enum.Enum):
    TWO_WAY = "two_way"
    ONE_WAY_FORWARD = "one_way_forward"
    ONE_WAY_BACKWARD = "one_way_backward"
    NO_WAY = "no_way"


def classify(r_forward, r_backward):
    """Steering class from the two radii; R = 1 counts as unsteerable."""
    fwd = r_forward > 1.0
    bwd = r_backward > 1.0
    if fwd and bwd:
        return SteeringClass.TWO_WAY
    if fwd:
        return SteeringClass.ONE_WAY_FORWARD
    if bwd:
        return SteeringClass.ONE_WAY_BACKWARD
    return SteeringClass.NO_WAY


# ---------------------------------------------------------------------------
# assemblage construction
# ---------------------------------------------------------------------------

def _trace_vector(op):
    """(Tr op, Bloch-trace vector of op) for a 2x2 operator."""
    p = float(np.trace(op).real)
    u = np.array([np.trace(op @ s).real for s in PAULIS])
    return p, u


def _cell(prob, u):
    if prob < DEGENERATE_TOL:
        return Cell(max(prob, 0.0), np.zeros(3))
    return Cell(prob, u / prob)


def assemblage_from_directions(rho, measuring_side, directions):
    """Assemblage steered into the far party when one side measures basis directions.

    Parameters
    ----------
    rho : (4, 4) density matrix shared between sides A (first) and B (second).
    measuring_side : {"A", "B"}
        The party performing the measurements; cells describe the other side.
    directions : sequence of unit 3-vectors, one per setting.
    """
    rho = np.asarray(rho, dtype=complex)
    if measuring_side not in ("A", "B"):
        raise ValueError(f"measuring_side must be 'A' or 'B', got {measuring_side!r}")
    dirs = [unit_direction(d) for d in directions]
    r4 = rho.reshape(2, 2, 2, 2)
    cells = {}
    for x, d in enumerate(dirs):
        for a in (0, 1):
            e = effect(d, a).matrix
            if measuring_side == "A":
                cond = np.einsum("ij,jkil->kl", e, r4)
            else:
                cond = np.einsum("ij,kjli->kl", e, r4)
            prob, u = _trace_vector(cond)
            cells[(x, a)] = _cell(prob, u)
    return Assemblage(cells, len(dirs))


def assemblage_from_mixture(rho, mixture):
    """Assemblage steered into side A when side B applies a strategy mixture.

    Cells aggregate the branches' unnormalized conditionals per (setting,
    outcome).  Identity settings announce a uniformly random outcome, so
    they contribute half of the unconditioned reduced state to each cell.
    """
    rho = np.asarray(rho, dtype=complex)
    r4 = rho.reshape(2, 2, 2, 2)
    rho_a = np.trace(r4, axis1=1, axis2=3)
    n_settings = len(mixture.branches[0][1].settings)
    cells = {}
    for y in range(n_settings):
        for b in (0, 1):
            prob = 0.0
            u = np.zeros(3)
            for w, strat in mixture.branches:
                setting = strat.settings[y]
                if setting is None:
                    cond = rho_a / 2
                else:
                    e = effect(setting, b).matrix
                    cond = np.einsum("ij,kjli->kl", e, r4)
                cp, cu = _trace_vector(cond)
                prob += w * cp
                u += w * cu
            cells[(y, b)] = _cell(prob, u)
    return Assemblage(cells, n_settings)


# ---------------------------------------------------------------------------
# numeric route: feasibility + bisection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverOptions:
    """Tolerances for the feasibility solver and the radius bisection."""

    max_iter: int = 200_000
    feas_tol: float = 1e-11
    stall_window: int = 400
    stall_floor: float = 3e-11
    rel_improve: float = 1e-4
    bisect_tol: float = 1e-10
    bracket_max: float = 16.0


DEFAULT_OPTIONS = SolverOptions()


class _LhsProblem:
    """Reconstruction relations of an assemblage in matrix form A x = b."""

    def __init__(self, asm):
        self.n_settings = asm.n_settings
        self.m = 2 ** asm.n_settings
        m = self.m
        n = 4 * m
        rows, rhs = [], []
        for (x, a), cell in sorted(asm.cells.items()):
            if cell.degenerate:
                continue  # 0/0 conditional: drop its reconstruction equations
            sel = [i for i in range(m) if ((i >> x) & 1) == a]
            row = np.zeros(n)
            row[sel] = 1.0
            rows.append(row)
            rhs.append(cell.prob)
            u = cell.unnormalized
            for k in range(3):
                row = np.zeros(n)
                for i in sel:
                    row[m + 3 * i + k] = 1.0
                rows.append(row)
                rhs.append(u[k])
        self.A = np.asarray(rows)
        self.b = np.asarray(rhs)
        pinv = np.linalg.pinv(self.A, rcond=1e-12)
        self.Q = np.eye(n) - pinv @ self.A
        self.xp = pinv @ self.b
        self.warm = None

    def solve(self, R, options):
        x0 = self.warm if self.warm is not None else self.xp
        status, y, disp, iters = _pocs.run(
            self.Q, self.xp, float(R), np.ascontiguousarray(x0, dtype=float), self.m,
            options.max_iter, options.feas_tol, options.stall_window,
            options.stall_floor, options.rel_improve,
        )
        self.warm = y.copy()
        return status, y, disp, iters

    def residual(self, y):
        r = self.A @ y - self.b
        return float(np.abs(r).max()) if r.size else 0.0

    def ensemble(self, y):
        m = self.m
        members = []
        for i in range(m):
            p = float(y[i])
            u = y[m + 3 * i: m + 3 * i + 3]
            v = u / p if p > DEGENERATE_TOL else np.zeros(3)
            members.append((p, np.asarray(v)))
        return LhsEnsemble(tuple(members))


def lhs_feasible(asm, R, options=DEFAULT_OPTIONS):
    """Decide whether an LHS ensemble with hidden-state length <= R exists.

    Returns a FeasibilityResult carrying the certificate ensemble when
    feasible and the stalled gap estimate when not.  Raises SolverStall if
    the iteration cap is reached without a verdict.
    """
    if R < 0:
        raise ValueError(f"radius must be nonnegative, got {R}")
    prob = _LhsProblem(asm)
    status, y, disp, iters = prob.solve(R, options)
    if status == _pocs.UNRESOLVED:
        raise SolverStall(f"feasibility undecided at R={R} after {iters} iterations (d={disp:.2e})")
    if status == _pocs.FEASIBLE:
        return FeasibilityResult(True, prob.ensemble(y), prob.residual(y), iters)
    return FeasibilityResult(False, None, disp, iters)


def steering_radius(asm, options=DEFAULT_OPTIONS):
    """Smallest hidden-state length that reproduces the assemblage.

    Bisection over the feasibility problem; returns the certified-feasible
    upper end of the final bracket together with its LHS certificate.
    """
    prob = _LhsProblem(asm)
    total = 0

    def feasible(r):
        nonlocal total
        status, y, disp, iters = prob.solve(r, options)
        total += iters
        if status == _pocs.UNRESOLVED:
            raise SolverStall(f"feasibility undecided at R={r} after {iters} iterations (d={disp:.2e})")
        return status == _pocs.FEASIBLE, y

    ok, y = feasible(0.0)
    if ok:
        return SteeringRadiusResult(0.0, prob.ensemble(y), total, prob.residual(y))
    hi = 2.0
    ok, y_hi = feasible(hi)
    while not ok:
        hi *= 2.0
        if hi > options.bracket_max:
            raise SolverStall(f"no feasible radius found up to {options.bracket_max}")
        ok, y_hi = feasible(hi)
    lo = 0.0
    while hi - lo > options.bisect_tol:
        mid = 0.5 * (lo + hi)
        ok, y = feasible(mid)
        if ok:
            hi, y_hi = mid, y
        else:
            lo = mid
    return SteeringRadiusResult(hi, prob.ensemble(y_hi), total, prob.residual(y_hi))


# ---------------------------------------------------------------------------
# analytic route: exact minimax for the x/z-symmetric family
# ---------------------------------------------------------------------------

def _minimax_xz(G, pi_p, pi_m, Z_p, Z_m):
    """Exact min-max hidden-state length for the mirror-symmetric cell pattern.

    Setting 0 has cells (1/2, (+-G, 0, M)); setting 1 has collinear cells
    (pi+-, (0, 0, Z+-)).  By the mirror symmetry the four hidden states pair
    up, their probabilities and z-components are pinned by the relations,
    and only the split t of the x-budget G between the two pairs is free:

        |v1(t)|^2 = ((t G)^2 + (Z+/2)^2) / (pi+/2)^2
        |v2(t)|^2 = (((1-t) G)^2 + (Z-/2)^2) / (pi-/2)^2

    The minimum of max(|v1|, |v2|) sits at t = 0, t = 1, or at the crossing
    |v1| = |v2| (a quadratic root), whichever the endpoint comparison picks.
    """
    P1, P2 = pi_p / 2.0, pi_m / 2.0
    z1, z2 = Z_p / 2.0, Z_m / 2.0
    if P1 < DEGENERATE_TOL and P2 < DEGENERATE_TOL:
        return 0.0
    if P2 < DEGENERATE_TOL:
        return float(np.hypot(G, z1) / P1)
    if P1 < DEGENERATE_TOL:
        return float(np.hypot(G, z2) / P2)
    if abs(G) < 1e-15:
        return float(max(abs(z1) / P1, abs(z2) / P2))

    def f1(t):
        return np.hypot(t * G, z1) / P1

    def f2(t):
        return np.hypot((1.0 - t) * G, z2) / P2

    if f1(0.0) >= f2(0.0):
        return float(f1(0.0))
    if f2(1.0) >= f1(1.0):
        return float(f2(1.0))
    aq = (P2 * P2 - P1 * P1) * G * G
    bq = 2.0 * P1 * P1 * G * G
    cq = P2 * P2 * z1 * z1 - P1 * P1 * (G * G + z2 * z2)
    if abs(aq) <= 1e-14 * bq:
        roots = [-cq / bq]
    else:
        disc = bq * bq - 4.0 * aq * cq
        sq = np.sqrt(max(disc, 0.0))
        roots = [(-bq + sq) / (2.0 * aq), (-bq - sq) / (2.0 * aq)]
    eps = 1e-12
    for t in roots:
        if -eps <= t <= 1.0 + eps:
            return float(max(f1(t), f2(t)))
    # numerically flat endpoint comparison: fall back to the better corner
    return float(min(max(f1(0.0), f2(0.0)), max(f1(1.0), f2(1.0))))


class _FamilyBloch(NamedTuple):
    """Bloch data (a long z, b long z, diagonal correlations) of the x/z family."""

    az: float
    bz: float
    tx: float
    tz: float


def _family_bloch(params):
    c = np.cos(2.0 * params.theta)
    s = np.sin(2.0 * params.theta)
    return _FamilyBloch(params.W * c, c, params.W * s, params.W)


def _after_mixture(bl, p, q):
    """Bloch data after one party applies the (p, q, 1-p-q) strategy mixture."""
    return _FamilyBloch(bl.az, bl.bz * (1.0 - p / 2.0), bl.tx * (1.0 + q) / 2.0,
                        bl.tz * (1.0 - p / 2.0))


def _forward_radius(bl):
    """Radius when side A measures {x, z} and the far side is steered."""
    return _minimax_xz(bl.tx / 2.0, (1.0 + bl.az) / 2.0, (1.0 - bl.az) / 2.0,
                       (bl.bz + bl.tz) / 2.0, (bl.bz - bl.tz) / 2.0)


def _backward_radius(bl, p, q):
    """Radius when side B applies the (p, q, 1-p-q) mixture and steers side A."""
    zi = 1.0 - q  # weight of the z-measuring branches
    return _minimax_xz(p * bl.tx / 2.0, (1.0 + zi * bl.bz) / 2.0,
                       (1.0 - zi * bl.bz) / 2.0,
                       (bl.az + zi * bl.tz) / 2.0, (bl.az - zi * bl.tz) / 2.0)


_CASE_WEIGHTS = {1: (1.0, 0.0), 2: (0.0, 1.0), 3: (0.0, 0.0)}


def _check_weights(p, q):
    if p < -1e-12 or q < -1e-12 or p + q > 1.0 + 1e-12:
        raise InvalidMixtureWeights(f"weights p={p}, q={q} violate p, q >= 0, p + q <= 1")


def mixture_radius(link, p, q, params):
    """Closed-form steering radius under the (p, q, 1-p-q) strategy mixture.

    ``link`` is one of "BA", "AC", "CA" (the A->B radius is unaffected by
    the mixture; use ``analytic_radius(1, "AB", params)``).
    """
    _check_weights(p, q)
    bl = _family_bloch(params)
    if link == "BA":
        return _backward_radius(bl, p, q)
    blc = _after_mixture(bl, p, q)
    if link == "AC":
        return _forward_radius(blc)
    if link == "CA":
        return _backward_radius(blc, 1.0, 0.0)
    raise UnknownCaseLink(f"mixture link must be BA, AC, or CA, got {link!r}")


def analytic_radius(case_id, link, params):
    """Closed-form steering radius for a deterministic strategy case and link.

    Cases are 1 = (x, z), 2 = (I, I), 3 = (I, z); links are "AB", "BA"
    (around the measuring party) and "AC", "CA" (across the post-measurement
    state).  Evaluation is the exact minimax of the reconstruction
    relations, which agrees with the equal-length closed forms wherever the
    equal-length ansatz is optimal.
    """
    if case_id not in _CASE_WEIGHTS:
        raise UnknownCaseLink(f"case must be 1, 2, or 3, got {case_id!r}")
    if link not in LINKS:
        raise UnknownCaseLink(f"link must be one of {LINKS}, got {link!r}")
    p, q = _CASE_WEIGHTS[case_id]
    bl = _family_bloch(params)
    if link == "AB":
        return _forward_radius(bl)
    if link == "BA":
        return _backward_radius(bl, p, q)
    return mixture_radius(link, p, q, params)


def scan_directions(rho, measuring_side, n_angles=181, options=DEFAULT_OPTIONS):
    """Maximize the numeric radius over pairs of x-z great-circle directions.

    A coarse grid probe of the outer maximization of the radius definition;
    directions are (sin phi, 0, cos phi) for phi on [0, pi).  Returns
    (best_radius, (phi_0, phi_1)).  Cost grows as n_angles^2 / 2.
    """
    phis = np.linspace(0.0, np.pi, n_angles, endpoint=False)
    best = (-1.0, (0.0, 0.0))
    for i, p0 in enumerate(phis):
        d0 = np.array([np.sin(p0), 0.0, np.cos(p0)])
        for p1 in phis[i:]:
            d1 = np.array([np.sin(p1), 0.0, np.cos(p1)])
            r = steering_radius(
                assemblage_from_directions(rho, measuring_side, [d0, d1]), options
            ).radius
            if r > best[0]:
                best = (r, (float(p0), float(p1)))
    return best
