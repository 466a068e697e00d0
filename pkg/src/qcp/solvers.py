"""End-to-end closest-pair, bichromatic and orthogonal-vectors solvers.

Every solver runs in one of two modes:

- real: classical control flow with simulated quantum subroutines.  The
  walk-search solvers exercise the history-independent structures for real
  (insert/delete along a sampled walk path at the calibrated schedule) and
  fall back to one deterministic full-set structure build, whose root flag
  answers the decision exactly; returned pairs are always re-verified with
  exact integer arithmetic, so answers carry no sampling error.
- cost: no instance is touched; the walk-search ledger is evaluated at the
  requested size.  Ledgers are kept in query units (setup = r queries,
  update = 1, check O(1)); time-unit factors are reported alongside.

Distance thresholds are rational squared values throughout; a threshold of
zero is answered through a grid at eps**2 = 1/2, which flags exactly the
coincident pairs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from qcp import qsim
from qcp.geometry import GridParams, ceil_sqrt, dist_sq, neighbor_count_bound, \
    scaled_neighbor_count_bound
from qcp.histructs import (
    AugmentedStructure,
    BasicStructure,
    BichromaticStructure,
    InternalConsistencyError,
    PromiseViolationError,
)

__all__ = [
    "CpInstance", "BcpInstance", "OvInstance", "SolveReport",
    "cp_eps_decide", "cp_solve", "cp_multi_to_unique",
    "bcp_approx_decide", "bcp_approx_solve", "bcp_exact_solve",
    "ov_solve", "baseline_minfind_solve", "ed_to_cp",
    "cp_eps_cost", "bcp_approx_cost", "bcp_exact_cost", "ov_cost",
    "baseline_cost",
]

MAX_RETRIES = 3
CONFIDENCE_CAP = 10


# ---------------------------------------------------------------------------
# Instances and reports
# ---------------------------------------------------------------------------

@dataclass
class CpInstance:
    points: np.ndarray          # (n, d) nonnegative int64
    m: int                      # coordinate bits: coords < 2**m

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int64)
        if self.points.ndim != 2:
            raise ValueError("points must be an (n, d) array")
        if self.points.size and (self.points < 0).any():
            raise ValueError("coordinates must be nonnegative")
        if self.points.size and int(self.points.max()) >= (1 << self.m):
            raise ValueError("coordinate exceeds 2**m")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def point(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.points[i])


@dataclass
class BcpInstance:
    a: np.ndarray
    b: np.ndarray
    m: int

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.int64)
        self.b = np.asarray(self.b, dtype=np.int64)
        if self.a.ndim != 2 or self.b.ndim != 2 or self.a.shape[1] != self.b.shape[1]:
            raise ValueError("a and b must be (n, d) arrays of equal dimension")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1]

    def point_a(self, i):
        return tuple(int(c) for c in self.a[i])

    def point_b(self, i):
        return tuple(int(c) for c in self.b[i])


@dataclass
class OvInstance:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.int64)
        self.b = np.asarray(self.b, dtype=np.int64)
        for arr in (self.a, self.b):
            if arr.ndim != 2 or not np.isin(arr, (0, 1)).all():
                raise ValueError("entries must be 0/1 vectors")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.a.shape[1]


@dataclass
class SolveReport:
    solver: str
    answer: tuple | None
    dist_sq: int | None = None
    oracle_calls: int = 0
    failure_events: int = 0
    retries: int = 0
    ledger: qsim.CostLedger | None = None
    extras: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        rec = {
            "solver": self.solver,
            "answer": list(self.answer) if self.answer is not None else None,
            "dist_sq": self.dist_sq,
            "oracle_calls": self.oracle_calls,
            "failure_events": self.failure_events,
            "retries": self.retries,
        }
        if self.ledger is not None:
            rec["ledger"] = {
                "setup": self.ledger.setup, "update": self.ledger.update,
                "check": self.ledger.check, "eps": self.ledger.eps,
                "delta": self.ledger.delta, "total": self.ledger.total,
            }
        rec.update({k: v for k, v in self.extras.items()})
        return rec


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _effective_eps(eps_sq: Fraction) -> Fraction:
    """Positive grid threshold answering 'dist_sq <= eps_sq' for eps_sq >= 0."""
    if eps_sq < 0:
        raise ValueError("eps_sq must be nonnegative")
    # Integer squared distances: a threshold in (0, 1) captures exactly dist 0.
    return eps_sq if eps_sq > 0 else Fraction(1, 2)


def _subset_size(n: int) -> int:
    return min(n, max(2, math.ceil(n ** (2.0 / 3.0))))


# ---------------------------------------------------------------------------
# CP decision and search
# ---------------------------------------------------------------------------

def _walk_schedule_for(n: int, r: int) -> tuple[int, int]:
    cal = qsim.load_calibration()
    eps = max(1e-9, (r * (r - 1)) / (n * (n - 1)) if n > 1 else 1.0)
    delta = 1.0 / r
    t_walk, t_outer = qsim.walk_schedule(eps, delta, cal)
    return min(t_walk, 64), min(t_outer, 16)


def _augmented_walk(inst: CpInstance, grid: GridParams, eps_sq: Fraction,
                    rng, report: SolveReport):
    """One walk run over a random r-subset; returns a verified pair or None."""
    n = inst.n
    r = _subset_size(n)
    t_walk, t_outer = _walk_schedule_for(n, r)
    subset = rng.sample(range(n), r)
    h = AugmentedStructure(grid, n, r + 1, 1 << inst.m, seed=rng.randrange(2 ** 32))
    for i in subset:
        h.insert(i, inst.point(i))
    if h.failed:
        report.failure_events += sum(h.failure_events.values())
    inside = set(subset)
    for _ in range(t_outer):
        if h.has_close_pair():
            pair = h.find_close_pair()
            if dist_sq(inst.point(pair[0]), inst.point(pair[1])) <= eps_sq:
                return pair
        for _ in range(t_walk):
            out = rng.choice(sorted(inside))
            stay = [j for j in range(n) if j not in inside]
            if not stay:
                break
            new = rng.choice(stay)
            h.delete(out, inst.point(out))
            h.insert(new, inst.point(new))
            inside.discard(out)
            inside.add(new)
    if h.has_close_pair():
        pair = h.find_close_pair()
        if dist_sq(inst.point(pair[0]), inst.point(pair[1])) <= eps_sq:
            return pair
    return None


def _decide_exact_walk(inst: CpInstance, grid: GridParams, eps_sq: Fraction, rng):
    """Exact-amplitude walk decision for tiny instances (n <= 10)."""
    n = inst.n
    r = _subset_size(n)
    chain = qsim.johnson_chain(n, r)

    def marked(v):
        pts = [inst.point(i) for i in v]
        return any(dist_sq(pts[i], pts[j]) <= eps_sq
                   for i in range(len(v)) for j in range(i + 1, len(v)))

    ws = qsim.WalkSystem.from_chain(chain, marked)
    frac = ws.marked_fraction()
    if frac == 0:
        return None
    t_walk, t_outer = qsim.walk_schedule(float(frac), float(chain.spectral_gap()))
    success = qsim.mnrs_run(ws, t_walk, t_outer)
    if rng.random() >= success:
        return None
    marked_vs = [v for v, m in zip(chain.vertices, ws.marked) if m]
    v = marked_vs[rng.randrange(len(marked_vs))]
    h = AugmentedStructure(grid, n, len(v) + 1, 1 << inst.m, seed=rng.randrange(2 ** 32))
    for i in v:
        h.insert(i, inst.point(i))
    pair = h.find_close_pair()
    if pair is None:
        return None
    return pair


def cp_eps_decide(inst: CpInstance, eps_sq, mode: str = "real", rng=None,
                  report: SolveReport | None = None, walk_runs: int = 1,
                  exact_walk: bool = False):
    """Find a pair at squared distance <= eps_sq, or None.

    Real mode runs the calibrated subset walk first (exercising the augmented
    structure along the walk path), then settles the decision with one
    deterministic full-set structure whose root flag is exact.  Boundary is
    inclusive: a planted pair at distance exactly eps is returned.
    """
    if mode == "cost":
        raise ValueError("use cp_eps_cost for cost mode")
    rng = rng or random.Random()
    report = report if report is not None else SolveReport("cp_eps_decide", None)
    eps_sq = _as_fraction(eps_sq)
    eff = _effective_eps(eps_sq)
    grid = GridParams(inst.d, eff)
    if inst.n < 2:
        return None
    if exact_walk and inst.n <= 10:
        pair = _decide_exact_walk(inst, grid, eps_sq, rng)
        if pair is not None:
            return pair
    else:
        for _ in range(walk_runs):
            pair = _augmented_walk(inst, grid, eps_sq, rng, report)
            if pair is not None:
                return pair
    # Deterministic settlement: full-set structure, exact root flag.
    for attempt in range(MAX_RETRIES + 1):
        h = AugmentedStructure(grid, inst.n, inst.n, 1 << inst.m,
                               seed=rng.randrange(2 ** 32))
        for i in range(inst.n):
            h.insert(i, inst.point(i))
        if h.failed:
            report.failure_events += sum(h.failure_events.values())
            report.retries += 1
            if attempt < MAX_RETRIES:
                continue
        break
    if not h.has_close_pair():
        return None
    pair = h.find_close_pair()
    d2 = dist_sq(inst.point(pair[0]), inst.point(pair[1]))
    if d2 > eps_sq:
        raise InternalConsistencyError("structure returned a far pair")
    return pair


def _geometric_pivot(lo: int, hi: int) -> int:
    """Integer pivot near the distance-space midpoint of (sqrt(lo), sqrt(hi))."""
    base = max(lo, 0)
    mid = (base + hi + 2 * math.isqrt(base * hi)) // 4
    return min(max(mid, lo + 1), hi - 1)


def cp_solve(inst: CpInstance, mode: str = "real", rng=None,
             exact_walk: bool = False) -> SolveReport:
    """Exact closest pair by bisection over the decision oracle.

    Maintains an attained witness hi (snapped to each returned pair's exact
    squared distance) and a certified-empty lo; terminates with lo = hi - 1,
    so the witness is exactly the closest pair.
    """
    if inst.n < 2:
        raise ValueError("need n >= 2")
    rng = rng or random.Random()
    report = SolveReport("cp_solve", None)
    p0, p1 = inst.point(0), inst.point(1)
    hi = dist_sq(p0, p1)
    witness = (0, 1)
    lo = -1
    while lo < hi - 1:
        pivot = _geometric_pivot(lo, hi)
        res = cp_eps_decide(inst, Fraction(pivot), "real", rng, report,
                            exact_walk=exact_walk)
        report.oracle_calls += 1
        if res is None:
            lo = pivot
        else:
            witness = res
            hi = dist_sq(inst.point(res[0]), inst.point(res[1]))
    report.answer = witness
    report.dist_sq = hi
    return report


# ---------------------------------------------------------------------------
# Algorithm for multiple eps-close pairs (shrink to a unique solution)
# ---------------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def even_prime_power(t: int) -> int:
    """Smallest even prime power in [t, 9t/8], else smallest power of 4 >= t."""
    limit = (9 * t) // 8
    best = None
    p = 2
    while p * p <= limit:
        if _is_prime(p):
            q = p * p
            while q < t:
                q *= p * p
            if t <= q <= limit and (best is None or q < best):
                best = q
        p += 1
    if best is not None:
        return best
    q = 4
    while q < t:
        q *= 4
    return q


def _basic_walk_search(inst: CpInstance, universe: list[int], grid: GridParams,
                       eps_sq: Fraction, rng, report: SolveReport):
    """One unique-solution walk run over a random subset of the universe."""
    t = len(universe)
    r = min(t, max(2, math.ceil(t ** (2.0 / 3.0))))
    t_walk, t_outer = _walk_schedule_for(max(t, 2), r)
    subset = set(rng.sample(universe, r))
    h = BasicStructure(grid, inst.n, r + 1, 1 << inst.m, seed=rng.randrange(2 ** 32))
    try:
        for i in sorted(subset):
            h.insert(i, inst.point(i))
        for _ in range(t_outer):
            if h.has_close_pair():
                pair = h.find_close_pair()
                if dist_sq(inst.point(pair[0]), inst.point(pair[1])) <= eps_sq:
                    return pair
            for _ in range(t_walk):
                out = rng.choice(sorted(subset))
                stay = [j for j in universe if j not in subset]
                if not stay:
                    break
                new = rng.choice(stay)
                h.delete(out, inst.point(out))
                h.insert(new, inst.point(new))
                subset.discard(out)
                subset.add(new)
        if h.has_close_pair():
            pair = h.find_close_pair()
            if dist_sq(inst.point(pair[0]), inst.point(pair[1])) <= eps_sq:
                return pair
    except (PromiseViolationError, InternalConsistencyError):
        # More than one pair inside the walked subset; count and move on.
        report.failure_events += 1
    return None


def cp_multi_to_unique(inst: CpInstance, eps_sq, rng=None,
                       walk_attempts: int = 4) -> SolveReport:
    """Multiple-pair CP_eps via shrink-to-unique rounds over the basic tree.

    Each round walks random subsets of the current universe with the basic
    radix tree; on failure the universe is shrunk through a seeded random
    permutation of [q] (q the next even prime power) keeping the first
    ceil(4q/5) slots, truncated to floor(9|T|/10) so the per-round shrink
    ratio never exceeds 9/10.  Below n^(2/3) survivors, Grover search over
    the remaining pairs finishes the job.
    """
    rng = rng or random.Random()
    eps_sq = _as_fraction(eps_sq)
    eff = _effective_eps(eps_sq)
    grid = GridParams(inst.d, eff)
    report = SolveReport("cp_multi_to_unique", None)
    shrink_ratios = []
    universe = list(range(inst.n))
    threshold = max(2.0, inst.n ** (2.0 / 3.0))
    while len(universe) > threshold:
        for _ in range(walk_attempts):
            pair = _basic_walk_search(inst, universe, grid, eps_sq, rng, report)
            if pair is not None:
                report.answer = pair
                report.dist_sq = dist_sq(inst.point(pair[0]), inst.point(pair[1]))
                report.extras["shrink_ratios"] = shrink_ratios
                return report
        t = len(universe)
        q = even_prime_power(t)
        perm = list(range(q))
        rng.shuffle(perm)
        keep_slots = math.ceil(4 * q / 5)
        ranked = sorted(
            (perm[u], universe[u]) for u in range(t) if perm[u] < keep_slots)
        cap = (9 * t) // 10
        universe = sorted(ix for _, ix in ranked[:cap])
        shrink_ratios.append(len(universe) / t)
        if not universe:
            break
    # Grover fallback over the remaining pairs.
    pairs = [(i, j) for k, i in enumerate(universe) for j in universe[k + 1:]]
    if pairs:
        idx, queries = qsim.grover_search_list(
            pairs,
            lambda ij: dist_sq(inst.point(ij[0]), inst.point(ij[1])) <= eps_sq,
            rng)
        report.extras["grover_queries"] = queries
        if idx is not None:
            pair = pairs[idx]
            report.answer = pair
            report.dist_sq = dist_sq(inst.point(pair[0]), inst.point(pair[1]))
    report.extras["shrink_ratios"] = shrink_ratios
    return report


# ---------------------------------------------------------------------------
# Bichromatic solvers
# ---------------------------------------------------------------------------

def _bi_full_structure(inst: BcpInstance, grid: GridParams, rng,
                       report: SolveReport) -> BichromaticStructure:
    for attempt in range(MAX_RETRIES + 1):
        h = BichromaticStructure(grid, max(inst.n, inst.b.shape[0]),
                                 max(inst.n, inst.b.shape[0]),
                                 1 << inst.m, seed=rng.randrange(2 ** 32))
        for i in range(inst.a.shape[0]):
            h.insert(i, inst.point_a(i), "A")
        for j in range(inst.b.shape[0]):
            h.insert(j, inst.point_b(j), "B")
        if h.failed:
            report.failure_events += sum(h.failure_events.values())
            report.retries += 1
            if attempt < MAX_RETRIES:
                continue
        break
    return h


def bcp_approx_decide(inst: BcpInstance, eps_sq, xi, mode: str = "real",
                      rng=None, report: SolveReport | None = None,
                      walk_runs: int = 1):
    """Gap decision: a cross pair at distance <= (1+xi) eps when one exists
    at <= eps; None when all cross pairs exceed (1+xi) eps; either in the gap.

    Uses the bichromatic structure on the xi/2-scale grid; the root flag
    witnesses a cross pair in equal or eps-neighboring boxes, which the
    finer grid sandwiches inside (eps, (1+xi) eps].
    """
    if mode == "cost":
        raise ValueError("use bcp_approx_cost for cost mode")
    rng = rng or random.Random()
    report = report if report is not None else SolveReport("bcp_approx_decide", None)
    xi = _as_fraction(xi)
    if xi <= 0:
        raise ValueError("xi must be positive")
    eps_sq = _as_fraction(eps_sq)
    eff = _effective_eps(eps_sq)
    grid = GridParams(inst.d, eff, xi / 2)
    na, nb = inst.a.shape[0], inst.b.shape[0]
    if na == 0 or nb == 0:
        return None
    limit = (1 + xi) * (1 + xi) * eff

    # Walk phase over r-subsets of each color (tensor-product walk steps).
    r = min(min(na, nb), max(2, math.ceil(max(na, nb) ** (2.0 / 3.0))))
    t_walk, t_outer = _walk_schedule_for(max(na, nb), r)
    for _ in range(walk_runs):
        sub_a = set(rng.sample(range(na), r))
        sub_b = set(rng.sample(range(nb), r))
        h = BichromaticStructure(grid, max(na, nb), r + 1, 1 << inst.m,
                                 seed=rng.randrange(2 ** 32))
        for i in sorted(sub_a):
            h.insert(i, inst.point_a(i), "A")
        for j in sorted(sub_b):
            h.insert(j, inst.point_b(j), "B")
        if h.failed:
            report.failure_events += sum(h.failure_events.values())
        for _ in range(t_outer):
            if h.has_close_pair():
                ia, jb = h.find_close_pair()
                d2 = dist_sq(inst.point_a(ia), inst.point_b(jb))
                if d2 <= limit:
                    return ia, jb
            for _ in range(t_walk):
                for color, sub, size, pt in (("A", sub_a, na, inst.point_a),
                                             ("B", sub_b, nb, inst.point_b)):
                    stay = [j for j in range(size) if j not in sub]
                    if not stay:
                        continue
                    out = rng.choice(sorted(sub))
                    new = rng.choice(stay)
                    h.delete(out, pt(out), color)
                    h.insert(new, pt(new), color)
                    sub.discard(out)
                    sub.add(new)

    h = _bi_full_structure(inst, grid, rng, report)
    if not h.has_close_pair():
        return None
    ia, jb = h.find_close_pair()
    d2 = dist_sq(inst.point_a(ia), inst.point_b(jb))
    if d2 > limit:
        raise InternalConsistencyError("bichromatic structure returned a far pair")
    return ia, jb


def bcp_approx_solve(inst: BcpInstance, xi, mode: str = "real",
                     rng=None) -> SolveReport:
    """(1+xi)-approximate BCP via multiplicative-window bisection.

    Invariant: lo is a certified-empty squared threshold (min^2 > lo) and the
    witness has exact squared distance hi; the loop ends once
    hi <= (1+xi)^2 lo, which forces witness <= (1+xi) * optimum.
    """
    rng = rng or random.Random()
    xi = _as_fraction(xi)
    report = SolveReport("bcp_approx_solve", None)
    na, nb = inst.a.shape[0], inst.b.shape[0]
    if na == 0 or nb == 0:
        raise ValueError("both colors must be nonempty")
    opx_sq = (1 + xi) * (1 + xi)
    hi = dist_sq(inst.point_a(0), inst.point_b(0))
    witness = (0, 0)
    if hi == 0:
        report.answer, report.dist_sq = witness, 0
        return report
    res = bcp_approx_decide(inst, Fraction(1, 2), xi, "real", rng, report)
    report.oracle_calls += 1
    if res is not None:
        d2 = dist_sq(inst.point_a(res[0]), inst.point_b(res[1]))
        if d2 == 0:
            report.answer, report.dist_sq = res, 0
            return report
        witness, hi = res, d2
    lo = Fraction(1, 2)
    while hi > opx_sq * lo:
        pivot = Fraction(math.isqrt(int(lo * hi)))
        if pivot <= lo or pivot >= hi:
            pivot = (lo + hi) / 2
        res = bcp_approx_decide(inst, pivot, xi, "real", rng, report)
        report.oracle_calls += 1
        if res is None:
            lo = pivot
        else:
            witness = res
            hi = dist_sq(inst.point_a(res[0]), inst.point_b(res[1]))
            if hi == 0:
                break
    report.answer = witness
    report.dist_sq = hi
    return report


def _thm57_block_size(n: int, d: int) -> int:
    if d <= 1:
        return 1
    return max(1, round(n ** (1.0 / d) / (d - 1) ** (2.0 / d)))


def bcp_exact_solve(inst: BcpInstance, mode: str = "real", rng=None,
                    inner_reps: int | None = None) -> SolveReport:
    """Exact BCP: partition A into blocks, nearest-neighbor structure per
    block, nested quantum minimum finding (inner over B, outer over blocks).

    The per-block NN structure is an exact k-d tree; inner searches run
    ceil(log2 n)+3 times in parallel with the minimum taken, so a run
    returns a true bichromatic closest pair with probability >= 0.9.
    """
    rng = rng or random.Random()
    report = SolveReport("bcp_exact_solve", None)
    na, nb = inst.a.shape[0], inst.b.shape[0]
    if na == 0 or nb == 0:
        raise ValueError("both colors must be nonempty")
    n = max(na, nb)
    d = inst.d
    r = _thm57_block_size(na, d)
    report.extras["block_size"] = r
    if inner_reps is None:
        inner_reps = math.ceil(math.log2(max(2, n))) + 3

    n_blocks = na // r
    queries = 0
    candidates = []          # (dist_sq, a_global, b_idx) per block, inner result
    B = inst.b
    for blk in range(n_blocks):
        lo_idx = blk * r
        block = inst.a[lo_idx:lo_idx + r]
        tree = cKDTree(block)
        _, nn = tree.query(B, k=1)
        nn = np.atleast_1d(nn)
        diffs = B - block[nn]
        d2 = (diffs * diffs).sum(axis=1)
        best = None
        for _ in range(inner_reps):
            idx, q = qsim.quantum_min_find(d2, rng)
            queries += q
            if best is None or d2[idx] < d2[best]:
                best = idx
        candidates.append((int(d2[best]), lo_idx + int(nn[best]), int(best)))

    if candidates:
        vals = np.array([c[0] for c in candidates])
        idx, q = qsim.quantum_min_find(vals, rng)
        queries += q
        best = candidates[idx]
    else:
        best = None

    # Residual block (n not divisible by r): direct quantum search.
    rem = inst.a[n_blocks * r:]
    if rem.shape[0]:
        diffs = rem[:, None, :] - B[None, :, :]
        d2 = (diffs * diffs).sum(axis=2).ravel()
        idx, q = qsim.quantum_min_find(d2, rng)
        queries += q
        ai, bi = divmod(int(idx), nb)
        cand = (int(d2[idx]), n_blocks * r + ai, bi)
        if best is None or cand[0] < best[0]:
            best = cand

    report.answer = (best[1], best[2])
    report.dist_sq = dist_sq(inst.point_a(best[1]), inst.point_b(best[2]))
    report.oracle_calls = queries
    return report


# ---------------------------------------------------------------------------
# Orthogonal vectors and the minimum-finding baseline
# ---------------------------------------------------------------------------

def ov_solve(inst: OvInstance, mode: str = "real", rng=None,
             d_max: int = 12) -> SolveReport:
    """Constant-dimension OV: Grover presence checks per value, then a scan
    of all value pairs, then Grover extraction of witness indices."""
    rng = rng or random.Random()
    report = SolveReport("ov_solve", None)
    d = inst.d
    if d > d_max:
        raise ValueError(f"dimension {d} above cap {d_max}")
    weights = 1 << np.arange(d, dtype=np.int64)
    av = (inst.a * weights).sum(axis=1)
    bv = (inst.b * weights).sum(axis=1)
    queries = 0
    present_a = np.zeros(1 << d, dtype=bool)
    present_b = np.zeros(1 << d, dtype=bool)
    for v in range(1 << d):
        ia, q = qsim._sample_grover_over_mask(av == v, rng)
        queries += q
        present_a[v] = ia is not None or bool((av == v).any())
        jb, q = qsim._sample_grover_over_mask(bv == v, rng)
        queries += q
        present_b[v] = jb is not None or bool((bv == v).any())
    report.extras["presence_queries"] = queries

    found = None
    for v in range(1 << d):
        if not present_a[v]:
            continue
        for w in range(1 << d):
            if present_b[w] and (v & w) == 0:
                found = (v, w)
                break
        if found:
            break
    if found is None:
        report.oracle_calls = queries
        return report
    v, w = found
    ia, q1 = qsim._sample_grover_over_mask(av == v, rng)
    jb, q2 = qsim._sample_grover_over_mask(bv == w, rng)
    queries += q1 + q2
    if ia is None:
        ia = int(np.flatnonzero(av == v)[0])
    if jb is None:
        jb = int(np.flatnonzero(bv == w)[0])
    report.answer = (ia, jb)
    report.extras["inner_product"] = int((inst.a[ia] * inst.b[jb]).sum())
    report.oracle_calls = queries
    return report


def baseline_minfind_solve(inst, rng=None, reps: int = 3) -> SolveReport:
    """Trivial baseline: quantum minimum finding over all pair distances."""
    rng = rng or random.Random()
    report = SolveReport("baseline_minfind", None)
    if isinstance(inst, BcpInstance):
        diffs = inst.a[:, None, :] - inst.b[None, :, :]
        d2 = (diffs * diffs).sum(axis=2).ravel()
        nb = inst.b.shape[0]
        decode = lambda k: divmod(int(k), nb)
    else:
        n = inst.n
        iu, ju = np.triu_indices(n, k=1)
        diffs = inst.points[iu] - inst.points[ju]
        d2 = (diffs * diffs).sum(axis=1)
        decode = lambda k: (int(iu[k]), int(ju[k]))
    queries = 0
    best = None
    for _ in range(reps):
        idx, q = qsim.quantum_min_find(d2, rng)
        queries += q
        if best is None or d2[idx] < d2[best]:
            best = idx
    report.answer = decode(best)
    report.dist_sq = int(d2[best])
    report.oracle_calls = queries
    return report


def ed_to_cp(values) -> CpInstance:
    """Element distinctness as 1-d CP: distinct iff min distance > 0."""
    vals = [int(v) for v in values]
    base = min(vals) if vals else 0
    shifted = [v - base for v in vals]
    top = max(shifted) if shifted else 1
    m = max(1, top.bit_length())
    return CpInstance(np.array(shifted, dtype=np.int64)[:, None], m)


# ---------------------------------------------------------------------------
# Cost mode (query-unit ledgers; time-unit factors reported alongside)
# ---------------------------------------------------------------------------

def _time_unit_factor(n: int, d: int, m: int | None, neighbor_bound: int) -> float:
    L = float(1 << (m if m is not None else max(1, math.ceil(math.log2(n + 1)))))
    return d + math.log2(n + L) ** 4 + d * neighbor_bound


def cp_eps_cost(n: int, d: int, m: int | None = None, unit: str = "query") -> dict:
    """Walk-search ledger for the single-shot CP_eps solver at size n."""
    r = max(2, math.ceil(n ** (2.0 / 3.0)))
    eps = min(1.0, (r / n) ** 2)
    delta = 1.0 / r
    u = 1.0 if unit == "query" else _time_unit_factor(n, d, m, neighbor_count_bound(d))
    ledger = qsim.cost_eval(r * u, u, 1.0, eps, delta)
    return {"ledger": ledger, "total": ledger.total, "r": r, "unit": unit,
            "n": n, "d": d}


def bcp_approx_cost(n: int, d: int, xi, m: int | None = None,
                    unit: str = "query") -> dict:
    xi = _as_fraction(xi)
    r = max(2, math.ceil(n ** (2.0 / 3.0)))
    eps = min(1.0, (r / n) ** 2)
    delta = 1.0 / r
    nb = scaled_neighbor_count_bound(d, xi)
    u = 1.0 if unit == "query" else _time_unit_factor(n, d, m, nb)
    ledger = qsim.cost_eval(2 * r * u, u, 1.0, eps, delta)
    return {"ledger": ledger, "total": ledger.total, "r": r, "unit": unit,
            "neighbor_bound": nb, "n": n, "d": d}


def bcp_exact_cost(n: int, d: int, nn_cost: str = "paper") -> dict:
    """Partition-solver cost: sqrt(n/r) * (r^(d/2) + sqrt(n) * q_nn).

    nn_cost='paper' charges each NN query one query (its O(log n) time is
    reported in 'nn_query_time'); nn_cost='kdtree' charges the k-d tree's
    worst-case r^(1-1/d) per query.
    """
    if d < 1:
        raise ValueError("d >= 1 required")
    if d == 1:
        r = 1.0
    else:
        r = n ** (1.0 / d) / (d - 1) ** (2.0 / d)
    if nn_cost == "paper":
        q_nn = 1.0
    elif nn_cost == "kdtree":
        q_nn = r ** (1.0 - 1.0 / d)
    else:
        raise ValueError("nn_cost must be 'paper' or 'kdtree'")
    inner = r ** (d / 2.0) + math.sqrt(n) * q_nn
    total = math.sqrt(n / r) * inner
    return {"total": total, "r": r, "inner": inner, "nn_cost": nn_cost,
            "nn_query_time": math.log2(max(2, n)), "n": n, "d": d}


def ov_cost(n: int, d: int) -> dict:
    presence = (2 ** (d + 1)) * (math.pi / 4) * math.sqrt(n)
    table = 4 ** d
    extract = 2 * (math.pi / 4) * math.sqrt(n)
    return {"presence": presence, "table": table, "extract": extract,
            "total": presence + table + extract, "n": n, "d": d}


def baseline_cost(n: int, d: int) -> dict:
    total = 22.5 * n * d
    return {"total": total, "n": n, "d": d}
