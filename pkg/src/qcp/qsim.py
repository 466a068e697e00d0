"""Desk-scale quantum subroutine simulators and the walk-search cost model.

Grover search and minimum finding are simulated by sampling outcomes from
the closed-form success probability sin^2((2k+1)*asin(sqrt(M/N))), with the
standard exponential schedule when the number of marked items is unknown.
The Szegedy walk is simulated exactly on the edge space of a (product of)
Johnson chain(s): the state is an N x N amplitude matrix Psi with
Psi[x, y] = <x, y|psi>, and the walk operator is the product of the two
reflections, applied in O(N^2) without materializing an N^2 x N^2 matrix.

Cost accounting follows the walk-search formula

    total = S + (1/sqrt(eps)) * ((1/sqrt(delta)) * U + C),

with eps the marked fraction and delta the chain's spectral gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

__all__ = [
    "GroverRun",
    "grover_simulate",
    "grover_search_list",
    "quantum_min_find",
    "JohnsonChain",
    "johnson_chain",
    "johnson_eigenvalues",
    "tensor_chain",
    "SzegedyWalk",
    "WalkSystem",
    "mnrs_run",
    "CostLedger",
    "cost_eval",
    "load_calibration",
    "calibrate_mnrs",
    "planted_pair_walk",
]

WALK_EDGE_SPACE_CAP = 20_000
_BBHT_LAMBDA = 6.0 / 5.0


# ---------------------------------------------------------------------------
# Grover search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroverRun:
    n: int
    marked: int
    iterations: int
    success_prob: float
    query_count: int


def grover_simulate(n: int, marked: int, iterations: int) -> GroverRun:
    """Closed-form Grover outcome: success = sin^2((2k+1) asin(sqrt(M/N)))."""
    if n < 1 or not (0 <= marked <= n) or iterations < 0:
        raise ValueError("need n >= 1, 0 <= marked <= n, iterations >= 0")
    if marked == 0:
        return GroverRun(n, 0, iterations, 0.0, iterations)
    theta = math.asin(math.sqrt(marked / n))
    p = math.sin((2 * iterations + 1) * theta) ** 2
    return GroverRun(n, marked, iterations, p, iterations)


def _sample_grover_over_mask(mask: np.ndarray, rng) -> tuple[int | None, int]:
    """Unknown-M Grover (BBHT schedule) over an explicit marked mask."""
    n = int(mask.size)
    if n == 0:
        return None, 0
    n_marked = int(mask.sum())
    theta = math.asin(math.sqrt(n_marked / n)) if n_marked else 0.0
    sqn = math.sqrt(n)
    cutoff = math.ceil(4.5 * sqn) + 8
    m = 1.0
    queries = 0
    while queries < cutoff:
        k = rng.randrange(int(m))
        queries += k + 1
        if n_marked:
            p = math.sin((2 * k + 1) * theta) ** 2
            if rng.random() < p:
                hits = np.flatnonzero(mask)
                return int(hits[rng.randrange(n_marked)]), queries
        m = min(_BBHT_LAMBDA * m, sqn)
    return None, queries


def grover_search_list(items, predicate, rng) -> tuple[int | None, int]:
    """Search items for one satisfying predicate; returns (index or None, queries).

    The predicate is evaluated classically to fix the marked set; the quantum
    run is then sampled from the closed form with the standard exponential
    schedule for unknown marked count.  A successful run returns a uniformly
    random marked index.
    """
    mask = np.fromiter((bool(predicate(x)) for x in items), dtype=bool,
                       count=len(items))
    return _sample_grover_over_mask(mask, rng)


def quantum_min_find(values, rng) -> tuple[int, int]:
    """Threshold-descent minimum finding over a value sequence.

    Repeatedly Grover-searches for an element strictly below the current
    threshold until the search comes back empty or the query budget of
    ceil(22.5*sqrt(n)) + O(log^2 n) runs out.  A single run returns a true
    argmin with probability >= 1/2 (empirically much higher).
    """
    values = np.asarray(values)
    n = int(values.size)
    if n == 0:
        raise ValueError("empty value sequence")
    if n == 1:
        return 0, 0
    budget = math.ceil(22.5 * math.sqrt(n) + 1.4 * math.log2(n) ** 2)
    cur = rng.randrange(n)
    queries = 0
    while queries < budget:
        mask = values < values[cur]
        idx, q = _sample_grover_over_mask(mask, rng)
        queries += q
        if idx is None:
            break
        cur = idx
    return cur, queries


# ---------------------------------------------------------------------------
# Johnson chains
# ---------------------------------------------------------------------------

def johnson_eigenvalues(n: int, r: int) -> list[Fraction]:
    """Transition eigenvalues of J(n, r): ((r-j)(n-r-j) - j) / (r(n-r))."""
    return [Fraction((r - j) * (n - r - j) - j, r * (n - r)) for j in range(r + 1)]


@dataclass
class JohnsonChain:
    n: int
    r: int
    vertices: list[tuple[int, ...]]
    P: np.ndarray

    @property
    def size(self) -> int:
        return len(self.vertices)

    def edge_space_dim(self) -> int:
        return self.size * self.r * (self.n - self.r)

    def spectral_gap(self) -> Fraction:
        eigs = johnson_eigenvalues(self.n, self.r)
        return 1 - max(eigs[1:])

    def marked_fraction(self, marked: np.ndarray) -> Fraction:
        return Fraction(int(marked.sum()), self.size)

    def stationary(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)


def johnson_chain(n: int, r: int) -> JohnsonChain:
    """Explicit transition matrix of the Johnson graph J(n, r)."""
    if not (1 <= r < n):
        raise ValueError("need 1 <= r < n")
    verts = list(combinations(range(n), r))
    index = {v: i for i, v in enumerate(verts)}
    N = len(verts)
    P = np.zeros((N, N))
    p = 1.0 / (r * (n - r))
    for v_i, v in enumerate(verts):
        inside = set(v)
        for out in v:
            rest = inside - {out}
            for j in range(n):
                if j not in inside:
                    w = tuple(sorted(rest | {j}))
                    P[v_i, index[w]] = p
    return JohnsonChain(n, r, verts, P)


@dataclass
class TensorChain:
    """Product chain M_A (x) M_B; vertices are pairs, P = kron(P_A, P_B)."""
    a: JohnsonChain
    b: JohnsonChain
    vertices: list[tuple[tuple[int, ...], tuple[int, ...]]]
    P: np.ndarray

    @property
    def size(self) -> int:
        return len(self.vertices)

    def edge_space_dim(self) -> int:
        deg = (self.a.r * (self.a.n - self.a.r)) * (self.b.r * (self.b.n - self.b.r))
        return self.size * deg

    def spectral_gap(self) -> Fraction:
        ea = johnson_eigenvalues(self.a.n, self.a.r)
        eb = johnson_eigenvalues(self.b.n, self.b.r)
        second = max(x * y for x in ea for y in eb if not (x == 1 and y == 1))
        return 1 - second

    def stationary(self) -> np.ndarray:
        return np.full(self.size, 1.0 / self.size)


def tensor_chain(a: JohnsonChain, b: JohnsonChain) -> TensorChain:
    verts = [(va, vb) for va in a.vertices for vb in b.vertices]
    return TensorChain(a, b, verts, np.kron(a.P, b.P))


# ---------------------------------------------------------------------------
# Szegedy walk
# ---------------------------------------------------------------------------

class SzegedyWalk:
    """The unitary W = (2 Pi_B - I)(2 Pi_A - I) on the edge space of P.

    States are N x N matrices Psi, Psi[x, y] = <x, y|psi>.  Pi_A projects
    onto span{|x>|p_x>}, Pi_B onto span{|p_y>|y>}; both reflections are
    applied in O(N^2).
    """

    def __init__(self, chain):
        if chain.edge_space_dim() > WALK_EDGE_SPACE_CAP:
            raise ValueError(
                f"edge-space dimension {chain.edge_space_dim()} exceeds "
                f"cap {WALK_EDGE_SPACE_CAP}")
        P = chain.P
        if not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("chain is not row-stochastic")
        self.chain = chain
        self.U = np.sqrt(P)

    @property
    def size(self) -> int:
        return self.U.shape[0]

    def apply(self, psi: np.ndarray) -> np.ndarray:
        U = self.U
        alpha = (U * psi).sum(axis=1)
        psi = 2.0 * alpha[:, None] * U - psi
        beta = (U.T * psi).sum(axis=0)
        psi = 2.0 * U.T * beta[None, :] - psi
        return psi

    def stationary_state(self) -> np.ndarray:
        """|pi> lifted to the edge space: Psi[x, y] = sqrt(pi_x p_xy)."""
        N = self.size
        return self.U / math.sqrt(N)

    def matrix(self) -> np.ndarray:
        """Dense (N^2 x N^2) walk matrix; small chains only."""
        N = self.size
        if N > 32:
            raise ValueError("dense walk matrix limited to N <= 32")
        U = self.U
        pa = np.zeros((N * N, N * N))
        pb = np.zeros((N * N, N * N))
        for x in range(N):
            u = U[x]
            pa[x * N:(x + 1) * N, x * N:(x + 1) * N] = np.outer(u, u)
        for y in range(N):
            v = U[y]
            idx = np.arange(N) * N + y
            pb[np.ix_(idx, idx)] = np.outer(v, v)
        eye = np.eye(N * N)
        return (2 * pb - eye) @ (2 * pa - eye)


@dataclass
class WalkSystem:
    chain: JohnsonChain | TensorChain
    marked: np.ndarray
    walk: SzegedyWalk
    counters: dict = field(default_factory=lambda: {"S": 0, "U": 0, "C": 0})

    @classmethod
    def from_chain(cls, chain, marked_predicate) -> "WalkSystem":
        marked = np.fromiter((bool(marked_predicate(v)) for v in chain.vertices),
                             dtype=bool, count=len(chain.vertices))
        return cls(chain, marked, SzegedyWalk(chain))

    def marked_fraction(self) -> Fraction:
        return Fraction(int(self.marked.sum()), len(self.chain.vertices))


def mnrs_run(ws: WalkSystem, t_walk: int, t_outer: int,
              norm_tol: float = 1e-12) -> float:
    """Exact amplitude simulation of the walk-search schedule.

    Runs t_outer rounds of [phase flip on marked vertices; t_walk steps of
    W] from the stationary edge state and returns the final probability mass
    on marked vertices (first register).  Setup is charged r queries for a
    Johnson chain (r_A + r_B for a product), one U per walk step, one C per
    phase flip.
    """
    if isinstance(ws.chain, TensorChain):
        setup = ws.chain.a.r + ws.chain.b.r
    else:
        setup = ws.chain.r
    ws.counters["S"] += setup
    psi = ws.walk.stationary_state()
    for _ in range(t_outer):
        psi = psi.copy()
        psi[ws.marked, :] *= -1.0
        ws.counters["C"] += 1
        for _ in range(t_walk):
            psi = ws.walk.apply(psi)
            ws.counters["U"] += 1
            norm = float((psi * psi).sum())
            if abs(norm - 1.0) > max(norm_tol, 1e-9):
                raise ArithmeticError(f"walk lost unitarity: norm^2 = {norm}")
    return float((psi[ws.marked, :] ** 2).sum())


# ---------------------------------------------------------------------------
# Cost model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostLedger:
    setup: float
    update: float
    check: float
    eps: float
    delta: float
    total: float


def cost_eval(setup, update, check, eps, delta) -> CostLedger:
    """total = S + (1/sqrt(eps)) ((1/sqrt(delta)) U + C)."""
    eps = float(eps)
    delta = float(delta)
    if not (0 < eps <= 1) or not (0 < delta <= 1):
        raise ValueError("eps and delta must lie in (0, 1]")
    total = setup + (1.0 / math.sqrt(eps)) * ((1.0 / math.sqrt(delta)) * update + check)
    return CostLedger(float(setup), float(update), float(check), eps, delta, total)


# ---------------------------------------------------------------------------
# Calibration fixture
# ---------------------------------------------------------------------------

_CALIBRATION_PATH = Path(__file__).parent / "data" / "mnrs_calibration.txt"


def planted_pair_walk(n: int, r: int, pair=(0, 1)) -> WalkSystem:
    """J(n, r) walk with vertices marked when they contain both pair elements."""
    chain = johnson_chain(n, r)
    a, b = pair
    return WalkSystem.from_chain(chain, lambda v: a in v and b in v)


def calibrate_mnrs(instances=None, c_grid=None, target: float = 0.25,
                   slack: float = 4.0) -> dict:
    """Pick single constants (c_w, c_o) hitting the target on every instance.

    Schedules are t_walk = ceil(c_w / sqrt(delta)), t_outer = ceil(c_o /
    sqrt(eps)); feasible combinations must reach the target success on every
    instance while keeping t_walk * t_outer <= slack * (1/sqrt(eps*delta)).
    Returns the chosen constants plus the per-instance record.
    """
    if instances is None:
        instances = [("J(6,3)", planted_pair_walk(6, 3)),
                     ("J(8,4)", planted_pair_walk(8, 4))]
    if c_grid is None:
        c_grid = [0.25 * k for k in range(1, 13)]
    best = None
    for c_w in c_grid:
        for c_o in c_grid:
            records = []
            ok = True
            for name, ws in instances:
                eps = float(ws.marked_fraction())
                delta = float(ws.chain.spectral_gap())
                t_walk = math.ceil(c_w / math.sqrt(delta))
                t_outer = math.ceil(c_o / math.sqrt(eps))
                ideal = (1 / math.sqrt(eps)) * (1 / math.sqrt(delta))
                if t_walk * t_outer > slack * ideal:
                    ok = False
                    break
                succ = mnrs_run(ws, t_walk, t_outer)
                records.append((name, eps, delta, t_walk, t_outer, succ))
                if succ < target:
                    ok = False
                    break
            if not ok:
                continue
            work = max(rec[3] * rec[4] for rec in records)
            score = (work, -min(rec[5] for rec in records))
            if best is None or score < best[0]:
                best = (score, c_w, c_o, records)
    if best is None:
        raise RuntimeError("no feasible (c_w, c_o) on the grid")
    _, c_w, c_o, records = best
    return {
        "c_w": c_w,
        "c_o": c_o,
        "target": target,
        "slack": slack,
        "instances": records,
    }


def save_calibration(cal: dict, path: Path = _CALIBRATION_PATH):
    lines = [
        "# MNRS walk schedule calibration v1",
        f"c_w {cal['c_w']}",
        f"c_o {cal['c_o']}",
        f"target {cal['target']}",
        f"slack {cal['slack']}",
    ]
    for name, eps, delta, t_walk, t_outer, succ in cal["instances"]:
        lines.append(
            f"instance {name} eps={eps:.6f} delta={delta:.6f} "
            f"t_walk={t_walk} t_outer={t_outer} success={succ:.6f}")
    path.write_text("\n".join(lines) + "\n")


def load_calibration(path: Path = _CALIBRATION_PATH) -> dict:
    cal = {"instances": []}
    for line in path.read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] in ("c_w", "c_o", "target", "slack"):
            cal[parts[0]] = float(parts[1])
        elif parts[0] == "instance":
            rec = {"name": parts[1]}
            for kv in parts[2:]:
                k, v = kv.split("=")
                rec[k] = float(v)
            cal["instances"].append(rec)
    return cal


def walk_schedule(eps, delta, cal: dict | None = None) -> tuple[int, int]:
    """(t_walk, t_outer) from the calibrated constants for given eps, delta."""
    if cal is None:
        cal = load_calibration()
    t_walk = math.ceil(cal["c_w"] / math.sqrt(float(delta)))
    t_outer = math.ceil(cal["c_o"] / math.sqrt(float(eps)))
    return t_walk, t_outer
