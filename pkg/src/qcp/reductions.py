"""Executable fine-grained gadget reductions with per-query cost counters.

Three reductions, each realized as an on-the-fly oracle rather than a
materialized instance:

- CNF-SAT -> OV: half-assignments map to clause-indicator vectors; the
  formula is satisfiable iff some cross pair is orthogonal.
- OV -> BCP (Hamming): each 0/1 coordinate expands to a 5-bit block
  (a-side 11000/00110, b-side 10100/01001); the per-coordinate Hamming
  contribution is 2 + 2*a*b, so the bichromatic minimum is 2d exactly when
  an orthogonal pair exists.
- Z-OV -> BCP (padding): x -> [outer(x, x), sqrt(W - |x'|^2), 0] and
  y -> [-outer(y, y), 0, sqrt(W - |y'|^2)] with W = (d^2+1) n^(4k); the
  square roots are never materialized because every squared cross distance
  equals 2W + 2<x, y>^2 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CnfFormula",
    "VectorOracle",
    "sat_to_ov",
    "ov_to_bcp",
    "PaddedBcpPoint",
    "ZovBcpInstance",
    "zov_to_bcp",
    "reduction_cost_ledger",
    "parse_dimacs",
    "to_dimacs",
]

A_SIDE_BLOCKS = {0: (1, 1, 0, 0, 0), 1: (0, 0, 1, 1, 0)}
B_SIDE_BLOCKS = {0: (1, 0, 1, 0, 0), 1: (0, 1, 0, 0, 1)}


# ---------------------------------------------------------------------------
# CNF formulas and DIMACS
# ---------------------------------------------------------------------------

@dataclass
class CnfFormula:
    n_vars: int
    clauses: list[list[int]]        # signed 1-based literals

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF (comments, header, 0-terminated clauses)."""
    n_vars = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            n_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    if n_vars is None:
        n_vars = max((abs(l) for c in clauses for l in c), default=0)
    return CnfFormula(n_vars, clauses)


def to_dimacs(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.n_vars} {phi.n_clauses}"]
    for clause in phi.clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Vector oracles
# ---------------------------------------------------------------------------

@dataclass
class VectorOracle:
    """Lazy index -> vector map with a per-query operation counter."""

    side: str
    size: int
    dim: int
    _fn: callable = field(repr=False)
    queries: int = 0
    ops: int = 0
    max_query_ops: int = 0

    def __call__(self, i: int) -> tuple[int, ...]:
        if not (0 <= i < self.size):
            raise IndexError(f"oracle index {i} out of range")
        vec, ops = self._fn(i)
        self.queries += 1
        self.ops += ops
        self.max_query_ops = max(self.max_query_ops, ops)
        return vec

    def all_vectors(self) -> np.ndarray:
        return np.array([self(i) for i in range(self.size)], dtype=np.int64)


def sat_to_ov(phi: CnfFormula) -> tuple[VectorOracle, VectorOracle]:
    """Lemma-style CNF-SAT -> OV oracles over the two half-assignment sets.

    Variables are split into halves A (vars 1..n/2) and B (rest); a formula
    with odd n gets one dummy variable.  Index bits encode the assignment
    (bit t of index j is the value of the t-th variable in the half);
    entry c of the output vector is 0 iff the half-assignment already
    satisfies clause c.  An orthogonal cross pair exists iff phi is
    satisfiable.
    """
    n = phi.n_vars
    if n % 2 == 1:
        n += 1
    half = n // 2
    clauses = [list(c) for c in phi.clauses]
    m = len(clauses)

    def make(side: str) -> VectorOracle:
        lo = 1 if side == "A" else half + 1
        hi = half if side == "A" else n

        def fn(j: int):
            ops = 0
            out = []
            for clause in clauses:
                sat = 0
                for lit in clause:
                    v = abs(lit)
                    ops += 1
                    if lo <= v <= hi:
                        bit = (j >> (v - lo)) & 1
                        if (lit > 0) == bool(bit):
                            sat = 1
                            break
                out.append(0 if sat else 1)
            return tuple(out), ops + m

        return VectorOracle(side, 1 << half, m, fn)

    return make("A"), make("B")


def ov_to_bcp(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """0/1 OV instance -> Hamming BCP instance of dimension 5d.

    Per coordinate the cross Hamming contribution is 2 + 2*a*b, so the
    bichromatic minimum Hamming distance is 2d iff OV answers yes.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if not np.isin(A, (0, 1)).all() or not np.isin(B, (0, 1)).all():
        raise ValueError("entries must be 0/1")

    def expand(arr, blocks):
        n, d = arr.shape
        out = np.empty((n, 5 * d), dtype=np.int64)
        for j in range(d):
            for bit in (0, 1):
                rows = arr[:, j] == bit
                out[rows, 5 * j:5 * j + 5] = blocks[bit]
        return out

    return expand(A, A_SIDE_BLOCKS), expand(B, B_SIDE_BLOCKS)


# ---------------------------------------------------------------------------
# Z-OV -> BCP padding gadget
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PaddedBcpPoint:
    """One side of the padded instance, with exact squared-norm bookkeeping.

    base is the flattened outer product x'_{i,j} = x_i * x_j (negated for
    side B); the two padding coordinates sqrt(W - |base|^2) are kept as the
    integer W - |base|^2 under the square root, never evaluated.
    """

    side: str
    vector: tuple[int, ...]        # the original integer vector x
    base: tuple[int, ...]          # x' of dimension d^2
    pad_sq: int                    # W - |base|^2, the squared pad coordinate
    W: int

    @property
    def dim(self) -> int:
        return len(self.base) + 2


@dataclass
class ZovBcpInstance:
    a: list[PaddedBcpPoint]
    b: list[PaddedBcpPoint]
    W: int

    def cross_dist_sq(self, i: int, j: int) -> int:
        return padded_dist_sq(self.a[i], self.b[j])


def _outer_flat(x: np.ndarray, negate: bool) -> tuple[int, ...]:
    outer = np.outer(x, x).ravel()
    if negate:
        outer = -outer
    return tuple(int(v) for v in outer)


def padded_dist_sq(p: PaddedBcpPoint, q: PaddedBcpPoint) -> int:
    """|p'' - q''|^2 = 2W + 2<x, y>^2, evaluated exactly in integers."""
    if p.side == q.side:
        raise ValueError("cross pairs only")
    dot = sum(a * b for a, b in zip(p.vector, q.vector))
    return 2 * p.W + 2 * dot * dot


def zov_to_bcp(A, B, n_nominal: int, k: int = 1) -> ZovBcpInstance:
    """Integer OV instance -> padded BCP instance with W = (d^2+1) n^(4k).

    Requires |entries| <= n_nominal**k so that W dominates |x'|^2; cross
    squared distances are then 2W + 2<x, y>^2 and equal 2W exactly on the
    orthogonal pairs.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError("A and B must be (n, d) with equal d")
    d = A.shape[1]
    bound = n_nominal ** k
    if max(int(np.abs(A).max(initial=0)), int(np.abs(B).max(initial=0))) > bound:
        raise ValueError(f"entry magnitude exceeds n^k = {bound}")
    W = (d * d + 1) * n_nominal ** (4 * k)

    def make(arr, side, negate):
        pts = []
        for row in arr:
            base = _outer_flat(row, negate)
            norm_sq = sum(v * v for v in base)
            if norm_sq >= W:
                raise ValueError("padding is not positive; raise n_nominal or k")
            pts.append(PaddedBcpPoint(side, tuple(int(v) for v in row),
                                      base, W - norm_sq, W))
        return pts

    return ZovBcpInstance(make(A, "A", False), make(B, "B", True), W)


# ---------------------------------------------------------------------------
# Reduction cost bookkeeping
# ---------------------------------------------------------------------------

def reduction_cost_ledger(oracles, downstream_sizes, p_of_n: float,
                          eps: float = 0.0, delta: float = 0.0,
                          d_const: float = 1.0) -> dict:
    """Bookkeeping record for the fine-grained budget inequality.

    Reports k(n) (number of oracle batches), the max per-query realization
    cost c of each batch, the downstream sizes n_j, and both sides of
    sum_j c_j * q(n_j)^(1-eps) <= d * p(n)^(1-delta) with q(n) = n.
    This is a report, not a proof.
    """
    batches = []
    lhs = 0.0
    for oracle, n_j in zip(oracles, downstream_sizes):
        c = oracle.max_query_ops if oracle.queries else 0
        batches.append({"side": oracle.side, "size": oracle.size,
                        "dim": oracle.dim, "queries": oracle.queries,
                        "max_query_ops": c, "n_j": n_j})
        lhs += c * (n_j ** (1.0 - eps))
    rhs = d_const * (p_of_n ** (1.0 - delta))
    return {
        "k_n": len(batches),
        "batches": batches,
        "lhs": lhs,
        "rhs": rhs,
        "holds": lhs <= rhs,
        "eps": eps,
        "delta": delta,
    }
