"""Brute-force reference implementations used as ground truth by the tests.

Everything here is direct enumeration over all pairs / assignments, sharing
no code with the solvers under test.  Ties are broken lexicographically by
index pair so oracle outputs are reproducible.
"""

from __future__ import annotations

import numpy as np

PAIRWISE_CAP = 2000
SAT_CAP = 20  # 2**n assignments enumerated


def _as_int_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("expected an (n, d) array of coordinates")
    return arr


def brute_cp(points) -> tuple[int, int, int]:
    """All-pairs closest pair: (i, j, squared distance), i < j, lex-min ties."""
    pts = _as_int_array(points)
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    if n > PAIRWISE_CAP:
        raise ValueError(f"enumeration cap {PAIRWISE_CAP} exceeded")
    best = None
    for i in range(n - 1):
        d2 = ((pts[i + 1:] - pts[i]) ** 2).sum(axis=1)
        j_rel = int(np.argmin(d2))  # first minimum -> smallest j for this i
        val = int(d2[j_rel])
        if best is None or val < best[2]:
            best = (i, i + 1 + j_rel, val)
    return best


def brute_bcp(a_points, b_points) -> tuple[int, int, int]:
    """All cross pairs: (i in A, j in B, squared distance), lex-min ties."""
    A = _as_int_array(a_points)
    B = _as_int_array(b_points)
    if len(A) == 0 or len(B) == 0:
        raise ValueError("both sides must be nonempty")
    if len(A) > PAIRWISE_CAP or len(B) > PAIRWISE_CAP:
        raise ValueError(f"enumeration cap {PAIRWISE_CAP} exceeded")
    best = None
    for i in range(len(A)):
        d2 = ((B - A[i]) ** 2).sum(axis=1)
        j = int(np.argmin(d2))
        val = int(d2[j])
        if best is None or val < best[2]:
            best = (i, j, val)
    return best


def has_close_pair(points, eps_sq) -> bool:
    """Exact predicate: exists i < j with dist_sq <= eps_sq (rational eps_sq ok)."""
    pts = _as_int_array(points)
    if len(pts) < 2:
        return False
    _, _, d2 = brute_cp(pts)
    return d2 <= eps_sq


def has_close_cross_pair(a_points, b_points, eps_sq) -> bool:
    if len(a_points) == 0 or len(b_points) == 0:
        return False
    _, _, d2 = brute_bcp(a_points, b_points)
    return d2 <= eps_sq


def brute_ov(A, B) -> tuple[int, int] | None:
    """First (lex by index pair) orthogonal cross pair, or None."""
    A = _as_int_array(A)
    B = _as_int_array(B)
    dots = A @ B.T
    hits = np.argwhere(dots == 0)
    if len(hits) == 0:
        return None
    i, j = hits[0]
    return int(i), int(j)


def brute_sat(n_vars: int, clauses) -> tuple[int, ...] | None:
    """Exhaustive CNF satisfiability: a satisfying assignment (0/1 tuple) or None.

    Clauses are lists of signed 1-based literals (DIMACS convention).
    The empty formula is satisfied by the all-zero assignment.
    """
    if n_vars > SAT_CAP:
        raise ValueError(f"SAT enumeration cap 2**{SAT_CAP} exceeded")
    for mask in range(1 << n_vars):
        ok = True
        for clause in clauses:
            sat = False
            for lit in clause:
                v = abs(lit) - 1
                bit = (mask >> v) & 1
                if (lit > 0 and bit) or (lit < 0 and not bit):
                    sat = True
                    break
            if not sat:
                ok = False
                break
        if ok:
            return tuple((mask >> v) & 1 for v in range(n_vars))
    return None


def distinct(values) -> bool:
    """Sort-based element distinctness."""
    vs = sorted(values)
    return all(vs[k] != vs[k + 1] for k in range(len(vs) - 1))
