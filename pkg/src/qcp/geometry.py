"""Exact integer geometry for the hypergrid discretization.

Points live on the integer grid [0, 2**m)**d.  Squared distances are exact
integers and the closeness threshold enters only as a rational eps**2, so
every predicate in this module reduces to integer comparisons: no square
root is ever materialized and box boundaries cannot be misclassified by
rounding.

The hypergrid cuts space into half-open boxes of width w = scale*eps/sqrt(d)
(scale = 1 for the closest-pair grid, scale = xi/2 for the finer bichromatic
grid, so the box diagonal is scale*eps).  Two boxes are eps-neighbors when
the minimum distance between their closures is strictly below eps; this is
the weakest predicate that still guarantees every eps-close point pair lands
in neighboring boxes, and it keeps the neighbor count at (2*ceil(sqrt(d))+1)**d
for scale 1 and (ceil(4*sqrt(d)/xi)+1)**d for scale xi/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "Point",
    "GridParams",
    "dist_sq",
    "box_id",
    "are_eps_neighbors",
    "enumerate_eps_neighbors",
    "neighbor_offsets",
    "ceil_sqrt",
    "neighbor_count_bound",
    "scaled_neighbor_count_bound",
]


@dataclass(frozen=True)
class Point:
    """An integer-grid point with its original input position."""

    coords: tuple[int, ...]
    index: int = -1

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("point needs at least one coordinate")
        for c in self.coords:
            if c < 0:
                raise ValueError("coordinates must be nonnegative (translate input first)")

    @property
    def dim(self) -> int:
        return len(self.coords)


def _coords(p) -> Sequence[int]:
    return p.coords if isinstance(p, Point) else p


def dist_sq(a, b) -> int:
    """Exact squared Euclidean distance between two points.

    Accepts Point objects or raw coordinate sequences.
    """
    ca, cb = _coords(a), _coords(b)
    if len(ca) != len(cb):
        raise ValueError(f"dimension mismatch: {len(ca)} vs {len(cb)}")
    return sum((x - y) * (x - y) for x, y in zip(ca, cb))


@dataclass(frozen=True)
class GridParams:
    """Hypergrid parameters: dimension, rational eps**2 and box-width scale.

    The box width is w = scale*eps/sqrt(d).  Only w**2 = scale**2*eps**2/d is
    ever used, as a pair of integers, so irrational widths cost nothing.
    """

    dim: int
    eps_sq: Fraction
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim >= 1 required")
        eps_sq = self.eps_sq if isinstance(self.eps_sq, Fraction) else Fraction(self.eps_sq)
        scale = self.scale if isinstance(self.scale, Fraction) else Fraction(self.scale)
        if eps_sq <= 0:
            raise ValueError("eps_sq must be positive")
        if scale <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "eps_sq", eps_sq)
        object.__setattr__(self, "scale", scale)

    def width_sq(self) -> Fraction:
        return self.scale * self.scale * self.eps_sq / self.dim

    # Integers (P, Q) with w**2 = P/Q.
    def _width_sq_ratio(self) -> tuple[int, int]:
        w2 = self.width_sq()
        return w2.numerator, w2.denominator


def box_id(p, grid: GridParams) -> tuple[int, ...]:
    """Identify the hypergrid box containing p: per coordinate floor(c/w).

    Computed by exact monotone squared comparison: the returned k is the
    unique integer with k**2*w**2 <= c**2 < (k+1)**2*w**2.
    """
    coords = _coords(p)
    if len(coords) != grid.dim:
        raise ValueError(f"dimension mismatch: point {len(coords)} vs grid {grid.dim}")
    wp, wq = grid._width_sq_ratio()
    # k = floor(c/w) = isqrt(floor(c**2/w**2)) for c, w > 0.
    return tuple(math.isqrt((c * c * wq) // wp) for c in coords)


def _gap_comparison_ints(grid: GridParams, eps_sq: Fraction | None) -> tuple[int, int]:
    """Integers (A, B) such that sum(gap_i**2)*w**2 < eps**2  iff  sum*A < B."""
    wp, wq = grid._width_sq_ratio()
    t = grid.eps_sq if eps_sq is None else (eps_sq if isinstance(eps_sq, Fraction) else Fraction(eps_sq))
    if t <= 0:
        raise ValueError("eps_sq must be positive")
    # sum * wp/wq < tn/td  <=>  sum * wp*td < tn*wq
    return wp * t.denominator, t.numerator * wq


def are_eps_neighbors(g1: Sequence[int], g2: Sequence[int], grid: GridParams,
                      eps_sq: Fraction | None = None) -> bool:
    """True iff the minimum distance between the two closed boxes is < eps.

    Per axis the closures of boxes at index offset delta are (|delta|-1)*w
    apart (0 if they touch), so the test is
    sum(max(|delta_i|-1, 0)**2) * w**2 < eps**2, evaluated in integers.
    Any point pair with dist <= eps that spans the two half-open boxes forces
    this strict inequality, so Obs-4.4-style coverage is exact.
    """
    if len(g1) != len(g2) or len(g1) != grid.dim:
        raise ValueError("box-id dimension mismatch")
    A, B = _gap_comparison_ints(grid, eps_sq)
    s = 0
    for x, y in zip(g1, g2):
        gap = abs(x - y) - 1
        if gap > 0:
            s += gap * gap
    return s * A < B


@lru_cache(maxsize=128)
def _offsets_for(dim: int, A: int, B: int) -> tuple[tuple[int, ...], ...]:
    """All integer offset vectors delta with sum(max(|d_i|-1,0)**2)*A < B, lex order."""
    if A <= 0 or B <= 0:
        raise ValueError("bad comparison constants")
    # Largest per-axis gap g with g**2*A < B, hence |delta| <= g_max+1.
    g_max = math.isqrt((B - 1) // A)
    reach = g_max + 1
    out: list[tuple[int, ...]] = []
    delta = [0] * dim

    def rec(axis: int, budget_used: int):
        if axis == dim:
            out.append(tuple(delta))
            return
        for d in range(-reach, reach + 1):
            gap = abs(d) - 1
            used = budget_used + (gap * gap if gap > 0 else 0)
            if used * A < B:
                delta[axis] = d
                rec(axis + 1, used)
        delta[axis] = 0

    rec(0, 0)
    return tuple(out)


def neighbor_offsets(grid: GridParams, eps_sq: Fraction | None = None) -> tuple[tuple[int, ...], ...]:
    """Offset vectors from a box to every eps-neighbor (itself included)."""
    A, B = _gap_comparison_ints(grid, eps_sq)
    return _offsets_for(grid.dim, A, B)


def enumerate_eps_neighbors(g1: Sequence[int], grid: GridParams,
                            eps_sq: Fraction | None = None) -> list[tuple[int, ...]]:
    """All eps-neighbor box ids of g1 (including g1), lexicographic, clipped at 0."""
    if len(g1) != grid.dim:
        raise ValueError("box-id dimension mismatch")
    offs = neighbor_offsets(grid, eps_sq)
    out = []
    for delta in offs:
        cand = tuple(x + d for x, d in zip(g1, delta))
        if all(c >= 0 for c in cand):
            out.append(cand)
    return out


def ceil_sqrt(n: int) -> int:
    """Exact ceil(sqrt(n)) for n >= 0."""
    if n <= 0:
        return 0
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def neighbor_count_bound(d: int) -> int:
    """(2*ceil(sqrt(d)) + 1)**d, the scale-1 neighbor count cap."""
    return (2 * ceil_sqrt(d) + 1) ** d


def scaled_neighbor_count_bound(d: int, xi: Fraction) -> int:
    """(ceil(4*sqrt(d)/xi) + 1)**d, the neighbor count cap on the xi/2-scale grid."""
    xi = xi if isinstance(xi, Fraction) else Fraction(xi)
    if xi <= 0:
        raise ValueError("xi must be positive")
    # smallest c with c*xa >= 4*sqrt(d)*xb  <=>  c**2*xa**2 >= 16*d*xb**2
    xa, xb = xi.numerator, xi.denominator
    target = 16 * d * xb * xb
    c = math.isqrt((target - 1) // (xa * xa)) + 1 if target > 0 else 0
    # c is smallest with c**2*xa**2 > target-1, i.e. >= target
    return (c + 1) ** d


def max_box_index(grid: GridParams, coord_bound: int) -> int:
    """Largest box index any coordinate in [0, coord_bound) can map to."""
    if coord_bound < 1:
        return 0
    c = coord_bound - 1
    wp, wq = grid._width_sq_ratio()
    return math.isqrt((c * c * wq) // wp)
