"""Fixed-hash bucket table and per-box skip lists.

The table hashes ground indices with the fixed map h(i) = floor(i*r/n)
(0-based buckets); entries in a bucket are kept sorted by index, so the
table layout is a function of the stored set alone.  Skip-list levels come
from a seeded integer hash of the index, making every list a function of
(set, seed).  Pointers are the indices themselves: an entry's level-l
successor is the next stored index in the same box with level >= l.

Traversal work is metered: an operation that exceeds its step budget marks
a failure but still completes, so the stored content never diverges.
"""

from __future__ import annotations

import math
from bisect import bisect_left

_M64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _M64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _M64
    x ^= x >> 31
    return x


def level_of(seed: int, i: int, l_max: int) -> int:
    """Skip-list level of index i: geometric(1/2), capped at l_max."""
    h = _splitmix64((seed & _M64) ^ _splitmix64(i + 1))
    lvl = 0
    while lvl < l_max and (h >> lvl) & 1:
        lvl += 1
    return lvl


def levels_cap(n_ground: int) -> int:
    return max(1, math.ceil(math.log2(max(2, n_ground))))


class Entry:
    __slots__ = ("idx", "coords", "nxt")

    def __init__(self, idx: int, coords, l_max: int):
        self.idx = idx
        self.coords = coords
        self.nxt: list[int | None] = [None] * (l_max + 1)


class HashTable:
    """r buckets of capacity ceil(log2 n); overflow is reported, never silent."""

    def __init__(self, n_ground: int, r_buckets: int):
        self.n = max(1, n_ground)
        self.r = max(1, r_buckets)
        self.bucket_cap = max(1, math.ceil(math.log2(max(2, n_ground))))
        self.buckets: list[list[Entry]] = [[] for _ in range(self.r)]
        self.probes = 0

    def bucket_of(self, i: int) -> int:
        return min((i * self.r) // self.n, self.r - 1)

    def insert(self, i: int, coords, l_max: int) -> bool:
        """Store (i, coords); returns True when the bucket overflowed."""
        b = self.buckets[self.bucket_of(i)]
        keys = [e.idx for e in b]
        pos = bisect_left(keys, i)
        if pos < len(keys) and keys[pos] == i:
            raise KeyError(f"index {i} already stored")
        b.insert(pos, Entry(i, coords, l_max))
        self.probes += 1
        return len(b) > self.bucket_cap

    def find(self, i: int) -> Entry:
        b = self.buckets[self.bucket_of(i)]
        keys = [e.idx for e in b]
        pos = bisect_left(keys, i)
        self.probes += 1
        if pos == len(keys) or keys[pos] != i:
            raise KeyError(f"index {i} not stored")
        return b[pos]

    def delete(self, i: int):
        b = self.buckets[self.bucket_of(i)]
        keys = [e.idx for e in b]
        pos = bisect_left(keys, i)
        if pos == len(keys) or keys[pos] != i:
            raise KeyError(f"index {i} not stored")
        b.pop(pos)
        self.probes += 1


class SkipOps:
    """Skip-list insert/delete/walk against a HashTable, with step metering."""

    def __init__(self, table: HashTable, seed: int, l_max: int, step_budget: int):
        self.table = table
        self.seed = seed
        self.l_max = l_max
        self.step_budget = step_budget

    def _preds(self, starts: list[int | None], i: int) -> tuple[list[Entry | None], int]:
        """Per-level predecessor entries of i (None = the start entry)."""
        steps = 0
        cur: Entry | None = None
        preds: list[Entry | None] = [None] * (self.l_max + 1)
        for lvl in range(self.l_max, -1, -1):
            while True:
                nxt = starts[lvl] if cur is None else cur.nxt[lvl]
                steps += 1
                if nxt is None or nxt >= i:
                    break
                cur = self.table.find(nxt)
                steps += 1
            preds[lvl] = cur
        return preds, steps

    def insert(self, starts: list[int | None], i: int) -> tuple[int, bool]:
        """Link i into the list; returns (steps, budget_exceeded)."""
        lvl_i = level_of(self.seed, i, self.l_max)
        entry = self.table.find(i)
        preds, steps = self._preds(starts, i)
        for lvl in range(lvl_i + 1):
            p = preds[lvl]
            if p is None:
                entry.nxt[lvl] = starts[lvl]
                starts[lvl] = i
            else:
                entry.nxt[lvl] = p.nxt[lvl]
                p.nxt[lvl] = i
        return steps, steps > self.step_budget

    def delete(self, starts: list[int | None], i: int) -> tuple[int, bool]:
        lvl_i = level_of(self.seed, i, self.l_max)
        entry = self.table.find(i)
        preds, steps = self._preds(starts, i)
        for lvl in range(lvl_i + 1):
            p = preds[lvl]
            if p is None:
                starts[lvl] = entry.nxt[lvl]
            else:
                p.nxt[lvl] = entry.nxt[lvl]
            entry.nxt[lvl] = None
        return steps, steps > self.step_budget

    def first(self, starts: list[int | None], k: int = 1) -> list[int]:
        """First k indices of the level-0 list."""
        out = []
        cur = starts[0]
        while cur is not None and len(out) < k:
            out.append(cur)
            cur = self.table.find(cur).nxt[0]
        return out

    def elements(self, starts: list[int | None]) -> list[int]:
        out = []
        cur = starts[0]
        while cur is not None:
            out.append(cur)
            cur = self.table.find(cur).nxt[0]
        return out

    def elements_at_level(self, starts: list[int | None], lvl: int) -> list[int]:
        out = []
        cur = starts[lvl]
        while cur is not None:
            out.append(cur)
            cur = self.table.find(cur).nxt[lvl]
        return out
