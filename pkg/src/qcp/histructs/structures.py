"""History-independent closest-pair structures over the hypergrid.

Three variants share a radix-tree core:

- BasicStructure: leaves store up to two points directly; valid under the
  unique-solution promise (at most one eps-close pair ever present).
- AugmentedStructure: hash table + per-box skip lists + external counters,
  correct for any number of eps-close pairs.
- BichromaticStructure: two-color variant on the finer xi/2-scale grid;
  flags witness cross-color pairs in the same or eps-neighboring boxes.

Canonical serialization (the wire format, version 1) is a UTF-8 text block:

    qcp-histruct v1
    variant <basic|augmented|bichromatic>
    dim <d>
    eps_sq <num>/<den>
    scale <num>/<den>
    ground <n>
    capacity <cap>
    seed <seed>
    size <|S|>
    tree
    I <edge-bits> <edge-label> <C> <F>
    L <edge-bits> <edge-label> ... per-variant counters, flag, elements ...
    end

Nodes appear in pre-order (left = 0-bit side first, i.e. key order); elements
are listed ascending by index as  index:level:c1,c2,...  (basic leaves omit
the level).  Cell addresses never appear, so the bytes depend only on
(variant, grid, stored set, seed).  The structure-level failure flag (bucket
overflow or skip-budget overrun) is intentionally not serialized: it records
an operation-order event, not content.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from qcp import geometry
from qcp.geometry import GridParams, are_eps_neighbors, dist_sq, neighbor_offsets
from qcp.histructs.radix import Node, RadixError, RadixTree
from qcp.histructs.skiphash import HashTable, SkipOps, level_of, levels_cap


class StructureError(Exception):
    pass


class PromiseViolationError(StructureError):
    """The unique-solution promise was violated in a detectable way."""


class InternalConsistencyError(StructureError):
    """A flag promised a pair that could not be produced (must never fire)."""


class AuditError(StructureError):
    pass


SKIP_BUDGET_C = 8       # skip-list step budget = 8 * ceil(log2 n)
TOUCH_BOUND_C1 = 64     # per-op node-touch cap constant


class _HiBase:
    variant = ""

    def __init__(self, grid: GridParams, n_ground: int, capacity: int,
                 coord_bound: int, seed: int = 0, audit: bool = False):
        if capacity < 1:
            raise ValueError("capacity >= 1 required")
        self.grid = grid
        self.n_ground = max(1, n_ground)
        self.capacity = capacity
        self.coord_bound = coord_bound
        self.seed = seed
        self.audit_mode = audit

        kmax = geometry.max_box_index(grid, coord_bound)
        self.max_index = kmax
        self.coord_width = max(1, kmax.bit_length())
        self.key_bits = self.coord_width * grid.dim
        self._leaf_budget = self._leaf_capacity()
        self.tree = RadixTree(self.key_bits, 6 * self._leaf_budget)
        self.failed = False
        self.failure_events = {"bucket_overflow": 0, "skip_budget": 0}
        self._offsets = [o for o in neighbor_offsets(grid) if any(o)]
        # Integer constants for the neighbor predicate: sum(gap^2)*A < B.
        self._gap_a, self._gap_b = geometry._gap_comparison_ints(grid, None)
        self.last_op_touches = 0
        self._op_base = 0

    def _leaf_capacity(self) -> int:
        return max(1, self.capacity)

    # -- keys ---------------------------------------------------------------

    def box_of(self, coords) -> tuple[int, ...]:
        return geometry.box_id(coords, self.grid)

    def key_of_box(self, box) -> int:
        key = 0
        for c in box:
            if c.bit_length() > self.coord_width:
                raise StructureError("coordinate outside grid bound")
            key = (key << self.coord_width) | c
        return key

    def box_of_key(self, key: int) -> tuple[int, ...]:
        mask = (1 << self.coord_width) - 1
        d = self.grid.dim
        return tuple((key >> (self.coord_width * (d - 1 - j))) & mask for j in range(d))

    # -- op metering ----------------------------------------------------------

    def _begin_op(self):
        self._op_base = self.tree.touches + self._aux_probes()

    def _end_op(self):
        self.last_op_touches = self.tree.touches + self._aux_probes() - self._op_base
        if self.audit_mode:
            self.audit()

    def _aux_probes(self) -> int:
        return 0

    def touch_bound(self) -> int:
        d = self.grid.dim
        if self.grid.scale == 1:
            nb = geometry.neighbor_count_bound(d)
        else:
            nb = geometry.scaled_neighbor_count_bound(d, 2 * self.grid.scale)
        return TOUCH_BOUND_C1 * (math.ceil(math.log2(self.n_ground + 2)) + d * nb)

    def _note_failure(self, kind: str):
        self.failed = True
        self.failure_events[kind] += 1

    # -- shared tree plumbing -------------------------------------------------

    def _leaf(self, addr: int) -> Node:
        return self.tree.cells[addr]

    def _boxes_are_neighbors(self, b1, b2) -> bool:
        s = 0
        for x, y in zip(b1, b2):
            gap = abs(x - y) - 1
            if gap > 0:
                s += gap * gap
        return s * self._gap_a < self._gap_b

    def _neighbor_leaves(self, box):
        """Yield (box', leaf node) for every occupied eps-neighbor box != box.

        Two equivalent strategies: enumerate the neighbor offsets and look
        each box up (the paper's loop), or scan the occupied leaves and test
        the gap predicate.  The cheaper one is chosen; results are identical
        because the procedures only ever act on occupied neighbors.
        """
        n_leaves = (self.tree.occupied + 1) // 2
        if len(self._offsets) <= 2 * n_leaves:
            for delta in self._offsets:
                nb = tuple(x + d for x, d in zip(box, delta))
                if any(c < 0 or c > self.max_index for c in nb):
                    continue
                addr = self.tree.lookup(self.key_of_box(nb))
                if addr >= 0:
                    yield nb, self.tree.cells[addr]
        else:
            self.tree.touches += self.tree.occupied
            for node in self.tree.iter_leaves():
                nb = self.box_of_key(node.key)
                if nb != box and self._boxes_are_neighbors(nb, box):
                    yield nb, node

    def _set_leaf_flag(self, node: Node, addr_hint: int):
        if not node.F:
            node.F = True
            self.tree.refresh_flags(addr_hint)

    def _clear_leaf_flag(self, node: Node, addr_hint: int):
        if node.F:
            node.F = False
            self.tree.refresh_flags(addr_hint)

    def _addr_of(self, node: Node) -> int:
        # Nodes know their parent, not their own address; recover it cheaply.
        p = node.parent
        if p < 0:
            return self.tree.root
        par = self.tree.cells[p]
        return par.left if self.tree.cells[par.left] is node else par.right

    # -- queries ----------------------------------------------------------------

    @property
    def size(self) -> int:
        return self.tree.cells[self.tree.root].C if self.tree.root >= 0 else 0

    def has_close_pair(self) -> bool:
        """Root flag: O(1) node reads. Meaningless only if self.failed."""
        return self.tree.root >= 0 and self.tree.cells[self.tree.root].F

    def iter_leaf_boxes(self):
        for node in self.tree.iter_leaves():
            yield self.box_of_key(node.key), node

    # -- canonical serialization --------------------------------------------------

    def canonical_serialize(self) -> bytes:
        lines = [
            "qcp-histruct v1",
            f"variant {self.variant}",
            f"dim {self.grid.dim}",
            f"eps_sq {self.grid.eps_sq.numerator}/{self.grid.eps_sq.denominator}",
            f"scale {self.grid.scale.numerator}/{self.grid.scale.denominator}",
            f"ground {self.n_ground}",
            f"capacity {self.capacity}",
            f"seed {self.seed}",
            f"size {self.size}",
            "tree",
        ]
        for node in self.tree.iter_nodes_preorder():
            if node.is_leaf:
                lines.append(self._leaf_line(node))
            else:
                lines.append(f"I {node.llen} {node.label} {node.C} {int(node.F)}")
        lines.append("end")
        return "\n".join(lines).encode()

    def _leaf_line(self, node: Node) -> str:
        raise NotImplementedError

    # -- uniform sampling -----------------------------------------------------------

    def sample_index(self, rng):
        """Index uniform over the stored set via counter-weighted descent."""
        if self.size == 0:
            raise StructureError("empty structure")
        addr = self.tree.root
        node = self.tree.cells[addr]
        while not node.is_leaf:
            left = self.tree.cells[node.left]
            if rng.randrange(node.C) < left.C:
                addr = node.left
            else:
                addr = node.right
            node = self.tree.cells[addr]
        k = rng.randrange(node.C)
        return self._leaf_elements(node)[k]

    def _leaf_elements(self, node: Node) -> list[int]:
        raise NotImplementedError

    # -- shared audit pieces ----------------------------------------------------------

    def _audit_tree_shape(self):
        tree = self.tree
        if tree.root < 0:
            return
        if tree.free_fraction() < 1.0 / 3.0:
            raise AuditError("cell bitmap free fraction below 1/3")

        def rec(addr: int, consumed: int) -> tuple[int, bool]:
            node = tree.cells[addr]
            if node.is_leaf:
                if consumed + node.llen != tree.key_bits:
                    raise AuditError("leaf depth does not consume full key")
                if tree._segment(node.key, consumed, node.llen) != node.label:
                    raise AuditError("leaf label inconsistent with its key")
                return node.C, node.F
            if node.left < 0 or node.right < 0:
                raise AuditError("internal node lacks two children")
            lc, lf = rec(node.left, consumed + node.llen)
            rc, rf = rec(node.right, consumed + node.llen)
            if node.C != lc + rc:
                raise AuditError("internal counter is not the sum of children")
            if node.F != (lf or rf):
                raise AuditError("internal flag is not the OR of children")
            return node.C, node.F

        rec(tree.root, 0)

    def _audit_touches(self):
        if self.last_op_touches > self.touch_bound():
            raise AuditError(
                f"operation touched {self.last_op_touches} nodes, "
                f"bound {self.touch_bound()}")


def _pair_dists_sq(coords: list) -> np.ndarray:
    arr = np.asarray(coords, dtype=np.int64)
    diff = arr[:, None, :] - arr[None, :, :]
    return (diff * diff).sum(axis=2)


class BasicStructure(_HiBase):
    """Radix tree only; leaves hold at most two points (unique-solution promise)."""

    variant = "basic"

    def __init__(self, grid, n_ground, capacity, coord_bound, seed=0, audit=False):
        super().__init__(grid, n_ground, capacity, coord_bound, seed, audit)
        self.members: dict[int, tuple[int, ...]] = {}

    def _leaf_capacity(self) -> int:
        return max(1, self.capacity)

    def insert(self, i: int, coords):
        coords = tuple(coords)
        self._validate_new(i, coords)
        self._begin_op()
        box = self.box_of(coords)
        key = self.key_of_box(box)
        addr = self.tree.lookup(key)
        if addr >= 0:
            node = self.tree.cells[addr]
            if node.C >= 2:
                raise PromiseViolationError(
                    f"third point in box {box}: unique-solution promise violated")
            node.pts = sorted(node.pts + [(i, coords)])
            node.C += 1
            self.tree.bump_counts(addr, +1)
            # Two co-boxed points are eps-close (box diagonal = scale*eps).
            self._set_leaf_flag(node, addr)
        else:
            addr = self.tree.insert_key(key)
            node = self.tree.cells[addr]
            node.pts = [(i, coords)]
            node.C = 1
            self.tree.bump_counts(addr, +1)
            for _, nb_node in self._neighbor_leaves(box):
                if nb_node.C == 1:
                    _, q = nb_node.pts[0]
                    if dist_sq(coords, q) <= self.grid.eps_sq:
                        self._set_leaf_flag(nb_node, self._addr_of(nb_node))
                        self._set_leaf_flag(node, addr)
        self.members[i] = coords
        self._end_op()

    def delete(self, i: int, coords):
        coords = tuple(coords)
        self._validate_member(i, coords)
        self._begin_op()
        box = self.box_of(coords)
        addr = self.tree.lookup(self.key_of_box(box))
        node = self.tree.cells[addr]
        if node.C == 2:
            node.pts = [e for e in node.pts if e[0] != i]
            node.C -= 1
            self.tree.bump_counts(addr, -1)
            self._clear_leaf_flag(node, addr)
        else:
            for _, nb_node in self._neighbor_leaves(box):
                if nb_node.C == 1:
                    _, q = nb_node.pts[0]
                    if dist_sq(coords, q) <= self.grid.eps_sq:
                        self._clear_leaf_flag(nb_node, self._addr_of(nb_node))
            self.tree.bump_counts(addr, -1)
            fix_from = self.tree.delete_leaf(addr)
            if fix_from >= 0:
                self.tree.refresh_all_from(fix_from)
        self.members.pop(i)
        self._end_op()

    def find_close_pair(self):
        """The witnessed pair (i, j), i < j, or None."""
        if not self.has_close_pair():
            return None
        addr = self.tree.root
        node = self.tree.cells[addr]
        while not node.is_leaf:
            nxt = node.left if self.tree.cells[node.left].F else node.right
            addr, node = nxt, self.tree.cells[nxt]
        if node.C >= 2:
            return node.pts[0][0], node.pts[1][0]
        box = self.box_of_key(node.key)
        i, p = node.pts[0]
        for _, nb_node in self._neighbor_leaves(box):
            if nb_node.C == 1:
                j, q = nb_node.pts[0]
                if dist_sq(p, q) <= self.grid.eps_sq:
                    return (i, j) if i < j else (j, i)
        raise InternalConsistencyError("flag set but no close pair found")

    def _validate_new(self, i, coords):
        if i in self.members:
            raise StructureError(f"duplicate index {i}")
        if not (0 <= i < self.n_ground):
            raise StructureError(f"index {i} outside ground set")
        if len(self.members) >= self.capacity:
            raise StructureError("capacity exceeded")
        if len(coords) != self.grid.dim:
            raise StructureError("dimension mismatch")
        if any(c < 0 or c >= self.coord_bound for c in coords):
            raise StructureError("coordinate outside [0, coord_bound)")

    def _validate_member(self, i, coords):
        if i not in self.members:
            raise StructureError(f"unknown index {i}")
        if self.members[i] != coords:
            raise StructureError(f"coordinates do not match stored point {i}")

    def _leaf_elements(self, node):
        return [e[0] for e in node.pts]

    def _leaf_line(self, node):
        pts = ";".join(f"{i}:{','.join(map(str, c))}" for i, c in node.pts)
        return f"L {node.llen} {node.label} {node.C} {int(node.F)} | {pts}"

    def audit(self):
        self._audit_tree_shape()
        self._audit_touches()
        groups: dict[tuple, list] = {}
        for i, c in sorted(self.members.items()):
            groups.setdefault(self.box_of(c), []).append((i, c))
        leaves = dict(self.iter_leaf_boxes())
        if set(leaves) != set(groups):
            raise AuditError("leaf boxes do not match occupied boxes")
        for box, node in leaves.items():
            if node.pts != sorted(groups[box]) or node.C != len(groups[box]):
                raise AuditError(f"leaf content mismatch in box {box}")
            if node.C > 2:
                raise AuditError("basic leaf stores more than two points")
        # Flag semantics, checked only while the promise holds.
        items = sorted(self.members.items())
        if len(items) >= 2:
            d2 = _pair_dists_sq([c for _, c in items])
            iu = np.triu_indices(len(items), k=1)
            close = d2[iu] <= float(self.grid.eps_sq)
            n_pairs = int(close.sum())
            if n_pairs <= 1 and self.has_close_pair() != (n_pairs == 1):
                raise AuditError("root flag disagrees with brute force")
        elif self.has_close_pair():
            raise AuditError("root flag set with fewer than two points")


class AugmentedStructure(_HiBase):
    """Hash table + skip lists + external counters; handles multiple pairs."""

    variant = "augmented"

    def __init__(self, grid, n_ground, capacity, coord_bound, seed=0, audit=False):
        super().__init__(grid, n_ground, capacity, coord_bound, seed, audit)
        self.members: dict[int, tuple[int, ...]] = {}
        self.l_max = levels_cap(n_ground)
        self.table = HashTable(n_ground, capacity)
        budget = SKIP_BUDGET_C * max(1, math.ceil(math.log2(max(2, n_ground))))
        self.skip = SkipOps(self.table, seed, self.l_max, budget)

    def _aux_probes(self) -> int:
        return self.table.probes

    def insert(self, i: int, coords):
        coords = tuple(coords)
        self._validate_new(i, coords)
        self._begin_op()
        if self.table.insert(i, coords, self.l_max):
            self._note_failure("bucket_overflow")
        box = self.box_of(coords)
        key = self.key_of_box(box)
        addr = self.tree.lookup(key)
        if addr < 0:
            addr = self.tree.insert_key(key)
            node = self.tree.cells[addr]
            node.starts = [None] * (self.l_max + 1)
        else:
            node = self.tree.cells[addr]
        _, over = self.skip.insert(node.starts, i)
        if over:
            self._note_failure("skip_budget")
        node.C += 1
        self.tree.bump_counts(addr, +1)
        self._procedure_insert(node, addr, box, i, coords)
        self.members[i] = coords
        self._end_op()

    def _procedure_insert(self, node, addr, box, i, coords):
        eps_sq = self.grid.eps_sq
        if node.C == 1:
            for _, nb in self._neighbor_leaves(box):
                if nb.C == 1:
                    q = self.table.find(self.skip.first(nb.starts)[0]).coords
                    if dist_sq(coords, q) <= eps_sq:
                        nb.E += 1
                        node.E += 1
                        if nb.E == 1:
                            self._set_leaf_flag(nb, self._addr_of(nb))
            if node.E >= 1:
                self._set_leaf_flag(node, addr)
        elif node.C == 2:
            self._set_leaf_flag(node, addr)
            node.E = 0
            other = next(j for j in self.skip.first(node.starts, 2) if j != i)
            p_other = self.table.find(other).coords
            for _, nb in self._neighbor_leaves(box):
                if nb.C == 1:
                    q = self.table.find(self.skip.first(nb.starts)[0]).coords
                    if dist_sq(p_other, q) <= eps_sq:
                        nb.E -= 1
                        if nb.E == 0:
                            self._clear_leaf_flag(nb, self._addr_of(nb))

    def delete(self, i: int, coords):
        coords = tuple(coords)
        self._validate_member(i, coords)
        self._begin_op()
        box = self.box_of(coords)
        addr = self.tree.lookup(self.key_of_box(box))
        node = self.tree.cells[addr]
        _, over = self.skip.delete(node.starts, i)
        if over:
            self._note_failure("skip_budget")
        node.C -= 1
        self.tree.bump_counts(addr, -1)
        self._procedure_delete(node, addr, box, i, coords)
        if node.C == 0:
            fix_from = self.tree.delete_leaf(addr)
            if fix_from >= 0:
                self.tree.refresh_all_from(fix_from)
        self.table.delete(i)
        self.members.pop(i)
        self._end_op()

    def _procedure_delete(self, node, addr, box, i, coords):
        eps_sq = self.grid.eps_sq
        if node.C == 0:
            node.F = False
            self.tree.refresh_flags(addr)
            node.E = 0
            for _, nb in self._neighbor_leaves(box):
                if nb.C == 1:
                    q = self.table.find(self.skip.first(nb.starts)[0]).coords
                    if dist_sq(coords, q) <= eps_sq:
                        nb.E -= 1
                        if nb.E == 0:
                            self._clear_leaf_flag(nb, self._addr_of(nb))
        elif node.C == 1:
            rest = self.skip.first(node.starts)[0]
            p_rest = self.table.find(rest).coords
            for _, nb in self._neighbor_leaves(box):
                if nb.C == 1:
                    q = self.table.find(self.skip.first(nb.starts)[0]).coords
                    if dist_sq(p_rest, q) <= eps_sq:
                        nb.E += 1
                        node.E += 1
                        if nb.E == 1:
                            self._set_leaf_flag(nb, self._addr_of(nb))
            if node.E == 0:
                self._clear_leaf_flag(node, addr)

    def find_close_pair(self):
        if not self.has_close_pair():
            return None
        addr = self.tree.root
        node = self.tree.cells[addr]
        while not node.is_leaf:
            nxt = node.left if self.tree.cells[node.left].F else node.right
            addr, node = nxt, self.tree.cells[nxt]
        if node.C >= 2:
            a, b = self.skip.first(node.starts, 2)
            return (a, b) if a < b else (b, a)
        box = self.box_of_key(node.key)
        i = self.skip.first(node.starts)[0]
        p = self.table.find(i).coords
        for _, nb in self._neighbor_leaves(box):
            if nb.C == 1:
                j = self.skip.first(nb.starts)[0]
                if dist_sq(p, self.table.find(j).coords) <= self.grid.eps_sq:
                    return (i, j) if i < j else (j, i)
        raise InternalConsistencyError("flag set but no close pair found")

    _validate_new = BasicStructure._validate_new
    _validate_member = BasicStructure._validate_member

    def _leaf_elements(self, node):
        return self.skip.elements(node.starts)

    def _leaf_line(self, node):
        parts = []
        for j in self.skip.elements(node.starts):
            coords = self.table.find(j).coords
            lvl = level_of(self.seed, j, self.l_max)
            parts.append(f"{j}:{lvl}:{','.join(map(str, coords))}")
        return (f"L {node.llen} {node.label} {node.C} {int(node.F)} {node.E} "
                f"| {';'.join(parts)}")

    def audit(self):
        self._audit_tree_shape()
        self._audit_touches()
        groups: dict[tuple, list[int]] = {}
        for i, c in sorted(self.members.items()):
            groups.setdefault(self.box_of(c), []).append(i)
        leaves = dict(self.iter_leaf_boxes())
        if set(leaves) != set(groups):
            raise AuditError("leaf boxes do not match occupied boxes")
        singles: list[tuple[tuple, Node, tuple]] = []
        for box, node in leaves.items():
            elems = self.skip.elements(node.starts)
            if elems != sorted(groups[box]):
                raise AuditError(f"skip list content mismatch in box {box}")
            if node.C != len(elems):
                raise AuditError(f"local counter mismatch in box {box}")
            for lvl in range(1, self.l_max + 1):
                want = [j for j in elems if level_of(self.seed, j, self.l_max) >= lvl]
                if self.skip.elements_at_level(node.starts, lvl) != want:
                    raise AuditError(f"level-{lvl} list mismatch in box {box}")
            if node.C == 1:
                singles.append((box, node, self.members[elems[0]]))
        # External counters: for singleton boxes, E = number of singleton
        # partners within eps; otherwise E = 0 (see decisions ledger).
        eps = float(self.grid.eps_sq)
        counts = {box: 0 for box, _, _ in singles}
        if len(singles) >= 2:
            d2 = _pair_dists_sq([c for _, _, c in singles])
            for a in range(len(singles)):
                for b in range(a + 1, len(singles)):
                    if d2[a, b] <= eps:
                        counts[singles[a][0]] += 1
                        counts[singles[b][0]] += 1
        for box, node in leaves.items():
            want_e = counts.get(box, 0) if node.C == 1 else 0
            if node.E != want_e:
                raise AuditError(f"external counter {node.E} != {want_e} in box {box}")
            want_f = node.C >= 2 or node.E >= 1
            if node.F != want_f:
                raise AuditError(f"leaf flag mismatch in box {box}")
        # Hash table content.
        for b_idx, bucket in enumerate(self.table.buckets):
            idxs = [e.idx for e in bucket]
            if idxs != sorted(idxs):
                raise AuditError("bucket not sorted")
            for e in idxs:
                if self.table.bucket_of(e) != b_idx or e not in self.members:
                    raise AuditError("hash table content mismatch")
        if sum(len(b) for b in self.table.buckets) != len(self.members):
            raise AuditError("hash table size mismatch")
        # Root flag against brute force.
        items = sorted(self.members.items())
        brute = False
        if len(items) >= 2:
            d2 = _pair_dists_sq([c for _, c in items])
            iu = np.triu_indices(len(items), k=1)
            brute = bool((d2[iu] <= eps).any())
        if self.has_close_pair() != brute:
            raise AuditError("root flag disagrees with brute force")


class BichromaticStructure(_HiBase):
    """Two-color structure on the xi/2-scale grid (Procedures 3-4).

    The flag witnesses a cross-color pair whose boxes coincide or are
    eps-neighbors; by the finer grid this sandwiches the answer between
    eps and (1+xi)*eps.
    """

    variant = "bichromatic"

    def __init__(self, grid, n_ground, capacity, coord_bound, seed=0, audit=False):
        super().__init__(grid, n_ground, capacity, coord_bound, seed, audit)
        self.members_a: dict[int, tuple[int, ...]] = {}
        self.members_b: dict[int, tuple[int, ...]] = {}
        self.l_max = levels_cap(n_ground)
        self.table_a = HashTable(n_ground, capacity)
        self.table_b = HashTable(n_ground, capacity)
        budget = SKIP_BUDGET_C * max(1, math.ceil(math.log2(max(2, n_ground))))
        self.skip_a = SkipOps(self.table_a, seed ^ 0x5A5A5A5A, self.l_max, budget)
        self.skip_b = SkipOps(self.table_b, seed ^ 0xA5A5A5A5, self.l_max, budget)

    def _leaf_capacity(self) -> int:
        return max(1, 2 * self.capacity)

    def _aux_probes(self) -> int:
        return self.table_a.probes + self.table_b.probes

    def _side(self, color: str):
        if color == "A":
            return self.members_a, self.table_a, self.skip_a
        if color == "B":
            return self.members_b, self.table_b, self.skip_b
        raise ValueError("color must be 'A' or 'B'")

    @staticmethod
    def _cnt(node: Node, color: str) -> int:
        return node.CA if color == "A" else node.CB

    @staticmethod
    def _bump_cnt(node: Node, color: str, delta: int):
        if color == "A":
            node.CA += delta
        else:
            node.CB += delta

    @staticmethod
    def _ext(node: Node, color: str) -> int:
        return node.EA if color == "A" else node.EB

    @staticmethod
    def _set_ext(node: Node, color: str, value: int):
        if color == "A":
            node.EA = value
        else:
            node.EB = value

    def _pure(self, node: Node, color: str) -> bool:
        other = "B" if color == "A" else "A"
        return self._cnt(node, color) >= 1 and self._cnt(node, other) == 0

    def _starts(self, node: Node, color: str):
        return node.startsA if color == "A" else node.startsB

    def insert(self, i: int, coords, color: str):
        coords = tuple(coords)
        members, table, skip = self._side(color)
        self._validate_new(members, i, coords)
        self._begin_op()
        if table.insert(i, coords, self.l_max):
            self._note_failure("bucket_overflow")
        box = self.box_of(coords)
        key = self.key_of_box(box)
        addr = self.tree.lookup(key)
        if addr < 0:
            addr = self.tree.insert_key(key)
            node = self.tree.cells[addr]
            node.startsA = [None] * (self.l_max + 1)
            node.startsB = [None] * (self.l_max + 1)
        else:
            node = self.tree.cells[addr]
        _, over = skip.insert(self._starts(node, color), i)
        if over:
            self._note_failure("skip_budget")
        self._bump_cnt(node, color, +1)
        node.C += 1
        self.tree.bump_counts(addr, +1)
        self._procedure_insert(node, addr, box, color)
        members[i] = coords
        self._end_op()

    def _procedure_insert(self, node, addr, box, x):
        xb = "B" if x == "A" else "A"
        if self._cnt(node, x) == 1 and self._cnt(node, xb) == 0:
            # Box just became pure-x: register it with pure-xb neighbors.
            for _, nb in self._neighbor_leaves(box):
                if self._pure(nb, xb):
                    self._set_ext(nb, x, self._ext(nb, x) + 1)
                    self._set_ext(node, xb, self._ext(node, xb) + 1)
                    if self._ext(nb, x) == 1:
                        self._set_leaf_flag(nb, self._addr_of(nb))
            if self._ext(node, xb) >= 1:
                self._set_leaf_flag(node, addr)
        elif self._cnt(node, x) == 1 and self._cnt(node, xb) >= 1:
            # Box just turned mixed (it was pure-xb): it leaves the pure world.
            self._set_leaf_flag(node, addr)
            for _, nb in self._neighbor_leaves(box):
                if self._pure(nb, x):
                    self._set_ext(nb, xb, self._ext(nb, xb) - 1)
                    if self._ext(nb, xb) == 0 and not (nb.CA >= 1 and nb.CB >= 1):
                        self._clear_leaf_flag(nb, self._addr_of(nb))
            self._set_ext(node, x, 0)

    def delete(self, i: int, coords, color: str):
        coords = tuple(coords)
        members, table, skip = self._side(color)
        if i not in members:
            raise StructureError(f"unknown index {i} on side {color}")
        if members[i] != coords:
            raise StructureError("coordinates do not match stored point")
        self._begin_op()
        box = self.box_of(coords)
        addr = self.tree.lookup(self.key_of_box(box))
        node = self.tree.cells[addr]
        _, over = skip.delete(self._starts(node, color), i)
        if over:
            self._note_failure("skip_budget")
        self._bump_cnt(node, color, -1)
        node.C -= 1
        self.tree.bump_counts(addr, -1)
        self._procedure_delete(node, addr, box, color)
        if node.CA == 0 and node.CB == 0:
            fix_from = self.tree.delete_leaf(addr)
            if fix_from >= 0:
                self.tree.refresh_all_from(fix_from)
        table.delete(i)
        members.pop(i)
        self._end_op()

    def _procedure_delete(self, node, addr, box, x):
        xb = "B" if x == "A" else "A"
        if self._cnt(node, x) == 0 and self._cnt(node, xb) == 0:
            # Box emptied; it was pure-x, deregister from pure-xb neighbors.
            node.F = False
            self.tree.refresh_flags(addr)
            self._set_ext(node, "A", 0)
            self._set_ext(node, "B", 0)
            for _, nb in self._neighbor_leaves(box):
                if self._pure(nb, xb):
                    self._set_ext(nb, x, self._ext(nb, x) - 1)
                    if self._ext(nb, x) == 0 and not (nb.CA >= 1 and nb.CB >= 1):
                        self._clear_leaf_flag(nb, self._addr_of(nb))
        elif self._cnt(node, x) == 0 and self._cnt(node, xb) >= 1:
            # Box just turned pure-xb (was mixed): re-enter the pure world.
            for _, nb in self._neighbor_leaves(box):
                if self._pure(nb, x):
                    self._set_ext(nb, xb, self._ext(nb, xb) + 1)
                    self._set_ext(node, x, self._ext(node, x) + 1)
                    if self._ext(nb, xb) == 1:
                        self._set_leaf_flag(nb, self._addr_of(nb))
            if self._ext(node, x) == 0:
                self._clear_leaf_flag(node, addr)

    def has_cross_pair(self) -> bool:
        return self.has_close_pair()

    def find_close_pair(self):
        """(A-index, B-index) of a witnessed cross pair, or None."""
        if not self.has_close_pair():
            return None
        addr = self.tree.root
        node = self.tree.cells[addr]
        while not node.is_leaf:
            nxt = node.left if self.tree.cells[node.left].F else node.right
            addr, node = nxt, self.tree.cells[nxt]
        if node.CA >= 1 and node.CB >= 1:
            return (self.skip_a.first(node.startsA)[0],
                    self.skip_b.first(node.startsB)[0])
        box = self.box_of_key(node.key)
        if node.EA >= 1:
            # This leaf is pure-B; a pure-A neighbor holds the partner.
            j = self.skip_b.first(node.startsB)[0]
            for _, nb in self._neighbor_leaves(box):
                if self._pure(nb, "A"):
                    return self.skip_a.first(nb.startsA)[0], j
        if node.EB >= 1:
            i = self.skip_a.first(node.startsA)[0]
            for _, nb in self._neighbor_leaves(box):
                if self._pure(nb, "B"):
                    return i, self.skip_b.first(nb.startsB)[0]
        raise InternalConsistencyError("flag set but no cross pair found")

    def _validate_new(self, members, i, coords):
        if i in members:
            raise StructureError(f"duplicate index {i}")
        if not (0 <= i < self.n_ground):
            raise StructureError(f"index {i} outside ground set")
        if len(members) >= self.capacity:
            raise StructureError("capacity exceeded")
        if len(coords) != self.grid.dim:
            raise StructureError("dimension mismatch")
        if any(c < 0 or c >= self.coord_bound for c in coords):
            raise StructureError("coordinate outside [0, coord_bound)")

    @property
    def size(self) -> int:
        return len(self.members_a) + len(self.members_b)

    def _leaf_elements(self, node):
        return (self.skip_a.elements(node.startsA)
                + self.skip_b.elements(node.startsB))

    def _leaf_line(self, node):
        def fmt(skip, table, starts):
            parts = []
            for j in skip.elements(starts):
                coords = table.find(j).coords
                lvl = level_of(skip.seed, j, self.l_max)
                parts.append(f"{j}:{lvl}:{','.join(map(str, coords))}")
            return ";".join(parts)

        return (f"L {node.llen} {node.label} {node.CA} {node.CB} "
                f"{node.EA} {node.EB} {int(node.F)} "
                f"A|{fmt(self.skip_a, self.table_a, node.startsA)} "
                f"B|{fmt(self.skip_b, self.table_b, node.startsB)}")

    def audit(self):
        self._audit_tree_shape()
        self._audit_touches()
        groups_a: dict[tuple, list[int]] = {}
        groups_b: dict[tuple, list[int]] = {}
        for i, c in sorted(self.members_a.items()):
            groups_a.setdefault(self.box_of(c), []).append(i)
        for i, c in sorted(self.members_b.items()):
            groups_b.setdefault(self.box_of(c), []).append(i)
        leaves = dict(self.iter_leaf_boxes())
        if set(leaves) != set(groups_a) | set(groups_b):
            raise AuditError("leaf boxes do not match occupied boxes")
        for box, node in leaves.items():
            ea = self.skip_a.elements(node.startsA)
            eb = self.skip_b.elements(node.startsB)
            if ea != sorted(groups_a.get(box, [])) or eb != sorted(groups_b.get(box, [])):
                raise AuditError(f"skip list mismatch in box {box}")
            if node.CA != len(ea) or node.CB != len(eb) or node.C != len(ea) + len(eb):
                raise AuditError(f"counter mismatch in box {box}")
        boxes = list(leaves)
        pure_a = {b for b in boxes if self._pure(leaves[b], "A")}
        pure_b = {b for b in boxes if self._pure(leaves[b], "B")}
        for box, node in leaves.items():
            want_ea = want_eb = 0
            if box in pure_b:
                want_ea = sum(1 for b2 in pure_a
                              if b2 != box and are_eps_neighbors(box, b2, self.grid))
            if box in pure_a:
                want_eb = sum(1 for b2 in pure_b
                              if b2 != box and are_eps_neighbors(box, b2, self.grid))
            if node.EA != want_ea or node.EB != want_eb:
                raise AuditError(f"external counters mismatch in box {box}")
            mixed = node.CA >= 1 and node.CB >= 1
            if node.F != (mixed or node.EA >= 1 or node.EB >= 1):
                raise AuditError(f"leaf flag mismatch in box {box}")
        # Root flag: exists a cross pair in the same or eps-neighbor boxes.
        brute = False
        for ca in self.members_a.values():
            ba = self.box_of(ca)
            for cb in self.members_b.values():
                if are_eps_neighbors(ba, self.box_of(cb), self.grid):
                    brute = True
                    break
            if brute:
                break
        if self.has_close_pair() != brute:
            raise AuditError("root flag disagrees with box-pair brute force")
