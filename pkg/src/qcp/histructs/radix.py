"""Compressed binary radix tree over fixed-width keys, stored in explicit cells.

Nodes live in a fixed pool of memory cells tracked by an occupancy bitmap;
allocation always takes the lowest-indexed free cell.  The canonical
serialization walks the tree in pre-order and never mentions cell addresses,
so two operation histories that realize the same key set produce identical
bytes even though their cell layouts differ.

Every internal node has exactly two children (single-child chains are merged
on delete), the left child owning the 0-bit side, so pre-order is key order.
"""

from __future__ import annotations

import heapq


class RadixError(Exception):
    pass


class Node:
    __slots__ = (
        "label", "llen", "parent", "left", "right", "key",
        "C", "F", "E", "CA", "CB", "EA", "EB",
        "pts", "starts", "startsA", "startsB",
    )

    def __init__(self, label: int, llen: int, parent: int):
        self.label = label
        self.llen = llen
        self.parent = parent
        self.left = -1
        self.right = -1
        self.key = None          # full key for leaves, None for internals
        self.C = 0               # points in subtree (local counter at leaves)
        self.F = False
        self.E = 0               # external counter (augmented leaves)
        self.CA = 0
        self.CB = 0
        self.EA = 0
        self.EB = 0
        self.pts = None          # [(index, coords)] for basic leaves
        self.starts = None       # skip-list start pointers (augmented)
        self.startsA = None
        self.startsB = None

    @property
    def is_leaf(self) -> bool:
        return self.key is not None


class RadixTree:
    def __init__(self, key_bits: int, n_cells: int):
        if key_bits < 1:
            raise RadixError("key_bits must be >= 1")
        self.key_bits = key_bits
        self.n_cells = n_cells
        self.cells: list[Node | None] = [None] * n_cells
        self.occupied = 0
        self._freed: list[int] = []     # heap of freed cells below _next_fresh
        self._next_fresh = 0
        self.root = -1
        self.touches = 0                # node visits, reset by the owner per op

    # -- cell management ---------------------------------------------------

    def _alloc(self) -> int:
        if self._freed and (self._next_fresh >= self.n_cells
                            or self._freed[0] < self._next_fresh):
            addr = heapq.heappop(self._freed)
        elif self._next_fresh < self.n_cells:
            addr = self._next_fresh
            self._next_fresh += 1
        else:
            raise RadixError("out of cells")
        self.occupied += 1
        return addr

    def _release(self, addr: int):
        self.cells[addr] = None
        heapq.heappush(self._freed, addr)
        self.occupied -= 1

    def free_fraction(self) -> float:
        return 1.0 - self.occupied / self.n_cells

    # -- key bit helpers ---------------------------------------------------

    def _segment(self, key: int, start: int, length: int) -> int:
        """Bits [start, start+length) of key, MSB first."""
        return (key >> (self.key_bits - start - length)) & ((1 << length) - 1)

    # -- queries -----------------------------------------------------------

    def lookup(self, key: int) -> int:
        """Cell address of the leaf storing key, or -1."""
        addr = self.root
        consumed = 0
        while addr >= 0:
            node = self.cells[addr]
            self.touches += 1
            if self._segment(key, consumed, node.llen) != node.label:
                return -1
            consumed += node.llen
            if node.is_leaf:
                return addr
            bit = (key >> (self.key_bits - consumed - 1)) & 1
            addr = node.right if bit else node.left
        return -1

    # -- mutation ----------------------------------------------------------

    def insert_key(self, key: int) -> int:
        """Create (and return the address of) the leaf for a key not present."""
        if self.root < 0:
            addr = self._alloc()
            self.cells[addr] = Node(key, self.key_bits, -1)
            self.cells[addr].key = key
            self.root = addr
            self.touches += 1
            return addr

        addr = self.root
        consumed = 0
        while True:
            node = self.cells[addr]
            self.touches += 1
            seg = self._segment(key, consumed, node.llen)
            if seg == node.label:
                consumed += node.llen
                if node.is_leaf:
                    raise RadixError("key already present")
                bit = (key >> (self.key_bits - consumed - 1)) & 1
                addr = node.right if bit else node.left
                continue
            # First differing bit inside this edge label.
            diff = seg ^ node.label
            cp = node.llen - diff.bit_length()   # common prefix length
            break

        # Split node's edge at cp: new internal above it, new leaf beside it.
        parent_addr = node.parent
        inner_addr = self._alloc()
        leaf_addr = self._alloc()

        prefix = node.label >> (node.llen - cp)
        inner = Node(prefix, cp, parent_addr)
        self.cells[inner_addr] = inner

        node.label &= (1 << (node.llen - cp)) - 1
        node.llen -= cp
        node.parent = inner_addr

        rest_len = self.key_bits - consumed - cp
        leaf = Node(self._segment(key, consumed + cp, rest_len), rest_len, inner_addr)
        leaf.key = key
        self.cells[leaf_addr] = leaf

        node_bit = node.label >> (node.llen - 1)
        if node_bit:
            inner.left, inner.right = leaf_addr, addr
        else:
            inner.left, inner.right = addr, leaf_addr
        inner.C = node.C
        inner.F = node.F

        if parent_addr < 0:
            self.root = inner_addr
        else:
            par = self.cells[parent_addr]
            if par.left == addr:
                par.left = inner_addr
            else:
                par.right = inner_addr
        self.touches += 2
        return leaf_addr

    def delete_leaf(self, addr: int) -> int:
        """Remove a leaf; merge its parent into the sibling.

        Returns the address from which counters/flags must be refreshed
        upward (-1 if the tree emptied).
        """
        leaf = self.cells[addr]
        parent_addr = leaf.parent
        self.touches += 1
        if parent_addr < 0:
            self.root = -1
            self._release(addr)
            return -1
        parent = self.cells[parent_addr]
        sib_addr = parent.right if parent.left == addr else parent.left
        sib = self.cells[sib_addr]
        sib.label |= parent.label << sib.llen
        sib.llen += parent.llen
        sib.parent = parent.parent
        if parent.parent < 0:
            self.root = sib_addr
        else:
            gp = self.cells[parent.parent]
            if gp.left == parent_addr:
                gp.left = sib_addr
            else:
                gp.right = sib_addr
        self._release(addr)
        self._release(parent_addr)
        self.touches += 2
        return sib_addr

    # -- aggregate maintenance ----------------------------------------------

    def bump_counts(self, addr: int, delta: int):
        """Add delta to C on the strict ancestors of addr."""
        cur = self.cells[addr].parent
        while cur >= 0:
            node = self.cells[cur]
            node.C += delta
            self.touches += 1
            cur = node.parent

    def refresh_flags(self, addr: int):
        """Recompute F = OR(children) on the strict ancestors of addr."""
        cur = self.cells[addr].parent
        while cur >= 0:
            node = self.cells[cur]
            new_f = self.cells[node.left].F or self.cells[node.right].F
            self.touches += 1
            if new_f == node.F:
                break
            node.F = new_f
            cur = node.parent

    def refresh_all_from(self, addr: int):
        """Recompute C and F at addr's ancestors after a structural change."""
        cur = self.cells[addr].parent if addr >= 0 else -1
        while cur >= 0:
            node = self.cells[cur]
            l, r = self.cells[node.left], self.cells[node.right]
            node.C = l.C + r.C
            node.F = l.F or r.F
            self.touches += 1
            cur = node.parent

    # -- traversal ----------------------------------------------------------

    def iter_nodes_preorder(self):
        """Yield nodes in pre-order (left first), address-free."""
        if self.root < 0:
            return
        stack = [self.root]
        while stack:
            addr = stack.pop()
            node = self.cells[addr]
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def iter_leaves(self):
        for node in self.iter_nodes_preorder():
            if node.is_leaf:
                yield node
