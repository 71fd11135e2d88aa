"""Pure-Python kernels; reference implementation and fallback for ``_core``.

Both kernels take plain Python data and must stay behaviourally identical
to their compiled counterparts (same node counts, same tie-breaking).
"""

from __future__ import annotations

import sys
from typing import Sequence

FOUND, NONE, BUDGET = 1, 0, -1


def ord_dp(masks: Sequence[int], width: int) -> int:
    """Ord of the family given by member bitmasks over ``width`` ground elements.

    ``up[s]``: some member contains ``s``.  ``val[s] = Ord(M^s)`` filled from
    the top down, using ``(M^s)^a = M^(s | a)`` for ``a`` outside ``s``.
    """
    if not masks:
        return 0
    size = 1 << width
    up = bytearray(size)
    for m in masks:
        up[m] = 1
    for b in range(width):
        bit = 1 << b
        for s in range(size):
            if not s & bit and up[s | bit]:
                up[s] = 1
    val = bytearray(size)
    for s in range(size - 1, -1, -1):
        best = -1
        for b in range(width):
            bit = 1 << b
            if not s & bit and up[s | bit] and val[s | bit] > best:
                best = val[s | bit]
        val[s] = best + 1 if best >= 0 else 0
    return val[0]


class _Search:
    """DPLL over family assignments.

    Subclasses decide feasibility ("would p joining family i keep every
    block within the bound?") and maintain whatever state that needs via
    ``assign``/``undo``.  Branching: after unit propagation, the unassigned
    point with the fewest feasible families (lowest index on ties); families
    are tried in increasing order.
    """

    def __init__(self, n: int, m: int, nbr, budget: int):
        self.n, self.m = n, m
        self.nbr = nbr
        self.budget = budget
        self.fam = [-1] * n
        self.trail: list[int] = []
        self.nodes = 0

    def feasible(self, p: int, i: int) -> bool:
        raise NotImplementedError

    def assign(self, p: int, i: int) -> None:
        self.fam[p] = i
        self.trail.append(p)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.fam[self.trail.pop()] = -1

    def propagate(self) -> tuple[bool, int]:
        """Assign forced points; return (consistent, branching point or -1)."""
        fam, m = self.fam, self.m
        while True:
            changed = False
            pick, pick_count = -1, m + 1
            for q in range(self.n):
                if fam[q] != -1:
                    continue
                count, last = 0, -1
                for i in range(m):
                    if self.feasible(q, i):
                        count += 1
                        last = i
                if count == 0:
                    return False, -1
                if count == 1:
                    self.assign(q, last)
                    changed = True
                elif count < pick_count:
                    pick, pick_count = q, count
            if not changed:
                return True, pick

    def run(self) -> int:
        ok, pick = self.propagate()
        if not ok:
            self.nodes = 1
            return NONE
        return self.rec(pick)

    def rec(self, pick: int) -> int:
        self.nodes += 1
        if self.nodes > self.budget:
            return BUDGET
        if pick < 0:
            return FOUND
        for i in range(self.m):
            if not self.feasible(pick, i):
                continue
            mark = len(self.trail)
            self.assign(pick, i)
            ok, nxt = self.propagate()
            if ok:
                status = self.rec(nxt)
                if status != NONE:
                    return status
            self.undo(mark)
        return NONE


class _MatrixSearch(_Search):
    """Arbitrary metric given as a distance matrix; diameters checked pairwise."""

    def __init__(self, dist, radii, bound, budget):
        n = len(dist)
        self.dist = [list(row) for row in dist]
        nbr = [[[q for q in range(n) if q != p and self.dist[p][q] < r] for p in range(n)] for r in radii]
        super().__init__(n, len(radii), nbr, budget)
        self.bound = bound

    def feasible(self, p: int, i: int) -> bool:
        dist, fam, bound = self.dist, self.fam, self.bound
        dp = dist[p]
        comp = [p]
        seen = {p}
        k = 0
        while k < len(comp):
            x = comp[k]
            k += 1
            for q in self.nbr[i][x]:
                if q not in seen and fam[q] == i:
                    if dp[q] > bound:
                        return False
                    seen.add(q)
                    comp.append(q)
        for a in range(1, len(comp)):
            da = dist[comp[a]]
            for b in range(a + 1, len(comp)):
                if da[comp[b]] > bound:
                    return False
        return True


class _BoxSearch(_Search):
    """Sup-metric on integer coordinates: a block's diameter is its widest
    bounding-box side, so components carry a box in an undoable union-find."""

    def __init__(self, coords, radii, bound, budget):
        n = len(coords)
        self.coords = [tuple(c) for c in coords]
        self.dim = len(self.coords[0]) if n else 0

        def close(p, q, r):
            return max(abs(a - b) for a, b in zip(self.coords[p], self.coords[q])) < r

        nbr = [[[q for q in range(n) if q != p and close(p, q, r)] for p in range(n)] for r in radii]
        super().__init__(n, len(radii), nbr, budget)
        self.bound = bound
        self.parent = list(range(n))
        self.lo = [list(c) for c in self.coords]
        self.hi = [list(c) for c in self.coords]
        self.unions: list[tuple[int, int, list[int], list[int]]] = []
        self.marks: list[int] = []

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def feasible(self, p: int, i: int) -> bool:
        lo = list(self.coords[p])
        hi = list(lo)
        seen = set()
        fam, bound, dim = self.fam, self.bound, self.dim
        for q in self.nbr[i][p]:
            if fam[q] != i:
                continue
            r = self.find(q)
            if r in seen:
                continue
            seen.add(r)
            rlo, rhi = self.lo[r], self.hi[r]
            for a in range(dim):
                if rlo[a] < lo[a]:
                    lo[a] = rlo[a]
                if rhi[a] > hi[a]:
                    hi[a] = rhi[a]
                if hi[a] - lo[a] > bound:
                    return False
        return True

    def assign(self, p: int, i: int) -> None:
        self.marks.append(len(self.unions))
        super().assign(p, i)
        for q in self.nbr[i][p]:
            if self.fam[q] != i:
                continue
            a, b = self.find(p), self.find(q)
            if a == b:
                continue
            # attach a under b; remember b's old box for undo
            self.unions.append((a, b, list(self.lo[b]), list(self.hi[b])))
            self.parent[a] = b
            for k in range(self.dim):
                self.lo[b][k] = min(self.lo[b][k], self.lo[a][k])
                self.hi[b][k] = max(self.hi[b][k], self.hi[a][k])

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            p = self.trail.pop()
            self.fam[p] = -1
            stop = self.marks.pop()
            while len(self.unions) > stop:
                a, b, blo, bhi = self.unions.pop()
                self.parent[a] = a
                self.lo[b], self.hi[b] = blo, bhi


def _run(search: _Search):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * search.n + 100))
    try:
        status = search.run()
    finally:
        sys.setrecursionlimit(old)
    return status, list(search.fam) if status == FOUND else [], search.nodes


def cover_search(dist, radii: Sequence[int], bound: int, node_budget: int):
    """Exhaustive family assignment: returns ``(status, assignment, nodes)``.

    ``status`` is 1 (assignment found), 0 (none exists) or -1 (budget hit).
    """
    if len(dist) == 0:
        return FOUND, [], 0
    return _run(_MatrixSearch(dist, list(radii), bound, node_budget))


def cover_search_box(coords, radii: Sequence[int], bound: int, node_budget: int):
    """As :func:`cover_search` for integer points under the sup-metric."""
    if len(coords) == 0:
        return FOUND, [], 0
    return _run(_BoxSearch(coords, list(radii), bound, node_budget))
