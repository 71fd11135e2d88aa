"""Deliberately naive re-implementations used to freeze expected values.

Nothing here imports the package's algorithms; they share only the data
types needed to compare results.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product


def cnf3(a: int, b: int, c: int):
    """``w^2*a + w*b + c`` as a plain tuple, ordered lexicographically."""
    return (a, b, c)


def naive_derive(members, sigma):
    s = frozenset(sigma)
    return frozenset(frozenset(m - s) for m in members if s <= m and m - s)


@lru_cache(maxsize=None)
def naive_ord(members: frozenset) -> int:
    if not members:
        return 0
    ground = set().union(*members)
    return 1 + max(naive_ord(naive_derive(members, {a})) for a in ground)


def fam(*sets) -> frozenset:
    return frozenset(frozenset(s) for s in sets)


def all_subsets(n: int):
    return [frozenset(c) for k in range(1, n + 1) for c in combinations(range(1, n + 1), k)]


def in_s_omega(sigma) -> bool:
    return len(sigma) <= min(sigma) + 1


def x_tau_filter(tau, box):
    ks = [t - 2 for t in tau]
    out = []
    for x in product(*(range(lo, hi + 1) for lo, hi in box)):
        if all(sum(1 for c in x if c % (1 << k)) <= p for p, k in enumerate(ks)):
            out.append(x)
    return out


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_cover_exists(points, dist, radii, bound) -> bool:
    """Literal definition on a tiny set: partition the points into blocks,
    give every block a family, check diameters and per-family gaps."""
    idx = list(range(len(points)))
    for part in _set_partitions(idx):
        if any(dist(points[a], points[b]) > bound for blk in part for a in blk for b in blk):
            continue
        for colours in product(range(len(radii)), repeat=len(part)):
            ok = True
            for (i, x), (j, y) in combinations(list(enumerate(part)), 2):
                if colours[i] != colours[j]:
                    continue
                r = radii[colours[i]]
                if min(dist(points[a], points[b]) for a in x for b in y) < r:
                    ok = False
                    break
            if ok:
                return True
    return False
