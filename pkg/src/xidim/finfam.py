"""Finite subsets of N, explicit families of them, and Borst's Ord.

A finite set is a strictly increasing tuple of positive integers.  An
:class:`ExplicitFamily` is a finite set of such tuples.  ``ord_family``
evaluates Ord by the defining recursion

    Ord(empty) = 0,   Ord(M) = 1 + max_a Ord(M^a)   (M nonempty),

memoised on the canonical encoding of the derived family.  Off the ground
set every derivation ``M^a`` is empty, so the maximum runs over the ground
set only.  ``ord_fast`` computes the same value by a subset DP over the
ground set (``M^sigma`` is determined by ``sigma``) in the compiled kernel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Any, Iterable, Iterator, Sequence

from . import kernels
from .errors import ParseError, PreconditionError

__all__ = [
    "FinSet",
    "as_finset",
    "ExplicitFamily",
    "derive",
    "ord_family",
    "ord_fast",
    "is_inclusive",
    "inclusive_closure",
    "reindex",
    "all_nonempty_subsets",
    "family_from_json",
    "family_to_json",
]

FinSet = tuple[int, ...]

FAST_GROUND_LIMIT = 26


def as_finset(elements: Iterable[int]) -> FinSet:
    """Validate and canonicalise a finite nonempty subset of N."""
    items = sorted(set(elements))
    if not items:
        raise ValueError("finite sets must be nonempty")
    for x in items:
        if isinstance(x, bool) or not isinstance(x, int) or x < 1:
            raise ValueError(f"elements must be positive integers, got {x!r}")
    return tuple(items)


@dataclass(frozen=True)
class ExplicitFamily:
    members: frozenset[FinSet]

    def __init__(self, members: Iterable[Iterable[int]] = ()):
        object.__setattr__(self, "members", frozenset(as_finset(m) for m in members))

    @property
    def ground(self) -> FinSet:
        return tuple(sorted({x for m in self.members for x in m}))

    def key(self) -> tuple[FinSet, ...]:
        """Canonical encoding: sorted member list of sorted element lists."""
        return tuple(sorted(self.members, key=lambda m: (len(m), m)))

    def max_cardinality(self) -> int:
        return max((len(m) for m in self.members), default=0)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[FinSet]:
        return iter(self.key())

    def __contains__(self, sigma: object) -> bool:
        if not isinstance(sigma, (tuple, list, set, frozenset)):
            return False
        try:
            return as_finset(sigma) in self.members
        except ValueError:
            return False

    def __or__(self, other: "ExplicitFamily") -> "ExplicitFamily":
        return ExplicitFamily(self.members | other.members)

    def issubset(self, other: "ExplicitFamily") -> bool:
        return self.members <= other.members

    def __repr__(self) -> str:
        return f"ExplicitFamily({[list(m) for m in self.key()]})"


def derive(family: ExplicitFamily, sigma: Iterable[int]) -> ExplicitFamily:
    """``M^sigma = {tau nonempty : tau | sigma in M, tau & sigma = {}}``."""
    s = set(as_finset(sigma))
    out = []
    for m in family.members:
        if s.issubset(m) and len(m) > len(s):
            out.append(x for x in m if x not in s)
    return ExplicitFamily(out)


@lru_cache(maxsize=1 << 16)
def _ord_key(key: tuple[FinSet, ...]) -> int:
    if not key:
        return 0
    ground = sorted({x for m in key for x in m})
    best = 0
    for a in ground:
        derived = sorted(
            (tuple(x for x in m if x != a) for m in key if a in m and len(m) > 1),
            key=lambda t: (len(t), t),
        )
        best = max(best, _ord_key(tuple(derived)))
    return 1 + best


def ord_family(family: ExplicitFamily) -> int:
    """Ord of an explicit family by the memoised derivation recursion."""
    return _ord_key(family.key())


def _masks(family: ExplicitFamily) -> tuple[list[int], int]:
    pos = {x: i for i, x in enumerate(family.ground)}
    masks = []
    for m in family.members:
        bits = 0
        for x in m:
            bits |= 1 << pos[x]
        masks.append(bits)
    return masks, len(pos)


def ord_fast(family: ExplicitFamily) -> int:
    """Ord via the subset DP kernel; ground set limited to ``FAST_GROUND_LIMIT``."""
    masks, width = _masks(family)
    if width > FAST_GROUND_LIMIT:
        raise PreconditionError(f"ground set of size {width} exceeds {FAST_GROUND_LIMIT}")
    return kernels.ord_dp(masks, width)


def is_inclusive(family: ExplicitFamily) -> bool:
    members = family.members
    for m in members:
        if len(m) < 2:
            continue
        # closed under one-element removal implies closed under all subsets
        for i in range(len(m)):
            if m[:i] + m[i + 1:] not in members:
                return False
    return True


def all_nonempty_subsets(elements: Sequence[int]) -> Iterator[FinSet]:
    elems = as_finset(elements)
    for k in range(1, len(elems) + 1):
        yield from combinations(elems, k)


def inclusive_closure(family: ExplicitFamily) -> ExplicitFamily:
    out: set[FinSet] = set()
    for m in family.members:
        out.update(all_nonempty_subsets(m))
    return ExplicitFamily(out)


def reindex(family: ExplicitFamily, targets: Sequence[int]) -> ExplicitFamily:
    """``M[K]``: send ``j`` to ``K[j-1]`` elementwise (order-preserving)."""
    k = list(targets)
    if any(b <= a for a, b in zip(k, k[1:])) or any(x < 1 for x in k):
        raise PreconditionError("K must be a strictly increasing sequence of positive integers", k)
    top = max(family.ground, default=0)
    if top > len(k):
        raise PreconditionError(f"K has {len(k)} entries but the family uses element {top}", top)
    return ExplicitFamily(tuple(k[x - 1] for x in m) for m in family.members)


def family_from_json(obj: Any) -> ExplicitFamily:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad family JSON: {exc}") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("members"), list):
        raise ParseError('family JSON must look like {"members": [[1, 3], [2]]}')
    try:
        return ExplicitFamily(obj["members"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad family member: {exc}") from None


def family_to_json(family: ExplicitFamily) -> dict:
    return {"members": [list(m) for m in family.key()]}
