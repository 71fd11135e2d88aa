"""The families S_xi of finite subsets of N and their finite truncations.

For finite ``xi = n`` membership is ``|sigma| <= n``.  For infinite
``xi = gamma + n`` (``gamma`` a limit) a set ``sigma`` is a member when
``K(sigma, n)`` is empty, or lies in ``S_{zeta_l(gamma) + l}`` for some
``l`` in ``1..i(sigma, n)``.  Each recursive call is on a strictly smaller
ordinal, so the recursion terminates; results are memoised on
``(sigma, xi)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional

from .errors import BudgetExceeded, PreconditionError
from .finfam import ExplicitFamily, FinSet, as_finset, ord_fast
from .ordinal import Ordinal, OrdinalLike, as_ordinal, decompose, fundamental

__all__ = [
    "big_k",
    "idx",
    "s_member",
    "s_member_shifted",
    "witness_index",
    "STruncation",
    "truncate",
    "ord_truncated",
    "TRUNCATE_LIMIT",
]

TRUNCATE_LIMIT = 20


def big_k(tau: Iterable[int], n: int) -> Optional[FinSet]:
    """``K(tau, n)``: drop the first ``n + 1`` elements; ``None`` when nothing is left."""
    t = as_finset(tau)
    return t[n + 1:] if n + 1 < len(t) else None


def idx(tau: Iterable[int], n: int) -> int:
    """``i(tau, n) = k_n`` (or the maximum ``k_s`` when ``n`` exceeds ``s``)."""
    t = as_finset(tau)
    return t[min(n, len(t) - 1)]


@lru_cache(maxsize=1 << 18)
def _member(sigma: FinSet, xi: Ordinal) -> bool:
    if xi.is_finite():
        return len(sigma) <= int(xi)
    gamma, n = decompose(xi)
    rest = sigma[n + 1:]
    if not rest:
        return True
    top = sigma[min(n, len(sigma) - 1)]
    for l in range(1, top + 1):
        if _member(rest, fundamental(gamma, l)):
            return True
    return False


def s_member(sigma: Iterable[int], xi: OrdinalLike) -> bool:
    return _member(as_finset(sigma), as_ordinal(xi))


def s_member_shifted(sigma: Iterable[int], xi: OrdinalLike) -> bool:
    """Membership in ``S_xi[L]`` with ``L = {3, 4, ...}``."""
    s = as_finset(sigma)
    if s[0] < 3:
        raise PreconditionError(f"shifted labels live in {{3, 4, ...}}, got {list(s)}", s)
    return _member(tuple(x - 2 for x in s), as_ordinal(xi))


def witness_index(sigma: Iterable[int], xi: OrdinalLike) -> Optional[int]:
    """Least ``l`` certifying membership of an infinite ``xi`` (0 when ``K`` is empty)."""
    s = as_finset(sigma)
    xi = as_ordinal(xi)
    if xi.is_finite():
        raise ValueError("witness_index needs an infinite ordinal")
    gamma, n = decompose(xi)
    rest = s[n + 1:]
    if not rest:
        return 0
    for l in range(1, idx(s, n) + 1):
        if _member(rest, fundamental(gamma, l)):
            return l
    return None


@dataclass(frozen=True)
class STruncation:
    xi: Ordinal
    bound: int
    family: ExplicitFamily


def truncate(xi: OrdinalLike, n: int, limit: int = TRUNCATE_LIMIT) -> STruncation:
    """``S_xi`` restricted to subsets of ``{1..n}``."""
    xi = as_ordinal(xi)
    if n < 1:
        raise PreconditionError("truncation bound must be positive", n)
    if n > limit:
        raise BudgetExceeded(f"truncation bound {n} exceeds budget {limit}")
    ground = range(1, n + 1)
    members = [c for k in range(1, n + 1) for c in combinations(ground, k) if _member(c, xi)]
    return STruncation(xi, n, ExplicitFamily(members))


def ord_truncated(xi: OrdinalLike, n: int, limit: int = TRUNCATE_LIMIT) -> int:
    return ord_fast(truncate(xi, n, limit).family)
