"""Lattice spaces X_tau, the sup-metric, and the union metric of X_xi.

A label ``tau = (t_0 < ... < t_m)`` stands for ``{k_0+2, ..., k_m+2}``; the
divisibility exponents are ``k_p = t_p - 2``.  Labels occurring inside
``X_xi`` lie in ``S_xi[L]`` and so have every element >= 3; standalone
``X_tau`` computations also accept ``t_0 = 2`` (``k_0 = 0``).

All coordinates and distances are exact integers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ParseError, PreconditionError
from .ordinal import OrdinalLike
from .sfamily import s_member_shifted

__all__ = [
    "TauLabel",
    "as_label",
    "exponents",
    "LatticePoint",
    "x_tau_member",
    "enumerate_x_tau",
    "sup_dist",
    "embed",
    "s_weight",
    "d_xi",
    "pairwise_d_xi",
    "sample_x_xi",
    "read_points_csv",
    "write_points_csv",
    "ENUM_BUDGET",
]

TauLabel = tuple[int, ...]
ENUM_BUDGET = 10**7


def as_label(tau: Iterable[int]) -> TauLabel:
    t = tuple(int(x) for x in tau)
    if not t:
        raise PreconditionError("label must be nonempty")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise PreconditionError(f"label must be strictly increasing, got {list(t)}", t)
    if t[0] < 2:
        raise PreconditionError(f"label elements must be >= 2, got {list(t)}", t)
    return t


def exponents(tau: Iterable[int]) -> tuple[int, ...]:
    """Divisibility exponents ``k_p = t_p - 2``."""
    return tuple(t - 2 for t in as_label(tau))


@dataclass(frozen=True, order=True)
class LatticePoint:
    label: TauLabel
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != len(self.label):
            raise PreconditionError(
                f"point has {len(self.coords)} coordinates but label {list(self.label)} needs {len(self.label)}"
            )

    def __str__(self) -> str:
        return f"{','.join(map(str, self.label))}:{tuple(self.coords)}"


def point(label: Iterable[int], coords: Iterable[int]) -> LatticePoint:
    return LatticePoint(as_label(label), tuple(int(c) for c in coords))


def x_tau_member(tau: Iterable[int], x: Sequence[int]) -> bool:
    """At most ``p`` coordinates fall outside ``2^{k_p} Z``, for every ``p``."""
    ks = exponents(tau)
    if len(x) != len(ks):
        raise PreconditionError(f"expected {len(ks)} coordinates, got {len(x)}")
    for p, k in enumerate(ks):
        mod = 1 << k
        if sum(1 for c in x if c % mod) > p:
            return False
    return True


def enumerate_x_tau(
    tau: Iterable[int], box: Sequence[tuple[int, int]], budget: int = ENUM_BUDGET
) -> list[LatticePoint]:
    """Points of ``X_tau`` in a per-axis closed box, in lexicographic order."""
    label = as_label(tau)
    ks = exponents(label)
    if len(box) != len(label):
        raise PreconditionError(f"box has {len(box)} axes, label needs {len(label)}")
    step = 1 << ks[0]
    axes = []
    for lo, hi in box:
        start = -((-lo) // step) * step
        axes.append(range(start, hi + 1, step))
    volume = 1
    for ax in axes:
        volume *= max(len(ax), 0)
    if volume > budget:
        raise BudgetExceeded(f"box holds {volume} candidate points, budget {budget}")
    return [LatticePoint(label, c) for c in product(*axes) if x_tau_member(label, c)]


def sup_dist(x: LatticePoint, y: LatticePoint) -> int:
    if x.label != y.label:
        raise PreconditionError("sup_dist needs points with the same label", (x.label, y.label))
    return max((abs(a - b) for a, b in zip(x.coords, y.coords)), default=0)


def embed(x: LatticePoint) -> dict[int, int]:
    """Finitely supported sequence: ``{index: value}`` with zeros omitted."""
    return {i: c for i, c in enumerate(x.coords) if c != 0}


def _rho(a: dict[int, int], b: dict[int, int]) -> int:
    return max((abs(a.get(i, 0) - b.get(i, 0)) for i in a.keys() | b.keys()), default=0)


def s_weight(tau: Iterable[int]) -> int:
    return 1 << max(as_label(tau))


def d_xi(p: LatticePoint, q: LatticePoint) -> int:
    if p.label == q.label:
        return sup_dist(p, q)
    return max(s_weight(p.label), s_weight(q.label), _rho(embed(p), embed(q)))


def pairwise_d_xi(a: Sequence[LatticePoint], b: Sequence[LatticePoint] | None = None) -> np.ndarray:
    """Matrix of ``d_xi`` distances (int64); ``b`` defaults to ``a``."""
    b = a if b is None else b
    if not a or not b:
        return np.zeros((len(a), len(b)), dtype=np.int64)
    width = max(max(len(p.coords) for p in a), max(len(p.coords) for p in b))

    def pack(pts):
        coords = np.zeros((len(pts), width), dtype=np.int64)
        for i, p in enumerate(pts):
            coords[i, : len(p.coords)] = p.coords
        return coords

    ca, cb = pack(a), pack(b)
    rho = np.empty((len(a), len(b)), dtype=np.int64)
    for lo in range(0, len(a), 256):
        rho[lo:lo + 256] = np.abs(ca[lo:lo + 256, None, :] - cb[None, :, :]).max(axis=2)
    labels = {lab: i for i, lab in enumerate(sorted({p.label for p in a} | {p.label for p in b}))}
    la = np.array([labels[p.label] for p in a])
    lb = np.array([labels[p.label] for p in b])
    wa = np.array([s_weight(p.label) for p in a], dtype=np.int64)
    wb = np.array([s_weight(p.label) for p in b], dtype=np.int64)
    cross = np.maximum(np.maximum(wa[:, None], wb[None, :]), rho)
    return np.where(la[:, None] == lb[None, :], rho, cross)


def sample_x_xi(
    xi: OrdinalLike, labels: Iterable[Iterable[int]], box: Sequence[tuple[int, int]] | tuple[int, int]
) -> list[LatticePoint]:
    """Finite sample of ``X_xi``: each label is checked against ``S_xi[L]``.

    ``box`` is either one ``(lo, hi)`` interval used on every axis, or a list
    of intervals that is truncated to each label's dimension.
    """
    out: list[LatticePoint] = []
    for tau in labels:
        label = as_label(tau)
        if not s_member_shifted(label, xi):
            raise PreconditionError(f"label {list(label)} is not in S_xi[L]", label)
        if isinstance(box, tuple) and len(box) == 2 and all(isinstance(v, int) for v in box):
            axes = [box] * len(label)
        else:
            axes = list(box)[: len(label)]
        out.extend(enumerate_x_tau(label, axes))
    return out


def read_points_csv(text: str) -> list[LatticePoint]:
    """Parse ``label;x0;x1;...`` lines (label as comma-joined elements)."""
    pts = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text), delimiter=";"), 1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            label = as_label(int(v) for v in row[0].split(","))
            pts.append(LatticePoint(label, tuple(int(v) for v in row[1:])))
        except (ValueError, PreconditionError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return pts


def write_points_csv(points: Iterable[LatticePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=";", lineterminator="\n")
    for p in points:
        w.writerow([",".join(map(str, p.label)), *p.coords])
    return buf.getvalue()
