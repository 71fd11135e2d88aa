"""Discrete epsilon-partition chains and the skeleton-refinement refutation.

Sets live in the cube ``[0, B]^n`` and are stored as boolean arrays on the
grid refined by ``SCALE = 3``: refined index ``X`` stands for ``X / 3``.
Every removed neighbourhood is an *open* sup-ball whose radius is a multiple
of 1/3 around points of the integer grid, so each removed set is a union of
open boxes with corners on the refined lattice.  The complement of such a
union is nonempty iff it contains a refined lattice vertex (a box containing
a vertex contains every lattice cell touching it), so emptiness of the
refined arrays is emptiness of the continuous sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.ndimage import maximum_filter

from .cover import CoverSpec, verify_cover
from .errors import BudgetExceeded, ChainDefect, PreconditionError
from .space import LatticePoint, as_label, exponents, x_tau_member

__all__ = [
    "SCALE",
    "REFINED_BUDGET",
    "DiscreteCube",
    "ChainStep",
    "ChainState",
    "epsilon_partition_chain",
    "SkeletonStep",
    "RefuteResult",
    "skeleton_refute",
]

SCALE = 3
REFINED_BUDGET = 60_000_000

Coords = tuple[int, ...]


@dataclass(frozen=True)
class DiscreteCube:
    """``(g Z)^n ∩ [0, B]^n``; face ``F_k^-`` is ``x_{k-1} = 0``, ``F_k^+`` is ``x_{k-1} = B``."""

    n: int
    side: int
    step: int = 1

    def __post_init__(self) -> None:
        if self.n < 1 or self.side < 1 or self.step < 1:
            raise PreconditionError("cube needs positive dimension, side and step")
        if self.side % self.step:
            raise PreconditionError(f"step {self.step} does not divide side {self.side}")

    @property
    def refined_shape(self) -> tuple[int, ...]:
        return (SCALE * self.side + 1,) * self.n

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.n and all(0 <= c <= self.side and c % self.step == 0 for c in x)

    def points(self) -> list[Coords]:
        axis = range(0, self.side + 1, self.step)
        grid = np.stack(np.meshgrid(*([axis] * self.n), indexing="ij"), -1).reshape(-1, self.n)
        return [tuple(int(v) for v in row) for row in grid]


def _check_volume(shape: Sequence[int]) -> None:
    vol = int(np.prod(shape, dtype=np.int64))
    if vol > REFINED_BUDGET:
        raise BudgetExceeded(f"refined grid has {vol} cells, budget {REFINED_BUDGET}")


def _dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    """Closed sup-ball dilation by ``radius`` refined steps."""
    if radius < 0:
        return np.zeros_like(mask)
    if radius == 0 or not mask.any():
        return mask.copy()
    return maximum_filter(mask, size=2 * radius + 1, mode="constant", cval=False)


def _face_collars(shape: Sequence[int], axis: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Refined points within open distance ``width`` (refined units) of the
    low and high faces along ``axis``."""
    top = shape[axis] - 1
    coord = np.arange(shape[axis]).reshape([-1 if a == axis else 1 for a in range(len(shape))])
    low = np.broadcast_to(coord < width, shape)
    high = np.broadcast_to(coord > top - width, shape)
    return low, high


def _mark(shape: Sequence[int], pts: Iterable[Sequence[int]]) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    arr = np.asarray(list(pts), dtype=np.int64).reshape(-1, len(shape))
    if arr.size:
        mask[tuple((SCALE * arr).T)] = True
    return mask


def _refined_to_points(mask: np.ndarray) -> np.ndarray:
    """Refined indices as original coordinates; callers filter integrality."""
    return np.argwhere(mask)


@dataclass
class ChainStep:
    axis: int
    a_blocks: list[int]
    b_blocks: list[int]
    a_side: np.ndarray = field(repr=False)
    b_side: np.ndarray = field(repr=False)


@dataclass
class ChainState:
    """``L_0 ⊇ L_1 ⊇ ... ⊇ L_n`` on the refined grid, plus per-step sides.

    ``a_side`` is ``A_k ∪ N_{4ε/3}(F_k^+)`` and ``b_side`` is
    ``B_k ∪ N_{4ε/3}(F_k^-)``; ``L_k = L_{k-1}`` minus both.
    """

    cube: DiscreteCube
    eps: int
    levels: list[np.ndarray] = field(repr=False)
    steps: list[ChainStep] = field(repr=False)
    scale: int = SCALE

    def nonempty(self, k: int) -> bool:
        return bool(self.levels[k].any())

    def refined_points(self, k: int) -> np.ndarray:
        return _refined_to_points(self.levels[k])

    def grid_points(self, k: int) -> list[Coords]:
        """Points of ``L_k`` lying on the cube's own grid."""
        stride = SCALE * self.cube.step
        sub = self.levels[k][(slice(None, None, stride),) * self.cube.n]
        return [tuple(int(v) * self.cube.step for v in row) for row in np.argwhere(sub)]

    def least_point(self, k: int) -> Optional[tuple[float, ...]]:
        idx = np.argwhere(self.levels[k])
        if not len(idx):
            return None
        return tuple(float(v) / SCALE for v in idx[0])

    def summary(self) -> dict:
        return {
            "dimension": self.cube.n,
            "side": self.cube.side,
            "step": self.cube.step,
            "eps": self.eps,
            "scale": SCALE,
            "levels": [
                {
                    "k": k,
                    "refinedPoints": int(level.sum()),
                    "gridPoints": len(self.grid_points(k)),
                    "least": self.least_point(k),
                }
                for k, level in enumerate(self.levels)
            ],
            "steps": [
                {"axis": s.axis, "aBlocks": s.a_blocks, "bBlocks": s.b_blocks} for s in self.steps
            ],
        }


def _sup(a: Sequence[int], b: Sequence[int]) -> int:
    return max(abs(x - y) for x, y in zip(a, b))


def _diameter(block: Sequence[Coords]) -> int:
    arr = np.asarray(block, dtype=np.int64)
    if len(arr) < 2:
        return 0
    return int(np.abs(arr[:, None, :] - arr[None, :, :]).max())


def _block_gap(a: Sequence[Coords], b: Sequence[Coords]) -> int:
    x = np.asarray(a, dtype=np.int64)
    y = np.asarray(b, dtype=np.int64)
    return int(np.abs(x[:, None, :] - y[None, :, :]).max(axis=2).min())


def _check_chain_input(cube: DiscreteCube, families, eps: int) -> list[list[tuple[Coords, ...]]]:
    if eps <= 0:
        raise PreconditionError("eps must be positive", eps)
    if 6 * eps >= cube.side:
        raise PreconditionError(f"need eps < B/6, got eps={eps}, B={cube.side}", eps)
    if len(families) != cube.n:
        raise PreconditionError(f"need {cube.n} families, got {len(families)}")
    out = []
    for k, fam in enumerate(families, 1):
        blocks = [tuple(tuple(int(c) for c in p) for p in b) for b in fam if len(b)]
        for bi, b in enumerate(blocks):
            for p in b:
                if not cube.contains(p):
                    raise PreconditionError(f"family {k} block {bi}: point {p} is not in the cube grid", p)
            diam = _diameter(b)
            if 3 * diam > cube.side:
                raise PreconditionError(
                    f"family {k} block {bi} has diameter {diam} > B/3", {"family": k, "block": bi, "diameter": diam}
                )
        for a, b in combinations(range(len(blocks)), 2):
            gap = _block_gap(blocks[a], blocks[b])
            if gap < eps:
                raise PreconditionError(
                    f"family {k} blocks {a} and {b} are {gap} apart, need >= eps={eps}",
                    {"family": k, "blocks": [a, b], "distance": gap},
                )
        out.append(blocks)
    return out


def epsilon_partition_chain(cube: DiscreteCube, families: Sequence[Sequence[Iterable[Sequence[int]]]], eps: int) -> ChainState:
    """Build ``L_1, ..., L_n`` by removing, for each face pair ``k``,

    * ``A_k``: open ``ε/3``-neighbourhoods of blocks within ``2ε`` of ``F_k^+``,
      together with the open ``4ε/3``-collar of ``F_k^+``;
    * ``B_k``: the same for the remaining blocks and ``F_k^-``.

    Preconditions (checked, with witnesses): ``ε < B/6``; each family is
    ``ε``-disjoint and ``B/3``-bounded inside the cube grid.  ``L_n`` must be
    nonempty; an empty ``L_n`` raises :class:`ChainDefect`.
    """
    blocks_by_family = _check_chain_input(cube, families, eps)
    shape = cube.refined_shape
    _check_volume(shape)
    side = cube.side
    level = np.ones(shape, dtype=bool)
    levels = [level]
    steps = []
    for k, blocks in enumerate(blocks_by_family):
        axis = k
        a_ids = [i for i, b in enumerate(blocks) if side - max(p[axis] for p in b) <= 2 * eps]
        b_ids = [i for i in range(len(blocks)) if i not in a_ids]
        # open eps/3 ball = refined distance < eps, i.e. closed radius eps - 1
        a_nbhd = _dilate(_mark(shape, (p for i in a_ids for p in blocks[i])), eps - 1)
        b_nbhd = _dilate(_mark(shape, (p for i in b_ids for p in blocks[i])), eps - 1)
        low, high = _face_collars(shape, axis, 4 * eps)
        a_side = a_nbhd | high
        b_side = b_nbhd | low
        if (a_side & b_side & level).any():
            bad = tuple(float(v) / SCALE for v in np.argwhere(a_side & b_side & level)[0])
            raise ChainDefect(f"sides overlap at step {k + 1}", {"point": bad})
        level = level & ~(a_side | b_side)
        levels.append(level)
        steps.append(ChainStep(axis, a_ids, b_ids, a_side, b_side))
    state = ChainState(cube, eps, levels, steps)
    if not level.any():
        raise ChainDefect("final set of the chain is empty", state.summary())
    return state


# --- skeleton refinement -----------------------------------------------------


def _window_count(arr: np.ndarray, axis: int, length: int) -> np.ndarray:
    """``out[x] = sum(arr[x .. x+length])`` along ``axis``; windows running
    past the end count only what exists."""
    a = np.moveaxis(arr.astype(np.int64, copy=False), axis, 0)
    c = np.concatenate([np.zeros((1,) + a.shape[1:], dtype=np.int64), np.cumsum(a, axis=0)])
    n = a.shape[0]
    hi = np.minimum(np.arange(n) + length + 1, n)
    out = c[hi] - c[:n]
    return np.moveaxis(out, 0, axis)


def _window_back_any(arr: np.ndarray, axis: int, length: int) -> np.ndarray:
    """``out[x] = any(arr[x-length .. x])`` along ``axis``."""
    a = np.moveaxis(arr.astype(np.int64), axis, 0)
    c = np.concatenate([np.zeros((1,) + a.shape[1:], dtype=np.int64), np.cumsum(a, axis=0)])
    n = a.shape[0]
    lo = np.maximum(np.arange(n) - length, 0)
    out = c[np.arange(n) + 1] - c[lo]
    return np.moveaxis(out > 0, 0, axis)


def _cell_counts(mask: np.ndarray, axes: Sequence[int], length: int) -> np.ndarray:
    out = mask
    for a in axes:
        out = _window_count(out, a, length)
    return np.asarray(out, dtype=np.int64)


def _base_vertices(shape: Sequence[int], axes: Sequence[int], stride: int) -> np.ndarray:
    """Refined indices that are multiples of ``stride``, leaving room for a
    full cell along ``axes``."""
    grids = []
    for a, n in enumerate(shape):
        ok = np.arange(n) % stride == 0
        if a in axes:
            ok &= np.arange(n) + stride <= n - 1
        grids.append(ok.reshape([-1 if b == a else 1 for b in range(len(shape))]))
    out = grids[0]
    for g in grids[1:]:
        out = out & g
    return np.broadcast_to(out, shape)


def _paint(markers: np.ndarray, axes: Sequence[int], length: int) -> np.ndarray:
    out = markers
    for a in axes:
        out = _window_back_any(out, a, length)
    return out


@dataclass
class SkeletonStep:
    step: int
    family: int
    spacing: int
    eps: int
    axis: int
    a_blocks: int
    b_blocks: int
    cells: int
    kept_cells: int
    surviving: int

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "family": self.family,
            "spacing": self.spacing,
            "eps": self.eps,
            "axis": self.axis,
            "aBlocks": self.a_blocks,
            "bBlocks": self.b_blocks,
            "cells": self.cells,
            "keptCells": self.kept_cells,
            "skeletonPoints": self.surviving,
        }


@dataclass
class RefuteResult:
    witness: LatticePoint
    survivors: list[LatticePoint]
    tau: tuple[int, ...]
    bound: int
    steps: list[SkeletonStep]

    def to_json(self) -> dict:
        return {
            "status": "witness",
            "tau": list(self.tau),
            "bound": self.bound,
            "box": [0, 8 * self.bound],
            "witness": {"label": list(self.witness.label), "coords": list(self.witness.coords)},
            "survivors": len(self.survivors),
            "steps": [s.to_json() for s in self.steps],
        }


def _check_candidate(label, ks, bound: int, candidate: CoverSpec) -> None:
    m1 = len(ks)
    if len(candidate.families) != m1:
        raise PreconditionError(
            f"candidate has {len(candidate.families)} families, label needs {m1}", len(candidate.families)
        )
    for j, (r, k) in enumerate(zip(candidate.radii, ks)):
        if r < 1 << (k + 2):
            raise PreconditionError(
                f"family {j} radius {r} is below the required 2^{k + 2} = {1 << (k + 2)}",
                {"family": j, "radius": r, "required": 1 << (k + 2)},
            )
    if candidate.bound > bound:
        raise PreconditionError(f"candidate bound {candidate.bound} exceeds B={bound}", candidate.bound)
    if bound <= 1 << (ks[-1] + 1):
        raise PreconditionError(f"B must exceed 2^(k_m+1) = {1 << (ks[-1] + 1)}", bound)
    if (8 * bound) % (1 << ks[-1]):
        raise PreconditionError(f"8B = {8 * bound} is not a multiple of 2^k_m = {1 << ks[-1]}", bound)
    for _, b in candidate.blocks():
        for p in b:
            if p.label != label:
                raise PreconditionError(f"candidate point {p} does not carry label {list(label)}", p)
    verdict = verify_cover(candidate, [])
    broken = [v for v in verdict.violations if v["kind"] in ("disjointness", "diameter")]
    if broken:
        raise PreconditionError(f"candidate is not a valid family: {broken[0]['kind']}", verdict.to_json())


def skeleton_refute(tau: Iterable[int], bound: int, candidate: CoverSpec) -> RefuteResult:
    """Return a point of ``X_tau ∩ [0, 8B]^{m+1}`` missed by every candidate family.

    Step ``t = 1..m+1`` uses family ``j = m+1-t`` with spacing ``g = 2^{k_j}``
    and ``ε = 2g``: the blocks are inflated by the closed ``g``-neighbourhood,
    the ε-partition step runs inside the current skeleton ``L'_{t-1}`` along
    axis ``t-1``, the cells of side ``g`` (of dimension ``m+2-t``) meeting the
    partition are kept, and ``L'_t`` is the union of their facets.  After
    ``m+1`` steps ``L'`` is a set of vertices of spacing ``2^{k_0}``; the
    lexicographically least one is returned.

    Raises :class:`PreconditionError` for a candidate that is not a valid
    ``(2^{k_j+2})``-disjoint ``B``-bounded family list, and
    :class:`ChainDefect` if a step's sides overlap or the final set is empty.
    """
    label = as_label(tau)
    ks = exponents(label)
    _check_candidate(label, ks, bound, candidate)
    m1 = len(ks)
    top = 8 * bound
    shape = (SCALE * top + 1,) * m1
    _check_volume(shape)
    inside = [
        [[p.coords for p in b if all(0 <= c <= top for c in p.coords)] for b in fam]
        for fam in candidate.families
    ]
    skeleton = np.ones(shape, dtype=bool)
    removed = np.zeros(shape, dtype=bool)
    steps: list[SkeletonStep] = []
    for t in range(1, m1 + 1):
        j = m1 - t
        g = 1 << ks[j]
        eps = 2 * g
        axis = t - 1
        dim = m1 + 1 - t
        stride = SCALE * g
        blocks = [b for b in inside[j] if b]
        a_pts, b_pts, n_a = [], [], 0
        for b in blocks:
            # distance from the inflated block to the far face along ``axis``
            gap = max(top - max(p[axis] for p in b) - g, 0)
            if gap <= 2 * eps:
                a_pts.extend(b)
                n_a += 1
            else:
                b_pts.extend(b)
        # closed g-ball then open eps/3 ball = open ball of radius g + eps/3
        reach = SCALE * g + eps - 1
        a_side = _dilate(_mark(shape, a_pts), reach)
        b_side = _dilate(_mark(shape, b_pts), reach)
        low, high = _face_collars(shape, axis, 4 * eps)
        a_side |= high
        b_side |= low
        a_side &= skeleton
        b_side &= skeleton
        if (a_side & b_side).any():
            bad = tuple(float(v) / SCALE for v in np.argwhere(a_side & b_side)[0])
            raise ChainDefect(f"sides overlap at step {t}", {"point": bad})
        part = skeleton & ~(a_side | b_side)
        full = (stride + 1) ** dim
        new_markers: dict[tuple[int, ...], np.ndarray] = {}
        n_cells = n_kept = 0
        for axes in combinations(range(m1), dim):
            base = _base_vertices(shape, axes, stride)
            cells = base & (_cell_counts(skeleton, axes, stride) == full)
            kept = cells & (_cell_counts(part, axes, stride) > 0)
            dropped = cells & ~kept
            if dropped.any():
                touch_a = _cell_counts(a_side, axes, stride) > 0
                touch_b = _cell_counts(b_side, axes, stride) > 0
                if (dropped & touch_a & touch_b).any():
                    raise ChainDefect(f"a discarded cell meets both sides at step {t}")
            n_cells += int(cells.sum())
            n_kept += int(kept.sum())
            for a in axes:
                rest = tuple(x for x in axes if x != a)
                shifted = np.zeros_like(kept)
                src = [slice(None)] * m1
                dst = [slice(None)] * m1
                src[a] = slice(0, shape[a] - stride)
                dst[a] = slice(stride, None)
                shifted[tuple(dst)] = kept[tuple(src)]
                acc = new_markers.setdefault(rest, np.zeros(shape, dtype=bool))
                acc |= kept | shifted
        skeleton = np.zeros(shape, dtype=bool)
        for rest, markers in new_markers.items():
            skeleton |= _paint(markers, rest, stride)
        removed |= _mark(shape, (p for b in blocks for p in b))
        if (skeleton & removed).any():
            raise ChainDefect(f"skeleton meets a candidate block after step {t}")
        steps.append(SkeletonStep(t, j, g, eps, axis, n_a, len(blocks) - n_a, n_cells, n_kept, int(skeleton.sum())))
    verts = np.argwhere(skeleton)
    if not len(verts):
        raise ChainDefect("final skeleton is empty", [s.to_json() for s in steps])
    survivors = []
    for row in verts:
        coords = tuple(int(v) // SCALE for v in row)
        if any(int(v) % SCALE for v in row) or not x_tau_member(label, coords):
            raise ChainDefect(f"surviving vertex {tuple(int(v) for v in row)} (refined) is not in X_tau")
        survivors.append(LatticePoint(label, coords))
    survivors.sort()
    leftover = verify_cover(candidate, survivors[:1])
    if "coverage" not in leftover.kinds():
        raise ChainDefect(f"witness {survivors[0]} is covered by the candidate")
    return RefuteResult(survivors[0], survivors, label, bound, steps)
