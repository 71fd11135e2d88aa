"""Uniformly bounded r-disjoint covers of finite point sets.

A cover is a list of families of blocks; family ``i`` must be
``radii[i]``-disjoint, every block must have diameter <= ``bound``, and the
union must contain every point.  Distances are ``d_xi``.

Search reduces to assigning each point one family: inside family ``i``,
points closer than ``radii[i]`` must share a block, so the blocks may be
taken to be the connected components of the "closer than r_i" graph, and an
assignment is valid iff every component has diameter <= ``bound``.  (Any
cover restricts to such an assignment, and components of a valid assignment
form a cover.)  The exhaustive kernel explores assignments with unit
propagation, so its NONE answers are authoritative.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import kernels
from .errors import BudgetExceeded, ParseError, PreconditionError
from .space import LatticePoint, as_label, enumerate_x_tau, exponents, pairwise_d_xi

__all__ = [
    "CoverSpec",
    "Verdict",
    "SearchResult",
    "A2Result",
    "verify_cover",
    "search_cover",
    "greedy_cover",
    "a2_check",
    "a2_radii",
    "a_radii",
    "blocks_from_assignment",
    "NODE_BUDGET",
    "EXHAUSTIVE_POINT_CAP",
    "BOX_POINT_CAP",
]

NODE_BUDGET = int(os.environ.get("XIDIM_NODE_BUDGET", 2_000_000))
EXHAUSTIVE_POINT_CAP = int(os.environ.get("XIDIM_POINT_CAP", 600))
BOX_POINT_CAP = int(os.environ.get("XIDIM_BOX_POINT_CAP", 20_000))

Block = tuple[LatticePoint, ...]


@dataclass
class CoverSpec:
    families: list[list[Block]]
    radii: list[int]
    bound: int

    def __post_init__(self) -> None:
        if len(self.families) != len(self.radii):
            raise PreconditionError("one radius per family is required")
        if self.bound < 0 or any(r <= 0 for r in self.radii):
            raise PreconditionError("radii must be positive and the bound nonnegative")
        self.families = [[tuple(sorted(b)) for b in fam if b] for fam in self.families]

    def blocks(self) -> Iterable[tuple[int, Block]]:
        for i, fam in enumerate(self.families):
            for b in fam:
                yield i, b

    def covered(self) -> set[LatticePoint]:
        return {p for _, b in self.blocks() for p in b}

    def to_json(self) -> dict:
        return {
            "radii": list(self.radii),
            "bound": self.bound,
            "families": [
                [[{"label": list(p.label), "coords": list(p.coords)} for p in b] for b in fam]
                for fam in self.families
            ],
        }

    @classmethod
    def from_json(cls, obj: Any) -> "CoverSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            fams = [
                [tuple(LatticePoint(as_label(p["label"]), tuple(p["coords"])) for p in b) for b in fam]
                for fam in obj["families"]
            ]
            return cls(fams, [int(r) for r in obj["radii"]], int(obj["bound"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad cover JSON: {exc}") from None


@dataclass
class Verdict:
    ok: bool
    violations: list[dict] = field(default_factory=list)

    def kinds(self) -> set[str]:
        return {v["kind"] for v in self.violations}

    def uncovered(self) -> list[LatticePoint]:
        return [p for v in self.violations if v["kind"] == "coverage" for p in v["points"]]

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, LatticePoint):
                return {"label": list(v.label), "coords": list(v.coords)}
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        out = []
        for v in self.violations:
            v = dict(v)
            if "points" in v:
                v["points"] = v["points"][:20]
            out.append(enc(v))
        return {"ok": self.ok, "violations": out}


def _box_coords(points: Sequence[LatticePoint]) -> Optional[np.ndarray]:
    """Coordinates when all points share one label, where ``d_xi`` is the sup-metric."""
    if not points or len({p.label for p in points}) > 1:
        return None
    return np.array([p.coords for p in points], dtype=np.int64).reshape(len(points), -1)


def _near_pairs(coords: np.ndarray, r: int) -> np.ndarray:
    """Index pairs ``a < b`` at sup-distance ``< r``, sorted."""
    if r <= 1 or len(coords) < 2:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = cKDTree(coords).query_pairs(r - 0.5, p=np.inf, output_type="ndarray")
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))] if len(pairs) else pairs.reshape(0, 2)


def _close_pair(family: Sequence[Block], r: int):
    """First pair of points in different blocks at distance < r, if any."""
    pts = [p for b in family for p in b]
    bid = np.array([k for k, b in enumerate(family) for _ in b])
    coords = _box_coords(pts)
    if coords is not None:
        pairs = _near_pairs(coords, r)
        bad = pairs[bid[pairs[:, 0]] != bid[pairs[:, 1]]]
        if not len(bad):
            return None
        x, y = (int(v) for v in bad[0])
        return int(bid[x]), int(bid[y]), pts[x], pts[y], int(np.abs(coords[x] - coords[y]).max())
    for lo in range(0, len(pts), 256):
        d = pairwise_d_xi(pts[lo:lo + 256], pts)
        bad = (d < r) & (bid[lo:lo + 256, None] != bid[None, :])
        if bad.any():
            x, y = np.argwhere(bad)[0]
            x += lo
            return int(bid[x]), int(bid[y]), pts[x], pts[y], int(d[x - lo, y])
    return None


def verify_cover(spec: CoverSpec, points: Iterable[LatticePoint]) -> Verdict:
    """Check disjointness, diameters and coverage; report the first witness of each."""
    violations = []
    for i, fam in enumerate(spec.families):
        hit = _close_pair(fam, spec.radii[i])
        if hit is not None:
            a, b, x, y, d = hit
            violations.append({
                "kind": "disjointness",
                "family": i,
                "blocks": [a, b],
                "distance": d,
                "radius": spec.radii[i],
                "pair": [x, y],
            })
            break
    for i, b in spec.blocks():
        if len(b) > 256 and _box_coords(b) is not None:
            c = _box_coords(b)
            ext = c.max(axis=0) - c.min(axis=0)
            if int(ext.max()) > spec.bound:
                a = int(ext.argmax())
                x, y = int(c[:, a].argmin()), int(c[:, a].argmax())
                violations.append({"kind": "diameter", "family": i, "diameter": int(ext.max()),
                                   "bound": spec.bound, "pair": [b[x], b[y]]})
                break
            continue
        d = pairwise_d_xi(b)
        if d.size and int(d.max()) > spec.bound:
            x, y = divmod(int(np.argmax(d)), d.shape[1])
            violations.append({
                "kind": "diameter",
                "family": i,
                "diameter": int(d[x, y]),
                "bound": spec.bound,
                "pair": [b[x], b[y]],
            })
            break
    covered = spec.covered()
    missing = sorted(p for p in set(points) if p not in covered)
    if missing:
        violations.append({"kind": "coverage", "count": len(missing), "first": missing[0],
                           "points": missing})
    return Verdict(not violations, violations)


def a2_radii(sigma: Iterable[int]) -> list[int]:
    """Radii ``2^i`` for ``i`` in ``sigma`` (the A_2 instance)."""
    return [1 << i for i in sorted(sigma)]


def a_radii(sigma: Iterable[int]) -> list[int]:
    """Radii ``i`` for ``i`` in ``sigma`` (the A instance)."""
    return sorted(sigma)


def _clipped_matrix(points: Sequence[LatticePoint], cap: int) -> list[list[int]]:
    d = np.minimum(pairwise_d_xi(points), cap)
    return d.astype(np.int32).tolist()


def blocks_from_assignment(
    points: Sequence[LatticePoint], assignment: Sequence[int], radii: Sequence[int], dist=None
) -> list[list[Block]]:
    """Connected components of the "closer than r_i" graph inside each family."""
    coords = _box_coords(points) if dist is None else None
    d = None if coords is not None else pairwise_d_xi(points) if dist is None else np.asarray(dist)
    assignment = np.asarray(assignment, dtype=np.int64)
    families: list[list[Block]] = [[] for _ in radii]
    for i, r in enumerate(radii):
        idx = np.nonzero(assignment == i)[0]
        if idx.size == 0:
            continue
        if coords is None:
            graph = csr_matrix(d[np.ix_(idx, idx)] < r)
        else:
            pairs = _near_pairs(coords[idx], r)
            ones = np.ones(len(pairs), dtype=bool)
            graph = coo_matrix((ones, (pairs[:, 0], pairs[:, 1])), shape=(idx.size, idx.size)).tocsr()
        _, labels = connected_components(graph, directed=False)
        groups: dict[int, list[LatticePoint]] = {}
        for p, c in zip(idx.tolist(), labels.tolist()):
            groups.setdefault(c, []).append(points[p])
        families[i] = sorted(tuple(sorted(g)) for g in groups.values())
    return families


@dataclass
class SearchResult:
    status: str  # "cover" | "noCover" | "inconclusive"
    spec: Optional[CoverSpec]
    mode: str
    nodes: int = 0
    uncovered: list[LatticePoint] = field(default_factory=list)


def search_cover(
    points: Iterable[LatticePoint],
    radii: Sequence[int],
    bound: int,
    mode: str = "exhaustive",
    node_budget: int | None = None,
    point_cap: int | None = None,
    seed: int | None = None,
) -> SearchResult:
    """Find a cover with the given radii and bound.

    Exhaustive mode: ``noCover`` is a proof of non-existence; raises
    :class:`BudgetExceeded` when the node or point budget is exhausted.
    Greedy mode: a found cover is valid, a failure is only ``inconclusive``.
    """
    pts = sorted(set(points))
    radii = [int(r) for r in radii]
    if not radii:
        raise PreconditionError("at least one family is required")
    if mode == "greedy":
        spec, missing = greedy_cover(pts, radii, bound, seed=seed)
        if missing:
            return SearchResult("inconclusive", spec, mode, uncovered=missing)
        return SearchResult("cover", spec, mode)
    if mode != "exhaustive":
        raise PreconditionError(f"unknown mode {mode!r}")
    # one label: sup-metric on integer coordinates, so the bounding-box kernel applies
    single = len({p.label for p in pts}) <= 1
    cap = point_cap if point_cap is not None else BOX_POINT_CAP if single else EXHAUSTIVE_POINT_CAP
    if len(pts) > cap:
        raise BudgetExceeded(f"{len(pts)} points exceed the exhaustive cap of {cap}")
    budget = NODE_BUDGET if node_budget is None else node_budget
    dist = None
    if single:
        status, assignment, nodes = kernels.cover_search_box([p.coords for p in pts], radii, bound, budget)
    else:
        dist = _clipped_matrix(pts, max(max(radii), bound) + 1)
        status, assignment, nodes = kernels.cover_search(dist, radii, bound, budget)
    if status == kernels.BUDGET:
        raise BudgetExceeded(f"exhaustive search exceeded {budget} nodes")
    if status == kernels.NONE:
        return SearchResult("noCover", None, mode, nodes)
    fams = blocks_from_assignment(pts, assignment, radii, None if dist is None else np.asarray(dist))
    return SearchResult("cover", CoverSpec(fams, radii, bound), mode, nodes)


def _family_order(m: int, rng: Optional[random.Random]) -> list[int]:
    order = list(range(m))
    if rng:
        rng.shuffle(order)
    return order


def _greedy_matrix(dist, order, radii, bound, rng):
    n, m = len(dist), len(radii)
    fam = np.full(n, -1)
    comp = np.full(n, -1)
    members: dict[int, list[int]] = {}
    next_id = 0
    missing = []
    for p in order:
        placed = False
        for i in _family_order(m, rng):
            near = np.nonzero((fam == i) & (dist[p] < radii[i]))[0]
            cids = sorted({int(comp[q]) for q in near})
            idx = [p] + [q for c in cids for q in members[c]]
            if len(idx) > 1 and int(dist[np.ix_(idx, idx)].max()) > bound:
                continue
            for c in cids:
                del members[c]
            members[next_id] = idx
            comp[idx] = next_id
            fam[p] = i
            next_id += 1
            placed = True
            break
        if not placed:
            missing.append(p)
    return fam, missing


GRID_CELL_CAP = 50_000_000


def _greedy_box(coords, order, radii, bound, rng):
    """As :func:`_greedy_matrix`, with union-find components carrying bounding boxes.

    Assigned points are looked up in a dense index grid over the bounding box
    of ``coords`` (a k-d tree when that grid would be too large).
    """
    n, m = len(coords), len(radii)
    fam = np.full(n, -1)
    parent = np.arange(n)
    lo = coords.copy()
    hi = coords.copy()
    missing = []
    base = coords.min(axis=0)
    shape = coords.max(axis=0) - base + 1
    if int(np.prod(shape, dtype=np.float64)) <= GRID_CELL_CAP:
        slot = np.full(tuple(int(v) for v in shape), -1, dtype=np.int64)
        local = coords - base

        def near(p, r):
            box = tuple(slice(max(int(c) - r + 1, 0), int(c) + r) for c in local[p])
            found = slot[box].ravel()
            return found[found >= 0]

        def mark(p):
            slot[tuple(local[p])] = p
    else:
        tree = cKDTree(coords)

        def near(p, r):
            found = np.asarray(tree.query_ball_point(coords[p], r - 0.5, p=np.inf), dtype=np.int64)
            return found[fam[found] >= 0]

        def mark(p):
            pass

    def roots_of(ids):
        r = parent[ids]
        while True:
            up = parent[r]
            if np.array_equal(up, r):
                break
            r = up
        parent[ids] = r
        return np.unique(r)

    for p in order:
        for i in _family_order(m, rng):
            nb = near(p, radii[i])
            roots = roots_of(nb[fam[nb] == i])
            if len(roots):
                blo = np.minimum(lo[roots].min(axis=0), coords[p])
                bhi = np.maximum(hi[roots].max(axis=0), coords[p])
                if int((bhi - blo).max()) > bound:
                    continue
                parent[roots] = p
                lo[p], hi[p] = blo, bhi
            fam[p] = i
            mark(p)
            break
        else:
            missing.append(p)
    return fam, missing


def greedy_cover(
    points: Sequence[LatticePoint],
    radii: Sequence[int],
    bound: int,
    seed: int | None = None,
) -> tuple[CoverSpec, list[LatticePoint]]:
    """One pass, no backtracking: each point joins the first family it fits.

    Returns a valid (possibly partial) cover and the points it left out.  With
    a seed, both the point order and each point's family order are shuffled.
    """
    pts = sorted(set(points))
    n = len(pts)
    radii = list(radii)
    m = len(radii)
    rng = random.Random(seed) if seed is not None else None
    order = list(range(n))
    if rng:
        rng.shuffle(order)
    coords = _box_coords(pts)
    if coords is not None:
        fam, missing = _greedy_box(coords, order, radii, bound, rng)
        dist = None
    else:
        dist = pairwise_d_xi(pts).astype(np.int64) if n else np.zeros((0, 0), dtype=np.int64)
        fam, missing = _greedy_matrix(dist, order, radii, bound, rng)
    missing = [pts[p] for p in missing]
    fams = blocks_from_assignment(pts, fam.tolist(), radii, dist)
    return CoverSpec(fams, radii, bound), sorted(missing)


@dataclass
class A2Result:
    status: str  # "noCover" | "cover" | "inconclusive"
    tau: tuple[int, ...]
    bound: int
    radii: list[int]
    points: int
    window: Optional[int] = None
    window_points: int = 0
    nodes: int = 0
    spec: Optional[CoverSpec] = None
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "tau": list(self.tau),
            "bound": self.bound,
            "radii": self.radii,
            "box": [0, 8 * self.bound],
            "points": self.points,
            "window": self.window,
            "windowPoints": self.window_points,
            "nodes": self.nodes,
        }
        if self.note:
            out["note"] = self.note
        if self.spec is not None:
            out["cover"] = self.spec.to_json()
        return out


def _windows(bound: int, step: int) -> list[int]:
    ws = list(range(bound + 1, 2 * bound + 1, step)) + [4 * bound, 8 * bound]
    return sorted(set(ws))


def a2_check(
    tau: Iterable[int],
    bound: int,
    radii: Sequence[int] | None = None,
    node_budget: int | None = None,
    point_cap: int | None = None,
) -> A2Result:
    """Decide at desk scale whether ``X_tau ∩ [0, 8B]^{m+1}`` has an A_2 cover.

    Exhaustive search runs on growing corner windows ``[0, w]^{m+1}``; since
    a cover of a set restricts to a cover of any subset, ``noCover`` on a
    window certifies ``noCover`` on the whole box.  A cover is reported only
    when the full box itself is solved.
    """
    label = as_label(tau)
    ks = exponents(label)
    if radii is None:
        radii = [1 << (k + 2) for k in ks]
        if bound <= 1 << (ks[-1] + 1):
            raise PreconditionError(f"bound must exceed 2^(k_m+1) = {1 << (ks[-1] + 1)}", bound)
    radii = list(radii)
    full = enumerate_x_tau(label, [(0, 8 * bound)] * len(label))
    nodes_total = 0
    for w in _windows(bound, 1 << ks[0]):
        window = [p for p in full if max(p.coords) <= w]
        try:
            res = search_cover(window, radii, bound, "exhaustive", node_budget, point_cap)
        except BudgetExceeded as exc:
            return A2Result("inconclusive", label, bound, radii, len(full), w, len(window),
                            nodes_total, note=str(exc))
        nodes_total += res.nodes
        if res.status == "noCover":
            return A2Result("noCover", label, bound, radii, len(full), w, len(window), nodes_total)
        if w == 8 * bound:
            return A2Result("cover", label, bound, radii, len(full), w, len(window), nodes_total,
                            spec=res.spec)
    raise AssertionError("window schedule must end at the full box")
