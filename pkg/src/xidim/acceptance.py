"""The acceptance suite: nine seeded checks, each with a runtime limit.

Shared by ``xidim selftest`` and ``tests/test_acceptance.py``.  Every check
returns a :class:`CriterionResult`; a check passes only with zero violations
inside its time limit.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Optional

from .cover import a2_check, greedy_cover, verify_cover
from .errors import ChainDefect
from .finfam import ExplicitFamily, ord_family, ord_fast, reindex
from .ordinal import OMEGA, Ordinal, add, compare, decompose, fundamental
from .partition import SCALE, DiscreteCube, epsilon_partition_chain, skeleton_refute
from .sfamily import idx, ord_truncated, s_member
from .space import LatticePoint, d_xi, embed, enumerate_x_tau, sup_dist

__all__ = [
    "CriterionResult",
    "CRITERIA",
    "run_all",
    "random_family",
    "random_ordinal",
    "random_limit",
    "random_below",
    "random_chain_instance",
]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: Optional[float]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        limit = f" (limit {self.limit:g}s)" if self.limit else ""
        return f"[{status}] {self.number}. {self.name}: {self.detail} in {self.seconds:.2f}s{limit}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
            "limit": self.limit,
        }


# --- generators ---------------------------------------------------------------


def random_family(rng: random.Random, max_ground: int = 8, max_members: int = 30) -> ExplicitFamily:
    g = rng.randint(1, max_ground)
    members = []
    for _ in range(rng.randint(0, max_members)):
        size = rng.randint(1, g)
        members.append(rng.sample(range(1, g + 1), size))
    return ExplicitFamily(members)


def random_ordinal(rng: random.Random, max_degree: int = 2, max_coef: int = 3) -> Ordinal:
    """Random ordinal below ``omega^(max_degree+1)``."""
    terms = []
    for e in range(max_degree, -1, -1):
        if rng.random() < 0.6:
            terms.append((Ordinal.nat(e), rng.randint(1, max_coef)))
    return Ordinal(tuple(terms))


def random_limit(rng: random.Random, max_degree: int = 4, max_coef: int = 3) -> Ordinal:
    """Random limit ordinal below ``omega^omega``."""
    while True:
        terms = []
        for e in range(max_degree, 0, -1):
            if rng.random() < 0.5:
                terms.append((Ordinal.nat(e), rng.randint(1, max_coef)))
        if terms:
            return Ordinal(tuple(terms))


def random_below(rng: random.Random, alpha: Ordinal, max_coef: int = 5) -> Ordinal:
    """Random ordinal strictly below ``alpha`` (which must be below omega^omega)."""
    if alpha.is_zero():
        raise ValueError("nothing lies below 0")
    terms = list(alpha.terms)
    p = rng.randrange(len(terms))
    exp, coef = terms[p]
    head = terms[:p] + ([(exp, coef - 1)] if coef > 1 else [])
    top = int(exp)
    tail = []
    for e in range(top - 1, -1, -1):
        if rng.random() < 0.6:
            tail.append((Ordinal.nat(e), rng.randint(1, max_coef)))
    return Ordinal(tuple(head + tail))


def random_chain_instance(rng: random.Random) -> tuple[DiscreteCube, list[list[list[tuple[int, ...]]]], int]:
    """A valid input for :func:`epsilon_partition_chain` with ``n <= 2``, ``B <= 48``."""
    n = rng.randint(1, 2)
    step = rng.choice([1, 1, 2])
    side = step * rng.randint(max(7, -(-12 // step)), 48 // step)
    eps = rng.randint(1, (side - 1) // 6)
    cube = DiscreteCube(n, side, step)
    cap = side // 3
    families = []
    for _ in range(n):
        blocks: list[list[tuple[int, ...]]] = []
        for _ in range(rng.randint(0, 12)):
            lo = [step * rng.randint(0, side // step) for _ in range(n)]
            ext = [step * rng.randint(0, cap // step) for _ in range(n)]
            hi = [min(a + e, side) for a, e in zip(lo, ext)]
            pts = [
                tuple(rng.randrange(a, b + 1, step) for a, b in zip(lo, hi))
                for _ in range(rng.randint(1, 6))
            ]
            pts = sorted(set(pts))
            if all(
                min(max(abs(x - y) for x, y in zip(p, q)) for p in pts for q in other) >= eps
                for other in blocks
            ):
                blocks.append(pts)
        families.append(blocks)
    return cube, families, eps


# --- criteria ------------------------------------------------------------------


def _ord_axioms(rng: random.Random) -> tuple[bool, str]:
    bad: list[str] = []
    for trial in range(500):
        m = random_family(rng)
        o = ord_family(m)
        if o != ord_fast(m):
            bad.append(f"#{trial}: recursion {o} vs subset DP {ord_fast(m)}")
        for n in range(0, 9):
            if (o <= n) != all(len(s) <= n for s in m.members):
                bad.append(f"#{trial}: size bound fails at n={n}")
                break
        big = random_family(rng)
        sub = ExplicitFamily([s for s in big.members if rng.random() < 0.5])
        if ord_family(sub) > ord_family(big):
            bad.append(f"#{trial}: monotonicity")
        other = random_family(rng)
        if ord_family(m | other) > max(o, ord_family(other)):
            bad.append(f"#{trial}: union bound")
        ground = m.ground
        targets = sorted(rng.sample(range(1, 41), max(ground, default=0))) if ground else []
        if ground and ord_family(reindex(m, targets)) != o:
            bad.append(f"#{trial}: reindexing changed Ord")
        if ground:
            image = dict(zip(ground, rng.sample(range(1, 41), len(ground))))
            mapped = ExplicitFamily([[image[x] for x in s] for s in m.members])
            if ord_family(mapped | random_family(rng)) < o:
                bad.append(f"#{trial}: injective image has smaller Ord")
    return not bad, f"500 families, {len(bad)} violations" + (f"; first: {bad[0]}" if bad else "")


def _ord_truncated_finite(rng: random.Random) -> tuple[bool, str]:
    bad = [(n, N, ord_truncated(n, N)) for n in range(1, 6) for N in range(1, 7) if ord_truncated(n, N) != min(n, N)]
    return not bad, f"36 cases, {len(bad)} mismatches" + (f"; first (n, N, got) = {bad[0]}" if bad else "")


def _s_omega_closed_form(rng: random.Random) -> tuple[bool, str]:
    bad = []
    count = 0
    for k in range(1, 9):
        for sigma in combinations(range(1, 9), k):
            count += 1
            if s_member(sigma, OMEGA) != (len(sigma) <= sigma[0] + 1):
                bad.append(sigma)
    return not bad, f"{count} sets, {len(bad)} mismatches" + (f"; first {bad[0]}" if bad else "")


def _random_sigma(rng: random.Random, top: int = 10, max_size: int = 5) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(range(1, top + 1), rng.randint(1, max_size))))


def _s_structure(rng: random.Random) -> tuple[bool, str]:
    bad: list[str] = []
    checked = 0
    finite_exceptions = 0
    while checked < 300:
        xi = random_ordinal(rng)
        sigma = _random_sigma(rng)
        member = s_member(sigma, xi)
        gamma, n = decompose(xi)
        checked += 1
        if len(sigma) <= n + 1 and not member:
            # the small-set remark rests on the K-clause, which only exists for infinite xi
            if xi.is_finite():
                finite_exceptions += 1
            else:
                bad.append(f"small set {sigma} not in S_{xi}")
        if member:
            for k in range(1, len(sigma)):
                for sub in combinations(sigma, k):
                    if not s_member(sub, xi):
                        bad.append(f"inclusivity: {sub} of {sigma} in S_{xi}")
            if sigma[0] > 1:
                l = rng.randint(1, sigma[0] - 1)
                if not s_member((l,) + sigma, add(xi, 1)):
                    bad.append(f"prepending {l} to {sigma} leaves S_{add(xi, 1)}")
            bumped = tuple(sorted({x + rng.randint(0, 2) for x in sigma}))
            if len(bumped) == len(sigma) and all(b >= a for a, b in zip(sigma, bumped)):
                if not s_member(bumped, xi):
                    bad.append(f"upward closure: {bumped} above {sigma} in S_{xi}")
            if not gamma.is_zero():
                m = n + rng.randint(1, 3)
                if not s_member(sigma, add(gamma, m)):
                    bad.append(f"nesting: {sigma} in S_{xi} but not S_{add(gamma, m)}")
                if not any(
                    s_member(sigma, add(fundamental(gamma, l), n + 1)) for l in range(1, idx(sigma, n) + 1)
                ):
                    bad.append(f"no l certifies {sigma} in S_{xi}")
    detail = f"{checked} samples, {len(bad)} violations"
    if finite_exceptions:
        detail += f" (small-set remark skipped on {finite_exceptions} finite-xi samples where it does not apply)"
    return not bad, detail + (f"; first: {bad[0]}" if bad else "")


_METRIC_LABELS = [(3,), (4,), (3, 4), (3, 5), (4, 5, 6)]


def _metric_suite(rng: random.Random) -> tuple[bool, str]:
    pool: dict[tuple[int, ...], list[LatticePoint]] = {
        t: enumerate_x_tau(t, [(-8, 8)] * len(t)) for t in _METRIC_LABELS
    }
    allpts = [p for pts in pool.values() for p in pts]
    bad: list[str] = []
    used = set()
    for _ in range(10_000):
        x, y, z = (rng.choice(allpts) for _ in range(3))
        used.update((x.label, y.label, z.label))
        dxy, dyz, dxz = d_xi(x, y), d_xi(y, z), d_xi(x, z)
        if dxy < 0 or (dxy == 0) != (x == y) or dxy != d_xi(y, x) or dxz > dxy + dyz:
            bad.append(f"axioms fail on {x}, {y}, {z}")
    for _ in range(1000):
        t = rng.choice(_METRIC_LABELS)
        x, y = rng.choice(pool[t]), rng.choice(pool[t])
        ex, ey = embed(x), embed(y)
        rho = max((abs(ex.get(i, 0) - ey.get(i, 0)) for i in ex.keys() | ey.keys()), default=0)
        if rho != sup_dist(x, y):
            bad.append(f"embedding not isometric on {x}, {y}")
    ok = not bad and len(used) >= 3
    return ok, f"10000 triples over {len(used)} labels + 1000 pairs, {len(bad)} violations"


def _a2_one_dim(rng: random.Random) -> tuple[bool, str]:
    out = []
    ok = True
    for b in (8, 16):
        t0 = time.perf_counter()
        res = a2_check((2,), b)
        dt = time.perf_counter() - t0
        ok &= res.status == "noCover" and dt < 300
        out.append(f"B={b}: {res.status} (window {res.window}, {res.nodes} nodes, {dt:.2f}s)")
    return ok, "; ".join(out)


def _a2_two_dim(rng: random.Random) -> tuple[bool, str]:
    tau, b = (2, 3), 8
    res = a2_check(tau, b)
    pts = enumerate_x_tau(tau, [(0, 8 * b)] * 2)
    radii = [1 << t for t in tau]
    good = 0
    notes = []
    for seed in range(20):
        spec, _ = greedy_cover(pts, radii, b, seed=rng.randrange(1 << 30))
        try:
            wit = skeleton_refute(tau, b, spec).witness
        except ChainDefect as exc:
            notes.append(str(exc))
            continue
        verdict = verify_cover(spec, [wit])
        if wit in pts and "coverage" in verdict.kinds() and verdict.uncovered() == [wit]:
            good += 1
        else:
            notes.append(f"witness {wit} rejected")
    ok = res.status == "noCover" and good == 20
    detail = f"a2 {res.status} (window {res.window}, {res.nodes} nodes); {good}/20 witnesses verified"
    return ok, detail + (f"; {notes[0]}" if notes else "")


def _partition_chain(rng: random.Random) -> tuple[bool, str]:
    bad: list[str] = []
    for trial in range(100):
        cube, fams, eps = random_chain_instance(rng)
        try:
            state = epsilon_partition_chain(cube, fams, eps)
        except ChainDefect as exc:
            bad.append(f"#{trial}: {exc}")
            continue
        for k, fam in enumerate(fams, 1):
            if (state.levels[k] & ~state.levels[k - 1]).any():
                bad.append(f"#{trial}: L_{k} not inside L_{k - 1}")
            for blk in fam:
                if any(state.levels[k][tuple(SCALE * c for c in p)] for p in blk):
                    bad.append(f"#{trial}: L_{k} meets a block of family {k}")
        if not state.nonempty(cube.n):
            bad.append(f"#{trial}: L_n empty")
    return not bad, f"100 instances, {len(bad)} violations" + (f"; first: {bad[0]}" if bad else "")


def _zeta_cofinality(rng: random.Random) -> tuple[bool, str]:
    bad: list[str] = []
    zeros = 0
    for _ in range(100):
        alpha = random_limit(rng)
        for _ in range(20):
            beta = random_below(rng, alpha)
            if compare(beta, alpha) >= 0:
                bad.append(f"generator produced {beta} >= {alpha}")
                continue
            # beta = 0 gives a zero bound, but indices start at 1
            cap = max(1, 10 * (beta.size() + beta.max_coefficient()))
            zeros += beta.is_zero()
            if not any(compare(fundamental(alpha, i), beta) > 0 for i in range(1, cap + 1)):
                bad.append(f"no index <= {cap} passes {beta} below {alpha}")
    detail = f"100 limits x 20 targets, {len(bad)} violations ({zeros} targets were 0, bound floored at 1)"
    return not bad, detail + (f"; first: {bad[0]}" if bad else "")


CRITERIA: list[tuple[int, str, Callable[[random.Random], tuple[bool, str]], Optional[float]]] = [
    (1, "Ord axioms on random families", _ord_axioms, 30.0),
    (2, "Ord of finite-index truncations", _ord_truncated_finite, 10.0),
    (3, "closed form of S_omega", _s_omega_closed_form, None),
    (4, "structure of S_xi", _s_structure, 60.0),
    (5, "metric axioms and isometric embedding", _metric_suite, None),
    (6, "A2 refutation in one dimension", _a2_one_dim, 300.0),
    (7, "A2 refutation in two dimensions", _a2_two_dim, 600.0),
    (8, "partition chain nonemptiness", _partition_chain, None),
    (9, "cofinality of fundamental sequences", _zeta_cofinality, None),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    for num, name, fn, limit in CRITERIA:
        if num == number:
            rng = random.Random(f"{seed}:{num}")
            t0 = time.perf_counter()
            ok, detail = fn(rng)
            dt = time.perf_counter() - t0
            if limit is not None and dt > limit:
                ok = False
                detail += f"; over the {limit:g}s limit"
            return CriterionResult(num, name, ok, detail, dt, limit)
    raise KeyError(f"no criterion {number}")


def run_all(seed: int = 0, only: Iterable[int] | None = None) -> list[CriterionResult]:
    wanted = set(only) if only else {c[0] for c in CRITERIA}
    return [run_criterion(num, seed) for num, *_ in CRITERIA if num in wanted]
