import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_cover_exists
from xidim.cover import (
    CoverSpec,
    a2_check,
    a2_radii,
    a_radii,
    blocks_from_assignment,
    greedy_cover,
    search_cover,
    verify_cover,
)
from xidim.errors import BudgetExceeded, ParseError, PreconditionError
from xidim.space import d_xi, enumerate_x_tau, pairwise_d_xi, point


def line(lo, hi, tau=(2,)):
    return [point(tau, (x,)) for x in range(lo, hi + 1)]


class TestVerify:
    def test_spaced_singletons(self):
        pts = [point((2,), (x,)) for x in range(0, 40, 5)]
        spec = CoverSpec([[(p,) for p in pts]], [5], 0)
        assert verify_cover(spec, pts).ok

    def test_close_blocks(self):
        a, b = point((2,), (0,)), point((2,), (3,))
        v = verify_cover(CoverSpec([[(a,), (b,)]], [4], 0), [a, b])
        assert v.kinds() == {"disjointness"}
        hit = v.violations[0]
        assert hit["distance"] == 3 and set(hit["pair"]) == {a, b}

    def test_oversized_block(self):
        blk = tuple(line(0, 9))
        v = verify_cover(CoverSpec([[blk]], [1], 8), blk)
        assert v.kinds() == {"diameter"} and v.violations[0]["diameter"] == 9

    def test_tiling_with_gaps_misses_points(self):
        b = 8
        pts = line(0, 8 * b)
        blocks = [tuple(line(s, s + b)) for s in range(0, 8 * b + 1, b + 4)]
        v = verify_cover(CoverSpec([blocks], [4], b), pts)
        assert v.kinds() == {"coverage"}
        assert v.uncovered()[0] == point((2,), (9,))

    def test_json_roundtrip(self):
        spec = CoverSpec([[tuple(line(0, 2))], [tuple(line(5, 5))]], [1, 1], 2)
        again = CoverSpec.from_json(json.dumps(spec.to_json()))
        assert again.families == spec.families and again.radii == spec.radii
        with pytest.raises(ParseError):
            CoverSpec.from_json('{"families": 3}')

    def test_spec_invariants(self):
        with pytest.raises(PreconditionError):
            CoverSpec([[]], [1, 2], 3)
        with pytest.raises(PreconditionError):
            CoverSpec([[]], [0], 3)


class TestSearch:
    def test_single_block(self):
        res = search_cover(line(0, 7), [2], 8)
        assert res.status == "cover"
        assert len(res.spec.families[0]) == 1

    def test_unit_radius_gives_singletons(self):
        res = search_cover(line(0, 7), [1], 0)
        assert res.status == "cover"
        assert len(res.spec.families[0]) == 8

    @pytest.mark.parametrize("b", [4, 8])
    def test_one_dim_a2_instance_has_no_cover(self, b):
        assert search_cover(line(0, 8 * b), [4], b).status == "noCover"

    def test_even_odd_split(self):
        res = search_cover(line(0, 20), [1, 1], 0)
        assert res.status == "cover"
        assert verify_cover(res.spec, line(0, 20)).ok

    def test_budgets(self):
        pts = enumerate_x_tau((2, 3), [(0, 17)] * 2)
        with pytest.raises(BudgetExceeded):
            search_cover(pts, [4, 8], 16, node_budget=50)
        with pytest.raises(BudgetExceeded):
            search_cover(pts, [4, 8], 16, point_cap=10)

    def test_mixed_labels_use_matrix_kernel(self):
        pts = line(0, 5) + [point((3,), (x,)) for x in (0, 2, 4)]
        res = search_cover(pts, [3, 3], 2)
        assert res.status == "cover" and verify_cover(res.spec, pts).ok

    def test_unknown_mode(self):
        with pytest.raises(PreconditionError):
            search_cover(line(0, 3), [1], 1, mode="fast")

    @given(st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_found_covers_verify(self, seed):
        rng = random.Random(seed)
        pts = sorted({point((2, 3), (rng.randrange(0, 12), 2 * rng.randrange(0, 6))) for _ in range(25)})
        radii = [rng.randint(1, 5) for _ in range(rng.randint(1, 2))]
        res = search_cover(pts, radii, rng.randint(0, 6))
        if res.status == "cover":
            assert verify_cover(res.spec, pts).ok

    @given(st.integers(0, 10**6))
    @settings(max_examples=25)
    def test_monotone_in_radii(self, seed):
        rng = random.Random(seed)
        pts = sorted({point((2,), (rng.randrange(0, 30),)) for _ in range(14)})
        radii = [rng.randint(2, 6), rng.randint(2, 6)]
        bound = rng.randint(1, 5)
        if search_cover(pts, radii, bound).status == "cover":
            smaller = [rng.randint(1, r) for r in radii]
            assert search_cover(pts, smaller, bound).status == "cover"

    @given(st.integers(0, 10**6))
    @settings(max_examples=30)
    def test_agrees_with_brute_force(self, seed):
        rng = random.Random(seed)
        labels = [(2,), (3,), (2, 3)]
        pts = set()
        while len(pts) < rng.randint(3, 6):
            tau = rng.choice(labels[: rng.randint(1, 3)])
            coords = tuple(rng.randrange(0, 6) * (2 if tau == (3,) else 1) for _ in tau)
            if tau == (2, 3) and coords[0] % 2 and coords[1] % 2:
                continue
            pts.add(point(tau, coords))
        pts = sorted(pts)
        radii = [rng.randint(1, 6) for _ in range(rng.randint(1, 2))]
        bound = rng.randint(0, 6)
        want = brute_cover_exists(pts, d_xi, radii, bound)
        assert (search_cover(pts, radii, bound).status == "cover") == want

    def test_a_and_a2_instances_coincide(self):
        sigma = [2, 3]
        assert a2_radii(sigma) == a_radii([1 << i for i in sigma]) == [4, 8]
        pts = enumerate_x_tau((2, 3), [(0, 9)] * 2)
        one = search_cover(pts, a2_radii(sigma), 8).status
        two = search_cover(pts, a_radii([1 << i for i in sigma]), 8).status
        assert one == two == "noCover"


class TestGreedy:
    @pytest.mark.parametrize("seed", [None, 0, 1, 2])
    def test_partial_cover_is_valid(self, seed):
        pts = enumerate_x_tau((2, 3), [(0, 24)] * 2)
        spec, missing = greedy_cover(pts, [4, 8], 8, seed=seed)
        v = verify_cover(spec, pts)
        assert v.kinds() <= {"coverage"}
        assert sorted(v.uncovered()) == missing
        assert spec.covered() | set(missing) == set(pts)

    def test_greedy_mode_flags(self):
        easy = search_cover(line(0, 7), [1], 8, mode="greedy")
        assert easy.status == "cover"
        hard = search_cover(line(0, 64), [4], 8, mode="greedy", seed=1)
        assert hard.status == "inconclusive" and hard.uncovered


def test_blocks_from_assignment():
    pts = line(0, 9)
    fams = blocks_from_assignment(pts, [0, 0, 0, 1, 1, 0, 0, -1, 1, 1], [2, 1])
    assert [[p.coords[0] for p in b] for b in fams[0]] == [[0, 1, 2], [5, 6]]
    assert [[p.coords[0] for p in b] for b in fams[1]] == [[3], [4], [8], [9]]


class TestA2:
    @pytest.mark.parametrize(
        "tau, b", [((2,), 8), ((2,), 16), ((3,), 8), ((3,), 16), ((2, 3), 8), ((3, 4), 16)]
    )
    def test_no_cover(self, tau, b):
        res = a2_check(tau, b)
        assert res.status == "noCover"
        assert res.radii == [1 << t for t in tau]
        assert res.window <= 8 * b

    def test_relaxed_radii_admit_a_cover(self):
        res = a2_check((2,), 8, radii=[1, 1])
        assert res.status == "cover"
        pts = enumerate_x_tau((2,), [(0, 64)])
        assert verify_cover(res.spec, pts).ok

    def test_two_dim_b16_exceeds_small_budget(self):
        assert a2_check((2, 3), 16, node_budget=5000).status == "inconclusive"

    def test_bound_precondition(self):
        with pytest.raises(PreconditionError):
            a2_check((3, 4), 8)

    def test_report(self):
        out = a2_check((2,), 8).to_json()
        assert out["status"] == "noCover" and out["box"] == [0, 64] and out["radii"] == [4]


@given(st.integers(0, 10**6))
@settings(max_examples=30)
def test_greedy_box_path_matches_matrix_path(seed):
    from xidim.cover import _greedy_box, _greedy_matrix

    rng = random.Random(seed)
    pts = sorted({point((2, 3), (rng.randrange(0, 20), 2 * rng.randrange(0, 10))) for _ in range(60)})
    coords = np.array([p.coords for p in pts])
    dist = pairwise_d_xi(pts)
    radii = [rng.randint(1, 6) for _ in range(rng.randint(1, 3))]
    bound = rng.randint(0, 8)
    order = list(range(len(pts)))
    rng.shuffle(order)
    box = _greedy_box(coords, order, radii, bound, random.Random(seed))
    mat = _greedy_matrix(dist, order, radii, bound, random.Random(seed))
    assert box[0].tolist() == mat[0].tolist() and box[1] == mat[1]
    spec_a = blocks_from_assignment(pts, box[0].tolist(), radii)
    spec_b = blocks_from_assignment(pts, box[0].tolist(), radii, dist)
    assert spec_a == spec_b
