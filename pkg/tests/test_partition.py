import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xidim.acceptance import random_chain_instance
from xidim.cover import CoverSpec, a2_check, greedy_cover, verify_cover
from xidim.errors import ChainDefect, PreconditionError
from xidim.partition import SCALE, DiscreteCube, epsilon_partition_chain, skeleton_refute
from xidim.space import enumerate_x_tau, point, x_tau_member


def refined_distance(x, block):
    return min(max(abs(a - SCALE * b) for a, b in zip(x, p)) for p in block)


class TestCube:
    def test_grid(self):
        cube = DiscreteCube(2, 4, 2)
        assert cube.points() == [(0, 0), (0, 2), (0, 4), (2, 0), (2, 2), (2, 4), (4, 0), (4, 2), (4, 4)]
        assert cube.contains((2, 4)) and not cube.contains((1, 0)) and not cube.contains((6, 0))
        assert cube.refined_shape == (13, 13)

    @pytest.mark.parametrize("args", [(0, 4, 1), (1, 0, 1), (1, 5, 2)])
    def test_invalid(self, args):
        with pytest.raises(PreconditionError):
            DiscreteCube(*args)


class TestChain:
    def test_one_dim_example(self):
        state = epsilon_partition_chain(DiscreteCube(1, 12, 1), [[[(4,), (5,), (6,)]]], 1)
        assert int(state.levels[1].sum()) == 26
        grid = [p[0] for p in state.grid_points(1)]
        assert not {4, 5, 6} & set(grid)
        assert grid == [2, 3, 7, 8, 9, 10]

    def test_empty_families_leave_inner_box(self):
        state = epsilon_partition_chain(DiscreteCube(2, 24, 1), [[], []], 2)
        grid = state.grid_points(2)
        # open 8/3 collars removed from both faces of each axis
        assert min(min(p) for p in grid) == 3 and max(max(p) for p in grid) == 21
        assert len(grid) == 19 * 19

    def test_two_dim_blocks(self):
        fams = [
            [[(0, 0), (4, 4)], [(20, 10), (24, 12)]],
            [[(10, 22), (12, 24)], [(8, 8)]],
        ]
        state = epsilon_partition_chain(DiscreteCube(2, 24, 1), fams, 2)
        assert state.steps[0].a_blocks == [1] and state.steps[1].a_blocks == [0]
        for x in state.refined_points(2):
            for fam in fams:
                for b in fam:
                    assert refined_distance(x, b) >= 2

    def test_summary(self):
        out = epsilon_partition_chain(DiscreteCube(1, 12, 1), [[]], 1).summary()
        assert out["levels"][0]["refinedPoints"] == 37
        assert out["levels"][1]["least"] == pytest.approx((4 / 3,))

    @pytest.mark.parametrize(
        "cube, fams, eps",
        [
            (DiscreteCube(1, 12, 1), [[]], 2),
            (DiscreteCube(1, 12, 1), [[]], 0),
            (DiscreteCube(1, 12, 1), [[], []], 1),
            (DiscreteCube(1, 12, 2), [[[(3,)]]], 1),
            (DiscreteCube(1, 12, 1), [[[(0,), (5,)]]], 1),
            (DiscreteCube(1, 24, 1), [[[(0,)], [(2,)]]], 3),
        ],
    )
    def test_preconditions(self, cube, fams, eps):
        with pytest.raises(PreconditionError):
            epsilon_partition_chain(cube, fams, eps)

    def test_gap_witness(self):
        with pytest.raises(PreconditionError) as err:
            epsilon_partition_chain(DiscreteCube(1, 24, 1), [[[(0,)], [(2,)]]], 3)
        assert err.value.witness == {"family": 1, "blocks": [0, 1], "distance": 2}

    @given(st.integers(0, 10**9))
    @settings(max_examples=40)
    def test_random_instances(self, seed):
        cube, fams, eps = random_chain_instance(random.Random(seed))
        state = epsilon_partition_chain(cube, fams, eps)
        top = SCALE * cube.side
        for k in range(1, cube.n + 1):
            assert not (state.levels[k] & ~state.levels[k - 1]).any()
        last = state.refined_points(cube.n)
        assert len(last)
        for x in last[:: max(1, len(last) // 200)]:
            for fam in fams:
                for b in fam:
                    assert refined_distance(x, b) >= eps
            assert all(4 * eps <= c <= top - 4 * eps for c in x)


def greedy(tau, b, seed):
    pts = enumerate_x_tau(tau, [(0, 8 * b)] * len(tau))
    spec, missing = greedy_cover(pts, [1 << t for t in tau], b, seed=seed)
    return spec, set(missing)


class TestRefute:
    @pytest.mark.parametrize("tau, b", [((2,), 8), ((2,), 16), ((3,), 16), ((2, 3), 8)])
    @pytest.mark.parametrize("seed", [None, 0, 1])
    def test_witness_is_uncovered(self, tau, b, seed):
        spec, missing = greedy(tau, b, seed)
        res = skeleton_refute(tau, b, spec)
        assert res.witness in missing
        assert res.witness == min(res.survivors)
        assert set(res.survivors) <= missing
        assert x_tau_member(tau, res.witness.coords)
        assert all(0 <= c <= 8 * b for c in res.witness.coords)

    def test_empty_candidate(self):
        spec = CoverSpec([[]], [4], 8)
        res = skeleton_refute((2,), 8, spec)
        assert res.witness.label == (2,)
        assert res.to_json()["box"] == [0, 64]

    def test_relaxed_radii_rejected(self):
        pts = enumerate_x_tau((2,), [(0, 64)])
        spec = CoverSpec([[(p,) for p in pts]], [1], 8)
        assert verify_cover(spec, pts).ok
        with pytest.raises(PreconditionError) as err:
            skeleton_refute((2,), 8, spec)
        assert err.value.witness == {"family": 0, "radius": 1, "required": 4}

    def test_two_family_cover_rejected(self):
        spec = a2_check((2,), 8, radii=[1, 1]).spec
        with pytest.raises(PreconditionError):
            skeleton_refute((2,), 8, spec)

    def test_candidate_checks(self):
        good = CoverSpec([[]], [4], 8)
        with pytest.raises(PreconditionError):
            skeleton_refute((2,), 4, good)
        with pytest.raises(PreconditionError):
            skeleton_refute((2, 3), 8, good)
        wrong_label = CoverSpec([[(point((3,), (0,)),)]], [4], 8)
        with pytest.raises(PreconditionError):
            skeleton_refute((2,), 8, wrong_label)
        clash = CoverSpec([[(point((2,), (0,)),), (point((2,), (2,)),)]], [4], 8)
        with pytest.raises(PreconditionError):
            skeleton_refute((2,), 8, clash)

    @pytest.mark.slow
    def test_three_dim(self):
        pts = enumerate_x_tau((2, 3, 4), [(0, 36)] * 3)
        spec, _ = greedy_cover(pts, [4, 8, 16], 9, seed=0)
        res = skeleton_refute((2, 3, 4), 9, spec)
        assert res.witness not in spec.covered()
        assert x_tau_member((2, 3, 4), res.witness.coords)
        assert len(res.steps) == 3
