import csv
from itertools import combinations
from pathlib import Path

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import all_subsets, in_s_omega, naive_ord
from strategies import finsets, nested_ordinals, ordinals_below_omega_pow
from xidim.errors import BudgetExceeded, PreconditionError
from xidim.finfam import ExplicitFamily, is_inclusive
from xidim.ordinal import OMEGA, add, decompose, fundamental, parse_ordinal
from xidim.sfamily import (
    big_k,
    idx,
    ord_truncated,
    s_member,
    s_member_shifted,
    truncate,
    witness_index,
)

GOLDEN = Path(__file__).parent / "data" / "ord_truncated_omega.csv"

below_w3 = ordinals_below_omega_pow(max_exp=2, max_coef=3)


def test_big_k_and_idx():
    assert big_k([3, 5, 9], 1) == (9,)
    assert big_k([3, 5, 9], 2) is None
    assert big_k([4], 0) is None
    assert idx([3, 5, 9], 1) == 5
    assert idx([3, 5, 9], 7) == 9
    assert idx([4], 0) == 4


class TestMembership:
    def test_finite(self):
        assert s_member([1, 7], 2)
        assert not s_member([1, 2, 3], 2)

    def test_omega_examples(self):
        assert s_member([2, 3, 4], OMEGA)
        assert not s_member([1, 2, 3], OMEGA)

    def test_omega_closed_form(self):
        for sigma in all_subsets(8):
            s = tuple(sorted(sigma))
            assert s_member(s, OMEGA) == in_s_omega(s), s

    def test_shifted(self):
        assert s_member_shifted([3, 9], 2)
        assert s_member_shifted([4, 5, 6], OMEGA)
        with pytest.raises(PreconditionError):
            s_member_shifted([2], OMEGA)

    def test_witness_index(self):
        assert witness_index([2, 3, 4], OMEGA) == 2
        assert witness_index([5], OMEGA) == 0
        assert witness_index([1, 2, 3], OMEGA) is None
        with pytest.raises(ValueError):
            witness_index([1], 3)


class TestStructure:
    @given(below_w3, finsets)
    def test_inclusive(self, xi, sigma):
        assume(s_member(sigma, xi))
        for k in range(1, len(sigma)):
            for sub in combinations(sigma, k):
                assert s_member(sub, xi)

    @given(below_w3, finsets)
    def test_small_sets_are_members_for_infinite_xi(self, xi, sigma):
        assume(not xi.is_finite())
        _, n = decompose(xi)
        if len(sigma) <= n + 1:
            assert s_member(sigma, xi)

    def test_small_set_remark_does_not_hold_for_finite_xi(self):
        # |sigma| = n + 1 but S_n only allows n elements
        assert not s_member([4, 7, 9], 2)

    @given(below_w3, finsets, st.data())
    def test_prepending_a_smaller_element(self, xi, sigma, data):
        assume(s_member(sigma, xi) and sigma[0] > 1)
        l = data.draw(st.integers(1, sigma[0] - 1))
        assert s_member((l,) + sigma, add(xi, 1))

    @given(below_w3, finsets, st.integers(1, 3))
    def test_nested_in_n(self, xi, sigma, bump):
        gamma, n = decompose(xi)
        assume(not gamma.is_zero() and s_member(sigma, xi))
        assert s_member(sigma, add(gamma, n + bump))

    @given(below_w3, finsets, st.data())
    def test_upward_closed(self, xi, sigma, data):
        assume(s_member(sigma, xi))
        shifts = data.draw(st.lists(st.integers(0, 3), min_size=len(sigma), max_size=len(sigma)))
        tau = []
        for x, d in zip(sigma, shifts):
            tau.append(max(x + d, tau[-1] + 1 if tau else 1))
        assert s_member(tuple(tau), xi)

    @given(below_w3, finsets)
    def test_some_index_certifies(self, xi, tau):
        gamma, n = decompose(xi)
        assume(not gamma.is_zero() and s_member(tau, xi))
        assert any(
            s_member(tau, add(fundamental(gamma, l), n + 1)) for l in range(1, idx(tau, n) + 1)
        )

    @given(nested_ordinals(), finsets)
    def test_terminates_on_nested_ordinals(self, xi, sigma):
        assert s_member(sigma, xi) in (True, False)


class TestTruncation:
    def test_examples(self):
        assert truncate(1, 3).family == ExplicitFamily([[1], [2], [3]])
        assert truncate(2, 2).family == ExplicitFamily([[1], [2], [1, 2]])
        want = ExplicitFamily([s for s in all_subsets(3) if in_s_omega(s)])
        assert truncate(OMEGA, 3).family == want
        assert len(want) == 6

    @pytest.mark.parametrize("n", range(1, 6))
    @pytest.mark.parametrize("N", range(1, 7))
    def test_finite_index(self, n, N):
        assert ord_truncated(n, N) == min(n, N)

    def test_golden_omega_table(self):
        rows = list(csv.DictReader(GOLDEN.open()))
        for row in rows:
            N = int(row["N"])
            assert ord_truncated(OMEGA, N) == int(row["ord"])
            members = frozenset(s for s in all_subsets(N) if in_s_omega(tuple(sorted(s))))
            assert naive_ord(members) == int(row["ord"]) == N // 2 + 1

    @pytest.mark.parametrize("xi", ["w", "w+1", "w*2", "w^2"])
    def test_monotone_and_inclusive(self, xi):
        x = parse_ordinal(xi)
        vals = [ord_truncated(x, N) for N in range(1, 8)]
        assert vals == sorted(vals)
        assert is_inclusive(truncate(x, 7).family)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            truncate(OMEGA, 21)
        with pytest.raises(PreconditionError):
            truncate(OMEGA, 0)
