import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import all_subsets, fam, naive_derive, naive_ord
from xidim.errors import ParseError, PreconditionError
from xidim.finfam import (
    ExplicitFamily,
    derive,
    family_from_json,
    family_to_json,
    inclusive_closure,
    is_inclusive,
    ord_family,
    ord_fast,
    reindex,
)


def F(*sets):
    return ExplicitFamily(sets)


def as_frozen(f: ExplicitFamily):
    return frozenset(frozenset(m) for m in f.members)


families = st.lists(
    st.lists(st.integers(1, 8), min_size=1, max_size=8, unique=True), max_size=30
).map(ExplicitFamily)


class TestDerive:
    def test_examples(self):
        assert derive(F([1], [1, 2]), [1]) == F([2])
        assert derive(F([1]), [2]) == F()
        full = ExplicitFamily(all_subsets(3))
        assert derive(full, [2]) == ExplicitFamily([[1], [3], [1, 3]])

    @given(families, st.lists(st.integers(1, 8), min_size=1, max_size=3, unique=True))
    def test_matches_definition(self, m, sigma):
        assert as_frozen(derive(m, sigma)) == naive_derive(as_frozen(m), sigma)

    @given(families, st.integers(1, 8), st.integers(1, 8))
    def test_iterated_derivation(self, m, a, b):
        if a != b:
            assert derive(derive(m, [a]), [b]) == derive(m, [a, b])


class TestOrd:
    def test_examples(self):
        assert ord_family(F()) == 0
        assert ord_family(F([1])) == 1
        assert ord_family(ExplicitFamily(all_subsets(3))) == 3 == naive_ord(frozenset(all_subsets(3)))

    @given(families)
    def test_backends_agree_with_naive(self, m):
        want = naive_ord(as_frozen(m))
        assert ord_family(m) == want
        assert ord_fast(m) == want

    @given(families, st.integers(0, 8))
    def test_size_characterisation(self, m, n):
        assert (ord_family(m) <= n) == all(len(s) <= n for s in m.members)

    @given(families, st.data())
    def test_monotone(self, m, data):
        keep = data.draw(st.lists(st.booleans(), min_size=len(m), max_size=len(m)))
        sub = ExplicitFamily([s for s, k in zip(m, keep) if k])
        assert ord_family(sub) <= ord_family(m)

    @given(families, families)
    def test_union_bound(self, m, n):
        assert ord_family(m | n) <= max(ord_family(m), ord_family(n))

    @given(families, st.data())
    def test_reindex_invariant(self, m, data):
        top = max(m.ground, default=0)
        k = sorted(data.draw(st.lists(st.integers(1, 60), min_size=top, max_size=top, unique=True)))
        assert ord_family(reindex(m, k)) == ord_family(m)

    @given(families, families, st.data())
    def test_injective_image(self, m, extra, data):
        ground = m.ground
        image = data.draw(st.lists(st.integers(1, 60), min_size=len(ground), max_size=len(ground), unique=True))
        phi = dict(zip(ground, image))
        target = ExplicitFamily([[phi[x] for x in s] for s in m.members]) | extra
        assert ord_family(m) <= ord_family(target)

    def test_large_ground_uses_kernel(self):
        wide = ExplicitFamily([[i, i + 1] for i in range(1, 20)])
        assert ord_fast(wide) == 2


class TestInclusive:
    def test_examples(self):
        assert is_inclusive(F([1], [2], [1, 2]))
        assert not is_inclusive(F([1, 2]))
        assert is_inclusive(F())

    def test_closure_examples(self):
        assert inclusive_closure(F([1, 2])) == F([1], [2], [1, 2])
        assert inclusive_closure(F()) == F()
        assert inclusive_closure(F([1, 2], [3])) == F([1], [2], [1, 2], [3])

    @given(families)
    def test_closure_is_smallest(self, m):
        c = inclusive_closure(m)
        assert is_inclusive(c)
        assert m.issubset(c)
        for s in c.members:
            assert any(set(s) <= set(t) for t in m.members)


class TestReindex:
    def test_examples(self):
        assert reindex(F([1], [1, 2]), [5, 9, 11]) == F([5], [5, 9])
        m = F([1, 3], [2])
        assert reindex(m, [1, 2, 3, 4]) == m

    def test_errors(self):
        with pytest.raises(PreconditionError):
            reindex(F([1, 3]), [4, 7])
        with pytest.raises(PreconditionError):
            reindex(F([1]), [3, 2])


class TestJson:
    @given(families)
    def test_roundtrip(self, m):
        assert family_from_json(json.dumps(family_to_json(m))) == m

    def test_format(self):
        assert family_to_json(F([2], [1, 3])) == {"members": [[2], [1, 3]]}

    @pytest.mark.parametrize("bad", ['{"members": [[]]}', '{"members": [[0]]}', "[1]", "{", '{"m": []}'])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            family_from_json(bad)

    def test_finset_invariants(self):
        with pytest.raises(ValueError):
            F([])
        assert F([3, 1, 1]) == F([1, 3])
