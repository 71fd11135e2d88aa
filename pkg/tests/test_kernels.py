import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_subsets, naive_ord
from xidim import kernels
from xidim.space import enumerate_x_tau, pairwise_d_xi, point

BACKENDS = kernels.backends()


def test_compiled_backend_present():
    assert "cython" in BACKENDS, "compiled kernels did not build"
    assert kernels.BACKEND == "cython"


def test_pure_python_switch():
    code = "from xidim import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, XIDIM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(st.integers(0, 10**9))
@settings(max_examples=80)
def test_ord_dp_backends_agree_with_oracle(seed):
    rng = random.Random(seed)
    width = rng.randint(0, 7)
    masks = sorted({rng.randrange(1, 1 << width) for _ in range(rng.randint(0, 10))}) if width else []
    members = frozenset(frozenset(b for b in range(width) if m >> b & 1) for m in masks)
    want = naive_ord(members)
    for mod in BACKENDS.values():
        assert mod.ord_dp(masks, width) == want


def test_ord_dp_full_power_set():
    for width in range(6):
        masks = list(range(1 << width))
        assert len(all_subsets(width)) == len(masks) - 1
        for mod in BACKENDS.values():
            assert mod.ord_dp(masks, width) == width


def _instance(rng):
    labels = [(2,), (3,), (2, 3)]
    pts = set()
    for _ in range(rng.randint(1, 14)):
        tau = rng.choice(labels)
        coords = tuple(rng.randrange(0, 10) * (2 if tau == (3,) else 1) for _ in tau)
        if tau == (2, 3) and coords[0] % 2 and coords[1] % 2:
            continue
        pts.add(point(tau, coords))
    pts = sorted(pts)
    radii = [rng.randint(1, 8) for _ in range(rng.randint(1, 3))]
    return pts, radii, rng.randint(0, 8)


@given(st.integers(0, 10**9))
@settings(max_examples=80)
def test_matrix_search_backends_agree(seed):
    pts, radii, bound = _instance(random.Random(seed))
    dist = pairwise_d_xi(pts).tolist()
    got = {name: mod.cover_search(dist, radii, bound, 10**6) for name, mod in BACKENDS.items()}
    assert len(set(map(repr, got.values()))) == 1


@given(st.integers(0, 10**9))
@settings(max_examples=80)
def test_box_search_matches_matrix_search(seed):
    rng = random.Random(seed)
    pts = sorted({point((2, 3), (rng.randrange(0, 12), 2 * rng.randrange(0, 6))) for _ in range(rng.randint(1, 20))})
    radii = [rng.randint(1, 8) for _ in range(rng.randint(1, 3))]
    bound = rng.randint(0, 8)
    coords = [p.coords for p in pts]
    dist = pairwise_d_xi(pts).tolist()
    results = set()
    for mod in BACKENDS.values():
        results.add(repr(mod.cover_search_box(coords, radii, bound, 10**6)[:2]))
        results.add(repr(mod.cover_search(dist, radii, bound, 10**6)[:2]))
    assert len(results) == 1


@pytest.mark.parametrize("budget", [1, 10, 100])
def test_budget_status_and_node_counts(budget):
    pts = enumerate_x_tau((2, 3), [(0, 17)] * 2)
    coords = [p.coords for p in pts]
    for mod in BACKENDS.values():
        status, assignment, nodes = mod.cover_search_box(coords, [4, 8], 16, budget)
        assert status == kernels.BUDGET and assignment == [] and nodes == budget + 1


def test_node_counts_identical_on_window():
    pts = enumerate_x_tau((2, 3), [(0, 17)] * 2)
    coords = [p.coords for p in pts]
    runs = {name: mod.cover_search_box(coords, [4, 8], 8, 10**6) for name, mod in BACKENDS.items()}
    statuses = {r[0] for r in runs.values()}
    nodes = {r[2] for r in runs.values()}
    assert statuses == {kernels.NONE} and len(nodes) == 1


def test_empty_inputs():
    for mod in BACKENDS.values():
        assert mod.cover_search([], [1], 0, 10) == (kernels.FOUND, [], 0)
        assert mod.cover_search_box([], [1], 0, 10) == (kernels.FOUND, [], 0)
        assert mod.ord_dp([], 3) == 0
