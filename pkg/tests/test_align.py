import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vcwarp.align import dtw_align, local_distances
from vcwarp.errors import DimMismatch, EmptySequence

STEPS = ((1, 0), (0, 1), (1, 1))


def all_paths(ta, tb):
    """Every monotone path from (0, 0) to (ta-1, tb-1)."""
    def walk(i, j):
        if (i, j) == (ta - 1, tb - 1):
            yield [(i, j)]
            return
        for di, dj in STEPS:
            if i + di < ta and j + dj < tb:
                for rest in walk(i + di, j + dj):
                    yield [(i, j)] + rest
    yield from walk(0, 0)


def brute_force(a, b):
    d = local_distances(a, b)
    return min(sum(d[i, j] for i, j in p) for p in all_paths(len(a), len(b)))


def check_valid(path, ta, tb):
    pairs = path.pairs
    assert tuple(pairs[0]) == (0, 0)
    assert tuple(pairs[-1]) == (ta - 1, tb - 1)
    assert {tuple(s) for s in np.diff(pairs, axis=0)} <= set(STEPS)


def test_identical_is_diagonal(rng):
    a = rng.standard_normal((6, 4))
    path = dtw_align(a, a)
    np.testing.assert_array_equal(path.pairs, np.stack([np.arange(6)] * 2, axis=1))
    assert path.cost == 0.0


def test_repetition():
    x = np.array([[1.0, 2.0, 3.0]])
    path = dtw_align(x, np.vstack([x, x]))
    assert path.pairs.tolist() == [[0, 0], [0, 1]]
    assert path.cost == 0.0


def test_brute_force_5x7(rng):
    a, b = rng.standard_normal((5, 3)), rng.standard_normal((7, 3))
    path = dtw_align(a, b)
    assert path.cost == pytest.approx(brute_force(a, b), rel=1e-12)
    check_valid(path, 5, 7)


def test_path_cost_is_sum_along_path(rng):
    a, b = rng.standard_normal((9, 5)), rng.standard_normal((6, 5))
    path = dtw_align(a, b)
    d = local_distances(a, b)
    assert path.cost == pytest.approx(d[path.a_index, path.b_index].sum(), rel=1e-12)


def test_c0_excluded_by_default(rng):
    a = rng.standard_normal((4, 3))
    b = a.copy()
    b[:, 0] += 100.0
    assert dtw_align(a, b).cost == 0.0
    assert dtw_align(a, b, exclude_c0=False).cost > 0.0


def test_tie_break_prefers_diagonal():
    a = np.zeros((3, 2))
    path = dtw_align(a, np.zeros((3, 2)))
    assert path.pairs.tolist() == [[0, 0], [1, 1], [2, 2]]


def test_errors():
    with pytest.raises(EmptySequence):
        dtw_align(np.zeros((0, 3)), np.zeros((2, 3)))
    with pytest.raises(DimMismatch):
        dtw_align(np.zeros((2, 3)), np.zeros((2, 4)))


def test_csv():
    path = dtw_align(np.zeros((2, 2)), np.zeros((1, 2)))
    assert path.to_csv() == "i,j\n0,0\n1,0\n"


seqs = st.integers(1, 8).flatmap(lambda n: arrays(np.float64, (n, 3), elements=st.floats(-5, 5)))


@settings(max_examples=60, deadline=None)
@given(seqs, seqs)
def test_optimal_and_valid(a, b):
    path = dtw_align(a, b)
    check_valid(path, len(a), len(b))
    assert path.cost == pytest.approx(brute_force(a, b), rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(seqs, seqs)
def test_symmetric_cost(a, b):
    assert dtw_align(a, b).cost == pytest.approx(dtw_align(b, a).cost, rel=1e-12, abs=1e-12)
