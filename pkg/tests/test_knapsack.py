import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coalman._accel import HAVE_NUMBA
from coalman._kernels import _layered_knapsack_numpy, layered_knapsack
from coalman.knapsack import (
    MultisetKnapsackQuery,
    SequenceKnapsackQuery,
    exceeds,
    multiset_bruteforce,
    sequence_bruteforce,
    solve_multiset,
    solve_sequence,
)

PATHS = [False] + ([True] if HAVE_NUMBA else [])

# quarter-integers keep sums exact, so "> floor" and the margin test agree
quarters = st.integers(0, 20).map(lambda v: v / 4)


def multiset_value(q, counts):
    return sum(c * v for c, v in zip(counts, q.values))


def check_multiset(q, got, want):
    assert (got is None) == (want is None)
    if got is not None:
        assert sum(got) == q.size
        assert sum(c * w for c, w in zip(got, q.weights)) <= q.weight_cap
        assert multiset_value(q, got) == pytest.approx(multiset_value(q, want), abs=1e-9)


def check_sequence(q, got, want):
    assert (got is None) == (want is None)
    if got is not None:
        vals = np.asarray(q.values)
        assert sum(p * q.costs[j] for p, j in zip(q.penalties, got)) <= q.cost_cap
        v_got = sum(vals[j, ell] for ell, j in enumerate(got))
        v_want = sum(vals[j, ell] for ell, j in enumerate(want))
        assert v_got == pytest.approx(v_want, abs=1e-9)


def test_exceeds_margin():
    assert exceeds(1.0 + 1e-6, 1.0)
    assert not exceeds(1.0 + 1e-8, 1.0)
    assert not exceeds(1.0, 1.0)
    assert exceeds(1e-6, 0.0)


def test_multiset_small_example():
    q = MultisetKnapsackQuery(values=[0.0, 0.5, 2.0], weights=[0, 1, 2], weight_cap=2, value_floor=1.5, size=2)
    assert solve_multiset(q) == (1, 0, 1)
    assert solve_multiset(MultisetKnapsackQuery([0.0, 0.5, 2.0], [0, 1, 2], 1, 1.5, 2)) is None


def test_sequence_respects_penalties():
    vals = np.array([[0.0, 0.0], [1.0, 1.0], [3.0, 3.0]])
    q = SequenceKnapsackQuery(vals, costs=[0, 1, 2], penalties=[2, 1], cost_cap=2, value_floor=0.5)
    # heavy voter slot 0 cannot afford index 2
    assert solve_sequence(q) == (0, 2)


def test_infeasible_size():
    q = MultisetKnapsackQuery([1.0, 1.0], [3, 4], 2, -1.0, 1)
    assert solve_multiset(q) is None and multiset_bruteforce(q) is None


@pytest.mark.parametrize("use_numba", PATHS)
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_multiset_matches_enumeration(use_numba, data):
    m = data.draw(st.integers(1, 5))
    k = data.draw(st.integers(1, 3))
    vals = data.draw(st.lists(quarters, min_size=m, max_size=m))
    weights = sorted(data.draw(st.lists(st.integers(0, 4), min_size=m, max_size=m)))
    q = MultisetKnapsackQuery(vals, weights, data.draw(st.integers(0, 12)), data.draw(st.integers(-4, 40)) / 4, k)
    check_multiset(q, solve_multiset(q, use_numba), multiset_bruteforce(q))


@pytest.mark.parametrize("use_numba", PATHS)
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_sequence_matches_enumeration(use_numba, data):
    m = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, 3))
    vals = np.asarray(data.draw(st.lists(quarters, min_size=m * k, max_size=m * k)))
    costs = sorted(data.draw(st.lists(st.integers(0, 4), min_size=m, max_size=m)))
    pens = data.draw(st.lists(st.integers(1, 2), min_size=k, max_size=k))
    q = SequenceKnapsackQuery(vals.reshape(m, k), costs, pens, data.draw(st.integers(0, 15)),
                              data.draw(st.integers(-4, 40)) / 4)
    check_sequence(q, solve_sequence(q, use_numba), sequence_bruteforce(q))


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_kernels_agree_bitwise():
    rng = np.random.default_rng(3)
    for _ in range(50):
        k, m = rng.integers(1, 5), rng.integers(1, 9)
        values = rng.random((k, m))
        costs = rng.integers(0, 6, size=(k, m))
        cap = int(rng.integers(0, 30))
        q0, c0 = _layered_knapsack_numpy(values, costs, cap)
        q1, c1 = layered_knapsack(values, costs, cap, use_numba=True)
        assert np.array_equal(q0, q1) and np.array_equal(c0, c1)


def test_bad_queries():
    with pytest.raises(ValueError):
        MultisetKnapsackQuery([1.0], [1, 2], 3, 0.0, 1)
    with pytest.raises(ValueError):
        SequenceKnapsackQuery(np.zeros((2, 2)), [0, 1], [0, 1], 3, 0.0)


def test_env_flag_selects_numpy_path():
    import os
    import subprocess
    import sys

    code = (
        "from coalman._accel import HAVE_NUMBA; from coalman import *;"
        "inst = ProblemInstance.unweighted(ScoringVector.borda(5), (5, 6, 6, 6, 7), 2);"
        "print(HAVE_NUMBA, min_feasible_T(inst, 'ucm')[0])"
    )
    env = {**os.environ, "COALMAN_DISABLE_NUMBA": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "10"]
