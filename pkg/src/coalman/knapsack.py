"""Pseudo-polynomial knapsack variants used as separation oracles.

``solve_multiset`` picks exactly ``k`` items with repetition; ``solve_sequence``
fills ``k`` ordered slots where slot ``l`` multiplies item costs by a penalty.
Both answer the decision question "is there a solution of value > V within
budget", returning a witness or ``None``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import backtrack, layered_knapsack

EPS_SEP = 1e-7


def exceeds(value: float, floor: float, eps: float = EPS_SEP) -> bool:
    """``value > floor`` with a relative safety margin against LP noise."""
    return value > floor + eps * max(1.0, abs(floor))


@dataclass(frozen=True)
class MultisetKnapsackQuery:
    values: Sequence[float]
    weights: Sequence[int]
    weight_cap: int
    value_floor: float
    size: int

    def __post_init__(self):
        if len(self.values) != len(self.weights):
            raise ValueError("values and weights must have the same length")
        if self.weight_cap < 0 or self.size < 1:
            raise ValueError("need weight_cap >= 0 and size >= 1")
        if any(w < 0 for w in self.weights):
            raise ValueError("item weights must be non-negative")


@dataclass(frozen=True)
class SequenceKnapsackQuery:
    values: np.ndarray  # (m, k): value of item j at slot l
    costs: Sequence[int]
    penalties: Sequence[int]
    cost_cap: int
    value_floor: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape != (len(self.costs), len(self.penalties)):
            raise ValueError("values must be an m x k matrix matching costs and penalties")
        if self.cost_cap < 0:
            raise ValueError("cost_cap must be non-negative")
        if any(p < 1 for p in self.penalties) or any(c < 0 for c in self.costs):
            raise ValueError("penalties must be positive and costs non-negative")


def multiset_table(values, weights, size, cap, use_numba=None):
    """DP table for the k-multiset knapsack; ``Q[l, w]`` is the best size-``l`` value."""
    v = np.tile(np.asarray(values, dtype=np.float64), (size, 1))
    c = np.tile(np.asarray(weights, dtype=np.int64), (size, 1))
    q, choice = layered_knapsack(v, c, cap, use_numba)
    return q, choice, c


def sequence_table(values, costs, penalties, cap, use_numba=None):
    """DP table for the k-sequence knapsack; layer ``l`` is slot ``l``."""
    v = np.asarray(values, dtype=np.float64).T
    c = np.outer(np.asarray(penalties, dtype=np.int64), np.asarray(costs, dtype=np.int64))
    q, choice = layered_knapsack(v, c, cap, use_numba)
    return q, choice, c


def solve_multiset(query: MultisetKnapsackQuery, use_numba=None) -> tuple[int, ...] | None:
    """Count vector of a size-``k`` multiset with weight <= cap and value > floor, or ``None``."""
    q, choice, c = multiset_table(query.values, query.weights, query.size, query.weight_cap, use_numba)
    best = q[query.size, query.weight_cap]
    if not np.isfinite(best) or not exceeds(best, query.value_floor):
        return None
    items = backtrack(choice, c, query.size, query.weight_cap)
    return tuple(np.bincount(items, minlength=len(query.values)).tolist())


def solve_sequence(query: SequenceKnapsackQuery, use_numba=None) -> tuple[int, ...] | None:
    """Item per slot with penalized cost <= cap and value > floor, or ``None``."""
    k = len(query.penalties)
    q, choice, c = sequence_table(query.values, query.costs, query.penalties, query.cost_cap, use_numba)
    best = q[k, query.cost_cap]
    if not np.isfinite(best) or not exceeds(best, query.value_floor):
        return None
    return tuple(backtrack(choice, c, k, query.cost_cap))


def multiset_bruteforce(query: MultisetKnapsackQuery) -> tuple[int, ...] | None:
    """Exhaustive reference: best feasible multiset if its value beats the floor."""
    m = len(query.values)
    best, best_counts = None, None
    for combo in itertools.combinations_with_replacement(range(m), query.size):
        if sum(query.weights[j] for j in combo) > query.weight_cap:
            continue
        val = sum(query.values[j] for j in combo)
        if best is None or val > best:
            best = val
            best_counts = tuple(np.bincount(combo, minlength=m).tolist())
    if best is None or not best > query.value_floor:
        return None
    return best_counts


def sequence_bruteforce(query: SequenceKnapsackQuery) -> tuple[int, ...] | None:
    """Exhaustive reference over all ``m**k`` sequences."""
    vals = np.asarray(query.values, dtype=np.float64)
    m, k = vals.shape
    best, best_seq = None, None
    for seq in itertools.product(range(m), repeat=k):
        cost = sum(p * query.costs[j] for p, j in zip(query.penalties, seq))
        if cost > query.cost_cap:
            continue
        val = sum(vals[j, ell] for ell, j in enumerate(seq))
        if best is None or val > best:
            best, best_seq = val, seq
    if best is None or not best > query.value_floor:
        return None
    return best_seq
