"""Greedy comparison heuristics, the exact search oracle, and the REVERSE lower-bound family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    VALID,
    ContractError,
    ManipulationMatrix,
    ProblemInstance,
    ScoringVector,
    matrix_from_columns,
    max_nonpreferred_score,
    p_final_score,
    rearrange_to_valid,
)


class ExactLimitError(ContractError):
    """The instance is too large for exhaustive search."""


@dataclass(frozen=True)
class ExactResult:
    t_star: int
    witness: ManipulationMatrix


def reverse(instance: ProblemInstance) -> ManipulationMatrix:
    """REVERSE: each manipulator gives the lowest scores to the current leaders.

    Manipulators vote heaviest first (stable on index). Within a ballot the
    candidate with the highest running total gets score index 0, the next one
    index 1, and so on; equal totals are ordered by candidate index.
    """
    m, k = instance.m, instance.k
    alpha = instance.alpha.reduced
    totals = list(instance.sigma)
    rows = np.empty((k, m), dtype=np.int64)
    order = sorted(range(k), key=lambda ell: (-instance.weights[ell], ell))
    for ell in order:
        ranking = sorted(range(m), key=lambda i: (-totals[i], i))
        w = instance.weights[ell]
        for r, i in enumerate(ranking):
            rows[ell, i] = r
            totals[i] += w * alpha[r]
    return ManipulationMatrix(rows, VALID)


def _fit(instance: ProblemInstance, ratio: bool) -> ManipulationMatrix:
    if not instance.is_unweighted:
        raise ContractError("Largest/Average Fit are defined for unweighted instances only")
    target = p_final_score(instance)
    m, k = instance.m, instance.k
    alpha = instance.alpha.reduced
    totals = list(instance.sigma)
    received: list[list[int]] = [[] for _ in range(m)]
    for j in sorted((j for j in range(m) for _ in range(k)), reverse=True):
        best_key, best_i = None, -1
        for i in range(m):
            given = len(received[i])
            if given >= k:
                continue
            gap = target - totals[i]
            key = Fraction(gap, k - given) if ratio else gap
            if best_key is None or key > best_key:
                best_key, best_i = key, i
        received[best_i].append(j)
        totals[best_i] += alpha[j]
    return matrix_from_columns(received)


def largest_fit(instance: ProblemInstance) -> ManipulationMatrix:
    """Largest remaining score to the open candidate with the largest gap to ``p``."""
    return _fit(instance, ratio=False)


def average_fit(instance: ProblemInstance) -> ManipulationMatrix:
    """Largest remaining score to the open candidate with the largest gap per open slot."""
    return _fit(instance, ratio=True)


def mass_lower_bound(instance: ProblemInstance) -> int:
    """Averaging and cheapest-configuration bounds on any achievable maximum."""
    W = instance.total_weight
    red = instance.alpha.reduced
    avg = math.ceil((sum(instance.sigma) + W * sum(red)) / instance.m)
    return max(avg, max(instance.sigma) + W * red[0])


def _check_limits(instance: ProblemInstance, limits: dict | None) -> None:
    lim = {"m": 6, "k": 3}
    lim.update(limits or {})
    if instance.m > lim["m"] or instance.k > lim["k"]:
        raise ExactLimitError(
            f"exact search limited to m<={lim['m']}, k<={lim['k']}; got m={instance.m}, k={instance.k}"
        )


def _search_counts(instance: ProblemInstance, T: int):
    """Relaxed count assignment with every total <= T, or None."""
    m, k = instance.m, instance.k
    alpha = instance.alpha.reduced
    order = sorted(range(m), key=lambda i: (-instance.sigma[i], i))
    caps = [T - instance.sigma[i] for i in order]
    suffix_cap = [0] * (m + 1)
    for pos in range(m - 1, -1, -1):
        suffix_cap[pos] = suffix_cap[pos + 1] + caps[pos]
    failed: set = set()
    picks: list[tuple[int, ...]] = []

    def bundles(supply, remaining, start, cap):
        # non-decreasing index tuples drawn from supply
        if remaining == 0:
            yield ()
            return
        for j in range(start, m):
            if alpha[j] * remaining > cap:
                break
            if supply[j] == 0:
                continue
            supply[j] -= 1
            for rest in bundles(supply, remaining - 1, j, cap - alpha[j]):
                yield (j,) + rest
            supply[j] += 1

    def dfs(pos, supply):
        if pos == m:
            return True
        key = (pos, tuple(supply))
        if key in failed:
            return False
        left = sum(alpha[j] * supply[j] for j in range(m))
        if left > suffix_cap[pos] or caps[pos] < 0:
            failed.add(key)
            return False
        for bundle in list(bundles(supply, k, 0, caps[pos])):
            for j in bundle:
                supply[j] -= 1
            picks.append(bundle)
            if dfs(pos + 1, supply):
                return True
            picks.pop()
            for j in bundle:
                supply[j] += 1
        failed.add(key)
        return False

    if not dfs(0, [k] * m):
        return None
    columns: list = [None] * m
    for pos, bundle in enumerate(picks):
        columns[order[pos]] = list(bundle)
    return rearrange_to_valid(matrix_from_columns(columns), instance)


def _search_sequences(instance: ProblemInstance, T: int):
    """Per-voter assignment with every total <= T, or None."""
    m, k = instance.m, instance.k
    alpha = instance.alpha.reduced
    weights = instance.weights
    order = sorted(range(m), key=lambda i: (-instance.sigma[i], i))
    caps = [T - instance.sigma[i] for i in order]
    suffix_cap = [0] * (m + 1)
    for pos in range(m - 1, -1, -1):
        suffix_cap[pos] = suffix_cap[pos + 1] + caps[pos]
    full = (1 << m) - 1
    failed: set = set()
    picks: list[tuple[int, ...]] = []

    def sequences(free, ell, cap):
        if ell == k:
            yield ()
            return
        w = weights[ell]
        mask = free[ell]
        for j in range(m):
            if w * alpha[j] > cap:
                break
            if mask >> j & 1:
                for rest in sequences(free, ell + 1, cap - w * alpha[j]):
                    yield (j,) + rest

    def dfs(pos, free):
        if pos == m:
            return True
        key = (pos, tuple(free))
        if key in failed:
            return False
        left = 0
        for ell in range(k):
            mask = free[ell]
            left += weights[ell] * sum(alpha[j] for j in range(m) if mask >> j & 1)
        if left > suffix_cap[pos] or caps[pos] < 0:
            failed.add(key)
            return False
        for seq in list(sequences(free, 0, caps[pos])):
            nxt = [free[ell] & ~(1 << seq[ell]) for ell in range(k)]
            picks.append(seq)
            if dfs(pos + 1, nxt):
                return True
            picks.pop()
        failed.add(key)
        return False

    if not dfs(0, [full] * k):
        return None
    rows = np.empty((k, m), dtype=np.int64)
    for pos, seq in enumerate(picks):
        rows[:, order[pos]] = seq
    return ManipulationMatrix(rows, VALID)


def exact_bruteforce(instance: ProblemInstance, limits: dict | None = None) -> ExactResult:
    """Exact minimum of the largest non-preferred score, with a valid witness.

    Thresholds are tried upward from :func:`mass_lower_bound`; each threshold
    is an exhaustive depth-first search over candidates (largest initial
    score first) with capacity pruning and memoized dead states. Unweighted
    instances search relaxed count matrices, weighted ones per-voter
    permutations. REVERSE supplies the starting incumbent.
    """
    _check_limits(instance, limits)
    incumbent = reverse(instance)
    upper = max_nonpreferred_score(instance, incumbent)
    search = _search_counts if instance.is_unweighted else _search_sequences
    for T in range(mass_lower_bound(instance), upper):
        found = search(instance, T)
        if found is not None:
            return ExactResult(max_nonpreferred_score(instance, found), found)
    return ExactResult(upper, incumbent)


def claim1_instance(t: int) -> tuple[ProblemInstance, ManipulationMatrix]:
    """Borda family with k=3, m=3t, sigma=0 where REVERSE loses ``m/3`` points.

    The strategy deals the descending score list ``m-1, m-1, m-1, ..., 0, 0, 0``
    to ``c_1..c_m``, then ``c_m..c_1``, then ``c_1..c_m``.
    """
    if t < 1:
        raise ContractError("t must be >= 1")
    m = 3 * t
    instance = ProblemInstance.unweighted(ScoringVector.borda(m), [0] * m, 3, sigma_p=0)
    seq = [j for j in range(m - 1, -1, -1) for _ in range(3)]
    columns: list[list[int]] = [[] for _ in range(m)]
    for i in range(m):
        columns[i].append(seq[i])
        columns[m - 1 - i].append(seq[m + i])
        columns[i].append(seq[2 * m + i])
    return instance, matrix_from_columns(columns)
