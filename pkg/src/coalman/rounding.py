"""Randomized rounding of a fractional configuration solution.

Each candidate draws one configuration with probability ``x``; a fixing pass
then re-ranks all awarded scores so that every score type is used the right
number of times. Ties between equal score indices put the candidate with
the higher current total first, so lower-scoring candidates absorb the
upward moves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    VALID,
    ContractError,
    CountConfiguration,
    FractionalSolution,
    ManipulationMatrix,
    ProblemInstance,
    SequenceConfiguration,
    configuration_cost,
    matrix_from_columns,
    max_nonpreferred_score,
    rearrange_to_valid,
)

CLAMP_TOL = 1e-6


@dataclass(frozen=True)
class ScoreEvent:
    candidate: int
    score_index: int
    voter: int | None = None


@dataclass(frozen=True)
class RoundingReport:
    matrix: ManipulationMatrix
    achieved: int
    per_repeat: tuple[int, ...]
    seed: int
    best_repeat: int = 0


def _rng(seed: int, repeat: int, candidate: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, repeat, candidate])))


def sample_configurations(solution: FractionalSolution, seed: int, repeat: int = 0) -> list:
    """Draw one configuration per candidate from its ``x`` distribution.

    Draws are keyed by ``(seed, repeat, candidate)`` so results do not depend
    on the order in which candidates or repeats are processed.
    """
    out = []
    for i, support in enumerate(solution.assignments):
        if not support:
            raise ContractError(f"candidate {i} has no configuration to sample from")
        weights = np.array([x for _, x in support], dtype=np.float64)
        if np.any(weights < -CLAMP_TOL):
            raise ContractError(f"candidate {i} has a negative weight")
        weights = np.clip(weights, 0.0, None)
        total = weights.sum()
        if total <= 0:
            raise ContractError(f"candidate {i} has zero total weight")
        cdf = np.cumsum(weights / total)
        u = _rng(seed, repeat, i).random()
        pick = min(int(np.searchsorted(cdf, u, side="right")), len(support) - 1)
        out.append(support[pick][0])
    return out


def _totals(configs, instance: ProblemInstance) -> list[int]:
    return [s + configuration_cost(c, instance) for s, c in zip(instance.sigma, configs)]


def ucm_events(configs: Sequence[CountConfiguration], instance: ProblemInstance) -> list[ScoreEvent]:
    """All ``(candidate, score index)`` events in fixing order."""
    totals = _totals(configs, instance)
    events = [
        ScoreEvent(i, j)
        for i, cfg in enumerate(configs)
        for j, c in enumerate(cfg.counts)
        for _ in range(c)
    ]
    events.sort(key=lambda e: (e.score_index, -totals[e.candidate], e.candidate))
    return events


def fix_ucm(configs: Sequence[CountConfiguration], instance: ProblemInstance) -> ManipulationMatrix:
    """Reassign the event at rank ``r`` to score index ``r // k``; returns a relaxed matrix."""
    m, k = instance.m, instance.k
    if len(configs) != m:
        raise ContractError("need one configuration per candidate")
    for cfg in configs:
        if cfg.size != k or len(cfg.counts) != m:
            raise ContractError(f"configuration {cfg.counts} does not hold k={k} scores")
    columns: list[list[int]] = [[] for _ in range(m)]
    for rank, ev in enumerate(ucm_events(configs, instance)):
        columns[ev.candidate].append(rank // k)
    return matrix_from_columns([sorted(col) for col in columns])


def fix_wcm(configs: Sequence[SequenceConfiguration], instance: ProblemInstance) -> ManipulationMatrix:
    """Per voter, hand out score index ``r`` to the candidate ranked ``r``; returns a valid matrix.

    Voters are fixed heaviest first (stable on index), the same order REVERSE
    uses, so the largest corrections see the fewest later adjustments.
    """
    m, k = instance.m, instance.k
    if len(configs) != m:
        raise ContractError("need one configuration per candidate")
    for cfg in configs:
        if len(cfg.indices) != k or max(cfg.indices) >= m:
            raise ContractError(f"configuration {cfg.indices} is not a length-{k} index sequence")
    alpha = instance.alpha.reduced
    current = [list(c.indices) for c in configs]
    totals = _totals(configs, instance)
    rows = np.empty((k, m), dtype=np.int64)
    for ell in sorted(range(k), key=lambda v: (-instance.weights[v], v)):
        w = instance.weights[ell]
        order = sorted(range(m), key=lambda i: (current[i][ell], -totals[i], i))
        for rank, i in enumerate(order):
            totals[i] += w * (alpha[rank] - alpha[current[i][ell]])
            current[i][ell] = rank
            rows[ell, i] = rank
    return ManipulationMatrix(rows, VALID)


def round_once(solution: FractionalSolution, instance: ProblemInstance, seed: int, repeat: int = 0,
               mode: str | None = None) -> ManipulationMatrix:
    mode = mode or solution.mode
    configs = sample_configurations(solution, seed, repeat)
    if mode == "ucm":
        return rearrange_to_valid(fix_ucm(configs, instance), instance)
    if mode == "wcm":
        return fix_wcm(configs, instance)
    raise ContractError(f"unknown mode {mode!r}")


def round_best_of(solution: FractionalSolution, instance: ProblemInstance, repeats: int | None = None,
                  seed: int = 0, mode: str | None = None) -> RoundingReport:
    """Repeat sampling and fixing ``repeats`` times (default ``m``); keep the lowest maximum."""
    repeats = instance.m if repeats is None else repeats
    if repeats < 1:
        raise ContractError("repeats must be >= 1")
    best, best_score, best_r = None, None, 0
    scores = []
    for r in range(repeats):
        matrix = round_once(solution, instance, seed, r, mode)
        score = max_nonpreferred_score(instance, matrix)
        scores.append(score)
        if best_score is None or score < best_score:
            best, best_score, best_r = matrix, score, r
    return RoundingReport(best, best_score, tuple(scores), seed, best_r)
