"""Domain types and exact scoring arithmetic.

Candidates are the ``m`` non-preferred candidates ``c_1..c_m`` (indexed
``0..m-1`` here); the preferred candidate ``p`` is kept out of every matrix
and only enters through ``sigma_p``. Score indices refer to the reduced rule
vector ``alpha_0..alpha_{m-1}``; ``alpha_m`` is what every manipulator gives
``p``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

RELAXED = "relaxed"
VALID = "valid"


class ContractError(ValueError):
    """Raised when an input violates a documented precondition or invariant."""


def _as_int_tuple(values: Iterable, what: str) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, (bool, np.bool_)) or int(v) != v:
            raise ContractError(f"{what} must contain integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class ScoringVector:
    """Non-decreasing rule vector ``(alpha_0, ..., alpha_m)``."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = _as_int_tuple(self.entries, "alpha")
        object.__setattr__(self, "entries", entries)
        if len(entries) < 2:
            raise ContractError("a scoring vector needs at least two entries")
        if entries[0] < 0:
            raise ContractError("scores must be non-negative")
        if any(a > b for a, b in zip(entries, entries[1:])):
            raise ContractError(f"scoring vector must be non-decreasing: {entries}")

    @classmethod
    def borda(cls, m: int) -> "ScoringVector":
        """Borda over ``m + 1`` candidates: ``(0, 1, ..., m)``."""
        if m < 1:
            raise ContractError("Borda needs m >= 1")
        return cls(tuple(range(m + 1)))

    @property
    def m(self) -> int:
        return len(self.entries) - 1

    @property
    def reduced(self) -> tuple[int, ...]:
        """Scores available to non-preferred candidates."""
        return self.entries[:-1]

    @property
    def top(self) -> int:
        return self.entries[-1]

    def reduced_array(self) -> np.ndarray:
        return np.asarray(self.reduced, dtype=np.int64)


@dataclass(frozen=True)
class ProblemInstance:
    """Reduced min-max manipulation instance.

    Parameters
    ----------
    alpha : ScoringVector
        Rule vector of length ``m + 1``.
    sigma : sequence of int
        Initial scores of the ``m`` non-preferred candidates.
    weights : sequence of int
        Manipulator weights; all ones for the unweighted problem.
    sigma_p : int, optional
        Initial score of the preferred candidate.
    """

    alpha: ScoringVector
    sigma: tuple[int, ...]
    weights: tuple[int, ...]
    sigma_p: int | None = None

    def __post_init__(self):
        if not isinstance(self.alpha, ScoringVector):
            object.__setattr__(self, "alpha", ScoringVector(tuple(self.alpha)))
        sigma = _as_int_tuple(self.sigma, "sigma")
        weights = _as_int_tuple(self.weights, "weights")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "weights", weights)
        if len(sigma) != self.alpha.m:
            raise ContractError(
                f"sigma has {len(sigma)} entries but alpha describes m={self.alpha.m}"
            )
        if any(s < 0 for s in sigma):
            raise ContractError("initial scores must be non-negative")
        if not weights:
            raise ContractError("at least one manipulator is required")
        if any(w < 1 for w in weights):
            raise ContractError("manipulator weights must be positive")
        if self.sigma_p is not None:
            sp = _as_int_tuple([self.sigma_p], "sigma_p")[0]
            if sp < 0:
                raise ContractError("sigma_p must be non-negative")
            object.__setattr__(self, "sigma_p", sp)

    @classmethod
    def unweighted(cls, alpha, sigma, k: int, sigma_p: int | None = None):
        if k < 1:
            raise ContractError("k must be >= 1")
        return cls(alpha, tuple(sigma), (1,) * k, sigma_p)

    @property
    def m(self) -> int:
        return self.alpha.m

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1 for w in self.weights)

    def to_dict(self) -> dict:
        return {
            "alpha": list(self.alpha.entries),
            "sigma": list(self.sigma),
            "sigma_p": self.sigma_p,
            "weights": list(self.weights),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemInstance":
        missing = {"alpha", "sigma", "weights"} - set(data)
        if missing:
            raise ContractError(f"instance is missing fields: {sorted(missing)}")
        return cls(
            ScoringVector(tuple(data["alpha"])),
            tuple(data["sigma"]),
            tuple(data["weights"]),
            data.get("sigma_p"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProblemInstance":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CountConfiguration:
    """Scores one candidate receives, as counts per score type (unweighted)."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = _as_int_tuple(self.counts, "counts")
        if any(c < 0 for c in counts):
            raise ContractError("configuration counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def size(self) -> int:
        return sum(self.counts)

    def cost(self, alpha: ScoringVector) -> int:
        return sum(c * a for c, a in zip(self.counts, alpha.reduced))

    def indices(self) -> list[int]:
        """Score indices in ascending order, one per received score."""
        return [j for j, c in enumerate(self.counts) for _ in range(c)]


@dataclass(frozen=True)
class SequenceConfiguration:
    """Scores one candidate receives, one score index per manipulator."""

    indices: tuple[int, ...]

    def __post_init__(self):
        indices = _as_int_tuple(self.indices, "indices")
        if any(j < 0 for j in indices):
            raise ContractError("score indices must be non-negative")
        object.__setattr__(self, "indices", indices)

    def cost(self, instance: ProblemInstance) -> int:
        alpha = instance.alpha.reduced
        return sum(w * alpha[j] for w, j in zip(instance.weights, self.indices))


Configuration = CountConfiguration | SequenceConfiguration


def configuration_cost(config: Configuration, instance: ProblemInstance) -> int:
    if isinstance(config, CountConfiguration):
        return config.cost(instance.alpha)
    return config.cost(instance)


@dataclass(frozen=True)
class FractionalSolution:
    """Feasible configuration-LP point for a fixed bound ``T``.

    ``assignments[i]`` lists ``(configuration, x)`` pairs with positive
    weight for candidate ``i``.
    """

    bound: int
    assignments: tuple[tuple[tuple[Configuration, float], ...], ...]
    mode: str = "ucm"

    def weights_sum(self, i: int) -> float:
        return float(sum(x for _, x in self.assignments[i]))

    def check(self, instance: ProblemInstance, tol: float = 1e-6) -> None:
        """Raise :class:`ContractError` if the stored point is not a valid solution."""
        if len(self.assignments) != instance.m:
            raise ContractError("one assignment list per candidate is required")
        for i, support in enumerate(self.assignments):
            if not support:
                raise ContractError(f"candidate {i} has an empty support")
            if abs(self.weights_sum(i) - 1.0) > tol:
                raise ContractError(f"weights of candidate {i} sum to {self.weights_sum(i)}")
            for config, x in support:
                if x < -tol:
                    raise ContractError(f"negative weight {x} for candidate {i}")
                if configuration_cost(config, instance) > self.bound - instance.sigma[i]:
                    raise ContractError(f"configuration {config} exceeds the bound for {i}")


@dataclass(frozen=True, eq=False)
class ManipulationMatrix:
    """``k x m`` matrix of score indices; ``entries[l, i]`` is what voter ``l`` gives ``c_i``.

    ``validity`` is ``"relaxed"`` when each score index appears exactly ``k``
    times overall, ``"valid"`` when additionally every row is a permutation.
    """

    entries: np.ndarray
    validity: str = RELAXED

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ContractError(f"matrix must be a non-empty 2-d array, got shape {arr.shape}")
        if self.validity not in (RELAXED, VALID):
            raise ContractError(f"unknown validity {self.validity!r}")
        k, m = arr.shape
        if arr.min() < 0 or arr.max() >= m:
            raise ContractError("score indices must lie in 0..m-1")
        hist = np.bincount(arr.ravel(), minlength=m)
        if not np.all(hist == k):
            raise ContractError(f"each score index must appear exactly k={k} times: {hist}")
        if self.validity == VALID:
            target = np.arange(m)
            for row in arr:
                if not np.array_equal(np.sort(row), target):
                    raise ContractError(f"row {row.tolist()} is not a permutation")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def column_counts(self) -> np.ndarray:
        """``counts[i, j]`` = how many times candidate ``i`` receives score index ``j``."""
        counts = np.zeros((self.m, self.m), dtype=np.int64)
        for i in range(self.m):
            counts[i] = np.bincount(self.entries[:, i], minlength=self.m)
        return counts

    def __eq__(self, other):
        if not isinstance(other, ManipulationMatrix):
            return NotImplemented
        return self.validity == other.validity and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.validity, self.entries.tobytes(), self.entries.shape))

    def to_dict(self) -> dict:
        return {"validity": self.validity, "entries": self.entries.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ManipulationMatrix":
        return cls(np.asarray(data["entries"], dtype=np.int64), data.get("validity", RELAXED))


def _check_dims(instance: ProblemInstance, matrix: ManipulationMatrix) -> None:
    if matrix.k != instance.k or matrix.m != instance.m:
        raise ContractError(
            f"matrix is {matrix.k}x{matrix.m} but instance has k={instance.k}, m={instance.m}"
        )


def candidate_final_scores(instance: ProblemInstance, matrix: ManipulationMatrix) -> list[int]:
    """Final score of every non-preferred candidate under ``matrix``."""
    _check_dims(instance, matrix)
    alpha = instance.alpha.reduced_array()
    w = np.asarray(instance.weights, dtype=np.int64)
    gained = (w[:, None] * alpha[matrix.entries]).sum(axis=0)
    return [int(s) + int(g) for s, g in zip(instance.sigma, gained)]


def max_nonpreferred_score(instance: ProblemInstance, matrix: ManipulationMatrix) -> int:
    return max(candidate_final_scores(instance, matrix))


def p_final_score(instance: ProblemInstance) -> int:
    """Score of ``p`` when every manipulator ranks it first."""
    if instance.sigma_p is None:
        raise ContractError("instance has no sigma_p")
    return instance.sigma_p + instance.total_weight * instance.alpha.top


def decide_win(instance: ProblemInstance, matrix: ManipulationMatrix) -> bool:
    """Whether ``p`` is a (co-)winner under ``matrix``.

    Relaxed matrices are accepted for unweighted instances only, since those
    can always be rearranged into a valid matrix with the same totals.
    """
    if matrix.validity != VALID and not instance.is_unweighted:
        raise ContractError("weighted instances need a valid manipulation matrix")
    return max_nonpreferred_score(instance, matrix) <= p_final_score(instance)


def g_alpha(alpha: ScoringVector, beta: int) -> int:
    """Largest increase between reduced scores ``beta`` positions apart."""
    if beta < 1:
        raise ContractError("beta must be >= 1")
    red = alpha.reduced
    m = len(red)
    if beta >= m:
        return red[-1] - red[0]
    return max(red[i + beta] - red[i] for i in range(m - beta))


def beta_of(m: int, d: float = 1.0) -> int:
    """``ceil(d * sqrt(m ln m))``, at least 1."""
    if m < 1:
        raise ContractError("m must be >= 1")
    return max(1, math.ceil(d * math.sqrt(m * math.log(m))))


def _perfect_matching(counts: np.ndarray) -> list[int]:
    """Kuhn's augmenting-path matching of candidates to score types on ``counts > 0``."""
    m = counts.shape[0]
    adj = [np.flatnonzero(counts[i]).tolist() for i in range(m)]
    owner = [-1] * m  # score type -> candidate

    def augment(i, seen):
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(m):
        if not augment(i, [False] * m):
            raise ContractError("count matrix is not regular; no perfect matching")
    match = [-1] * m
    for j, i in enumerate(owner):
        match[i] = j
    return match


def rearrange_to_valid(
    matrix: ManipulationMatrix, instance: ProblemInstance | None = None
) -> ManipulationMatrix:
    """Turn a relaxed matrix into a valid one with identical per-candidate scores.

    The candidate/score-type count matrix is a ``k``-regular bipartite
    multigraph, so it splits into ``k`` perfect matchings; each matching is
    one manipulator's ballot.
    """
    if instance is not None:
        _check_dims(instance, matrix)
        if not instance.is_unweighted:
            raise ContractError("rearrangement preserves scores only for unweighted instances")
    counts = matrix.column_counts()
    rows = np.empty((matrix.k, matrix.m), dtype=np.int64)
    for ell in range(matrix.k):
        match = _perfect_matching(counts)
        rows[ell] = match
        counts[np.arange(matrix.m), match] -= 1
    return ManipulationMatrix(rows, VALID)


def matrix_from_columns(columns: Sequence[Sequence[int]], validity: str = RELAXED) -> ManipulationMatrix:
    """Build a matrix from per-candidate lists of received score indices."""
    return ManipulationMatrix(np.asarray(columns, dtype=np.int64).T, validity)
