"""Configuration LP via its dual, with knapsack separation.

For a fixed bound ``T`` the configuration LP is a feasibility problem. Its
dual is positively homogeneous, so the dual optimum is either 0 (primal
feasible) or unbounded below. Adding the normalization
``sum(y) + sum(z) <= 1`` keeps every restricted dual bounded while keeping
the sign test intact. The driver re-solves the restricted dual from scratch
each round, adds one violated configuration per candidate, and stops when
the restricted optimum reaches zero or separation finds nothing. The primal
is then solved directly over the generated columns.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .baselines import mass_lower_bound, reverse
from .core import (
    ContractError,
    CountConfiguration,
    FractionalSolution,
    ProblemInstance,
    SequenceConfiguration,
    max_nonpreferred_score,
)
from .knapsack import exceeds, multiset_table, sequence_table
from ._kernels import backtrack

log = logging.getLogger(__name__)

EPS_LP = 1e-6
COLUMN_FACTOR = 50
MODES = ("ucm", "wcm")


class SolverError(RuntimeError):
    """LP solving failed or the cutting-plane loop hit its column cap."""


# --------------------------------------------------------------------------
# generic LP


@dataclass
class LinearProgramSpec:
    """Dense LP: optimize ``objective @ x`` subject to row constraints and bounds.

    ``constraints`` holds ``(coefficients, relation, rhs)`` with relation one
    of ``"<="``, ``">="``, ``"="``. Large systems can instead (or in
    addition) pass matrix blocks ``a_ub @ x <= b_ub`` and ``a_eq @ x = b_eq``.
    ``bounds`` holds ``(lower, upper)`` per variable, ``None`` meaning
    unbounded; defaults to ``x >= 0``.
    """

    objective: Sequence[float]
    sense: str = "min"
    constraints: list = field(default_factory=list)
    bounds: list | None = None
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.objective)

    def as_arrays(self):
        """``(a_ub, b_ub, a_eq, b_eq)`` with ``>=`` rows negated into ``<=`` form."""
        n = self.n
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for coeffs, rel, rhs in self.constraints:
            row = np.asarray(coeffs, dtype=np.float64)
            if row.shape != (n,):
                raise ContractError("constraint length does not match the variable count")
            if rel == "<=":
                ub_rows.append(row)
                ub_rhs.append(rhs)
            elif rel == ">=":
                ub_rows.append(-row)
                ub_rhs.append(-rhs)
            elif rel in ("=", "=="):
                eq_rows.append(row)
                eq_rhs.append(rhs)
            else:
                raise ContractError(f"unknown relation {rel!r}")

        def stack(rows, rhs, block, block_rhs):
            parts = [np.asarray(rows, dtype=np.float64).reshape(-1, n)]
            vals = [np.asarray(rhs, dtype=np.float64)]
            if block is not None:
                block = np.asarray(block, dtype=np.float64)
                if block.ndim != 2 or block.shape[1] != n:
                    raise ContractError("constraint block does not match the variable count")
                parts.append(block)
                vals.append(np.asarray(block_rhs, dtype=np.float64).reshape(-1))
            return np.vstack(parts), np.concatenate(vals)

        a_ub, b_ub = stack(ub_rows, ub_rhs, self.a_ub, self.b_ub)
        a_eq, b_eq = stack(eq_rows, eq_rhs, self.a_eq, self.b_eq)
        return a_ub, b_ub, a_eq, b_eq


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded | failed
    x: np.ndarray | None = None
    value: float | None = None
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


def solve_lp(spec: LinearProgramSpec) -> LPResult:
    """Solve ``spec`` with the HiGHS dual simplex.

    A reported optimum is re-checked against every constraint at ``EPS_LP``;
    anything that fails the check comes back as ``"failed"``.
    """
    if spec.sense not in ("min", "max"):
        raise ContractError(f"unknown sense {spec.sense!r}")
    n = spec.n
    c = np.asarray(spec.objective, dtype=np.float64)
    if spec.sense == "max":
        c = -c
    a_ub, b_ub, a_eq, b_eq = spec.as_arrays()
    bounds = spec.bounds if spec.bounds is not None else [(0, None)] * n
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a_ub)) and np.all(np.isfinite(a_eq))):
        return LPResult("failed", message="non-finite coefficients")
    res = linprog(
        c,
        A_ub=a_ub if len(b_ub) else None,
        b_ub=b_ub if len(b_ub) else None,
        A_eq=a_eq if len(b_eq) else None,
        b_eq=b_eq if len(b_eq) else None,
        bounds=bounds,
        method="highs-ds",
        options=_HIGHS_OPTIONS,
    )
    if res.status == 2:
        return LPResult("infeasible", message=res.message)
    if res.status == 3:
        return LPResult("unbounded", message=res.message)
    if res.status != 0:
        return LPResult("failed", message=res.message)
    x = np.asarray(res.x, dtype=np.float64)
    if not _satisfies(x, a_ub, b_ub, a_eq, b_eq, bounds):
        return LPResult("failed", message="returned point violates the constraints")
    value = float(np.dot(np.asarray(spec.objective, dtype=np.float64), x))
    return LPResult("optimal", x, value)


def _satisfies(x, a_ub, b_ub, a_eq, b_eq, bounds) -> bool:
    if len(b_ub) and np.any(a_ub @ x > b_ub + EPS_LP * np.maximum(1.0, np.abs(b_ub))):
        return False
    if len(b_eq) and np.any(np.abs(a_eq @ x - b_eq) > EPS_LP * np.maximum(1.0, np.abs(b_eq))):
        return False
    for xi, (lo, hi) in zip(x, bounds):
        if lo is not None and xi < lo - EPS_LP:
            return False
        if hi is not None and xi > hi + EPS_LP:
            return False
    return True


# --------------------------------------------------------------------------
# dual points and separation


@dataclass(frozen=True)
class DualPoint:
    """``y`` per candidate; ``z`` per score type (ucm) or ``(m, k)`` matrix (wcm)."""

    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.y) < -EPS_LP) or np.any(np.asarray(self.z) < -EPS_LP):
            raise ContractError("dual variables must be non-negative")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ContractError(f"mode must be one of {MODES}, got {mode!r}")


def _weight_cap(instance: ProblemInstance, mode: str) -> int:
    mult = instance.k if mode == "ucm" else instance.total_weight
    return mult * instance.alpha.reduced[-1]


def separate(
    instance: ProblemInstance, T: int, point: DualPoint, mode: str = "ucm"
) -> list[tuple[int, CountConfiguration | SequenceConfiguration]]:
    """One violated configuration per candidate that has one.

    A single DP table serves every candidate: table entries are "best value
    within budget", so each candidate reads its own budget
    ``min(full cap, T - sigma_i)`` off the last layer.
    """
    _check_mode(mode)
    m, k = instance.m, instance.k
    budgets = [min(_weight_cap(instance, mode), T - s) for s in instance.sigma]
    top = max(budgets)
    if top < 0:
        return []
    alpha = instance.alpha.reduced
    if mode == "ucm":
        q, choice, costs = multiset_table(point.z, alpha, k, top)
    else:
        q, choice, costs = sequence_table(point.z, alpha, instance.weights, top)
    found = []
    for i, b in enumerate(budgets):
        if b < 0:
            continue
        best = q[k, b]
        if not np.isfinite(best) or not exceeds(best, float(point.y[i])):
            continue
        items = backtrack(choice, costs, k, b)
        if mode == "ucm":
            config = CountConfiguration(tuple(np.bincount(items, minlength=m).tolist()))
        else:
            config = SequenceConfiguration(tuple(items))
        found.append((i, config))
    return found


# --------------------------------------------------------------------------
# cutting-plane driver


def _dual_row(instance: ProblemInstance, i: int, config, mode: str) -> np.ndarray:
    """Coefficients of ``config . z - y_i <= 0`` over ``[y, z]``."""
    m, k = instance.m, instance.k
    nz = m if mode == "ucm" else m * k
    row = np.zeros(m + nz)
    row[i] = -1.0
    if mode == "ucm":
        row[m:] = config.counts
    else:
        for ell, j in enumerate(config.indices):
            row[m + j * k + ell] += 1.0
    return row


@dataclass
class ColumnPool:
    """Configurations generated so far, per candidate, without duplicates."""

    m: int
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    _seen: set = field(default_factory=set)
    _count: dict = field(default_factory=dict)

    def add(self, i: int, config, row: np.ndarray | None = None) -> bool:
        key = (i, config)
        if key in self._seen:
            return False
        self._seen.add(key)
        self.columns.append((i, config))
        self.rows.append(row)
        self._count[i] = self._count.get(i, 0) + 1
        return True

    def per_candidate(self, i: int) -> int:
        return self._count.get(i, 0)

    def __len__(self):
        return len(self.columns)


def _restricted_dual(instance, pool: ColumnPool, mode: str) -> LPResult:
    m, k = instance.m, instance.k
    nz = m if mode == "ucm" else m * k
    cz = -float(k) if mode == "ucm" else -1.0
    objective = np.concatenate([np.ones(m), np.full(nz, cz)])
    rows = pool.rows + [np.ones(m + nz)]
    a_ub = np.vstack(rows)
    b_ub = np.zeros(len(rows))
    b_ub[-1] = 1.0
    return solve_lp(LinearProgramSpec(objective, "min", a_ub=a_ub, b_ub=b_ub))


def _coverage_matrix(instance, pool: ColumnPool, mode: str) -> np.ndarray:
    m, k = instance.m, instance.k
    rows = m if mode == "ucm" else m * k
    cov = np.zeros((rows, len(pool)))
    for col, (_, cfg) in enumerate(pool.columns):
        if mode == "ucm":
            cov[:, col] = cfg.counts
        else:
            for ell, j in enumerate(cfg.indices):
                cov[j * k + ell, col] += 1.0
    return cov


def _pool_system(instance, pool: ColumnPool, mode: str):
    """Equality system ``A x = b`` of the configuration LP over the pooled columns."""
    m, k = instance.m, instance.k
    owner = np.array([i for i, _ in pool.columns])
    assign = (owner[None, :] == np.arange(m)[:, None]).astype(np.float64)
    cov = _coverage_matrix(instance, pool, mode)
    demand = float(k) if mode == "ucm" else 1.0
    a_eq = np.vstack([assign, cov])
    b_eq = np.concatenate([np.ones(m), np.full(cov.shape[0], demand)])
    return a_eq, b_eq


def _recover_primal(instance, T: int, pool: ColumnPool, mode: str, center: int = 0,
                    seed: int = 0) -> FractionalSolution:
    """Primal point over the pooled columns.

    Each candidate takes scores summing to ``k`` picks and there are exactly
    ``m k`` picks in total, so every feasible point meets the coverage rows
    with equality and the system is solved in equality form. With ``center > 0``
    the result is the average of that many vertices optimal for random
    objectives, which spreads the weight over more configurations.
    """
    m = instance.m
    n = len(pool)
    a_eq, b_eq = _pool_system(instance, pool, mode)
    res = solve_lp(LinearProgramSpec(np.zeros(n), "min", a_eq=a_eq, b_eq=b_eq))
    if not res.optimal:
        # elastic fallback: minimize the coverage shortfall
        nr = a_eq.shape[0] - m
        slack = np.vstack([np.zeros((m, nr)), np.eye(nr)])
        res = solve_lp(LinearProgramSpec(
            np.concatenate([np.zeros(n), np.ones(nr)]), "min",
            a_eq=np.hstack([a_eq, slack]), b_eq=b_eq,
        ))
        if not res.optimal or res.value > EPS_LP:
            raise SolverError(f"primal recovery failed at T={T}: {res.status} {res.message}")
        x = res.x[:n]
    else:
        x = res.x
        if center > 0:
            rng = np.random.default_rng([seed, T, n])
            acc = np.zeros(n)
            got = 0
            for _ in range(center):
                r = solve_lp(LinearProgramSpec(rng.random(n), "min", a_eq=a_eq, b_eq=b_eq))
                if r.optimal:
                    acc += r.x
                    got += 1
            if got:
                x = acc / got
    x = np.clip(x, 0.0, None)
    support: list[list] = [[] for _ in range(m)]
    for col, (i, cfg) in enumerate(pool.columns):
        if x[col] > 1e-9:
            support[i].append((cfg, float(x[col])))
    assignments = []
    for i in range(m):
        total = sum(v for _, v in support[i])
        if total <= 0:
            raise SolverError(f"candidate {i} received no configuration at T={T}")
        assignments.append(tuple((cfg, v / total) for cfg, v in support[i]))
    return FractionalSolution(T, tuple(assignments), mode)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    solution: FractionalSolution | None
    dual_value: float
    iterations: int
    columns: int

    def __iter__(self):
        # unpacks as (feasible, solution)
        return iter((self.feasible, self.solution))


def clp_feasible(
    instance: ProblemInstance,
    T: int,
    mode: str = "ucm",
    *,
    max_columns: int | None = None,
    tol: float = EPS_LP,
    center: int = 0,
    log_callback: Callable[[dict], None] | None = None,
) -> FeasibilityResult:
    """Decide whether the configuration LP with bound ``T`` is feasible."""
    _check_mode(mode)
    T = int(T)
    m, k = instance.m, instance.k
    cap = max_columns if max_columns is not None else COLUMN_FACTOR * m * k
    if min(T - s for s in instance.sigma) < 0:
        return FeasibilityResult(False, None, -math.inf, 0, 0)
    pool = ColumnPool(m)
    nz = m if mode == "ucm" else m * k
    iteration = 0
    while True:
        iteration += 1
        res = _restricted_dual(instance, pool, mode)
        if not res.optimal:
            raise SolverError(f"restricted dual {res.status} at T={T}: {res.message}")
        value = res.value
        y, z = res.x[:m], np.clip(res.x[m:], 0.0, None)
        if mode == "wcm":
            z = z.reshape(m, k)
        event = {"T": T, "iteration": iteration, "columns": len(pool), "dual_objective": value}
        if value >= -tol:
            event["added"] = 0
            _emit(log_callback, event)
            break
        cuts = separate(instance, T, DualPoint(np.clip(y, 0.0, None), z), mode)
        added = 0
        for i, cfg in cuts:
            if pool.add(i, cfg, _dual_row(instance, i, cfg, mode)):
                added += 1
                if pool.per_candidate(i) > cap:
                    raise SolverError(f"column cap {cap} exceeded for candidate {i} at T={T}")
        event["added"] = added
        _emit(log_callback, event)
        if added == 0:
            break
    feasible = value >= -tol
    solution = _recover_primal(instance, T, pool, mode, center) if feasible else None
    return FeasibilityResult(feasible, solution, value, iteration, len(pool))


def _emit(callback, event):
    log.debug("clp %s", event)
    if callback is not None:
        callback(event)


def t_bounds(instance: ProblemInstance) -> tuple[int, int]:
    """Bracket for the binary search: a provable lower bound and REVERSE's score."""
    return mass_lower_bound(instance), max_nonpreferred_score(instance, reverse(instance))


def min_feasible_T(
    instance: ProblemInstance,
    mode: str = "ucm",
    *,
    max_columns: int | None = None,
    tol: float = EPS_LP,
    center: int = 0,
    log_callback: Callable[[dict], None] | None = None,
) -> tuple[int, FractionalSolution]:
    """Smallest integer ``T`` with a feasible configuration LP, by bisection.

    Every probe rebuilds the LP from nothing.
    """
    _check_mode(mode)
    if mode == "ucm" and not instance.is_unweighted:
        raise ContractError("ucm mode needs an unweighted instance")
    lo, hi = t_bounds(instance)
    kw = {"max_columns": max_columns, "tol": tol, "center": center, "log_callback": log_callback}
    best = clp_feasible(instance, hi, mode, **kw)
    if not best.feasible:
        raise SolverError(f"REVERSE bound T={hi} reported infeasible")
    solution = best.solution
    while lo < hi:
        mid = (lo + hi) // 2
        probe = clp_feasible(instance, mid, mode, **kw)
        if probe.feasible:
            hi, solution = mid, probe.solution
        else:
            lo = mid + 1
    return hi, solution


def natural_lp_value(instance: ProblemInstance) -> float:
    """Optimum of the relaxed assignment LP (score-type counts per candidate in ``[0, k]``)."""
    if not instance.is_unweighted:
        raise ContractError("the natural LP is defined for unweighted instances")
    m, k = instance.m, instance.k
    alpha = np.asarray(instance.alpha.reduced, dtype=np.float64)
    n = m * m + 1  # x[i, j] flattened, then T
    constraints = []
    for j in range(m):
        row = np.zeros(n)
        row[j:m * m:m] = 1.0
        constraints.append((row, "=", float(k)))
    for i in range(m):
        row = np.zeros(n)
        row[i * m:(i + 1) * m] = 1.0
        constraints.append((row, "=", float(k)))
        row = np.zeros(n)
        row[i * m:(i + 1) * m] = alpha
        row[-1] = -1.0
        constraints.append((row, "<=", -float(instance.sigma[i])))
    objective = np.zeros(n)
    objective[-1] = 1.0
    bounds = [(0.0, float(k))] * (m * m) + [(None, None)]
    res = solve_lp(LinearProgramSpec(objective, "min", constraints, bounds))
    if not res.optimal:
        raise SolverError(f"natural LP {res.status}: {res.message}")
    return res.value
