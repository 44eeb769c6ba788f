"""Random electorates and the comparison grid behind ``coalman compare``."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import average_fit, exact_bruteforce, largest_fit, reverse
from .core import ProblemInstance, ScoringVector, max_nonpreferred_score
from .lp import min_feasible_T
from .rounding import round_best_of

CSV_COLUMNS = (
    "mode", "m", "k", "n", "trial", "seed", "weights",
    "t_clp", "clp_score", "reverse_score", "avgfit_score", "largestfit_score", "exact_t_star",
)
TIMING_COLUMNS = ("clp_seconds", "reverse_seconds", "avgfit_seconds", "largestfit_seconds")
EXACT_LIMITS = {"m": 6, "k": 3}


def gen_uniform(n: int, m: int, k: int, mode: str = "ucm", seed: int = 0,
                alpha: ScoringVector | None = None) -> ProblemInstance:
    """Sum ``n`` uniformly random ballots over ``p`` and ``m`` other candidates.

    Candidate 0 of each ballot is ``p``; its points go to ``sigma_p``. In
    ``wcm`` mode manipulator weights are drawn uniformly from ``{1, 2}``.
    """
    if n < 0 or m < 1 or k < 1:
        raise ValueError("need n >= 0, m >= 1, k >= 1")
    alpha = alpha or ScoringVector.borda(m)
    if alpha.m != m:
        raise ValueError("rule vector does not match m")
    rng = np.random.default_rng(seed)
    scores = np.zeros(m + 1, dtype=np.int64)
    points = np.asarray(alpha.entries, dtype=np.int64)
    for _ in range(n):
        ballot = rng.permutation(m + 1)  # ballot[pos] receives alpha[pos]
        scores[ballot] += points
    if mode == "wcm":
        weights = tuple(int(w) for w in rng.integers(1, 3, size=k))
    elif mode == "ucm":
        weights = (1,) * k
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ProblemInstance(alpha, tuple(scores[1:].tolist()), weights, int(scores[0]))


def trial_seed(seed: int, m: int, k: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, m, k, trial]).generate_state(1)[0])


@dataclass(frozen=True)
class GridPoint:
    m: int
    k: int
    n: int
    trials: int
    mode: str
    seed: int


@dataclass
class ExperimentGrid:
    points: list[GridPoint]
    repeats: int | None = None
    exact: bool = True
    records: list[dict] = field(default_factory=list)

    @classmethod
    def default(cls, mode: str = "ucm", ms=(9, 16, 25, 36), trials: int = 20, seed: int = 0,
                repeats: int | None = None) -> "ExperimentGrid":
        """``k = floor(sqrt(m))`` and ``n = 2k`` for each ``m``."""
        pts = []
        for m in ms:
            k = max(1, math.isqrt(m))
            pts.append(GridPoint(m, k, 2 * k, trials, mode, seed))
        return cls(pts, repeats)


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def run_trial(point: GridPoint, trial: int, repeats: int | None = None, exact: bool = True) -> dict:
    s = trial_seed(point.seed, point.m, point.k, trial)
    inst = gen_uniform(point.n, point.m, point.k, point.mode, s)
    t0 = time.perf_counter()
    t_clp, sol = min_feasible_T(inst, point.mode)
    report = round_best_of(sol, inst, repeats, seed=s, mode=point.mode)
    clp_seconds = time.perf_counter() - t0
    rev, rev_s = _timed(reverse, inst)
    rec = {
        "mode": point.mode, "m": point.m, "k": point.k, "n": point.n, "trial": trial, "seed": s,
        "weights": " ".join(map(str, inst.weights)),
        "t_clp": t_clp, "clp_score": report.achieved,
        "reverse_score": max_nonpreferred_score(inst, rev),
        "avgfit_score": None, "largestfit_score": None, "exact_t_star": None,
        "clp_seconds": clp_seconds, "reverse_seconds": rev_s,
        "avgfit_seconds": None, "largestfit_seconds": None,
    }
    if inst.is_unweighted:
        af, rec["avgfit_seconds"] = _timed(average_fit, inst)
        lf, rec["largestfit_seconds"] = _timed(largest_fit, inst)
        rec["avgfit_score"] = max_nonpreferred_score(inst, af)
        rec["largestfit_score"] = max_nonpreferred_score(inst, lf)
    if exact and point.m <= EXACT_LIMITS["m"] and point.k <= EXACT_LIMITS["k"]:
        rec["exact_t_star"] = exact_bruteforce(inst).t_star
    return rec


def _run_task(args):
    return run_trial(*args)


def run_grid(grid: ExperimentGrid, workers: int = 1) -> list[dict]:
    """Run every trial; records come back in grid order whatever the worker count."""
    tasks = [(p, t, grid.repeats, grid.exact) for p in grid.points for t in range(p.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    grid.records = records
    return records


def competitor(mode: str) -> str:
    return "avgfit_score" if mode == "ucm" else "reverse_score"


def summarize(records: list[dict]) -> list[dict]:
    """Counts per ``(mode, m, k)``: rounding hit ``t_clp``, beat the competitor, lost to it."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r["mode"], r["m"], r["k"]), []).append(r)
    out = []
    for (mode, m, k), rs in groups.items():
        other = competitor(mode)
        out.append({
            "mode": mode, "m": m, "k": k, "trials": len(rs), "competitor": other[:-6],
            "clp_equals_t_clp": sum(r["clp_score"] == r["t_clp"] for r in rs),
            "clp_better": sum(r["clp_score"] < r[other] for r in rs),
            "competitor_better": sum(r[other] < r["clp_score"] for r in rs),
            "clp_not_worse": sum(r["clp_score"] <= r[other] for r in rs),
        })
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def to_csv(records: list[dict], timings: bool = False) -> str:
    cols = CSV_COLUMNS + (TIMING_COLUMNS if timings else ())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in records:
        writer.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()
