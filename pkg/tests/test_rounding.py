import numpy as np
import pytest

from coalman.core import (
    VALID,
    ContractError,
    CountConfiguration,
    FractionalSolution,
    ProblemInstance,
    ScoringVector,
    SequenceConfiguration,
    candidate_final_scores,
    max_nonpreferred_score,
)
from coalman.experiments import gen_uniform
from coalman.lp import min_feasible_T
from coalman.rounding import (
    fix_ucm,
    fix_wcm,
    round_best_of,
    round_once,
    sample_configurations,
    ucm_events,
)

BORDA5 = ProblemInstance.unweighted(ScoringVector.borda(5), (5, 6, 6, 6, 7), 2, sigma_p=0)


def _random_counts(rng, m, k):
    return CountConfiguration(tuple(np.bincount(rng.integers(0, m, size=k), minlength=m).tolist()))


def test_single_configuration_always_drawn():
    cfg = CountConfiguration((1, 1))
    sol = FractionalSolution(5, (((cfg, 1.0),), ((cfg, 1.0),)))
    for seed in range(5):
        assert sample_configurations(sol, seed) == [cfg, cfg]


def test_sampling_frequency():
    a, b = CountConfiguration((1, 0)), CountConfiguration((0, 1))
    sol = FractionalSolution(5, (((a, 0.7), (b, 0.3)),))
    hits = sum(sample_configurations(sol, seed)[0] == a for seed in range(10_000))
    assert 0.66 <= hits / 10_000 <= 0.74


def test_sampling_deterministic_and_rejects_empty():
    a, b = CountConfiguration((1, 0)), CountConfiguration((0, 1))
    sol = FractionalSolution(5, (((a, 0.5), (b, 0.5)), ((a, 0.2), (b, 0.8))))
    assert sample_configurations(sol, 7, 3) == sample_configurations(sol, 7, 3)
    with pytest.raises(ContractError):
        sample_configurations(FractionalSolution(5, ((),)), 0)


def test_fix_ucm_fixed_point():
    cfgs = [CountConfiguration(c) for c in
            [(1, 0, 0, 1, 0), (0, 1, 0, 0, 1), (1, 0, 1, 0, 0), (0, 1, 0, 1, 0), (0, 0, 1, 0, 1)]]
    out = fix_ucm(cfgs, BORDA5)
    for i, cfg in enumerate(cfgs):
        assert sorted(out.entries[:, i].tolist()) == cfg.indices()


def test_fix_ucm_forced_pair():
    inst = ProblemInstance.unweighted(ScoringVector.borda(2), (0, 0), 1)
    out = fix_ucm([CountConfiguration((1, 0)), CountConfiguration((1, 0))], inst)
    assert sorted(out.entries[0].tolist()) == [0, 1]


@pytest.mark.parametrize("seed", range(30))
def test_fix_ucm_rank_displacement(seed):
    rng = np.random.default_rng(seed)
    m, k = int(rng.integers(2, 7)), int(rng.integers(1, 4))
    inst = gen_uniform(3, m, k, "ucm", seed)
    cfgs = [_random_counts(rng, m, k) for _ in range(m)]
    events = ucm_events(cfgs, inst)
    idx = np.array([e.score_index for e in events])
    for rank, e in enumerate(events):
        assert rank <= np.count_nonzero(idx <= e.score_index) - 1
    out = fix_ucm(cfgs, inst)
    assert np.all(np.bincount(out.entries.ravel(), minlength=m) == k)


def test_fix_wcm_fixed_point():
    inst = ProblemInstance(ScoringVector.borda(3), (0, 2, 1), (2, 1))
    cfgs = [SequenceConfiguration(s) for s in [(0, 2), (1, 0), (2, 1)]]
    out = fix_wcm(cfgs, inst)
    assert out.validity == VALID
    assert out.entries.tolist() == [[0, 1, 2], [2, 0, 1]]


@pytest.mark.parametrize("seed", range(30))
def test_fix_wcm_bijective(seed):
    rng = np.random.default_rng(seed)
    m, k = int(rng.integers(2, 7)), int(rng.integers(1, 4))
    inst = gen_uniform(2, m, k, "wcm", seed)
    cfgs = [SequenceConfiguration(tuple(rng.integers(0, m, size=k).tolist())) for _ in range(m)]
    out = fix_wcm(cfgs, inst)
    for row in out.entries:
        assert sorted(row.tolist()) == list(range(m))


@pytest.mark.parametrize("seed", range(20))
def test_ucm_and_wcm_fixing_agree_for_single_voter(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 8))
    inst = gen_uniform(4, m, 1, "ucm", seed)
    picks = rng.integers(0, m, size=m).tolist()
    a = fix_ucm([CountConfiguration(tuple(np.bincount([j], minlength=m).tolist())) for j in picks], inst)
    b = fix_wcm([SequenceConfiguration((j,)) for j in picks], inst)
    assert candidate_final_scores(inst, a) == candidate_final_scores(inst, b)


def test_round_best_of_r1_matches_round_once():
    _, sol = min_feasible_T(BORDA5, "ucm")
    rep = round_best_of(sol, BORDA5, 1, seed=11)
    assert rep.matrix == round_once(sol, BORDA5, 11, 0)
    assert rep.per_repeat == (rep.achieved,)


def test_round_best_of_report():
    _, sol = min_feasible_T(BORDA5, "ucm")
    rep = round_best_of(sol, BORDA5, 20, seed=0)
    assert rep.achieved == 10 == max_nonpreferred_score(BORDA5, rep.matrix)
    assert rep.matrix.validity == VALID
    assert len(rep.per_repeat) == 20 and min(rep.per_repeat) == rep.achieved
    assert rep == round_best_of(sol, BORDA5, 20, seed=0)
    with pytest.raises(ContractError):
        round_best_of(sol, BORDA5, 0)


def test_default_repeats_is_m():
    _, sol = min_feasible_T(BORDA5, "ucm")
    assert len(round_best_of(sol, BORDA5).per_repeat) == BORDA5.m


def test_wcm_pipeline_valid():
    inst = gen_uniform(4, 5, 2, "wcm", 3)
    t, sol = min_feasible_T(inst, "wcm")
    rep = round_best_of(sol, inst, seed=3)
    assert rep.matrix.validity == VALID
    assert rep.achieved >= t
