import numpy as np
import pytest

from coalman.core import ContractError, ProblemInstance, ScoringVector
from coalman.experiments import gen_uniform
from coalman.lp import (
    DualPoint,
    LinearProgramSpec,
    SolverError,
    clp_feasible,
    min_feasible_T,
    natural_lp_value,
    separate,
    solve_lp,
    t_bounds,
)
from oracles import explicit_configuration_lp, explicit_min_T, vertex_enumeration

BORDA5 = ProblemInstance.unweighted(ScoringVector.borda(5), (5, 6, 6, 6, 7), 2, sigma_p=0)


def test_solve_lp_row_forms():
    # optimum where x + 2y = 4 meets 3x + y = 6
    spec = LinearProgramSpec(
        [1.0, 1.0], "max",
        constraints=[([1, 2], "<=", 4), ([3, 1], "<=", 6), ([1, 0], ">=", 0.5)],
    )
    res = solve_lp(spec)
    assert res.optimal
    assert res.value == pytest.approx(2.8)
    assert res.x == pytest.approx([1.6, 1.2])


def test_solve_lp_status():
    assert solve_lp(LinearProgramSpec([1.0], constraints=[([1], ">=", 2), ([1], "<=", 1)])).status == "infeasible"
    assert solve_lp(LinearProgramSpec([-1.0])).status == "unbounded"
    assert solve_lp(LinearProgramSpec([1.0, 1.0], constraints=[([1, 1], "=", 3)])).value == pytest.approx(3)
    with pytest.raises(ContractError):
        solve_lp(LinearProgramSpec([1.0], "maximize"))


@pytest.mark.parametrize("seed", range(40))
def test_solve_lp_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    rows = int(rng.integers(1, 5))
    a = rng.normal(size=(rows, n))
    b = rng.uniform(-1, 3, size=rows)
    c = rng.normal(size=n)
    sense = "min" if seed % 2 else "max"
    box = [(-5.0, 5.0)] * n
    a_full = np.vstack([a, np.eye(n), -np.eye(n)])
    b_full = np.concatenate([b, np.full(n, 5.0), np.full(n, 5.0)])
    want = vertex_enumeration(c, a_full, b_full, sense)
    res = solve_lp(LinearProgramSpec(c, sense, a_ub=a, b_ub=b, bounds=box))
    if want is None:
        assert res.status == "infeasible"
    else:
        assert res.optimal
        assert res.value == pytest.approx(want, abs=1e-7)


def test_separation_returns_violated_affordable_columns():
    m, k = BORDA5.m, BORDA5.k
    rng = np.random.default_rng(0)
    point = DualPoint(np.zeros(m), rng.random(m))
    cuts = separate(BORDA5, 10, point, "ucm")
    assert cuts
    for i, cfg in cuts:
        assert cfg.size == k
        assert cfg.cost(BORDA5.alpha) <= 10 - BORDA5.sigma[i]
        assert float(np.dot(cfg.counts, point.z)) > point.y[i]


def test_separation_none_when_budgets_negative():
    assert separate(BORDA5, 4, DualPoint(np.zeros(5), np.ones(5)), "ucm") == []


def test_separation_wcm():
    inst = ProblemInstance(ScoringVector.borda(4), (1, 0, 3, 2), (2, 1))
    z = np.random.default_rng(1).random((4, 2))
    for i, cfg in separate(inst, 9, DualPoint(np.zeros(4), z), "wcm"):
        assert cfg.cost(inst) <= 9 - inst.sigma[i]
        assert sum(z[j, ell] for ell, j in enumerate(cfg.indices)) > 0


def test_borda5_threshold():
    t, sol = min_feasible_T(BORDA5, "ucm")
    assert t == 10
    sol.check(BORDA5)
    assert not clp_feasible(BORDA5, 9, "ucm").feasible


def test_feasibility_result_unpacks():
    feasible, sol = clp_feasible(BORDA5, 10, "ucm")
    assert feasible and sol.bound == 10


def test_log_callback_events():
    events = []
    clp_feasible(BORDA5, 10, "ucm", log_callback=events.append)
    assert events[-1]["dual_objective"] >= -1e-6
    assert [e["iteration"] for e in events] == list(range(1, len(events) + 1))


def test_column_cap_raises():
    with pytest.raises(SolverError):
        clp_feasible(BORDA5, 11, "ucm", max_columns=1)


def test_bad_mode():
    with pytest.raises(ContractError):
        min_feasible_T(BORDA5, "xcm")
    weighted = ProblemInstance(ScoringVector.borda(2), (0, 1), (2, 1))
    with pytest.raises(ContractError):
        min_feasible_T(weighted, "ucm")


def test_t_bounds_bracket():
    lo, hi = t_bounds(BORDA5)
    assert lo <= 10 <= hi


def _cases():
    out = []
    for seed in range(12):
        rng = np.random.default_rng(100 + seed)
        m, k = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        mode = "ucm" if seed % 2 == 0 else "wcm"
        if mode == "wcm" and m ** k > 64:
            k = 2
        out.append(gen_uniform(int(rng.integers(0, 4)), m, k, mode, seed))
    return out


@pytest.mark.parametrize("inst", _cases(), ids=lambda i: f"m{i.m}k{i.k}w{sum(i.weights)}")
def test_threshold_matches_explicit_lp(inst):
    mode = "ucm" if inst.is_unweighted else "wcm"
    red = inst.alpha.reduced
    want = explicit_min_T(inst.sigma, red, inst.weights, mode)
    got, sol = min_feasible_T(inst, mode)
    assert got == want
    sol.check(inst)
    assert not explicit_configuration_lp(inst.sigma, red, inst.weights, got - 1, mode)


@pytest.mark.parametrize("m,value", [(3, 1.0), (5, 2.0), (10, 4.5)])
def test_natural_lp_value(m, value):
    inst = ProblemInstance.unweighted(ScoringVector.borda(m), [0] * m, 1)
    assert natural_lp_value(inst) == pytest.approx(value, abs=1e-6)
