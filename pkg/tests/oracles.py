"""Reference solvers that share no code with the package's solution path."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def all_ballot_scores(sigma, alpha_red, weights):
    """Exact optimum by enumerating every tuple of manipulator ballots."""
    m = len(sigma)
    best = None
    perms = list(itertools.permutations(range(m)))
    for ballots in itertools.product(perms, repeat=len(weights)):
        totals = list(sigma)
        for w, ballot in zip(weights, ballots):
            for i, j in enumerate(ballot):
                totals[i] += w * alpha_red[j]
        top = max(totals)
        if best is None or top < best:
            best = top
    return best


def explicit_configuration_lp(sigma, alpha_red, weights, T, mode):
    """Feasibility of the configuration LP with every configuration written out."""
    m, k = len(sigma), len(weights)
    columns = []  # (candidate, coverage vector)
    for i in range(m):
        budget = T - sigma[i]
        if mode == "ucm":
            for combo in itertools.combinations_with_replacement(range(m), k):
                if sum(alpha_red[j] for j in combo) <= budget:
                    cov = np.zeros(m)
                    for j in combo:
                        cov[j] += 1
                    columns.append((i, cov))
        else:
            for seq in itertools.product(range(m), repeat=k):
                if sum(w * alpha_red[j] for w, j in zip(weights, seq)) <= budget:
                    cov = np.zeros(m * k)
                    for ell, j in enumerate(seq):
                        cov[j * k + ell] = 1
                    columns.append((i, cov))
    if not columns or {i for i, _ in columns} != set(range(m)):
        return False
    n = len(columns)
    rows_assign = np.zeros((m, n))
    for col, (i, _) in enumerate(columns):
        rows_assign[i, col] = 1
    cov = np.column_stack([c for _, c in columns])
    demand = k if mode == "ucm" else 1
    a_eq = np.vstack([rows_assign, cov])
    b_eq = np.concatenate([np.ones(m), np.full(cov.shape[0], float(demand))])
    res = linprog(np.zeros(n), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * n, method="highs")
    return res.status == 0


def explicit_min_T(sigma, alpha_red, weights, mode):
    T = max(sigma)
    while not explicit_configuration_lp(sigma, alpha_red, weights, T, mode):
        T += 1
    return T


def vertex_enumeration(c, a_ub, b_ub, sense="min"):
    """Optimum of a bounded LP ``a_ub x <= b_ub`` by checking every basic solution.

    Returns ``None`` when no vertex is feasible.
    """
    c = np.asarray(c, dtype=float)
    a_ub = np.asarray(a_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    n = len(c)
    best = None
    for rows in itertools.combinations(range(len(b_ub)), n):
        a = a_ub[list(rows)]
        if abs(np.linalg.det(a)) < 1e-10:
            continue
        x = np.linalg.solve(a, b_ub[list(rows)])
        if np.all(a_ub @ x <= b_ub + 1e-8):
            val = float(c @ x)
            if best is None or (val < best if sense == "min" else val > best):
                best = val
    return best
