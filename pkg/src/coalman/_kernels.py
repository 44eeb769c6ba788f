"""Layered knapsack DP kernels.

Both k-multiset and k-sequence knapsack reduce to the same table::

    Q[0, b] = 0
    Q[l, b] = max_j  values[l-1, j] + Q[l-1, b - costs[l-1, j]]   (-inf if b < cost)

``choice[l, b]`` stores the smallest maximizing item. The numba and numpy
versions perform the same float additions in the same order, so their
tables agree bit for bit.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit

NEG_INF = -np.inf


@njit(cache=True)
def _layered_knapsack_jit(values, costs, cap):
    k, m = values.shape
    q = np.full((k + 1, cap + 1), -np.inf)
    choice = np.full((k + 1, cap + 1), -1, dtype=np.int64)
    for b in range(cap + 1):
        q[0, b] = 0.0
    for ell in range(1, k + 1):
        for b in range(cap + 1):
            best = -np.inf
            arg = -1
            for j in range(m):
                c = costs[ell - 1, j]
                if c > b:
                    continue
                prev = q[ell - 1, b - c]
                if prev == -np.inf:
                    continue
                val = values[ell - 1, j] + prev
                if val > best:
                    best = val
                    arg = j
            q[ell, b] = best
            choice[ell, b] = arg
    return q, choice


def _layered_knapsack_numpy(values, costs, cap):
    k, m = values.shape
    q = np.full((k + 1, cap + 1), NEG_INF)
    choice = np.full((k + 1, cap + 1), -1, dtype=np.int64)
    q[0, :] = 0.0
    cand = np.empty((m, cap + 1))
    for ell in range(1, k + 1):
        prev = q[ell - 1]
        cand.fill(NEG_INF)
        for j in range(m):
            c = int(costs[ell - 1, j])
            if c <= cap:
                cand[j, c:] = values[ell - 1, j] + prev[: cap + 1 - c]
        arg = np.argmax(cand, axis=0)
        best = cand[arg, np.arange(cap + 1)]
        reachable = best > NEG_INF
        q[ell] = best
        choice[ell] = np.where(reachable, arg, -1)
    return q, choice


def layered_knapsack(values, costs, cap, use_numba=None):
    """Fill the DP table; returns ``(Q, choice)`` of shape ``(k+1, cap+1)``."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    costs = np.ascontiguousarray(costs, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _layered_knapsack_jit(values, costs, int(cap))
    return _layered_knapsack_numpy(values, costs, int(cap))


def backtrack(choice, costs, ell, b):
    """Items chosen for layers ``1..ell`` ending at budget ``b``, in layer order."""
    items = [0] * ell
    while ell > 0:
        j = int(choice[ell, b])
        items[ell - 1] = j
        b -= int(costs[ell - 1, j])
        ell -= 1
    return items
