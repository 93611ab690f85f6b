"""Exact transportation problems by successive shortest augmenting paths.

Supplies and demands are real masses. Shortest paths in the residual graph are
found with a vectorised Bellman-Ford pass, so negative reduced costs on
backward arcs need no potentials. Ties resolve to the smallest source index,
then the smallest target index, which makes plans reproducible.
"""
from __future__ import annotations

import numpy as np

MASS_EPS = 1e-15
RELAX_EPS = 1e-13


def min_cost_transport(a, b, cost) -> tuple[float, np.ndarray]:
    """Minimise ``sum(flow * cost)`` over couplings of ``a`` and ``b``.

    Returns the optimal value and the flow matrix. ``a`` and ``b`` should
    carry equal total mass; any surplus beyond ``MASS_EPS`` is left unrouted.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(cost, dtype=float)
    n, m = C.shape
    if a.shape != (n,) or b.shape != (m,):
        raise ValueError(f"cost shape {C.shape} does not match supplies {a.shape} and demands {b.shape}")
    if n == 1 or m == 1:
        # a single source or target leaves one coupling
        flow = b[None, :].copy() if n == 1 else a[:, None].copy()
        return float(np.sum(flow * C)), flow
    sup, dem = a.copy(), b.copy()
    flow = np.zeros((n, m))
    rows, cols = np.arange(n), np.arange(m)
    max_rounds = 4 * (n + m) * (n + m) + 16

    for _ in range(max_rounds):
        act_s = sup > MASS_EPS
        act_t = dem > MASS_EPS
        if not act_s.any() or not act_t.any():
            break
        ds = np.where(act_s, 0.0, np.inf)
        ps = np.full(n, -1)
        dt = np.full(m, np.inf)
        pt = np.full(m, -1)
        for _ in range(n + m + 2):
            cand = ds[:, None] + C
            ibest = np.argmin(cand, axis=0)
            v = cand[ibest, cols]
            upd_t = v < dt - RELAX_EPS
            dt[upd_t] = v[upd_t]
            pt[upd_t] = ibest[upd_t]
            back = np.where(flow > MASS_EPS, dt[None, :] - C, np.inf)
            jbest = np.argmin(back, axis=1)
            v2 = back[rows, jbest]
            upd_s = v2 < ds - RELAX_EPS
            ds[upd_s] = v2[upd_s]
            ps[upd_s] = jbest[upd_s]
            if not (upd_t.any() or upd_s.any()):
                break
        target_d = np.where(act_t, dt, np.inf)
        j = int(np.argmin(target_d))
        if not np.isfinite(target_d[j]):
            break

        forward, backward = [], []
        jj, steps = j, 0
        while True:
            i = int(pt[jj])
            forward.append((i, jj))
            if ps[i] == -1:
                break
            jj = int(ps[i])
            backward.append((i, jj))
            steps += 1
            if steps > n + m:
                raise RuntimeError("cycle in shortest-path tree; cost matrix is not finite?")
        start = forward[-1][0]
        delta = min(sup[start], dem[j], *(flow[i, k] for i, k in backward)) if backward else min(sup[start], dem[j])
        for i, k in forward:
            flow[i, k] += delta
        for i, k in backward:
            flow[i, k] -= delta
            if flow[i, k] <= MASS_EPS:
                flow[i, k] = 0.0
        sup[start] -= delta
        dem[j] -= delta
    else:
        raise RuntimeError("transport solver did not terminate")

    return float(np.sum(flow * C)), flow


def metric_transport(a, b, cost, same) -> tuple[float, np.ndarray]:
    """Transport for a metric cost, where mass shared by identical points can stay put.

    ``same`` lists index pairs (i, j) of a source and a target that are the
    same point, so ``cost[i, j] == 0``. Under the triangle inequality some
    optimal plan keeps ``min(a[i], b[j])`` at each such pair, which leaves a
    smaller problem over the residual masses.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(cost, dtype=float)
    flow = np.zeros(C.shape)
    ra, rb = a.copy(), b.copy()
    for i, j in same:
        keep = min(ra[i], rb[j])
        flow[i, j] += keep
        ra[i] -= keep
        rb[j] -= keep
    rows = np.flatnonzero(ra > MASS_EPS)
    cols = np.flatnonzero(rb > MASS_EPS)
    if rows.size and cols.size:
        _, sub = min_cost_transport(ra[rows], rb[cols], C[np.ix_(rows, cols)])
        flow[np.ix_(rows, cols)] += sub
    return float(np.sum(flow * C)), flow
