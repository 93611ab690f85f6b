"""Independent reference computations used only by the tests.

Nothing here calls the package's solvers: transport goes through scipy's
HiGHS LP, Prohorov through its set definition or an LP-based bisection, and
joints through explicit loops over all points.
"""
from __future__ import annotations

from collections import defaultdict
from itertools import chain, combinations, product

import numpy as np
from scipy.optimize import linprog


def axis_dist(ax, p, q) -> float:
    if p == q:
        return 0.0
    if ax.kind == "discrete":
        return 1.0
    if ax.kind == "matrix":
        return float(ax.matrix[ax.ids.index(p), ax.ids.index(q)])
    cp = np.array(ax.points[ax.ids.index(p)].coords)
    cq = np.array(ax.points[ax.ids.index(q)].coords)
    return float(np.sqrt(np.sum((cp - cq) ** 2)))


def point_dist(space, p, q, trunc=True) -> float:
    total = 0.0
    for ax, i, j in zip(space.axes, p, q):
        d = axis_dist(ax, i, j)
        total += min(d, 1.0) if trunc else d
    return total


def merged(mu, nu):
    space = mu.space.merge(nu.space)
    return space, dict(mu.items()), dict(nu.items())


def lp_transport(a, b, cost) -> float:
    n, m = cost.shape
    A_eq = np.zeros((n + m, n * m))
    for i in range(n):
        A_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A_eq[n + j, j::m] = 1.0
    res = linprog(cost.ravel(), A_eq=A_eq, b_eq=np.concatenate([a, b]), bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return float(res.fun)


def lp_w1(mu, nu, trunc=True) -> float:
    space, ma, mb = merged(mu, nu)
    src, dst = sorted(ma), sorted(mb)
    cost = np.array([[point_dist(space, p, q, trunc) for q in dst] for p in src])
    return lp_transport(np.array([ma[p] for p in src]), np.array([mb[q] for q in dst]), cost)


def _dist_matrix(mu, nu, trunc):
    space, ma, mb = merged(mu, nu)
    src, dst = sorted(ma), sorted(mb)
    d = np.array([[point_dist(space, p, q, trunc) for q in dst] for p in src])
    return np.array([ma[p] for p in src]), np.array([mb[q] for q in dst]), d


def prohorov_strassen(mu, nu, trunc=False, tol=1e-10) -> float:
    """Bisection on alpha: is there a coupling with at most alpha mass on pairs farther than alpha?"""
    a, b, d = _dist_matrix(mu, nu, trunc)

    def ok(alpha):
        return lp_transport(a, b, (d > alpha).astype(float)) <= alpha + 1e-12

    lo, hi = 0.0, 1.0
    if ok(0.0):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def prohorov_sets(mu, nu, trunc=False, tol=1e-10) -> float:
    """Bisection on the set definition: mu(S) <= nu(S^alpha) + alpha for every S in supp(mu)."""
    a, b, d = _dist_matrix(mu, nu, trunc)
    subsets = list(chain.from_iterable(combinations(range(len(a)), k) for k in range(1, len(a) + 1)))

    def ok(alpha):
        for s in subsets:
            near = np.any(d[list(s)] <= alpha, axis=0)
            if a[list(s)].sum() > b[near].sum() + alpha + 1e-12:
                return False
        return True

    lo, hi = 0.0, 1.0
    if ok(0.0):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def conditional(mu, given_pos, rest_pos):
    """Plain-dict conditional law of the rest coordinates given the given coordinates."""
    mass = defaultdict(float)
    joint = defaultdict(lambda: defaultdict(float))
    for p, w in mu.items():
        g = tuple(p[i] for i in given_pos)
        r = tuple(p[i] for i in rest_pos)
        mass[g] += w
        joint[g][r] += w
    return {g: {r: v / mass[g] for r, v in row.items()} for g, row in joint.items()}, dict(mass)


def brute_phi(mu, nu) -> dict:
    """sum over all (a, b, c) of mu(b|a) nu(a, c); mu on A x B, nu on A x C."""
    cond, _ = conditional(mu, [0], [1])
    nu_w = dict(nu.items())
    out = {}
    A = mu.space.axes[0].merge(nu.space.axes[0])
    for a, b, c in product(A.ids, mu.space.axes[1].ids, nu.space.axes[1].ids):
        w = cond.get((a,), {}).get((b,), 0.0) * nu_w.get((a, c), 0.0)
        if w > 0:
            out[(a, b, c)] = w
    return out


def brute_glue(mu, nu) -> dict:
    """mu on X x Y, nu on Y x Z: weight mu(x|y) nu(y, z)."""
    cond, _ = conditional(mu, [1], [0])
    out = {}
    for (y, z), w in nu.items():
        for (x,), v in cond.get((y,), {}).items():
            out[(x, y, z)] = out.get((x, y, z), 0.0) + v * w
    return out


def lifted_w1(atoms1, atoms2, base_dist, trunc_base=True) -> float:
    """W1 between two lists of (base_id, inner_measure, weight) atoms.

    Ground cost is min(base_dist, 1) plus the LP W1 distance of the inner measures.
    """
    cost = np.zeros((len(atoms1), len(atoms2)))
    for i, (a, z, _) in enumerate(atoms1):
        for j, (a2, z2, _) in enumerate(atoms2):
            d = base_dist(a, a2)
            cost[i, j] = (min(d, 1.0) if trunc_base else d) + lp_w1(z, z2, trunc=True)
    return lp_transport(np.array([w for *_, w in atoms1]), np.array([w for *_, w in atoms2]), cost)


def info_oracle(mu1, mu2) -> float:
    """Lifted W1 between the (a, mu(.|a)) laws, built with plain loops."""
    from infotop.measure import DiscreteMeasure, ProductSpace

    inner_space = ProductSpace([mu1.space.axes[1].merge(mu2.space.axes[1])])

    def lift(mu):
        cond, mass = conditional(mu, [0], [1])
        return [(g[0], DiscreteMeasure(inner_space, row), mass[g]) for g, row in sorted(cond.items())]

    A = mu1.space.axes[0].merge(mu2.space.axes[0])
    return lifted_w1(lift(mu1), lift(mu2), lambda a, b: axis_dist(A, a, b))


def exhaustive_decision(p) -> tuple[float, dict]:
    """Minimum over every deterministic rule observation -> action."""
    obs = p.observations
    best, best_rule = np.inf, None
    for choice in product(p.actions.ids, repeat=len(obs)):
        rule = dict(zip(obs, choice))
        v = sum(w * p.cost[(a, b, rule[a])] for (a, b), w in p.prior.items())
        if v < best - 1e-15:
            best, best_rule = v, rule
    return float(best), best_rule


def all_subset_gap(mu, nu) -> float:
    """max |mu(S) - nu(S)| over every subset of the joint support union (tiny cases)."""
    pts = sorted(set(dict(mu.items())) | set(dict(nu.items())))
    diff = np.array([mu.weight(p) - nu.weight(p) for p in pts])
    return float(max(diff[diff > 0].sum(), -diff[diff < 0].sum(), 0.0))
