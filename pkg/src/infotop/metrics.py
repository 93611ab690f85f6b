"""Distances between discrete measures: total variation, setwise gaps,
Wasserstein-1 and Prohorov.

Measures whose supports sit at different points are compared on the union of
their spaces (points matched by id, distances from ambient coordinates).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .measure import (
    WEIGHT_TOL,
    DiscreteMeasure,
    FiniteMetricSpace,
    ProductSpace,
    align,
    total_variation,
)
from .transport import metric_transport, min_cost_transport


@dataclass(frozen=True)
class GroundMetric:
    """Cost between product points.

    ``raw`` sums the axis distances; ``trunc`` sums ``min(d_axis, 1)``, which
    keeps every axis bounded and still metrises the product topology.
    ``override`` replaces both with an arbitrary function of two id tuples.
    """

    mode: str = "trunc"
    override: Callable[[tuple, tuple], float] | None = None

    def __post_init__(self):
        if self.mode not in ("raw", "trunc"):
            raise ValidationError(f"ground metric mode must be 'raw' or 'trunc', got {self.mode!r}")

    def matrix(self, space: ProductSpace, left: Sequence[tuple], right: Sequence[tuple]) -> np.ndarray:
        if self.override is not None:
            return np.array([[float(self.override(p, q)) for q in right] for p in left], dtype=float).reshape(
                len(left), len(right)
            )
        per_axis = space.axis_distances(left, right)
        if self.mode == "trunc":
            per_axis = [np.minimum(d, 1.0) for d in per_axis]
        return np.sum(per_axis, axis=0)


RAW = GroundMetric("raw")
TRUNC = GroundMetric("trunc")


@dataclass(frozen=True)
class TransportPlan:
    sources: tuple
    targets: tuple
    source_weights: np.ndarray
    target_weights: np.ndarray
    flow: np.ndarray

    def check(self, tol: float = WEIGHT_TOL):
        if np.any(self.flow < 0):
            raise ValidationError("negative flow in transport plan")
        if np.max(np.abs(self.flow.sum(axis=1) - self.source_weights), initial=0.0) > tol:
            raise ValidationError("plan row sums differ from source weights")
        if np.max(np.abs(self.flow.sum(axis=0) - self.target_weights), initial=0.0) > tol:
            raise ValidationError("plan column sums differ from target weights")
        if abs(self.flow.sum() - 1.0) > tol:
            raise ValidationError("plan total mass differs from 1")
        return self

    def pairs(self):
        """Nonzero (source, target, mass) triples in index order."""
        for i, j in zip(*np.nonzero(self.flow)):
            yield self.sources[i], self.targets[j], float(self.flow[i, j])


def _same_structure(mu: DiscreteMeasure, nu: DiscreteMeasure):
    if mu.axis_names != nu.axis_names:
        raise ValidationError(f"axis structures differ: {mu.axis_names} vs {nu.axis_names}")


def tv_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Total variation as the supremum over [-1, 1]-valued test functions (range [0, 2])."""
    return total_variation(mu, nu)


def _weights(mu: DiscreteMeasure):
    pts = mu.support
    return pts, np.array([mu.atoms[p] for p in pts])


def wasserstein1(mu: DiscreteMeasure, nu: DiscreteMeasure, ground: GroundMetric = TRUNC) -> tuple[float, TransportPlan]:
    """Exact optimal transport cost and an optimal plan."""
    _same_structure(mu, nu)
    mu, nu = align(mu, nu)
    src, a = _weights(mu)
    dst, b = _weights(nu)
    if src == dst and np.array_equal(a, b):
        return 0.0, TransportPlan(src, dst, a, b, np.diag(a))
    cost = ground.matrix(mu.space, src, dst)
    if ground.override is None:
        where = {p: j for j, p in enumerate(dst)}
        value, flow = metric_transport(a, b, cost, [(i, where[p]) for i, p in enumerate(src) if p in where])
    else:
        value, flow = min_cost_transport(a, b, cost)
    return value, TransportPlan(src, dst, a, b, flow)


def w1(mu: DiscreteMeasure, nu: DiscreteMeasure, ground: GroundMetric = TRUNC) -> float:
    return wasserstein1(mu, nu, ground)[0]


def prohorov_from_costs(a: np.ndarray, b: np.ndarray, dist: np.ndarray) -> float:
    """Prohorov distance from weights and a pairwise distance matrix.

    Uses the coupling characterisation: the smallest alpha for which some
    coupling puts at most alpha mass on pairs farther apart than alpha. The
    uncovered mass ``deficit(alpha)`` is one minus a max flow over the pairs
    within alpha; it only changes at the distinct pairwise distances, so the
    answer is the crossing point of those breakpoints with the deficit.
    """
    levels = np.unique(dist)

    def deficit(alpha):
        # max-flow over edges d <= alpha == 1 - min-cost with unit cost on the rest
        return min_cost_transport(a, b, (dist > alpha).astype(float))[0]

    lo, hi = 0, len(levels) - 1
    # deficit at the largest distance is zero, so the predicate holds at hi
    while lo < hi:
        mid = (lo + hi) // 2
        if deficit(levels[mid]) <= levels[mid]:
            hi = mid
        else:
            lo = mid + 1
    best = min(1.0, float(levels[lo]))
    if lo > 0:
        best = min(best, deficit(levels[lo - 1]))
    return float(max(best, 0.0))


def prohorov(mu: DiscreteMeasure, nu: DiscreteMeasure, ground: GroundMetric = RAW) -> float:
    """Exact Prohorov distance under the product sum metric (capped at 1)."""
    _same_structure(mu, nu)
    mu, nu = align(mu, nu)
    src, a = _weights(mu)
    dst, b = _weights(nu)
    if src == dst and np.array_equal(a, b):
        return 0.0
    return prohorov_from_costs(a, b, ground.matrix(mu.space, src, dst))


# --- setwise comparison -------------------------------------------------------


@dataclass(frozen=True)
class Rect:
    """Product of per-axis point subsets; an axis left out means the whole axis."""

    sides: Mapping[str, frozenset] = field(default_factory=dict)

    def mask(self, space: ProductSpace) -> np.ndarray:
        for name in self.sides:
            space.position(name)
        idx = []
        for ax in space.axes:
            if ax.name in self.sides:
                idx.append([ax.index(p) for p in sorted(self.sides[ax.name])])
            else:
                idx.append(list(range(len(ax))))
        m = np.zeros(space.shape, dtype=bool)
        m[np.ix_(*idx)] = True
        return m


@dataclass(frozen=True)
class AtomSet:
    points: frozenset

    def mask(self, space: ProductSpace) -> np.ndarray:
        m = np.zeros(space.shape, dtype=bool)
        for p in self.points:
            space.check_point(p)
            m[space.index(p)] = True
        return m


@dataclass(frozen=True)
class UnionSet:
    parts: tuple

    def mask(self, space: ProductSpace) -> np.ndarray:
        m = np.zeros(space.shape, dtype=bool)
        for part in self.parts:
            m |= part.mask(space)
        return m


def parse_set(doc) -> Rect | AtomSet | UnionSet:
    """Build a set from its JSON form: ``{"rect": {...}}``, ``{"atoms": [...]}`` or ``{"union": [...]}``."""
    if isinstance(doc, (Rect, AtomSet, UnionSet)):
        return doc
    if not isinstance(doc, Mapping) or len(doc) != 1:
        raise ValidationError(f"cannot parse set description {doc!r}")
    (kind, body), = doc.items()
    if kind == "rect":
        return Rect({str(k): frozenset(str(v) for v in vs) for k, vs in body.items()})
    if kind == "atoms":
        return AtomSet(frozenset(tuple(str(i) for i in p) for p in body))
    if kind == "union":
        return UnionSet(tuple(parse_set(p) for p in body))
    raise ValidationError(f"unknown set kind {kind!r}")


class ProductFamily:
    """All rectangles built from one subset per axis, taken from per-axis lists."""

    def __init__(self, per_axis: Mapping[str, Sequence[frozenset]], note: str = ""):
        self.per_axis = {k: [frozenset(s) for s in v] for k, v in per_axis.items()}
        self.note = note

    def __len__(self):
        n = 1
        for v in self.per_axis.values():
            n *= len(v)
        return n

    def describe(self) -> dict:
        return {"kind": "product", "sizes": {k: len(v) for k, v in self.per_axis.items()}, "sets": len(self),
                "note": self.note}

    def indicators(self, ax: FiniteMetricSpace) -> np.ndarray:
        subsets = self.per_axis.get(ax.name)
        if subsets is None:
            return np.ones((1, len(ax)))
        ind = np.zeros((len(subsets), len(ax)))
        for r, s in enumerate(subsets):
            for p in s:
                ind[r, ax.index(p)] = 1.0
        return ind


def all_subsets(ax: FiniteMetricSpace) -> list[frozenset]:
    ids = ax.ids
    return [frozenset(c) for k in range(1, len(ids) + 1) for c in combinations(ids, k)]


def dyadic_blocks(ax: FiniteMetricSpace, max_level: int) -> list[frozenset]:
    """Contiguous blocks of the ordered points, halving at each level up to ``max_level``."""
    ids = ax.ordered_ids()
    n = len(ids)
    seen = {}
    for level in range(max_level + 1):
        parts = 2 ** level
        for j in range(parts):
            lo, hi = (j * n) // parts, ((j + 1) * n) // parts
            if hi > lo:
                seen.setdefault(tuple(ids[lo:hi]), None)
    return [frozenset(b) for b in seen]


def _depth(n: int) -> int:
    return int(np.ceil(np.log2(n))) if n > 1 else 0


def default_family(space: ProductSpace, cap: int = 2 ** 12) -> ProductFamily:
    """Per-axis subsets (all of them when small, dyadic blocks otherwise), coarsened until
    the number of rectangles is at most ``cap``."""
    choice = {}
    for ax in space.axes:
        n_all = 2 ** len(ax) - 1 if len(ax) < 31 else None
        choice[ax.name] = ("all", None) if n_all is not None and n_all <= cap else ("dyadic", _depth(len(ax)))

    def build(ax):
        kind, level = choice[ax.name]
        return all_subsets(ax) if kind == "all" else dyadic_blocks(ax, level)

    fams = {ax.name: build(ax) for ax in space.axes}
    while np.prod([len(v) for v in fams.values()], dtype=float) > cap:
        ax = max(space.axes, key=lambda a: len(fams[a.name]))
        kind, level = choice[ax.name]
        if kind == "all":
            choice[ax.name] = ("dyadic", _depth(len(ax)))
        elif level > 0:
            choice[ax.name] = ("dyadic", level - 1)
        else:
            break
        fams[ax.name] = build(ax)
    note = ", ".join(f"{k}:{'all subsets' if c[0] == 'all' else f'dyadic levels 0..{c[1]}'}" for k, c in choice.items())
    return ProductFamily(fams, note=note)


def setwise_gap(mu: DiscreteMeasure, nu: DiscreteMeasure, family=None) -> float:
    """Largest ``|mu(S) - nu(S)|`` over a finite family of sets.

    ``family`` is a :class:`ProductFamily`, a list of set descriptions, or
    ``None`` for :func:`default_family` on the merged space.
    """
    _same_structure(mu, nu)
    mu, nu = align(mu, nu)
    space = mu.space
    diff = mu.dense(space) - nu.dense(space)
    if family is None:
        family = default_family(space)
    if isinstance(family, ProductFamily):
        for name in family.per_axis:
            space.position(name)
        r = diff
        for ax in space.axes:
            r = np.tensordot(r, family.indicators(ax), axes=([0], [1]))
        return float(np.max(np.abs(r), initial=0.0))
    worst = 0.0
    for s in family:
        worst = max(worst, abs(float(diff[parse_set(s).mask(space)].sum())))
    return worst
