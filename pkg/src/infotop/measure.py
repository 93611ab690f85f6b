"""Finite metric spaces, discrete probability measures and their disintegrations.

Atoms are keyed by tuples of point ids, one id per axis, so two measures built
on different (but compatible) spaces can be compared after merging the spaces.
"""
from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from itertools import product as _cartesian
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InconsistencyError, ValidationError

WEIGHT_TOL = 1e-9
IDENTITY_TOL = 1e-12
TRIANGLE_SLACK = 1e-12
TOL_ENV = "INFOTOP_TOL"


def default_tol() -> float:
    """Consistency tolerance for marginal checks; ``INFOTOP_TOL`` overrides the default."""
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return WEIGHT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValidationError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not np.isfinite(tol) or tol < 0:
        raise ValidationError(f"{TOL_ENV} must be a nonnegative number, got {raw!r}")
    return tol


@dataclass(frozen=True)
class Point:
    id: str
    coords: tuple[float, ...] | None = None


def _as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    if isinstance(p, str):
        return Point(p)
    if isinstance(p, Mapping):
        coords = p.get("coords")
        return Point(str(p["id"]), None if coords is None else tuple(float(c) for c in coords))
    pid, coords = p
    if coords is not None and np.isscalar(coords):
        coords = (coords,)
    return Point(str(pid), None if coords is None else tuple(float(c) for c in coords))


class FiniteMetricSpace:
    """A finite set of labelled points with one of three metrics.

    ``metric`` is ``"euclidean"`` (distance between coordinate vectors),
    ``"discrete"`` (1 between distinct points) or a symmetric matrix.
    """

    def __init__(self, name: str, points: Iterable, metric="discrete"):
        self.name = str(name)
        self.points = tuple(_as_point(p) for p in points)
        self.ids = tuple(p.id for p in self.points)
        self._index = {pid: i for i, pid in enumerate(self.ids)}
        if len(self._index) != len(self.ids):
            raise ValidationError(f"space {self.name!r}: duplicate point ids")
        if not self.ids:
            raise ValidationError(f"space {self.name!r}: no points")
        self.matrix = None
        if isinstance(metric, str):
            if metric not in ("euclidean", "discrete"):
                raise ValidationError(f"space {self.name!r}: unknown metric {metric!r}")
            self.kind = metric
        else:
            self.kind = "matrix"
            self.matrix = np.array(metric, dtype=float)
            self.matrix.setflags(write=False)
            self._check_matrix()
        self._coords = None
        if self.kind == "euclidean":
            if any(p.coords is None for p in self.points):
                raise ValidationError(f"space {self.name!r}: euclidean metric needs coords on every point")
            dims = {len(p.coords) for p in self.points}
            if len(dims) != 1:
                raise ValidationError(f"space {self.name!r}: coordinate dimensions differ")
            self._coords = np.array([p.coords for p in self.points], dtype=float)

    def _check_matrix(self):
        m, n = self.matrix, len(self.ids)
        if m.shape != (n, n):
            raise ValidationError(f"space {self.name!r}: matrix shape {m.shape}, expected {(n, n)}")
        if np.any(np.abs(np.diag(m)) > 0) or np.any(m < 0) or not np.array_equal(m, m.T):
            raise ValidationError(f"space {self.name!r}: matrix is not a symmetric nonnegative zero-diagonal matrix")
        # d(i,k) <= d(i,j) + d(j,k)
        via = m[:, :, None] + m[None, :, :]
        if np.any(m[:, None, :] > via + TRIANGLE_SLACK):
            raise ValidationError(f"space {self.name!r}: matrix violates the triangle inequality")

    def __len__(self):
        return len(self.ids)

    def __contains__(self, pid):
        return pid in self._index

    def __repr__(self):
        return f"FiniteMetricSpace({self.name!r}, {len(self)} points, {self.kind})"

    def index(self, pid: str) -> int:
        try:
            return self._index[pid]
        except KeyError:
            raise ValidationError(f"space {self.name!r} has no point {pid!r}") from None

    def coords_of(self, pid: str):
        return self.points[self.index(pid)].coords

    def distance(self, p: str, q: str) -> float:
        return float(self.distance_matrix([p], [q])[0, 0])

    def distance_matrix(self, left: Sequence[str], right: Sequence[str]) -> np.ndarray:
        li = np.array([self.index(p) for p in left], dtype=int)
        ri = np.array([self.index(q) for q in right], dtype=int)
        if self.kind == "discrete":
            return (li[:, None] != ri[None, :]).astype(float)
        if self.kind == "matrix":
            return np.array(self.matrix[np.ix_(li, ri)])
        diff = self._coords[li][:, None, :] - self._coords[ri][None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def ordered_ids(self) -> list[str]:
        """Point ids sorted by coordinate for one-dimensional euclidean spaces, else listing order."""
        if self.kind == "euclidean" and self._coords.shape[1] == 1:
            order = np.argsort(self._coords[:, 0], kind="stable")
            return [self.ids[i] for i in order]
        return list(self.ids)

    def same_as(self, other: "FiniteMetricSpace") -> bool:
        if self is other:
            return True
        if self.name != other.name or self.kind != other.kind or self.ids != other.ids:
            return False
        if self.kind == "matrix":
            return bool(np.array_equal(self.matrix, other.matrix))
        if self.kind == "euclidean":
            return bool(np.array_equal(self._coords, other._coords))
        return True

    def merge(self, other: "FiniteMetricSpace") -> "FiniteMetricSpace":
        """Union of two spaces over the same ambient set, matching points by id."""
        if self.same_as(other):
            return self
        if self.name != other.name:
            raise ValidationError(f"cannot merge axes {self.name!r} and {other.name!r}")
        if self.kind != other.kind:
            raise ValidationError(f"axis {self.name!r}: cannot merge {self.kind} and {other.kind} metrics")
        if self.kind == "matrix":
            raise ValidationError(f"axis {self.name!r}: explicit-matrix spaces must be identical to be compared")
        points = list(self.points)
        for p in other.points:
            if p.id in self._index:
                mine = self.points[self._index[p.id]]
                if self.kind == "euclidean" and mine.coords != p.coords:
                    raise ValidationError(f"axis {self.name!r}: point {p.id!r} has conflicting coordinates")
            else:
                points.append(p)
        return FiniteMetricSpace(self.name, points, self.kind)

    def subspace(self, ids: Iterable[str]) -> "FiniteMetricSpace":
        keep = [self.index(i) for i in ids]
        pts = [self.points[i] for i in keep]
        if self.kind == "matrix":
            return FiniteMetricSpace(self.name, pts, self.matrix[np.ix_(keep, keep)])
        return FiniteMetricSpace(self.name, pts, self.kind)


class ProductSpace:
    """Ordered product of named finite metric spaces with the sum metric."""

    def __init__(self, axes: Sequence[FiniteMetricSpace]):
        self.axes = tuple(axes)
        if not self.axes:
            raise ValidationError("a product space needs at least one axis")
        self.names = tuple(a.name for a in self.axes)
        if len(set(self.names)) != len(self.names):
            raise ValidationError(f"axis names must be unique, got {self.names}")

    def __len__(self):
        return len(self.axes)

    def __repr__(self):
        return "ProductSpace(" + " x ".join(f"{a.name}[{len(a)}]" for a in self.axes) + ")"

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    def position(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown axis {name!r}; axes are {self.names}") from None

    def axis(self, name: str) -> FiniteMetricSpace:
        return self.axes[self.position(name)]

    def sub(self, names: Sequence[str]) -> "ProductSpace":
        return ProductSpace([self.axis(n) for n in names])

    def same_as(self, other: "ProductSpace") -> bool:
        return len(self) == len(other) and all(a.same_as(b) for a, b in zip(self.axes, other.axes))

    def merge(self, other: "ProductSpace") -> "ProductSpace":
        if self.names != other.names:
            raise ValidationError(f"axis structures differ: {self.names} vs {other.names}")
        if self.same_as(other):
            return self
        return ProductSpace([a.merge(b) for a, b in zip(self.axes, other.axes)])

    def concat(self, other: "ProductSpace") -> "ProductSpace":
        return ProductSpace(self.axes + other.axes)

    def index(self, point: tuple[str, ...]) -> tuple[int, ...]:
        return tuple(a.index(p) for a, p in zip(self.axes, point))

    def check_point(self, point: tuple[str, ...]):
        if len(point) != len(self.axes):
            raise ValidationError(f"point {point} has arity {len(point)}, space has {len(self.axes)} axes")
        self.index(point)

    def axis_distances(self, left: Sequence[tuple], right: Sequence[tuple]) -> list[np.ndarray]:
        """Per-axis distance matrices between two lists of product points."""
        return [ax.distance_matrix([p[k] for p in left], [q[k] for q in right]) for k, ax in enumerate(self.axes)]

    def points(self):
        return _cartesian(*(a.ids for a in self.axes))


def _norm_axes(axes) -> tuple[str, ...]:
    if isinstance(axes, str):
        return (axes,)
    return tuple(axes)


class DiscreteMeasure:
    """Finitely supported probability measure on a :class:`ProductSpace`.

    Zero-weight atoms are dropped; weights must be positive and sum to one
    within ``WEIGHT_TOL``. Instances are treated as immutable.
    """

    __slots__ = ("space", "_atoms")

    def __init__(self, space, atoms, *, check: bool = True):
        if isinstance(space, FiniteMetricSpace):
            space = ProductSpace([space])
        self.space = space
        acc: dict[tuple, float] = defaultdict(float)
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for point, w in items:
            if isinstance(point, str):
                point = (point,)
            acc[tuple(point)] += float(w)
        clean = {}
        for point, w in acc.items():
            if check:
                space.check_point(point)
                if not np.isfinite(w) or w < 0:
                    raise ValidationError(f"atom {point} has invalid weight {w!r}")
            if w > 0:
                clean[point] = w
        if check:
            total = sum(clean.values())
            if abs(total - 1.0) > WEIGHT_TOL:
                raise ValidationError(f"weights sum to {total!r}, not 1")
        self._atoms = MappingProxyType(dict(sorted(clean.items())))

    @classmethod
    def dirac(cls, space, point) -> "DiscreteMeasure":
        if isinstance(point, str):
            point = (point,)
        return cls(space, {tuple(point): 1.0})

    @classmethod
    def uniform(cls, space, points) -> "DiscreteMeasure":
        points = [tuple(p) if not isinstance(p, str) else (p,) for p in points]
        return cls(space, {p: 1.0 / len(points) for p in points})

    @property
    def atoms(self) -> Mapping[tuple, float]:
        return self._atoms

    @property
    def axis_names(self) -> tuple[str, ...]:
        return self.space.names

    @property
    def support(self) -> tuple[tuple, ...]:
        return tuple(self._atoms)

    def weight(self, point) -> float:
        if isinstance(point, str):
            point = (point,)
        return self._atoms.get(tuple(point), 0.0)

    def items(self):
        return self._atoms.items()

    def __len__(self):
        return len(self._atoms)

    def __repr__(self):
        body = ", ".join(f"{'/'.join(p)}:{w:.6g}" for p, w in list(self._atoms.items())[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} atoms)"
        return f"DiscreteMeasure[{'x'.join(self.axis_names)}]({body}{more})"

    def key(self) -> tuple:
        """Hashable identity of the measure's atoms and weights (exact)."""
        return tuple(self._atoms.items())

    def on(self, space: ProductSpace) -> "DiscreteMeasure":
        """The same atoms viewed on a larger (merged) space."""
        if space is self.space:
            return self
        return DiscreteMeasure(space, self._atoms, check=False)

    def dense(self, space: ProductSpace | None = None) -> np.ndarray:
        space = space or self.space
        arr = np.zeros(space.shape)
        for p, w in self._atoms.items():
            arr[space.index(p)] = w
        return arr

    def close_to(self, other: "DiscreteMeasure", tol: float = IDENTITY_TOL) -> bool:
        if self.axis_names != other.axis_names:
            return False
        keys = set(self._atoms) | set(other._atoms)
        return all(abs(self.weight(k) - other.weight(k)) <= tol for k in keys)

    def max_abs_diff(self, other: "DiscreteMeasure") -> float:
        keys = set(self._atoms) | set(other._atoms)
        return max((abs(self.weight(k) - other.weight(k)) for k in keys), default=0.0)

    def expect(self, fn) -> float:
        return float(sum(w * fn(p) for p, w in self._atoms.items()))


def product_measure(*measures: DiscreteMeasure) -> DiscreteMeasure:
    space = measures[0].space
    atoms = dict(measures[0].items())
    for m in measures[1:]:
        space = space.concat(m.space)
        atoms = {p + q: w * v for p, w in atoms.items() for q, v in m.items()}
    return DiscreteMeasure(space, atoms)


def common_space(mu: DiscreteMeasure, nu: DiscreteMeasure) -> ProductSpace:
    return mu.space.merge(nu.space)


def align(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    space = common_space(mu, nu)
    return mu.on(space), nu.on(space)


def marginal(mu: DiscreteMeasure, axes) -> DiscreteMeasure:
    """Push-forward of ``mu`` onto the named axes, in the order given."""
    axes = _norm_axes(axes)
    if not axes:
        raise ValidationError("marginal needs at least one axis")
    pos = [mu.space.position(a) for a in axes]
    if len(set(pos)) != len(pos):
        raise ValidationError(f"repeated axis in {axes}")
    acc: dict[tuple, float] = defaultdict(float)
    for p, w in mu.items():
        acc[tuple(p[i] for i in pos)] += w
    return DiscreteMeasure(mu.space.sub(axes), acc, check=False)


def total_variation(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Sum of absolute atom differences, i.e. the [0, 2]-valued total variation."""
    if mu.axis_names != nu.axis_names:
        raise ValidationError(f"axis structures differ: {mu.axis_names} vs {nu.axis_names}")
    common_space(mu, nu)
    keys = set(mu.atoms) | set(nu.atoms)
    return float(sum(abs(mu.weight(k) - nu.weight(k)) for k in keys))


@dataclass(frozen=True)
class Kernel:
    """Regular conditional distribution, defined only on the conditioning support."""

    given_space: ProductSpace
    target_space: ProductSpace
    rows: Mapping[tuple, DiscreteMeasure]

    @property
    def given(self) -> tuple[str, ...]:
        return self.given_space.names

    @property
    def target(self) -> tuple[str, ...]:
        return self.target_space.names

    def __getitem__(self, point) -> DiscreteMeasure:
        if isinstance(point, str):
            point = (point,)
        try:
            return self.rows[tuple(point)]
        except KeyError:
            raise ValidationError(f"kernel has no row at {point} (outside the conditioning support)") from None

    def domain(self) -> set:
        return set(self.rows)


def disintegrate(mu: DiscreteMeasure, given) -> tuple[DiscreteMeasure, Kernel]:
    """Split ``mu`` into the marginal on ``given`` and the conditional kernel on the rest."""
    given = _norm_axes(given)
    gpos = [mu.space.position(a) for a in given]
    if not given or len(set(gpos)) != len(gpos) or len(given) >= len(mu.axis_names):
        raise ValidationError(f"'given' must be a proper nonempty subset of {mu.axis_names}, got {given}")
    rest = tuple(n for n in mu.axis_names if n not in given)
    rpos = [mu.space.position(a) for a in rest]
    marg = marginal(mu, given)
    slices: dict[tuple, dict] = defaultdict(dict)
    for p, w in mu.items():
        g = tuple(p[i] for i in gpos)
        slices[g][tuple(p[i] for i in rpos)] = w
    target = mu.space.sub(rest)
    rows = {}
    for g, sl in slices.items():
        m = marg.weight(g)
        rows[g] = DiscreteMeasure(target, {q: w / m for q, w in sl.items()}, check=False)
    return marg, Kernel(marg.space, target, MappingProxyType(dict(sorted(rows.items()))))


def compose(marg: DiscreteMeasure, k: Kernel) -> DiscreteMeasure:
    """Rebuild the joint from a marginal and a kernel: weight(p, q) = marg(p) * k(p)(q)."""
    if marg.axis_names != k.given:
        raise ValidationError(f"marginal axes {marg.axis_names} do not match kernel given axes {k.given}")
    support = set(marg.support)
    if support != k.domain():
        missing = support - k.domain()
        gap = sum(marg.weight(p) for p in missing)
        raise InconsistencyError("kernel rows do not cover exactly the marginal's support", gap)
    space = marg.space.merge(k.given_space).concat(k.target_space)
    atoms = {}
    for p, w in marg.items():
        for q, v in k.rows[p].items():
            atoms[p + q] = w * v
    return DiscreteMeasure(space, atoms)


def is_consistent(mu: DiscreteMeasure, nu: DiscreteMeasure, shared, tol: float | None = None) -> tuple[bool, float]:
    """Compare the marginals of two measures on their shared axes (total variation gap)."""
    tol = default_tol() if tol is None else tol
    shared = _norm_axes(shared)
    gap = total_variation(marginal(mu, shared), marginal(nu, shared))
    return gap <= tol, gap


def cond_indep_gap(mu: DiscreteMeasure, given, b_axis, c_axis) -> float:
    """Largest total-variation distance between mu(.|a,c) and mu(.|a) on the b-axis.

    Zero exactly when b and c are conditionally independent given a on the support.
    """
    given, b_axis, c_axis = _norm_axes(given), _norm_axes(b_axis), _norm_axes(c_axis)
    names = given + b_axis + c_axis
    if len(set(names)) != len(names) or set(names) != set(mu.axis_names):
        raise ValidationError(f"given/b/c axes {names} must partition the measure's axes {mu.axis_names}")
    gpos = [mu.space.position(a) for a in given]
    bpos = [mu.space.position(a) for a in b_axis]
    cpos = [mu.space.position(a) for a in c_axis]
    by_a: dict[tuple, dict] = defaultdict(lambda: defaultdict(float))
    by_ac: dict[tuple, dict] = defaultdict(lambda: defaultdict(float))
    mass_a: dict[tuple, float] = defaultdict(float)
    mass_ac: dict[tuple, float] = defaultdict(float)
    for p, w in mu.items():
        a = tuple(p[i] for i in gpos)
        b = tuple(p[i] for i in bpos)
        c = tuple(p[i] for i in cpos)
        by_a[a][b] += w
        by_ac[a, c][b] += w
        mass_a[a] += w
        mass_ac[a, c] += w
    worst = 0.0
    for (a, c), row in by_ac.items():
        base = by_a[a]
        ma, mac = mass_a[a], mass_ac[a, c]
        gap = sum(abs(row.get(b, 0.0) / mac - base[b] / ma) for b in base)
        worst = max(worst, gap)
    return float(worst)


def relabel(mu: DiscreteMeasure, mapping: Mapping[str, Mapping[str, str]]) -> DiscreteMeasure:
    """Rename point ids axis by axis; ``mapping[axis][old] = new``."""
    axes = []
    for ax in mu.space.axes:
        ren = mapping.get(ax.name, {})
        pts = [Point(ren.get(p.id, p.id), p.coords) for p in ax.points]
        metric = ax.matrix if ax.kind == "matrix" else ax.kind
        axes.append(FiniteMetricSpace(ax.name, pts, metric))
    space = ProductSpace(axes)
    names = mu.axis_names
    atoms = {tuple(mapping.get(n, {}).get(i, i) for n, i in zip(names, p)): w for p, w in mu.items()}
    return DiscreteMeasure(space, atoms)
