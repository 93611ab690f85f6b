"""Lifting joint measures to measures over (point, conditional) pairs.

``psi`` sends mu on A x B to the law of (a, mu(.|a)); ``chi2_flatten``
averages the inner measures back out; ``chi1_glue``/``phi1`` glue two
measures that agree on a shared axis; ``phi`` is the composite that makes
b independent of c given a. ``info_distance`` compares two joints through
their lifts.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import InconsistencyError, ValidationError
from .measure import (
    WEIGHT_TOL,
    DiscreteMeasure,
    FiniteMetricSpace,
    ProductSpace,
    _norm_axes,
    default_tol,
    disintegrate,
    is_consistent,
    marginal,
)
from .metrics import RAW, TRUNC, prohorov, prohorov_from_costs, wasserstein1
from .transport import metric_transport

INNER_METRICS = ("w1", "prohorov")
SHORTCUT_SLACK = 1e-12


@dataclass(frozen=True)
class LiftedAtom:
    base: str
    inner: DiscreteMeasure
    weight: float
    rest: tuple = ()


class LiftedMeasure:
    """Finitely supported measure on A x P(B) (optionally x trailing axes C).

    Atoms with the same base point, equal inner measure and equal trailing
    point are merged. ``functional`` marks images of :func:`psi`, where each
    base point carries a single inner measure.
    """

    def __init__(
        self,
        base_space: FiniteMetricSpace,
        inner_space: ProductSpace,
        atoms: Iterable,
        *,
        extra: ProductSpace | None = None,
        functional: bool = False,
        inner_metric: str = "w1",
        check: bool = True,
    ):
        if isinstance(inner_space, FiniteMetricSpace):
            inner_space = ProductSpace([inner_space])
        if inner_metric not in INNER_METRICS:
            raise ValidationError(f"inner metric must be one of {INNER_METRICS}, got {inner_metric!r}")
        self.base_space = base_space
        self.inner_space = inner_space
        self.extra = extra
        self.inner_metric = inner_metric
        merged: dict[tuple, list] = {}
        for atom in atoms:
            if not isinstance(atom, LiftedAtom):
                atom = LiftedAtom(*atom)
            rest = tuple(atom.rest)
            if check:
                base_space.index(atom.base)
                if atom.inner.axis_names != inner_space.names:
                    raise ValidationError(f"inner measure axes {atom.inner.axis_names} != {inner_space.names}")
                for q in atom.inner.support:
                    inner_space.check_point(q)
                if rest:
                    if extra is None:
                        raise ValidationError("atom has trailing coordinates but no extra axes are declared")
                    extra.check_point(rest)
                elif extra is not None:
                    raise ValidationError("atom lacks coordinates for the extra axes")
                if not np.isfinite(atom.weight) or atom.weight < 0:
                    raise ValidationError(f"lifted atom weight {atom.weight!r} is invalid")
            if atom.weight <= 0:
                continue
            key = (atom.base, atom.inner.key(), rest)
            if key in merged:
                merged[key][1] += atom.weight
            else:
                merged[key] = [atom.inner, atom.weight]
        self.atoms = tuple(
            LiftedAtom(k[0], inner, w, k[2]) for k, (inner, w) in sorted(merged.items(), key=lambda kv: kv[0])
        )
        if check:
            total = sum(a.weight for a in self.atoms)
            if abs(total - 1.0) > WEIGHT_TOL:
                raise ValidationError(f"lifted weights sum to {total!r}, not 1")
        if functional:
            bases = [(a.base, a.rest) for a in self.atoms]
            if len(set(bases)) != len(bases):
                raise ValidationError("functional lifted measure has a base point with two inner measures")
        self.functional = functional

    def __len__(self):
        return len(self.atoms)

    def __repr__(self):
        return f"LiftedMeasure({self.base_space.name} x P({'x'.join(self.inner_space.names)}), {len(self)} atoms)"

    @property
    def base_name(self) -> str:
        return self.base_space.name

    def base_marginal(self) -> DiscreteMeasure:
        acc = defaultdict(float)
        for a in self.atoms:
            acc[(a.base,)] += a.weight
        return DiscreteMeasure(ProductSpace([self.base_space]), acc, check=False)

    def inners(self) -> list[DiscreteMeasure]:
        seen = {}
        for a in self.atoms:
            seen.setdefault(a.inner.key(), a.inner)
        return [seen[k] for k in sorted(seen)]

    def mass(self, predicate: Callable[[LiftedAtom], bool]) -> float:
        return float(sum(a.weight for a in self.atoms if predicate(a)))


def inner_distance(z1: DiscreteMeasure, z2: DiscreteMeasure, base: str = "w1") -> float:
    if base == "w1":
        if len(z1.axis_names) == 1 and z1.space.axes[0].kind == "discrete" and z1.space.same_as(z2.space):
            # every move costs 1, so the optimal plan moves exactly the excess mass
            return 0.5 * sum(abs(z1.weight(p) - z2.weight(p)) for p in set(z1.support) | set(z2.support))
        return wasserstein1(z1, z2, TRUNC)[0]
    if base == "prohorov":
        return prohorov(z1, z2, RAW)
    raise ValidationError(f"base metric must be one of {INNER_METRICS}, got {base!r}")


def psi(mu: DiscreteMeasure, base: str | None = None, inner_metric: str = "w1") -> LiftedMeasure:
    """Lift mu on A x B to the law of (a, mu(.|a)) under mu's A-marginal."""
    if len(mu.axis_names) < 2:
        raise ValidationError("psi needs a measure with at least two axes")
    base = base or mu.axis_names[0]
    marg, kern = disintegrate(mu, base)
    atoms = [LiftedAtom(p[0], kern.rows[p], w) for p, w in marg.items()]
    return LiftedMeasure(mu.space.axis(base), kern.target_space, atoms, functional=True,
                         inner_metric=inner_metric, check=False)


def chi2_flatten(nu: LiftedMeasure) -> DiscreteMeasure:
    """Average inner measures out: weight(x, y, rest) = sum of w * inner(y)."""
    space = ProductSpace([nu.base_space]).concat(nu.inner_space)
    if nu.extra is not None:
        space = space.concat(nu.extra)
    acc = defaultdict(float)
    for a in nu.atoms:
        for y, v in a.inner.items():
            acc[(a.base,) + y + a.rest] += a.weight * v
    return DiscreteMeasure(space, acc, check=False)


def psi_inv(nu: LiftedMeasure) -> DiscreteMeasure:
    if nu.extra is not None:
        raise ValidationError("psi_inv expects a lifted measure without trailing axes; use chi2_flatten")
    return chi2_flatten(nu)


def _shared_axes(mu: DiscreteMeasure, nu: DiscreteMeasure, shared) -> tuple[str, ...]:
    if shared is None:
        shared = tuple(n for n in mu.axis_names if n in nu.axis_names)
    shared = _norm_axes(shared)
    if not shared:
        raise ValidationError(f"no shared axes between {mu.axis_names} and {nu.axis_names}")
    for n in shared:
        mu.space.position(n)
        nu.space.position(n)
    return shared


def _require_consistent(mu, nu, shared, tol):
    ok, gap = is_consistent(mu, nu, shared, tol)
    if not ok:
        raise InconsistencyError(f"marginals on {'x'.join(shared)} differ", gap)


def chi1_glue(mu: DiscreteMeasure, nu: DiscreteMeasure, shared=None, tol: float | None = None) -> DiscreteMeasure:
    """Glue mu on X x Y and nu on Y x Z into X x Y x Z with weight mu(x|y) nu(y, z)."""
    tol = default_tol() if tol is None else tol
    shared = _shared_axes(mu, nu, shared)
    _require_consistent(mu, nu, shared, tol)
    xs = tuple(n for n in mu.axis_names if n not in shared)
    zs = tuple(n for n in nu.axis_names if n not in shared)
    if set(xs) & set(zs):
        raise ValidationError(f"non-shared axes overlap: {set(xs) & set(zs)}")
    yspace = mu.space.sub(shared).merge(nu.space.sub(shared))
    ypos = [nu.space.position(n) for n in shared]
    zpos = [nu.space.position(n) for n in zs]
    if xs:
        _, kx = disintegrate(mu, shared)
        xspace = kx.target_space
    else:
        kx, xspace = None, None
    acc = defaultdict(float)
    for p, w in nu.items():
        y = tuple(p[i] for i in ypos)
        z = tuple(p[i] for i in zpos)
        if kx is None:
            acc[y + z] += w
            continue
        if y not in kx.rows:
            continue  # zero mu-mass at y; only reachable within tolerance
        for x, v in kx.rows[y].items():
            acc[x + y + z] += v * w
    space = yspace if xspace is None else xspace.concat(yspace)
    if zs:
        space = space.concat(nu.space.sub(zs))
    return DiscreteMeasure(space, acc)


def phi1(lifted: LiftedMeasure, nu: DiscreteMeasure, tol: float | None = None) -> LiftedMeasure:
    """Glue a lifted measure on A x P(B) with nu on A x C into a measure on A x P(B) x C."""
    tol = default_tol() if tol is None else tol
    if lifted.extra is not None:
        raise ValidationError("phi1 expects a lifted measure without trailing axes")
    a_name = lifted.base_name
    nu.space.position(a_name)
    base_marg = lifted.base_marginal()
    ok, gap = is_consistent(base_marg, nu, a_name, tol)
    if not ok:
        raise InconsistencyError(f"marginals on {a_name} differ", gap)
    cs = tuple(n for n in nu.axis_names if n != a_name)
    if not cs:
        raise ValidationError("nu needs at least one axis besides the shared one")
    apos = nu.space.position(a_name)
    cpos = [nu.space.position(n) for n in cs]
    by_base = defaultdict(list)
    for atom in lifted.atoms:
        by_base[atom.base].append(atom)
    atoms = []
    for p, w in nu.items():
        a = p[apos]
        m = base_marg.weight((a,))
        for atom in by_base.get(a, ()):
            atoms.append(LiftedAtom(a, atom.inner, atom.weight / m * w, tuple(p[i] for i in cpos)))
    return LiftedMeasure(lifted.base_space.merge(nu.space.axis(a_name)), lifted.inner_space, atoms,
                         extra=nu.space.sub(cs), inner_metric=lifted.inner_metric)


def phi(mu: DiscreteMeasure, nu: DiscreteMeasure, given=None, tol: float | None = None) -> DiscreteMeasure:
    """Joint on A x B x C with weight mu(b|a) nu(a, c): b is independent of c given a."""
    tol = default_tol() if tol is None else tol
    given = _shared_axes(mu, nu, given)
    _require_consistent(mu, nu, given, tol)
    bs = tuple(n for n in mu.axis_names if n not in given)
    cs = tuple(n for n in nu.axis_names if n not in given)
    if not bs or not cs:
        raise ValidationError("phi needs extra axes on both sides of the shared axes")
    _, kb = disintegrate(mu, given)
    apos = [nu.space.position(n) for n in given]
    cpos = [nu.space.position(n) for n in cs]
    acc = defaultdict(float)
    for p, w in nu.items():
        a = tuple(p[i] for i in apos)
        c = tuple(p[i] for i in cpos)
        row = kb.rows.get(a)
        if row is None:
            continue
        for b, v in row.items():
            acc[a + b + c] += v * w
    aspace = mu.space.sub(given).merge(nu.space.sub(given))
    space = aspace.concat(kb.target_space).concat(nu.space.sub(cs))
    return DiscreteMeasure(space, acc)


def _table_value(table, key):
    if callable(table):
        return float(table(key))
    try:
        return float(table[key])
    except KeyError:
        raise ValidationError(f"function table has no entry for {key}") from None


def integrate_lifted(g, nu: LiftedMeasure) -> float:
    """Integrate g(x, y[, rest]) against nu via gbar(x, zeta) = sum_y g(x, y) zeta(y).

    ``g`` is a mapping from id tuples to reals or a callable on id tuples.
    """
    total = 0.0
    for a in nu.atoms:
        gbar = sum(_table_value(g, (a.base,) + y + a.rest) * v for y, v in a.inner.items())
        total += a.weight * gbar
    return float(total)


def lifted_expectation(h: Callable[[str, DiscreteMeasure], float], nu: LiftedMeasure) -> float:
    """Integrate a function of (base point, inner measure) against a lifted measure."""
    return float(sum(a.weight * float(h(a.base, a.inner)) for a in nu.atoms))


def expected_cost(c, mu: DiscreteMeasure, nu: DiscreteMeasure, given=None, tol: float | None = None) -> float:
    """Integral of c against phi(mu, nu), summed as nu(a, c') * sum_b mu(b|a) c(a, b, c')."""
    tol = default_tol() if tol is None else tol
    given = _shared_axes(mu, nu, given)
    _require_consistent(mu, nu, given, tol)
    cs = tuple(n for n in nu.axis_names if n not in given)
    _, kb = disintegrate(mu, given)
    apos = [nu.space.position(n) for n in given]
    cpos = [nu.space.position(n) for n in cs]
    total = 0.0
    for p, w in nu.items():
        a = tuple(p[i] for i in apos)
        cc = tuple(p[i] for i in cpos)
        row = kb.rows.get(a)
        if row is None:
            continue
        total += w * sum(v * _table_value(c, a + b + cc) for b, v in row.items())
    return float(total)


# --- information metric --------------------------------------------------------


def _inner_axis(inners: list[DiscreteMeasure], base: str, name: str) -> FiniteMetricSpace:
    k = len(inners)
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dist[i, j] = dist[j, i] = inner_distance(inners[i], inners[j], base)
    return FiniteMetricSpace(name, [f"z{i}" for i in range(k)], dist)


def lifted_as_discrete(nus: list[LiftedMeasure], base: str) -> list[DiscreteMeasure]:
    """View lifted measures as measures on A x Z, where Z is the finite set of their
    inner measures carrying the inner metric as an explicit distance matrix."""
    index, inners = {}, []
    for nu in nus:
        for z in nu.inners():
            if z.key() not in index:
                index[z.key()] = len(inners)
                inners.append(z)
    # canonical order keeps ids, and therefore results, independent of argument order
    order = sorted(range(len(inners)), key=lambda i: inners[i].key())
    inners = [inners[i] for i in order]
    index = {z.key(): i for i, z in enumerate(inners)}
    zname = f"P({'x'.join(nus[0].inner_space.names)})"
    zaxis = _inner_axis(inners, base, zname)
    out = []
    for nu in nus:
        if nu.extra is not None:
            raise ValidationError("information distance is defined for two-axis lifts only")
        space = ProductSpace([nu.base_space, zaxis])
        out.append(DiscreteMeasure(space, {(a.base, f"z{index[a.inner.key()]}"): a.weight for a in nu.atoms},
                                   check=False))
    return out


class _Inners:
    """Distinct inner measures of one lift, with each atom's index into them and their total weights."""

    def __init__(self, nu: LiftedMeasure):
        keys = {}
        self.measures, self.index = [], []
        for a in nu.atoms:
            k = a.inner.key()
            if k not in keys:
                keys[k] = len(self.measures)
                self.measures.append(a.inner)
            self.index.append(keys[k])
        self.index = np.array(self.index, dtype=int)
        self.weights = np.bincount(self.index, weights=[a.weight for a in nu.atoms], minlength=len(self.measures))


def _cross_inner(u1: _Inners, u2: _Inners, base: str) -> np.ndarray:
    """Inner distances between the distinct inners of two lifts; only cross pairs are ever needed."""
    out = np.zeros((len(u1.measures), len(u2.measures)))
    for i, x in enumerate(u1.measures):
        for j, y in enumerate(u2.measures):
            if x.key() != y.key():
                out[i, j] = inner_distance(x, y, base)
    return out


def _w1_shortcut(l1: LiftedMeasure, l2: LiftedMeasure, u1: _Inners, u2: _Inners, inner: np.ndarray
                 ) -> float | None:
    """Exact value when cheap bounds meet, else None.

    If both lifts share the same A-marginal, pairing atoms with equal base
    point is a feasible plan (upper bound). Projecting onto the inner-measure
    coordinate is 1-Lipschitz, so W1 between the laws of the inner measures
    is a lower bound.
    """
    b1 = {a.base: i for i, a in enumerate(l1.atoms)}
    b2 = {a.base: j for j, a in enumerate(l2.atoms)}
    if len(b1) != len(l1.atoms) or len(b2) != len(l2.atoms) or set(b1) != set(b2):
        return None
    if any(l1.atoms[i].weight != l2.atoms[b2[a]].weight for a, i in b1.items()):
        return None
    upper = sum(l1.atoms[i].weight * inner[u1.index[i], u2.index[b2[a]]] for a, i in sorted(b1.items()))
    where = {z.key(): j for j, z in enumerate(u2.measures)}
    same = [(i, where[z.key()]) for i, z in enumerate(u1.measures) if z.key() in where]
    lower = metric_transport(u1.weights, u2.weights, inner, same)[0]
    if upper - lower <= SHORTCUT_SLACK:
        return float(upper)
    return None


def info_distance(mu1: DiscreteMeasure, mu2: DiscreteMeasure, base: str = "w1", *, shortcut: bool = True) -> float:
    """Distance between psi(mu1) and psi(mu2).

    Ground cost between lifted atoms (a, z) and (a', z') is
    ``min(d_A(a, a'), 1) + base(z, z')``; the outer distance uses the same
    family (W1 or Prohorov) as ``base``.
    """
    if base not in INNER_METRICS:
        raise ValidationError(f"base metric must be one of {INNER_METRICS}, got {base!r}")
    if mu1.axis_names != mu2.axis_names:
        raise ValidationError(f"axis structures differ: {mu1.axis_names} vs {mu2.axis_names}")
    if len(mu1.axis_names) != 2:
        raise ValidationError("information distance needs measures on exactly two axes")
    space = mu1.space.merge(mu2.space)  # raises on incompatible coordinates or metrics
    l1, l2 = psi(mu1.on(space)), psi(mu2.on(space))
    u1, u2 = _Inners(l1), _Inners(l2)
    inner = _cross_inner(u1, u2, base)
    if base == "w1" and shortcut:
        fast = _w1_shortcut(l1, l2, u1, u2, inner)
        if fast is not None:
            return fast
    outer = np.minimum(space.axes[0].distance_matrix([a.base for a in l1.atoms], [a.base for a in l2.atoms]), 1.0)
    cost = outer + inner[np.ix_(u1.index, u2.index)]
    w1_ = np.array([a.weight for a in l1.atoms])
    w2_ = np.array([a.weight for a in l2.atoms])
    if base == "w1":
        where = {(a.base, a.inner.key()): j for j, a in enumerate(l2.atoms)}
        same = [(i, where[k]) for i, a in enumerate(l1.atoms) if (k := (a.base, a.inner.key())) in where]
        return metric_transport(w1_, w2_, cost, same)[0]
    return prohorov_from_costs(w1_, w2_, cost)
