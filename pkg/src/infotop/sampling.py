"""Random spaces, measures, consistent pairs and decision problems for experiments and tests.

All builders take a ``numpy.random.Generator``; coordinates are small
integers or halves so that distance ties are common and exact.
"""
from __future__ import annotations

import numpy as np

from .decision import DecisionProblem
from .lift import LiftedAtom, LiftedMeasure
from .measure import DiscreteMeasure, FiniteMetricSpace, ProductSpace, disintegrate


def random_axis(rng: np.random.Generator, name: str, n: int, kind: str | None = None) -> FiniteMetricSpace:
    kind = kind or rng.choice(["euclidean", "discrete"])
    ids = [f"{name.lower()}{i}" for i in range(n)]
    if kind == "discrete":
        return FiniteMetricSpace(name, ids, "discrete")
    coords = rng.choice(np.arange(-8, 9) / 2.0, size=n, replace=False)
    return FiniteMetricSpace(name, [(i, (float(c),)) for i, c in zip(ids, coords)], "euclidean")


def random_weights(rng: np.random.Generator, k: int) -> np.ndarray:
    w = rng.dirichlet(np.ones(k))
    return w / w.sum()


def random_measure(rng: np.random.Generator, space: ProductSpace, support: int | None = None) -> DiscreteMeasure:
    pts = list(space.points())
    k = support or int(rng.integers(1, min(len(pts), 6) + 1))
    chosen = rng.choice(len(pts), size=min(k, len(pts)), replace=False)
    w = random_weights(rng, len(chosen))
    return DiscreteMeasure(space, {pts[i]: float(v) for i, v in zip(sorted(chosen), w)})


def random_space(rng: np.random.Generator, names=("A", "B"), max_size: int = 4, kinds=None) -> ProductSpace:
    kinds = kinds or [None] * len(names)
    return ProductSpace([random_axis(rng, n, int(rng.integers(1, max_size + 1)), k) for n, k in zip(names, kinds)])


def random_pair(rng: np.random.Generator, names=("A", "B"), max_size: int = 4, kinds=None):
    """Two random measures on one space."""
    space = random_space(rng, names, max_size, kinds)
    return random_measure(rng, space), random_measure(rng, space)


def random_consistent_pair(rng: np.random.Generator, max_size: int = 5):
    """mu on A x B and nu on A x C sharing the same A-marginal exactly."""
    A = random_axis(rng, "A", int(rng.integers(1, max_size + 1)))
    B = random_axis(rng, "B", int(rng.integers(1, max_size + 1)))
    C = random_axis(rng, "C", int(rng.integers(1, max_size + 1)))
    mu = random_measure(rng, ProductSpace([A, B]), int(rng.integers(1, len(A) * len(B) + 1)))
    marg, _ = disintegrate(mu, "A")
    atoms = {}
    for (a,), w in marg.items():
        k = int(rng.integers(1, len(C) + 1))
        cs = rng.choice(C.ids, size=k, replace=False)
        for c, v in zip(sorted(cs), random_weights(rng, k)):
            atoms[(a, str(c))] = w * float(v)
    nu = DiscreteMeasure(ProductSpace([A, C]), atoms)
    return mu, nu


def random_lifted(rng: np.random.Generator, max_size: int = 4, atoms: int | None = None,
                  extra: bool = False) -> LiftedMeasure:
    """A (generally non-functional) lifted measure on A x P(B) [x C]."""
    A = random_axis(rng, "A", int(rng.integers(1, max_size + 1)))
    B = ProductSpace([random_axis(rng, "B", int(rng.integers(1, max_size + 1)))])
    C = ProductSpace([random_axis(rng, "C", int(rng.integers(1, max_size + 1)))]) if extra else None
    k = atoms or int(rng.integers(1, 6))
    ws = random_weights(rng, k)
    out = []
    for w in ws:
        rest = (str(rng.choice(C.axes[0].ids)),) if extra else ()
        out.append(LiftedAtom(str(rng.choice(A.ids)), random_measure(rng, B), float(w), rest))
    return LiftedMeasure(A, B, out, extra=C)


def mixture(mu: DiscreteMeasure, eta: DiscreteMeasure, t: float) -> DiscreteMeasure:
    """(1 - t) mu + t eta on the merged space."""
    space = mu.space.merge(eta.space)
    atoms = {p: (1 - t) * w for p, w in mu.items()}
    for p, w in eta.items():
        atoms[p] = atoms.get(p, 0.0) + t * w
    return DiscreteMeasure(space, atoms)


def random_problem(rng: np.random.Generator, max_size: int = 4, integer_costs: bool = False) -> DecisionProblem:
    A = random_axis(rng, "A", int(rng.integers(1, max_size + 1)), "discrete")
    B = random_axis(rng, "B", int(rng.integers(1, max_size + 1)), "discrete")
    C = random_axis(rng, "C", int(rng.integers(1, max_size + 1)), "discrete")
    prior = random_measure(rng, ProductSpace([A, B]), int(rng.integers(1, len(A) * len(B) + 1)))
    cost = {}
    for a in A.ids:
        for b in B.ids:
            for c in C.ids:
                cost[(a, b, c)] = float(rng.integers(0, 4)) if integer_costs else float(rng.uniform(0, 3))
    return DecisionProblem(prior, C, cost)


def mixture_sequence(mu: DiscreteMeasure, eta: DiscreteMeasure, indices, power: float = 2.0):
    """mu_n = (1 - n^-power) mu + n^-power eta, converging to mu in total variation."""
    from .convergence import MeasureSequence
    return MeasureSequence(tuple(indices), lambda n: mixture(mu, eta, float(n) ** -power), mu)


def positive_measure(rng: np.random.Generator, space: ProductSpace) -> DiscreteMeasure:
    """Random weights on every point of the space."""
    pts = list(space.points())
    return DiscreteMeasure(space, {p: float(w) for p, w in zip(pts, random_weights(rng, len(pts)))})


def shifted(nu: DiscreteMeasure, axis: str, shifts: dict, scale: float) -> DiscreteMeasure:
    """Move every point of a one-dimensional euclidean axis by ``scale * shifts[id]``; ids become coordinates."""
    pos = nu.space.position(axis)
    ax = nu.space.axes[pos]
    moved = {pid: ax.coords_of(pid)[0] + scale * shifts[pid] for pid in ax.ids}
    new_ax = FiniteMetricSpace(axis, [(repr(x), (x,)) for x in sorted(moved.values())], "euclidean")
    axes = list(nu.space.axes)
    axes[pos] = new_ax
    atoms = {p[:pos] + (repr(moved[p[pos]]),) + p[pos + 1:]: w for p, w in nu.items()}
    return DiscreteMeasure(ProductSpace(axes), atoms)


def spread_axis(rng: np.random.Generator, name: str, n: int, spacing: float = 2.0) -> FiniteMetricSpace:
    """Euclidean line points at least ``spacing`` apart, ids equal to their coordinate repr."""
    xs = np.cumsum(rng.uniform(spacing, spacing + 2.0, size=n))
    return FiniteMetricSpace(name, [(repr(float(x)), (float(x),)) for x in xs], "euclidean")
