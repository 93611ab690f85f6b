"""Small worked examples as generators, with golden values that can be replayed.

Real-valued axes are finite point sets with euclidean distance; a point's id
is the shortest repr of its coordinate, so members of a sequence that share a
location share an id.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .convergence import MeasureSequence
from .errors import ValidationError
from .lift import (
    LiftedMeasure,
    chi2_flatten,
    expected_cost,
    info_distance,
    inner_distance,
    lifted_expectation,
    phi,
    phi1,
    psi,
)
from .measure import DiscreteMeasure, FiniteMetricSpace, Kernel, ProductSpace, compose, cond_indep_gap, marginal
from .metrics import ProductFamily, default_family, dyadic_blocks, setwise_gap, tv_distance, wasserstein1

FIXTURES = ("sgn", "discrete-pair", "rademacher", "hellwig", "jordan")


def rid(x: float) -> str:
    return repr(float(x))


def real_axis(name: str, xs) -> FiniteMetricSpace:
    xs = sorted({float(x) for x in xs})
    return FiniteMetricSpace(name, [(rid(x), (x,)) for x in xs], "euclidean")


# --- sign example ----------------------------------------------------------------


def _sgn_measure(scale: float) -> DiscreteMeasure:
    h = {b: b * scale for b in (-1, 1)}
    A = real_axis("A", [h[b] + s for b in h for s in (1, -1)])
    B = FiniteMetricSpace("B", ["-1", "1"])
    C = real_axis("C", h.values())
    mb = DiscreteMeasure(B, {"-1": 0.5, "1": 0.5})
    # a and c are conditionally independent given b, so the kernel is a product
    rows = {}
    for b, hb in h.items():
        rows[(str(b),)] = DiscreteMeasure(ProductSpace([A, C]), {(rid(hb + 1), rid(hb)): 0.5,
                                                                 (rid(hb - 1), rid(hb)): 0.5})
    joint = compose(mb, Kernel(mb.space, ProductSpace([A, C]), rows))
    return DiscreteMeasure(ProductSpace([A, B, C]), {(p[1], p[0], p[2]): w for p, w in joint.items()})


def fixture_sgn(n: int) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """mu_n and mu_0 on A x B x C: b = +-1 uniform, c = h_n(b), a = h_n(b) +- 1 with h_n(b) = b(1 + 1/n)."""
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return _sgn_measure(1.0 + 1.0 / n), _sgn_measure(1.0)


# --- discrete pair --------------------------------------------------------------


def fixture_discrete_pair(n: int):
    """(mu_n, nu_n, mu, nu): two-point laws on A x B and A x C whose moving atom sits at a = 1/n."""
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    A = real_axis("A", [0.0, 1.0 / n])
    B = FiniteMetricSpace("B", ["b_lo", "b_hi"])
    C = FiniteMetricSpace("C", ["c_lo", "c_hi"])
    a_n, a0 = rid(1.0 / n), rid(0.0)
    AB, AC = ProductSpace([A, B]), ProductSpace([A, C])
    mu_n = DiscreteMeasure(AB, {(a_n, "b_lo"): 0.5, (a0, "b_hi"): 0.5})
    nu_n = DiscreteMeasure(AC, {(a_n, "c_lo"): 0.5, (a0, "c_hi"): 0.5})
    mu = DiscreteMeasure(AB, {(a0, "b_lo"): 0.5, (a0, "b_hi"): 0.5})
    nu = DiscreteMeasure(AC, {(a0, "c_lo"): 0.5, (a0, "c_hi"): 0.5})
    return mu_n, nu_n, mu, nu


def pair_cost(a: str, b: str, c: str) -> float:
    """Rewards matching labels: 1 on (lo, lo) and (hi, hi), 0 otherwise; constant in a."""
    return 1.0 if b.split("_")[1] == c.split("_")[1] else 0.0


def pair_cost_table(mu: DiscreteMeasure, nu: DiscreteMeasure) -> dict:
    A = mu.space.axes[0].merge(nu.space.axes[0])
    return {(a, b, c): pair_cost(a, b, c) for a in A.ids for b in mu.space.axes[1].ids for c in nu.space.axes[1].ids}


# --- Rademacher -------------------------------------------------------------------


def rademacher_bit(k: int, n: int, K: int) -> int:
    """F_n at the grid point k 2^-K: 1 on even dyadic intervals of length 2^-n."""
    return 1 if ((k >> (K - n)) % 2 == 0) else 0


def _grid(K: int) -> FiniteMetricSpace:
    return FiniteMetricSpace("X", [(rid(k / 2 ** K), (k / 2 ** K,)) for k in range(2 ** K)], "euclidean")


def fixture_rademacher(n: int, K: int = 12) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """(mu_n, mu) on a dyadic grid of [0, 1) times {1, 2}; y = 2 exactly where F_n = 1."""
    if not (1 <= K <= 20):
        raise ValidationError(f"grid depth K must be in 1..20, got {K}")
    if not (1 <= n <= K):
        raise ValidationError(f"n={n} needs 1 <= n <= K={K} for an exact representation")
    X = _grid(K)
    Y = FiniteMetricSpace("Y", ["1", "2"])
    space = ProductSpace([X, Y])
    w = 2.0 ** -K
    mu_n = DiscreteMeasure(space, {(x, "2" if rademacher_bit(k, n, K) else "1"): w for k, x in enumerate(X.ids)})
    mu = DiscreteMeasure(space, {(x, y): w / 2 for x in X.ids for y in ("1", "2")})
    return mu_n, mu


def coarse_dyadic_family(space: ProductSpace, n: int) -> ProductFamily:
    """Dyadic blocks of the X axis at levels below n, times all nonempty Y subsets."""
    X, Y = space.axes
    return ProductFamily({X.name: dyadic_blocks(X, n - 1),
                          Y.name: [frozenset(Y.ids[:1]), frozenset(Y.ids[1:]), frozenset(Y.ids)]},
                         note=f"dyadic levels 0..{n - 1} x all subsets")


# --- lifted gluing counterexample -------------------------------------------------


@dataclass
class GluingRecord:
    nu: DiscreteMeasure
    mu: DiscreteMeasure
    lifted: LiftedMeasure
    glued: LiftedMeasure
    lhs: float
    rhs: float


def fixture_hellwig() -> GluingRecord:
    """nu on A x B and mu on A x C, each a deterministic function of a uniform a.

    lhs is the product-formula value psi(nu)(A x {delta_b1}) mu(A x {c2}) / nu^A(A);
    rhs is the glued lifted measure's mass on A x {delta_b1} x {c2}.
    """
    A = FiniteMetricSpace("A", ["a1", "a2"])
    B = FiniteMetricSpace("B", ["b1", "b2"])
    C = FiniteMetricSpace("C", ["c1", "c2"])
    nu = DiscreteMeasure(ProductSpace([A, B]), {("a1", "b1"): 0.5, ("a2", "b2"): 0.5})
    mu = DiscreteMeasure(ProductSpace([A, C]), {("a1", "c1"): 0.5, ("a2", "c2"): 0.5})
    lifted = psi(nu)
    glued = phi1(lifted, mu)
    delta_b1 = DiscreteMeasure.dirac(ProductSpace([B]), "b1").key()
    mass_b = lifted.mass(lambda at: at.inner.key() == delta_b1)
    mass_c = sum(w for p, w in mu.items() if p[1] == "c2")
    lhs = mass_b * mass_c / sum(w for _, w in marginal(nu, "A").items())
    rhs = glued.mass(lambda at: at.inner.key() == delta_b1 and at.rest == ("c2",))
    return GluingRecord(nu, mu, lifted, glued, float(lhs), float(rhs))


# --- moving-atom conditional counterexample ---------------------------------------


def _jordan_axes(cap: int):
    X = real_axis("X", [2.0] + [2.0 + 1.0 / k for k in range(1, cap + 1)])
    Y = FiniteMetricSpace("Y", ["1", "3"])
    return X, Y


def fixture_jordan(n: int, cap: int = 128) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """(nu_n, nu) on {2} u {2 + 1/k : k <= cap} x {1, 3}."""
    if int(n) != n or n < 1 or n > cap:
        raise ValidationError(f"need 1 <= n <= cap, got n={n}, cap={cap}")
    X, Y = _jordan_axes(cap)
    space = ProductSpace([X, Y])
    nu_n = DiscreteMeasure(space, {(rid(2.0), "1"): 0.5, (rid(2.0 + 1.0 / n), "3"): 0.5})
    nu = DiscreteMeasure(space, {(rid(2.0), "1"): 0.5, (rid(2.0), "3"): 0.5})
    return nu_n, nu


def jordan_h(base: str, inner: DiscreteMeasure) -> float:
    """Bounded continuous test function of the inner measure: 1 at the even mixture of
    the two points, 0 at either point mass, decaying linearly with W1 in between."""
    mid = DiscreteMeasure(inner.space, {("1",): 0.5, ("3",): 0.5})
    return max(0.0, 1.0 - 2.0 * inner_distance(inner, mid, "w1"))


# --- sequences ---------------------------------------------------------------------


def fixture_sequence(name: str, indices=None, *, K: int = 12, cap: int = 128) -> tuple[MeasureSequence, tuple | None]:
    """Sequence view of a fixture plus the axes the information metric should use."""
    if name == "sgn":
        idx = tuple(indices or range(1, 101))
        return MeasureSequence(idx, lambda n: fixture_sgn(n)[0], fixture_sgn(1)[1], "sgn"), ("A", "B")
    if name == "discrete-pair":
        idx = tuple(indices or range(1, 101))
        return MeasureSequence(idx, lambda n: fixture_discrete_pair(n)[0], fixture_discrete_pair(1)[2],
                               "discrete-pair"), None
    if name == "rademacher":
        idx = tuple(indices or range(1, K + 1))
        return MeasureSequence(idx, lambda n: fixture_rademacher(n, K)[0], fixture_rademacher(1, K)[1],
                               "rademacher"), None
    if name == "jordan":
        idx = tuple(indices or range(1, min(cap, 100) + 1))
        return MeasureSequence(idx, lambda n: fixture_jordan(n, cap)[0], fixture_jordan(1, cap)[1], "jordan"), None
    raise ValidationError(f"no sequence view for fixture {name!r}; choose from sgn, discrete-pair, rademacher, jordan")


# --- golden records -----------------------------------------------------------------


@dataclass(frozen=True)
class Golden:
    """One named quantity with its expected value.

    ``origin`` says where the expected value comes from: "reported" (stated
    in the source example), "derived" (worked out by hand or an independent
    oracle) or "trivial" (follows from the construction).
    """

    quantity: str
    expected: float
    tol: float
    origin: str
    compute: Callable[[], float] = field(compare=False, repr=False)


@dataclass
class FixtureRecord:
    name: str
    params: dict
    golden: list[Golden]

    def verify(self) -> list[dict]:
        rows = []
        for g in self.golden:
            got = float(g.compute())
            rows.append({"quantity": g.quantity, "expected": g.expected, "value": got, "tol": g.tol,
                         "origin": g.origin, "ok": bool(abs(got - g.expected) <= g.tol)})
        return rows


def _sgn_golden(ns) -> list[Golden]:
    out = [Golden("cond_indep_gap(mu_0)", 1.0, 1e-12, "derived",
                  lambda: cond_indep_gap(fixture_sgn(1)[1], "A", "B", "C"))]
    for n in ns:
        out.append(Golden(f"cond_indep_gap(mu_{n})", 0.0, 0.0, "reported",
                          lambda n=n: cond_indep_gap(fixture_sgn(n)[0], "A", "B", "C")))
        out.append(Golden(f"w1(mu_{n}, mu_0)", 2.0 / n, 1e-9, "derived",
                          lambda n=n: wasserstein1(*fixture_sgn(n))[0]))
        if n >= 3:
            out.append(Golden(f"info(mu_{n}^AB, mu_0^AB)", 0.25 + 1.0 / n, 1e-9, "derived",
                              lambda n=n: info_distance(*(marginal(m, ("A", "B")) for m in fixture_sgn(n)))))
    return out


def _pair_golden(ns) -> list[Golden]:
    def cost(n, limit):
        mu_n, nu_n, mu, nu = fixture_discrete_pair(n)
        m, v = (mu, nu) if limit else (mu_n, nu_n)
        return expected_cost(pair_cost_table(m, v), m, v)

    out = [Golden("expected_cost(f, mu, nu)", 0.5, 1e-12, "derived", lambda: cost(1, True))]
    for n in ns:
        out.append(Golden(f"expected_cost(f, mu_{n}, nu_{n})", 1.0, 1e-12, "derived", lambda n=n: cost(n, False)))
        out.append(Golden(f"cond_indep_gap(phi(mu_{n}, nu_{n}))", 0.0, 1e-9, "trivial",
                          lambda n=n: cond_indep_gap(phi(*fixture_discrete_pair(n)[:2]), "A", "B", "C")))
    return out


def _rademacher_golden(K, ns) -> list[Golden]:
    out = []
    for n in ns:
        def coarse(n=n):
            mu_n, mu = fixture_rademacher(n, K)
            return setwise_gap(mu_n, mu, coarse_dyadic_family(mu.space, n))

        def full_excess(n=n):
            mu_n, mu = fixture_rademacher(n, K)
            return max(0.0, setwise_gap(mu_n, mu, default_family(mu.space)) - 2.0 ** (-n + 1))

        out.append(Golden(f"setwise_coarse(mu_{n}, mu)", 0.0, 0.0, "derived", coarse))
        out.append(Golden(f"setwise_default_excess(mu_{n}, mu)", 0.0, 0.0, "derived", full_excess))
        out.append(Golden(f"info(mu_{n}, mu)", 0.5, 1e-9, "derived",
                          lambda n=n: info_distance(*fixture_rademacher(n, K))))
        out.append(Golden(f"tv(mu_{n}, mu)", 1.0, 1e-12, "derived",
                          lambda n=n: tv_distance(*fixture_rademacher(n, K))))
    return out


def _hellwig_golden() -> list[Golden]:
    return [
        Golden("lhs", 0.25, 0.0, "reported", lambda: fixture_hellwig().lhs),
        Golden("rhs", 0.0, 0.0, "reported", lambda: fixture_hellwig().rhs),
        Golden("flatten(glued) mass at (a1,b1,c1)", 0.5, 0.0, "derived",
               lambda: chi2_flatten(fixture_hellwig().glued).weight(("a1", "b1", "c1"))),
    ]


def _jordan_golden(cap, ns) -> list[Golden]:
    out = [Golden("h-integral(psi(nu))", 1.0, 0.0, "reported",
                  lambda: lifted_expectation(jordan_h, psi(fixture_jordan(1, cap)[1])))]
    for n in ns:
        out.append(Golden(f"h-integral(psi(nu_{n}))", 0.0, 0.0, "reported",
                          lambda n=n: lifted_expectation(jordan_h, psi(fixture_jordan(n, cap)[0]))))
        out.append(Golden(f"w1(nu_{n}, nu)", 0.5 / n, 1e-9, "derived",
                          lambda n=n: wasserstein1(*fixture_jordan(n, cap))[0]))
        out.append(Golden(f"info(nu_{n}, nu)", 0.5 + 0.5 / n, 1e-9, "derived",
                          lambda n=n: info_distance(*fixture_jordan(n, cap))))
    return out


def golden_record(name: str, *, K: int = 12, cap: int = 128) -> FixtureRecord:
    if name == "sgn":
        return FixtureRecord(name, {}, _sgn_golden((1, 2, 3, 10, 100)))
    if name == "discrete-pair":
        return FixtureRecord(name, {}, _pair_golden((1, 2, 10, 100)))
    if name == "rademacher":
        return FixtureRecord(name, {"K": K}, _rademacher_golden(K, range(2, min(K, 10) + 1)))
    if name == "hellwig":
        return FixtureRecord(name, {}, _hellwig_golden())
    if name == "jordan":
        return FixtureRecord(name, {"cap": cap}, _jordan_golden(cap, (1, 2, 10, min(cap, 100))))
    raise ValidationError(f"unknown fixture {name!r}; choose from {FIXTURES}")
