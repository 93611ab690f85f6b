from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import all_subset_gap, lp_transport, lp_w1, prohorov_sets, prohorov_strassen
from infotop.errors import ValidationError
from infotop.measure import DiscreteMeasure, FiniteMetricSpace, ProductSpace
from infotop.metrics import (
    RAW,
    TRUNC,
    AtomSet,
    GroundMetric,
    ProductFamily,
    Rect,
    UnionSet,
    default_family,
    dyadic_blocks,
    parse_set,
    prohorov,
    setwise_gap,
    tv_distance,
    wasserstein1,
)
from infotop.sampling import random_measure, random_pair, random_space
from infotop.transport import metric_transport, min_cost_transport

seeds = st.integers(0, 2 ** 32 - 1)


def line(name, xs):
    return FiniteMetricSpace(name, [(f"{x}", (float(x),)) for x in xs], "euclidean")


class TestTransport:
    @given(seeds)
    def test_matches_lp(self, seed):
        rng = np.random.default_rng(seed)
        n, m = rng.integers(1, 7, size=2)
        a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(m))
        cost = rng.integers(0, 4, size=(n, m)).astype(float)
        value, flow = min_cost_transport(a, b, cost)
        assert value == pytest.approx(lp_transport(a, b, cost), abs=1e-9)
        assert np.allclose(flow.sum(axis=1), a, atol=1e-12)
        assert np.allclose(flow.sum(axis=0), b, atol=1e-12)
        assert flow.min() >= 0

    @given(seeds)
    def test_shared_mass_matches_lp(self, seed):
        # points on a line with overlapping index sets: a metric cost with zero-cost identical pairs
        rng = np.random.default_rng(seed)
        xs = rng.choice(np.arange(-6, 7) / 2.0, size=8, replace=False)
        src = sorted(rng.choice(8, size=int(rng.integers(1, 7)), replace=False))
        dst = sorted(rng.choice(8, size=int(rng.integers(1, 7)), replace=False))
        a, b = rng.dirichlet(np.ones(len(src))), rng.dirichlet(np.ones(len(dst)))
        cost = np.minimum(np.abs(xs[src][:, None] - xs[dst][None, :]), 1.0)
        same = [(i, dst.index(p)) for i, p in enumerate(src) if p in dst]
        value, flow = metric_transport(a, b, cost, same)
        assert value == pytest.approx(lp_transport(a, b, cost), abs=1e-9)
        assert np.allclose(flow.sum(axis=1), a, atol=1e-12)
        assert np.allclose(flow.sum(axis=0), b, atol=1e-12)
        assert flow.min() >= 0

    def test_deterministic(self):
        a = np.full(3, 1 / 3)
        cost = np.zeros((3, 3))
        f1 = min_cost_transport(a, a, cost)[1]
        f2 = min_cost_transport(a, a, cost)[1]
        assert np.array_equal(f1, f2)


class TestWasserstein:
    def test_point_masses(self):
        sp = ProductSpace([line("X", [0, 3])])
        mu, nu = DiscreteMeasure.dirac(sp, "0"), DiscreteMeasure.dirac(sp, "3")
        assert wasserstein1(mu, nu, RAW)[0] == 3.0
        assert wasserstein1(mu, nu, TRUNC)[0] == 1.0

    def test_union_support(self):
        mu = DiscreteMeasure(line("X", [0]), {"0": 1.0})
        nu = DiscreteMeasure(line("X", [0.25]), {"0.25": 1.0})
        assert wasserstein1(mu, nu)[0] == 0.25

    def test_axis_mismatch(self):
        mu = DiscreteMeasure(line("X", [0]), {"0": 1.0})
        nu = DiscreteMeasure(line("Y", [0]), {"0": 1.0})
        with pytest.raises(ValidationError):
            wasserstein1(mu, nu)

    def test_plan_is_coupling(self, rng):
        for _ in range(30):
            mu, nu = random_pair(rng, ("A", "B"), 4)
            value, plan = wasserstein1(mu, nu)
            plan.check(1e-12)
            assert value == pytest.approx(sum(m * TRUNC.matrix(mu.space.merge(nu.space), [s], [t])[0, 0]
                                              for s, t, m in plan.pairs()), abs=1e-12)

    def test_override_ground(self):
        sp = ProductSpace([line("X", [0, 1])])
        mu, nu = DiscreteMeasure.dirac(sp, "0"), DiscreteMeasure.dirac(sp, "1")
        g = GroundMetric(override=lambda p, q: 0.0 if p == q else 7.0)
        assert wasserstein1(mu, nu, g)[0] == 7.0

    @given(seeds)
    def test_lp_oracle(self, seed):
        mu, nu = random_pair(np.random.default_rng(seed), ("A", "B"), 5)
        assert wasserstein1(mu, nu)[0] == pytest.approx(lp_w1(mu, nu), abs=1e-9)
        assert wasserstein1(mu, nu, RAW)[0] == pytest.approx(lp_w1(mu, nu, trunc=False), abs=1e-9)

    @given(seeds)
    def test_dominated_by_tv_on_two_axes(self, seed):
        # each axis contributes at most 1, and half the tv mass has to move
        mu, nu = random_pair(np.random.default_rng(seed), ("A", "B"), 4)
        assert wasserstein1(mu, nu)[0] <= tv_distance(mu, nu) + 1e-12


class TestProhorov:
    def test_point_masses(self):
        sp = ProductSpace([line("X", [0, 0.3, 5])])
        assert prohorov(DiscreteMeasure.dirac(sp, "0"), DiscreteMeasure.dirac(sp, "0.3")) == pytest.approx(0.3)
        assert prohorov(DiscreteMeasure.dirac(sp, "0"), DiscreteMeasure.dirac(sp, "5")) == 1.0

    def test_split_mass(self):
        sp = ProductSpace([line("X", [0, 5])])
        mu = DiscreteMeasure(sp, {"0": 0.8, "5": 0.2})
        nu = DiscreteMeasure.dirac(sp, "0")
        assert prohorov(mu, nu) == pytest.approx(0.2)

    @given(seeds)
    def test_strassen_oracle(self, seed):
        mu, nu = random_pair(np.random.default_rng(seed), ("A", "B"), 4)
        assert prohorov(mu, nu) == pytest.approx(prohorov_strassen(mu, nu), abs=1e-6)

    def test_set_definition_oracle(self, rng):
        for _ in range(40):
            mu, nu = random_pair(rng, ("A",), 4)
            assert prohorov(mu, nu) == pytest.approx(prohorov_sets(mu, nu), abs=1e-6)


class TestMetricAxioms:
    @pytest.mark.parametrize("dist", [lambda m, n: wasserstein1(m, n)[0], prohorov, tv_distance])
    def test_axioms(self, rng, dist):
        for _ in range(40):
            sp = random_space(rng, ("A", "B"), 3)
            x, y, z = (random_measure(rng, sp) for _ in range(3))
            dxy, dyz, dxz = dist(x, y), dist(y, z), dist(x, z)
            assert dist(x, x) == 0.0
            assert dxy == pytest.approx(dist(y, x), abs=1e-12)
            assert dxz <= dxy + dyz + 1e-9
            if not x.close_to(y, 0.0):
                assert dxy > 0


class TestSetwise:
    def test_set_kinds(self):
        sp = ProductSpace([FiniteMetricSpace("A", ["x", "y"]), FiniteMetricSpace("B", ["u", "v"])])
        mu = DiscreteMeasure(sp, {("x", "u"): 0.5, ("y", "v"): 0.5})
        nu = DiscreteMeasure(sp, {("x", "v"): 0.5, ("y", "u"): 0.5})
        assert setwise_gap(mu, nu, [Rect({"A": frozenset({"x"})})]) == 0.0
        assert setwise_gap(mu, nu, [{"rect": {"A": ["x"], "B": ["u"]}}]) == 0.5
        assert setwise_gap(mu, nu, [AtomSet(frozenset({("x", "u"), ("y", "v")}))]) == 1.0
        u = UnionSet((Rect({"A": frozenset({"x"}), "B": frozenset({"u"})}), AtomSet(frozenset({("y", "v")}))))
        assert setwise_gap(mu, nu, [u]) == 1.0
        with pytest.raises(ValidationError):
            parse_set({"ball": 1})

    def test_all_subsets_equals_half_tv(self, rng):
        for _ in range(30):
            sp = random_space(rng, ("A", "B"), 3)
            mu, nu = random_measure(rng, sp), random_measure(rng, sp)
            pts = list(sp.points())
            fam = [AtomSet(frozenset(c)) for k in range(1, len(pts) + 1) for c in combinations(pts, k)]
            assert setwise_gap(mu, nu, fam) == pytest.approx(all_subset_gap(mu, nu), abs=1e-12)
            assert setwise_gap(mu, nu, fam) == pytest.approx(tv_distance(mu, nu) / 2, abs=1e-12)

    def test_product_family_matches_list(self, rng):
        for _ in range(20):
            sp = random_space(rng, ("A", "B"), 3)
            mu, nu = random_measure(rng, sp), random_measure(rng, sp)
            fam = default_family(sp)
            rects = [Rect({"A": s, "B": t}) for s in fam.per_axis["A"] for t in fam.per_axis["B"]]
            assert setwise_gap(mu, nu, fam) == pytest.approx(setwise_gap(mu, nu, rects), abs=1e-12)

    def test_tv_dominates(self, rng):
        for _ in range(30):
            mu, nu = random_pair(rng, ("A", "B"), 4)
            assert setwise_gap(mu, nu) <= tv_distance(mu, nu) + 1e-12

    def test_dyadic_blocks(self):
        ax = line("X", [3, 1, 0, 2])
        assert dyadic_blocks(ax, 1) == [frozenset({"0", "1", "2", "3"}), frozenset({"0", "1"}), frozenset({"2", "3"})]

    def test_default_family_cap(self):
        X = line("X", range(4096))
        Y = FiniteMetricSpace("Y", ["1", "2"])
        fam = default_family(ProductSpace([X, Y]))
        assert len(fam) <= 4096
        assert len(fam.per_axis["Y"]) == 3
        assert len(fam.per_axis["X"]) == 2 ** 10 - 1

    def test_small_space_uses_all_subsets(self):
        sp = ProductSpace([FiniteMetricSpace("A", ["x", "y", "z"])])
        assert len(default_family(sp)) == 7
