import numpy as np
import pytest
from hypothesis import given, strategies as st

from infotop.errors import InconsistencyError, ValidationError
from infotop.measure import (
    DiscreteMeasure,
    FiniteMetricSpace,
    Kernel,
    ProductSpace,
    compose,
    cond_indep_gap,
    default_tol,
    disintegrate,
    is_consistent,
    marginal,
    product_measure,
    relabel,
    total_variation,
)
from infotop.sampling import random_consistent_pair, random_measure, random_space

seeds = st.integers(0, 2 ** 32 - 1)


def two_by_two():
    A = FiniteMetricSpace("A", [("a0", 0.0), ("a1", 1.0)], "euclidean")
    B = FiniteMetricSpace("B", ["b0", "b1"])
    return ProductSpace([A, B])


class TestSpaces:
    def test_matrix_metric_validated(self):
        with pytest.raises(ValidationError):
            FiniteMetricSpace("M", ["x", "y", "z"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
        with pytest.raises(ValidationError):
            FiniteMetricSpace("M", ["x", "y"], [[0, 1], [2, 0]])

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValidationError):
            FiniteMetricSpace("A", ["x", "x"])

    def test_merge_euclidean_by_id(self):
        left = FiniteMetricSpace("A", [("0.0", 0.0), ("1.0", 1.0)], "euclidean")
        right = FiniteMetricSpace("A", [("1.0", 1.0), ("2.0", 2.0)], "euclidean")
        m = left.merge(right)
        assert m.ids == ("0.0", "1.0", "2.0")
        assert m.distance("0.0", "2.0") == 2.0

    def test_merge_conflicting_coords(self):
        left = FiniteMetricSpace("A", [("p", 0.0)], "euclidean")
        right = FiniteMetricSpace("A", [("p", 1.0)], "euclidean")
        with pytest.raises(ValidationError):
            left.merge(right)

    def test_merge_matrix_needs_identity(self):
        m1 = FiniteMetricSpace("M", ["x", "y"], [[0, 1], [1, 0]])
        m2 = FiniteMetricSpace("M", ["x", "y"], [[0, 2], [2, 0]])
        assert m1.merge(m1) is m1
        with pytest.raises(ValidationError):
            m1.merge(m2)


class TestDiscreteMeasure:
    def test_normalisation_checked(self):
        with pytest.raises(ValidationError):
            DiscreteMeasure(two_by_two(), {("a0", "b0"): 0.5})
        with pytest.raises(ValidationError):
            DiscreteMeasure(two_by_two(), {("a0", "b0"): 1.5, ("a1", "b0"): -0.5})

    def test_unknown_point(self):
        with pytest.raises(ValidationError):
            DiscreteMeasure(two_by_two(), {("a9", "b0"): 1.0})

    def test_duplicates_summed_zeros_dropped(self):
        mu = DiscreteMeasure(two_by_two(), [(("a0", "b0"), 0.25), (("a0", "b0"), 0.75), (("a1", "b1"), 0.0)])
        assert dict(mu.items()) == {("a0", "b0"): 1.0}

    def test_atoms_sorted(self):
        mu = DiscreteMeasure(two_by_two(), {("a1", "b0"): 0.5, ("a0", "b1"): 0.5})
        assert mu.support == (("a0", "b1"), ("a1", "b0"))

    def test_marginal_of_product(self):
        sp = two_by_two()
        alpha = DiscreteMeasure(sp.sub(["A"]), {("a0",): 0.3, ("a1",): 0.7})
        beta = DiscreteMeasure(sp.sub(["B"]), {("b0",): 0.6, ("b1",): 0.4})
        joint = product_measure(alpha, beta)
        assert marginal(joint, "A").close_to(alpha)
        assert marginal(joint, "B").close_to(beta)
        assert marginal(joint, ("B", "A")).axis_names == ("B", "A")


class TestDisintegration:
    @given(seeds)
    def test_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        mu = random_measure(rng, random_space(rng, ("A", "B", "C"), 3))
        marg, k = disintegrate(mu, "A")
        back = compose(marg, k)
        assert back.max_abs_diff(mu) <= 1e-12
        for row in k.rows.values():
            assert abs(sum(w for _, w in row.items()) - 1.0) <= 1e-12

    def test_kernel_outside_support(self):
        mu = DiscreteMeasure(two_by_two(), {("a0", "b0"): 1.0})
        _, k = disintegrate(mu, "A")
        with pytest.raises(ValidationError):
            k["a1"]

    def test_compose_domain_mismatch(self):
        sp = two_by_two()
        marg = DiscreteMeasure(sp.sub(["A"]), {("a0",): 0.5, ("a1",): 0.5})
        row = DiscreteMeasure(sp.sub(["B"]), {("b0",): 1.0})
        with pytest.raises(InconsistencyError) as err:
            compose(marg, Kernel(marg.space, sp.sub(["B"]), {("a0",): row}))
        assert err.value.gap == pytest.approx(0.5)

    def test_given_must_be_proper(self):
        mu = DiscreteMeasure(two_by_two(), {("a0", "b0"): 1.0})
        with pytest.raises(ValidationError):
            disintegrate(mu, ("A", "B"))


class TestConsistencyAndIndependence:
    @given(seeds)
    def test_consistent_pairs(self, seed):
        mu, nu = random_consistent_pair(np.random.default_rng(seed))
        ok, gap = is_consistent(mu, nu, "A")
        assert ok and gap <= 1e-12

    def test_inconsistent_gap(self):
        sp = two_by_two()
        mu = DiscreteMeasure(sp, {("a0", "b0"): 1.0})
        nu = DiscreteMeasure(sp, {("a1", "b0"): 1.0})
        assert is_consistent(mu, nu, "A") == (False, 2.0)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("INFOTOP_TOL", "0.5")
        assert default_tol() == 0.5
        monkeypatch.setenv("INFOTOP_TOL", "abc")
        with pytest.raises(ValidationError):
            default_tol()

    def test_product_is_independent(self):
        sp = ProductSpace([FiniteMetricSpace(n, [f"{n}{i}" for i in range(2)]) for n in "ABC"])
        w = {p: 1 / 8 for p in sp.points()}
        assert cond_indep_gap(DiscreteMeasure(sp, w), "A", "B", "C") == 0.0

    def test_copy_is_dependent(self):
        sp = ProductSpace([FiniteMetricSpace(n, ["0", "1"]) for n in "ABC"])
        mu = DiscreteMeasure(sp, {("0", "0", "0"): 0.5, ("0", "1", "1"): 0.5})
        assert cond_indep_gap(mu, "A", "B", "C") == pytest.approx(1.0, abs=1e-12)

    def test_axes_must_partition(self):
        sp = ProductSpace([FiniteMetricSpace(n, ["0"]) for n in "ABC"])
        mu = DiscreteMeasure(sp, {("0", "0", "0"): 1.0})
        with pytest.raises(ValidationError):
            cond_indep_gap(mu, "A", "B", "B")


def test_total_variation_range(rng):
    for _ in range(50):
        sp = random_space(rng, ("A", "B"), 3)
        mu, nu = random_measure(rng, sp), random_measure(rng, sp)
        tv = total_variation(mu, nu)
        assert 0.0 <= tv <= 2.0 + 1e-12
        assert total_variation(mu, mu) == 0.0


def test_relabel():
    mu = DiscreteMeasure(two_by_two(), {("a0", "b0"): 0.5, ("a1", "b1"): 0.5})
    r = relabel(mu, {"B": {"b0": "x"}})
    assert r.weight(("a0", "x")) == 0.5
    assert "x" in r.space.axis("B")
