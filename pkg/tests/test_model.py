import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from btlrank.model import (
    CenteredScores,
    Ranking,
    SkillProfile,
    SpaceKind,
    center,
    ranking_from_scores,
    sigmoid,
    sigmoid_prime,
    validate_profile,
)

finite_floats = st.floats(min_value=-700.0, max_value=700.0, allow_nan=False)


class TestSigmoid:
    def test_zero(self):
        assert sigmoid(0.0) == 0.5

    def test_log3_is_three_quarters(self):
        # solve 1/(1+e^-t) = 3/4 analytically: t = log 3
        assert sigmoid(math.log(3.0)) == pytest.approx(0.75, abs=1e-15)

    @given(finite_floats)
    def test_complement(self, t):
        assert sigmoid(t) + sigmoid(-t) == pytest.approx(1.0, abs=1e-15)

    def test_saturation_is_finite(self):
        assert 0.0 <= sigmoid(-700.0) < 1e-300
        assert sigmoid(700.0) <= 1.0
        assert np.isfinite(sigmoid(700.0))

    def test_prime_at_zero(self):
        assert sigmoid_prime(0.0) == 0.25

    @given(finite_floats)
    def test_prime_even(self, t):
        assert sigmoid_prime(t) == sigmoid_prime(-t)

    def test_prime_is_product_of_sigmoids(self):
        assert sigmoid_prime(2.0) == pytest.approx(sigmoid(2.0) * sigmoid(-2.0), rel=1e-15)

    @given(st.floats(min_value=-700.0, max_value=0.0, allow_nan=False))
    def test_prime_identity(self, t):
        # psi'(t) = psi(t) * (1 - psi(t)); evaluated on t <= 0 where the
        # right-hand side is float-computable (1 - psi(t) cancels
        # catastrophically for large positive t), with evenness covering
        # the other half-line
        expected = sigmoid(t) * (1.0 - sigmoid(t))
        assert sigmoid_prime(t) == pytest.approx(expected, rel=1e-15, abs=0.0)
        assert sigmoid_prime(-t) == sigmoid_prime(t)


class TestValidateProfile:
    def test_two_piece_ok(self):
        p = SkillProfile(np.array([1.0, 1.0, 0.0, 0.0]), k=2, delta=1.0, kappa=1.0)
        assert validate_profile(p) is None

    def test_unsorted_reports_monotonicity(self):
        p = SkillProfile(np.array([0.0, 1.0, 0.5]), k=1, delta=0.0, kappa=1.0)
        report = validate_profile(p)
        assert report is not None and report.startswith("monotonicity")

    def test_gap_violation_named(self):
        p = SkillProfile(np.array([2.0, 1.5, 0.0]), k=1, delta=1.0, kappa=2.0)
        report = validate_profile(p)
        assert report is not None and report.startswith("gap")

    def test_enlarged_space_tolerates_middle_entry(self):
        # only position k+1 sits inside the gap: fine for the enlarged
        # space, a gap violation for the standard one
        values = np.array([2.0, 2.0, 2.0, 1.0, 0.0, 0.0])
        standard = SkillProfile(values, k=3, delta=2.0, kappa=2.0)
        enlarged = SkillProfile(values, k=3, delta=2.0, kappa=2.0,
                                space_kind=SpaceKind.ENLARGED)
        assert validate_profile(standard).startswith("gap")
        assert validate_profile(enlarged) is None

    def test_range_violation(self):
        p = SkillProfile(np.array([3.0, 1.0, 0.0]), k=1, delta=1.0, kappa=2.0)
        assert validate_profile(p).startswith("range")

    def test_delta_above_kappa_reports_gap_first(self):
        # delta > kappa forces a gap (or range) violation as well; the
        # first failing constraint in declaration order wins
        p = SkillProfile(np.array([1.0, 1.0]), k=1, delta=0.5, kappa=0.1)
        assert validate_profile(p).startswith("gap")

    def test_vacuous_gap_when_k_equals_n(self):
        p = SkillProfile(np.array([1.0, 0.5]), k=2, delta=3.0, kappa=1.0)
        assert validate_profile(p).startswith("delta-kappa")


class TestCenter:
    def test_constant_vector(self):
        assert np.array_equal(center([1.0, 1.0, 1.0]).theta, np.zeros(3))

    def test_simple_mean_subtraction(self):
        assert np.allclose(center([3.0, 1.0, -1.0]).theta, [2.0, 0.0, -2.0], atol=1e-15)

    def test_idempotent_bitwise(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=57) * 13.7
        once = center(x).theta
        twice = center(once).theta
        assert np.array_equal(once, twice)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            center([])

    def test_order_preserved(self):
        x = np.array([5.0, -2.0, 7.0, 7.0])
        c = center(x).theta
        assert np.array_equal(np.argsort(x, kind="stable"), np.argsort(c, kind="stable"))

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
                    min_size=1, max_size=64))
    def test_sum_within_machine_tolerance(self, xs):
        theta = center(xs).theta
        bound = theta.size * np.finfo(float).eps * np.max(np.abs(theta), initial=0.0)
        assert abs(theta.sum()) <= bound

    def test_centered_scores_reject_uncentered(self):
        with pytest.raises(ValueError):
            CenteredScores(np.array([1.0, 2.0]))


class TestRankingFromScores:
    def test_basic(self):
        r = ranking_from_scores([0.3, 0.9, 0.1])
        assert r.ranks.tolist() == [2, 1, 3]

    def test_all_equal_breaks_ties_by_index(self):
        r = ranking_from_scores(np.zeros(5))
        assert r.ranks.tolist() == [1, 2, 3, 4, 5]

    def test_sorted_distinct_scores_give_identity(self):
        r = ranking_from_scores([4.0, 3.0, 2.5, 0.0])
        assert r == Ranking.identity(4)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            ranking_from_scores([1.0, np.nan])

    @given(st.lists(st.integers(min_value=-(2**40), max_value=2**40), min_size=2, max_size=32),
           st.integers(min_value=-(2**10), max_value=2**10))
    def test_shift_invariant(self, xs, c):
        # integer-valued floats make the shift exact, so even ties survive
        base = ranking_from_scores(np.asarray(xs, dtype=float))
        shifted = ranking_from_scores(np.asarray(xs, dtype=float) + c)
        assert base == shifted

    @given(st.lists(st.integers(min_value=-100, max_value=100), min_size=2, max_size=32))
    def test_monotone_transform_invariant(self, xs):
        # integer scores keep exp() collision-free, so ties are preserved too
        base = ranking_from_scores(np.asarray(xs, dtype=float))
        transformed = ranking_from_scores(np.exp(0.5 * np.asarray(xs)))
        assert base == transformed


class TestRankingType:
    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            Ranking(np.array([1, 1, 3]))

    def test_top_set(self):
        r = Ranking(np.array([2, 1, 3]))
        assert r.top_set(2).tolist() == [True, True, False]
