from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_discounted, brute_h_index, brute_scaled_h
from subh.errors import InvalidParameter, PromiseViolated
from subh.exact import (
    TaggedValue,
    discounted_h_index,
    exact_h_index,
    scaled_h_index,
    select_kth,
    tag_values,
)


class TestExactHIndex:
    def test_all_zero(self):
        assert exact_h_index([0, 0, 0]) == 0

    def test_saturated(self):
        for n in (1, 4, 9):
            assert exact_h_index([n] * n) == n

    def test_known_value(self):
        assert brute_h_index([3, 0, 6, 1, 5]) == 3
        assert exact_h_index([3, 0, 6, 1, 5]) == 3

    @given(st.lists(st.integers(0, 12), min_size=1, max_size=12))
    def test_matches_brute_force(self, values):
        assert exact_h_index(values) == brute_h_index(values)

    @given(st.lists(st.integers(0, 10**6), min_size=1, max_size=60))
    def test_cap_invariance(self, values):
        n = len(values)
        capped = [min(v, n) for v in values]
        assert exact_h_index(values) == exact_h_index(capped)

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidParameter):
            exact_h_index([])
        with pytest.raises(InvalidParameter):
            exact_h_index([1, -1])


class TestSelectKth:
    def test_singleton(self):
        assert select_kth([TaggedValue(5, 1)], 1) == TaggedValue(5, 1)

    def test_ties_broken_by_origin(self):
        items = tag_values([2, 2, 2])
        assert select_kth(items, 2) == TaggedValue(2, 2)

    def test_median_of_1001_random(self):
        gen = np.random.default_rng(11)
        items = tag_values(gen.integers(0, 500, size=1001).tolist())
        expected = sorted(items)[500]
        assert select_kth(list(items), 501) == expected

    def test_rank_bounds(self):
        with pytest.raises(InvalidParameter):
            select_kth(tag_values([1, 2]), 0)
        with pytest.raises(InvalidParameter):
            select_kth(tag_values([1, 2]), 3)

    def test_partitions_input(self):
        items = tag_values([9, 1, 8, 2, 7, 3, 6, 4, 5])
        got = select_kth(items, 5)
        pos = items.index(got)
        assert all(x < got for x in items[:pos])
        assert all(x > got for x in items[pos + 1 :])

    @given(st.lists(st.integers(0, 8), min_size=1, max_size=120), st.data())
    def test_matches_sort_with_heavy_ties(self, values, data):
        k = data.draw(st.integers(1, len(values)))
        items = tag_values(values)
        assert select_kth(list(items), k) == sorted(items)[k - 1]


def promise_instances():
    """(values, d, alpha) triples where the predicate promise holds."""

    @st.composite
    def build(draw):
        values = draw(st.lists(st.integers(0, 60), min_size=1, max_size=80))
        alpha = Fraction(
            draw(st.integers(0, 8)), draw(st.integers(1, 8))
        )
        alpha = min(alpha, Fraction(1))
        extra = draw(st.integers(0, 5))
        # smallest d making some element qualify, then some slack
        needed = min(
            max(0, -(-(alpha.numerator * v) // alpha.denominator) - int((np.asarray(values) >= v).sum()))
            for v in values
        )
        return values, needed + extra, alpha
    return build()


class TestDiscountedHIndex:
    def test_base_case_with_promise(self):
        assert discounted_h_index([5], 4, 1) == 5

    def test_base_case_promise_broken_reports(self):
        # count(>=5)=1 < 1*5-0: no element qualifies, so this must not guess
        with pytest.raises(PromiseViolated):
            discounted_h_index([5], 0, 1)

    def test_known_value(self):
        assert brute_discounted([3, 0, 6, 1, 5], 0, Fraction(1)) == 3
        assert discounted_h_index([3, 0, 6, 1, 5], 0, 1) == 3

    def test_small_alpha_single(self):
        # predicate: alpha*10 - 0 = 1 <= count(>=10) = 1
        assert discounted_h_index([10], 0, Fraction(1, 10)) == 10

    def test_accepts_tagged_values(self):
        items = tag_values([3, 0, 6, 1, 5])
        assert discounted_h_index(items, 0, Fraction(1)) == 3

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameter):
            discounted_h_index([], 0, 1)
        with pytest.raises(InvalidParameter):
            discounted_h_index([1], -1, 1)
        with pytest.raises(InvalidParameter):
            discounted_h_index([1], 0, 2)

    @given(promise_instances())
    def test_matches_brute_force_under_promise(self, instance):
        values, d, alpha = instance
        expected = brute_discounted(values, d, alpha)
        assert expected is not None
        assert discounted_h_index(values, d, alpha) == expected

    @given(st.lists(st.integers(0, 60), min_size=1, max_size=80), st.integers(0, 40))
    def test_promise_violations_always_detected(self, values, d):
        alpha = Fraction(1)
        expected = brute_discounted(values, d, alpha)
        if expected is None:
            with pytest.raises(PromiseViolated):
                discounted_h_index(values, d, alpha)
        else:
            assert discounted_h_index(values, d, alpha) == expected


class TestScaledHIndex:
    def test_no_positive_q(self):
        assert scaled_h_index([0, 0], Fraction(1, 2), 4) == 0

    def test_integer_answer_between_elements(self):
        # count(>=2)=1 >= 1 holds, count(>=3)=1 >= 1.5 fails
        assert scaled_h_index([10, 0], Fraction(1, 2), 4) == 2

    @given(st.integers(1, 30), st.integers(1, 60), st.integers(0, 80))
    def test_constant_block(self, k, n_extra, v):
        # B = k copies of v with alpha = k/n, v <= n: crossing sits at v
        n = max(k, v) + n_extra
        assert scaled_h_index([v] * k, Fraction(k, n), n) == v

    def test_alpha_above_one_is_legal(self):
        assert scaled_h_index([5, 5, 5, 5], Fraction(4, 2), 10) == 2

    @given(
        st.lists(st.integers(0, 40), min_size=1, max_size=60),
        st.integers(1, 50),
        st.integers(1, 50),
        st.integers(0, 45),
    )
    def test_matches_descending_scan(self, values, num, den, n_cap):
        alpha = Fraction(num, den)
        assert scaled_h_index(values, alpha, n_cap) == brute_scaled_h(values, alpha, n_cap)

    @given(st.lists(st.integers(0, 40), min_size=1, max_size=60), st.integers(0, 45))
    def test_unique_crossing(self, values, n_cap):
        """#{b >= q} is non-increasing, so the answer is the last q where the
        predicate holds; everything above fails, everything below holds."""
        alpha = Fraction(1, 3)
        answer = scaled_h_index(values, alpha, n_cap)
        arr = np.asarray(values)
        for q in range(n_cap + 1):
            holds = int((arr >= q).sum()) * alpha.denominator >= q * alpha.numerator
            assert holds == (q <= answer)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameter):
            scaled_h_index([], Fraction(1, 2), 4)
        with pytest.raises(InvalidParameter):
            scaled_h_index([1], Fraction(0), 4)
        with pytest.raises(InvalidParameter):
            scaled_h_index([1], Fraction(1, 2), -1)
