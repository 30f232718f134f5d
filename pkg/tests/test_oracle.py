import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_h_index
from subh.errors import BudgetExhausted, IndexOutOfRange, InvalidParameter
from subh.exact import exact_h_index
from subh.oracle import ArrayOracle, GenSpec, generate_array, load_array, sample_indices, save_array
from subh.rng import RngHandle


class TestArrayOracle:
    def test_single_read_counts_once(self):
        oracle = ArrayOracle([7, 0, 3])
        assert oracle.query_count == 0
        assert oracle.read(2) == 0
        assert oracle.query_count == 1

    def test_repeated_reads_each_count(self):
        oracle = ArrayOracle([5])
        assert oracle.read(1) == 5
        assert oracle.read(1) == 5
        assert oracle.query_count == 2

    def test_budget_refusal_leaves_counter(self):
        oracle = ArrayOracle([1, 2], budget=1)
        assert oracle.read(1) == 1
        with pytest.raises(BudgetExhausted):
            oracle.read(2)
        assert oracle.query_count == 1

    def test_index_bounds(self):
        oracle = ArrayOracle([1, 2, 3])
        with pytest.raises(IndexOutOfRange):
            oracle.read(0)
        with pytest.raises(IndexOutOfRange):
            oracle.read(4)
        assert oracle.query_count == 0

    def test_read_many_counts_batch(self):
        oracle = ArrayOracle([10, 20, 30])
        out = oracle.read_many(np.array([3, 1, 3]))
        assert out.tolist() == [30, 10, 30]
        assert oracle.query_count == 3

    def test_read_many_budget_charges_prefix_then_refuses(self):
        oracle = ArrayOracle(list(range(1, 11)), budget=7)
        oracle.read_many(np.arange(1, 6))
        with pytest.raises(BudgetExhausted):
            oracle.read_many(np.arange(1, 6))
        assert oracle.query_count == 7  # exactly the budget, never beyond

    def test_values_are_immutable(self):
        source = np.array([1, 2, 3])
        oracle = ArrayOracle(source)
        source[0] = 99
        assert oracle.read(1) == 1

    def test_rejects_negative_values_and_empty(self):
        with pytest.raises(InvalidParameter):
            ArrayOracle([])
        with pytest.raises(InvalidParameter):
            ArrayOracle([1, -2])

    @given(st.lists(st.sampled_from(["ok", "bad", "refused"]), max_size=40))
    def test_counter_equals_successful_reads_under_replay(self, script):
        budget = sum(1 for op in script if op in ("ok", "refused")) // 2 or None
        oracle = ArrayOracle([4, 5, 6], budget=budget)
        successes = 0
        for op in script:
            if op == "bad":
                with pytest.raises(IndexOutOfRange):
                    oracle.read(7)
            else:
                try:
                    oracle.read(1)
                    successes += 1
                except BudgetExhausted:
                    pass
        assert oracle.query_count == successes


class TestSampleIndices:
    def test_single_element_support(self):
        out = sample_indices(RngHandle(1), n=1, k=5)
        assert out.tolist() == [1, 1, 1, 1, 1]

    def test_determinism_contract(self):
        a = sample_indices(RngHandle(42, 9), n=10**6, k=10**5)
        b = sample_indices(RngHandle(42, 9), n=10**6, k=10**5)
        assert np.array_equal(a, b)

    def test_uniform_frequencies(self):
        out = sample_indices(RngHandle(7), n=4, k=10**5)
        freq = np.bincount(out, minlength=5)[1:] / 10**5
        assert np.all(np.abs(freq - 0.25) <= 0.01)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameter):
            sample_indices(RngHandle(1), n=0, k=1)
        with pytest.raises(InvalidParameter):
            sample_indices(RngHandle(1), n=5, k=0)


class TestGenerate:
    def test_empty_impact(self):
        out = generate_array(GenSpec(n=5, h=0), RngHandle(3))
        assert out.tolist() == [0, 0, 0, 0, 0]

    def test_saturated(self):
        out = generate_array(GenSpec(n=5, h=5, high_value=5), RngHandle(3))
        assert out.tolist() == [5, 5, 5, 5, 5]

    def test_target_h_is_exact(self):
        out = generate_array(GenSpec(n=1000, h=137, high_value=500), RngHandle(3))
        assert exact_h_index(out) == 137
        assert brute_h_index(out) == 137

    def test_invalid_specs(self):
        with pytest.raises(InvalidParameter):
            GenSpec(n=5, h=6)
        with pytest.raises(InvalidParameter):
            GenSpec(n=5, h=3, high_value=2)
        with pytest.raises(InvalidParameter):
            GenSpec(n=0, h=0)

    @given(
        n=st.integers(1, 200),
        data=st.data(),
        profile=st.sampled_from(["uniform", "zeros"]),
        seed=st.integers(0, 2**32),
    )
    def test_exact_h_property(self, n, data, profile, seed):
        h = data.draw(st.integers(0, n))
        high = data.draw(st.integers(max(h, 1), 3 * n))
        out = generate_array(
            GenSpec(n=n, h=h, high_value=high, low_profile=profile), RngHandle(seed)
        )
        assert exact_h_index(out) == h


class TestArrayFiles:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "a.txt"
        save_array([3, 0, 6, 1, 5], path)
        assert load_array(path).tolist() == [3, 0, 6, 1, 5]
        assert path.read_text() == "3\n0\n6\n1\n5\n"

    def test_rejects_junk(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3\nxyz\n")
        with pytest.raises(InvalidParameter):
            load_array(path)
        path.write_text("3\n-1\n")
        with pytest.raises(InvalidParameter):
            load_array(path)
        path.write_text("")
        with pytest.raises(InvalidParameter):
            load_array(path)
