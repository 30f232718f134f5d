import numpy as np
import pytest

from subh.errors import InvalidParameter
from subh.rng import RngHandle


def test_equal_handles_produce_identical_sequences():
    a = RngHandle(123, 5).generator.integers(0, 10**9, size=100)
    b = RngHandle(123, 5).generator.integers(0, 10**9, size=100)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = RngHandle(123, 1).generator.integers(0, 10**9, size=100)
    b = RngHandle(123, 2).generator.integers(0, 10**9, size=100)
    assert not np.array_equal(a, b)


def test_child_streams_are_collision_free():
    base = RngHandle(9, 3)
    ids = {base.child(i).stream_id for i in range(100)}
    ids |= {base.child(i).child(j).stream_id for i in range(10) for j in range(10)}
    assert len(ids) == 200
    assert all(s != base.stream_id for s in ids)


def test_child_is_deterministic():
    assert RngHandle(4, 2).child(7) == RngHandle(4, 2).child(7)


def test_negative_stream_rejected():
    with pytest.raises(InvalidParameter):
        RngHandle(1, -1)
    with pytest.raises(InvalidParameter):
        RngHandle(1, 0).child(-1)


def test_negative_seed_normalized_consistently():
    a = RngHandle(-1).generator.integers(0, 100, size=10)
    b = RngHandle(2**64 - 1).generator.integers(0, 100, size=10)
    assert np.array_equal(a, b)
