import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from z4mat import z4core
from z4mat.errors import DimensionError, DomainError
from z4mat.z4core import PackedZ4Vector, dot, dot_iterated, ma, ma_packed

from oracles import TABLE_L0, TABLE_L1

digits = st.integers(0, 3)


@pytest.mark.parametrize("a,b,s", list(itertools.product(range(4), repeat=3)))
def test_ma_exhaustive_against_arithmetic_and_tables(a, b, s):
    c = ma(a, b, s)
    assert c == (a * b + s) % 4
    assert c & 1 == TABLE_L0[(a & 1, b & 1)][s & 1]
    assert c >> 1 == TABLE_L1[(a, b)][s]


def test_ma_examples():
    assert ma(3, 3, 1) == 2
    assert ma(2, 2, 3) == 3
    for b in range(4):
        for s in range(4):
            assert ma(0, b, s) == s


def test_ma_rejects_non_digits():
    with pytest.raises(DomainError):
        ma(4, 0, 0)
    with pytest.raises(DomainError):
        ma(0, -1, 0)


def test_tables_match_transcription():
    for (a0, b0), row in TABLE_L0.items():
        for s0, bit in enumerate(row):
            assert z4core.TABLES.l0[a0 << 2 | b0 << 1 | s0] == bit
    for (a, b), row in TABLE_L1.items():
        for s, bit in enumerate(row):
            assert z4core.TABLES.l1[a << 4 | b << 2 | s] == bit


@pytest.mark.parametrize("length", [0, 1, 5, 63, 64, 65, 130])
def test_pack_roundtrip(rng, length):
    d = rng.integers(0, 4, length)
    v = PackedZ4Vector.from_digits(d)
    assert v.length == length
    assert np.array_equal(v.to_digits(), d)
    assert [v[i] for i in range(length)] == list(d)
    if length % 64:
        # padding past the last lane stays zero
        top = np.uint64(length % 64)
        assert int(v.lo[-1] >> top) == 0 and int(v.hi[-1] >> top) == 0


def test_ma_packed_three_times_three_plus_one():
    n = 100
    three, one = PackedZ4Vector.from_digits([3] * n), PackedZ4Vector.from_digits([1] * n)
    assert list(ma_packed(three, three, one).to_digits()) == [2] * n


def test_ma_packed_zero_multiplier(rng):
    s = PackedZ4Vector.from_digits(rng.integers(0, 4, 77))
    b = PackedZ4Vector.from_digits(rng.integers(0, 4, 77))
    assert ma_packed(PackedZ4Vector.zeros(77), b, s) == s


def test_ma_packed_28_lanes_match_scalar(rng):
    a, b, s = (rng.integers(0, 4, 28) for _ in range(3))
    got = ma_packed(*(PackedZ4Vector.from_digits(x) for x in (a, b, s))).to_digits()
    assert list(got) == [ma(int(x), int(y), int(z)) for x, y, z in zip(a, b, s)]


def test_ma_packed_lane_equivalence_100k(rng):
    n = 100_000
    a, b, s = (rng.integers(0, 4, n) for _ in range(3))
    got = ma_packed(*(PackedZ4Vector.from_digits(x) for x in (a, b, s))).to_digits()
    scalar = np.array([ma(int(x), int(y), int(z)) for x, y, z in zip(a, b, s)])
    assert np.array_equal(got, scalar)


def test_ma_packed_length_mismatch():
    with pytest.raises(DimensionError):
        ma_packed(PackedZ4Vector.zeros(3), PackedZ4Vector.zeros(3), PackedZ4Vector.zeros(4))


def test_dot_examples():
    ones = PackedZ4Vector.from_digits([1] * 28)
    assert dot(ones, ones, 0) == 0
    assert dot(PackedZ4Vector.from_digits([1, 2, 3]), PackedZ4Vector.from_digits([3, 2, 1]), 0) == 2
    u = PackedZ4Vector.from_digits([3, 1, 2, 2, 0, 1])
    assert dot(u, PackedZ4Vector.zeros(6), 3) == 3


def test_dot_length_mismatch():
    with pytest.raises(DimensionError):
        dot(PackedZ4Vector.zeros(3), PackedZ4Vector.zeros(2))
    with pytest.raises(DimensionError):
        dot_iterated([1, 2], [1])


def _fold(u, v, s):
    for x, y in zip(u, v):
        s = ma(int(x), int(y), s)
    return s


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(digits, digits), max_size=200), digits)
def test_dot_equals_fold_and_integer_sum(pairs, s):
    u = [p[0] for p in pairs]
    v = [p[1] for p in pairs]
    got = dot(PackedZ4Vector.from_digits(u), PackedZ4Vector.from_digits(v), s)
    assert got == _fold(u, v, s)
    assert got == (s + sum(x * y for x, y in zip(u, v))) % 4


@pytest.mark.parametrize("k,n", [(56, 28), (30, 28), (896, 28), (5, 1), (3, 7)])
def test_dot_iterated_matches_direct_sum(rng, k, n):
    u, v = rng.integers(0, 4, k), rng.integers(0, 4, k)
    assert dot_iterated(u, v, n) == int((u * v).sum()) % 4


def test_dot_iterated_empty():
    assert dot_iterated([], [], 28) == 0


def test_dot_iterated_rejects_bad_width():
    with pytest.raises(DomainError):
        dot_iterated([1], [1], 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(digits, digits), max_size=120), st.integers(1, 40), st.integers(1, 40))
def test_dot_iterated_chunk_invariance(pairs, n1, n2):
    u = [p[0] for p in pairs]
    v = [p[1] for p in pairs]
    assert dot_iterated(u, v, n1) == dot_iterated(u, v, n2)


def test_lut_chain_is_a_reference_dot(rng):
    u = rng.integers(0, 4, (50, 33)).astype(np.uint8)
    v = rng.integers(0, 4, (50, 33)).astype(np.uint8)
    expected = (u.astype(np.int64) * v).sum(axis=1) % 4
    assert np.array_equal(z4core.lut_chain(u, v), expected)
