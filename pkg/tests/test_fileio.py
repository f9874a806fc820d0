import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from z4mat.errors import FormatError
from z4mat.fileio import (MAGIC, dumps_binary, dumps_text, loads, loads_binary, loads_text,
                          read_matrix, write_matrix)
from z4mat.matrix import Z4Matrix, random_matrix


def test_text_layout():
    m = Z4Matrix.from_array([[0, 1, 2], [3, 2, 1]])
    assert dumps_text(m) == b"z4m 2 3\n012\n321\n"


def test_binary_layout():
    m = Z4Matrix.from_array([[1, 2, 3, 0, 3], [0, 0, 0, 0, 1]])
    data = dumps_binary(m)
    assert data[:4] == bytes([0x5A, 0x34, 0x4D, 0x01]) == MAGIC
    assert struct.unpack("<II", data[4:12]) == (2, 5)
    # 1 | 2<<2 | 3<<4 | 0<<6 = 0x39, then the fifth element alone
    assert data[12:] == bytes([0x39, 0x03, 0x00, 0x01])


def test_empty_matrices():
    for r, c in ((0, 0), (0, 5), (3, 0)):
        m = Z4Matrix.zeros(r, c)
        assert loads_text(dumps_text(m)).shape == (r, c)
        assert loads_binary(dumps_binary(m)).shape == (r, c)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 40), st.integers(0, 70), st.integers(0, 2**32 - 1))
def test_round_trips(r, c, seed):
    m = random_matrix(r, c, np.random.default_rng(seed))
    assert loads_text(dumps_text(m)) == m
    assert loads_binary(dumps_binary(m)) == m
    assert loads(dumps_binary(m)) == loads(dumps_text(m)) == m


def test_text_without_final_newline():
    assert loads_text(b"z4m 1 2\n13").to_array().tolist() == [[1, 3]]


@pytest.mark.parametrize("data,where", [
    (b"", "line 1"),
    (b"z4m 2\n", "line 1"),
    (b"Z4M 1 1\n0\n", "line 1"),
    (b"z4m 01 1\n0\n", "line 1"),
    (b"z4m 2 2\n01\n", "line 3"),
    (b"z4m 1 2\n012\n", "line 2 (byte 8)"),
    (b"z4m 2 3\n012\n0x2\n", "line 3 (byte 13)"),
    (b"z4m 1 2\n04\n", "line 2 (byte 9)"),
    (b"z4m 1 2 \n01\n", "line 1"),
    (b"z4m 1 2\n01 \n", "line 2"),
])
def test_text_diagnostics(data, where):
    with pytest.raises(FormatError) as info:
        loads_text(data)
    assert where in str(info.value)
    assert "\n" not in str(info.value)


def test_binary_diagnostics():
    good = dumps_binary(Z4Matrix.from_array([[1, 2, 3]]))
    with pytest.raises(FormatError, match="byte 0: bad magic"):
        loads_binary(b"Z4M\x02" + good[4:])
    with pytest.raises(FormatError, match="truncated"):
        loads_binary(good[:9])
    with pytest.raises(FormatError, match="expected 13 bytes"):
        loads_binary(good + b"\x00")
    with pytest.raises(FormatError, match="expected 13 bytes"):
        loads_binary(good[:12])
    with pytest.raises(FormatError, match="byte 12: nonzero padding"):
        loads_binary(good[:12] + bytes([good[12] | 0xC0]))


def test_files_pick_format_by_suffix(tmp_path, rng):
    m = random_matrix(9, 13, rng)
    write_matrix(tmp_path / "a.z4b", m)
    write_matrix(tmp_path / "a.z4t", m)
    assert (tmp_path / "a.z4b").read_bytes().startswith(MAGIC)
    assert (tmp_path / "a.z4t").read_bytes().startswith(b"z4m 9 13\n")
    assert read_matrix(tmp_path / "a.z4b") == read_matrix(tmp_path / "a.z4t") == m
    # a text file with a binary suffix is rejected rather than guessed
    (tmp_path / "b.z4b").write_bytes(dumps_text(m))
    with pytest.raises(FormatError):
        read_matrix(tmp_path / "b.z4b")


def test_output_is_deterministic(rng):
    m = random_matrix(17, rng=rng)
    assert dumps_binary(m) == dumps_binary(m.copy())
    assert dumps_text(m) == dumps_text(m.copy())
