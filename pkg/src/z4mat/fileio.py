"""Matrix files.

Text (``.z4t``)::

    z4m <rows> <cols>
    <rows lines of exactly <cols> characters from 0123>

Binary (``.z4b``): magic ``5A 34 4D 01``, rows and cols as little-endian
uint32, then row-major elements at 2 bits each, the first element of a byte in
its least significant bits, every row padded with zero bits to a whole byte.
"""

import re
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .matrix import Z4Matrix

MAGIC = b"Z4M\x01"
_HEADER = re.compile(rb"z4m (0|[1-9][0-9]*) (0|[1-9][0-9]*)")


def dumps_text(m: Z4Matrix) -> bytes:
    arr = m.to_array()
    lines = [f"z4m {m.rows} {m.cols}".encode()]
    lines += [(arr[i] + ord("0")).astype(np.uint8).tobytes() for i in range(m.rows)]
    return b"\n".join(lines) + b"\n"


def loads_text(data: bytes) -> Z4Matrix:
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    if not lines:
        raise FormatError("line 1: missing header")
    hdr = _HEADER.fullmatch(lines[0])
    if not hdr:
        raise FormatError(f"line 1 (byte 0): bad header {lines[0][:40]!r}, expected 'z4m <rows> <cols>'")
    rows, cols = int(hdr.group(1)), int(hdr.group(2))
    if len(lines) - 1 != rows:
        raise FormatError(f"line {len(lines) + 1}: header declares {rows} rows, found {len(lines) - 1}")
    out = np.empty((rows, cols), dtype=np.uint8)
    offset = len(lines[0]) + 1
    for i, line in enumerate(lines[1:]):
        if len(line) != cols:
            raise FormatError(f"line {i + 2} (byte {offset}): expected {cols} digits, found {len(line)}")
        row = np.frombuffer(line, dtype=np.uint8) - ord("0")
        bad = np.flatnonzero(row > 3)
        if bad.size:
            j = int(bad[0])
            raise FormatError(f"line {i + 2} (byte {offset + j}): {line[j:j + 1]!r} is not a digit 0-3")
        out[i] = row
        offset += len(line) + 1
    return Z4Matrix.from_array(out)


def _row_bytes(cols):
    return -(-cols // 4)


def dumps_binary(m: Z4Matrix) -> bytes:
    arr = m.to_array()
    nb = _row_bytes(m.cols)
    padded = np.zeros((m.rows, nb * 4), dtype=np.uint8)
    padded[:, :m.cols] = arr
    q = padded.reshape(m.rows, nb, 4)
    body = q[..., 0] | q[..., 1] << 2 | q[..., 2] << 4 | q[..., 3] << 6
    return MAGIC + struct.pack("<II", m.rows, m.cols) + body.astype(np.uint8).tobytes()


def loads_binary(data: bytes) -> Z4Matrix:
    if data[:4] != MAGIC:
        raise FormatError(f"byte 0: bad magic {data[:4].hex()}, expected {MAGIC.hex()}")
    if len(data) < 12:
        raise FormatError(f"byte {len(data)}: truncated header")
    rows, cols = struct.unpack_from("<II", data, 4)
    nb = _row_bytes(cols)
    expected = 12 + rows * nb
    if len(data) != expected:
        raise FormatError(f"byte {min(len(data), expected)}: expected {expected} bytes in total, "
                          f"found {len(data)}")
    body = np.frombuffer(data, dtype=np.uint8, offset=12).reshape(rows, nb)
    digits = np.stack([(body >> s) & 3 for s in (0, 2, 4, 6)], axis=-1).reshape(rows, nb * 4)
    if cols % 4 and rows:
        tail = digits[:, cols:]
        bad = np.flatnonzero(tail.any(axis=1))
        if bad.size:
            i = int(bad[0])
            raise FormatError(f"byte {12 + i * nb + nb - 1}: nonzero padding bits in row {i}")
    return Z4Matrix.from_array(digits[:, :cols])


def loads(data: bytes) -> Z4Matrix:
    if data[:4] == MAGIC:
        return loads_binary(data)
    return loads_text(data)


def is_binary_path(path) -> bool:
    return Path(path).suffix.lower() == ".z4b"


def read_matrix(path) -> Z4Matrix:
    data = Path(path).read_bytes()
    if is_binary_path(path):
        return loads_binary(data)
    return loads(data)


def write_matrix(path, m: Z4Matrix):
    data = dumps_binary(m) if is_binary_path(path) else dumps_text(m)
    Path(path).write_bytes(data)
