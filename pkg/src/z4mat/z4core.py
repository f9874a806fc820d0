"""Multiply-accumulate over Z4 and bit-sliced dot products.

A digit ``a`` in Z4 is split into two bits, ``a = 2*hi + lo``.  Vectors are
stored as two bit-planes of 64-bit words (lane ``i`` lives in word ``i // 64``,
bit ``i % 64``), so a single word operation acts on 64 lanes at once.

The scalar multiply-accumulate ``ma(a, b, s) = (a*b + s) mod 4`` is defined by
two lookup tables: ``L0`` gives the low output bit from the three low input
bits, ``L1`` gives the high output bit from all six input bits.  The tables are
stored literally and cross-checked at import against the boolean form used by
the packed kernels:

    p0 = a0 & b0
    p1 = (a1 & b0) ^ (a0 & b1)
    c0 = p0 ^ s0
    c1 = p1 ^ s1 ^ (p0 & s0)
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError

WORD = 64
DEFAULT_CHUNK = 28

# Low output bit, indexed by (alpha0, beta0) rows and sigma0 columns.
_L0_ROWS = {
    (0, 0): (0, 1),
    (0, 1): (0, 1),
    (1, 0): (0, 1),
    (1, 1): (1, 0),
}

# High output bit, indexed by (a, b) rows and s columns.
_L1_ROWS = {
    (0, 0): (0, 0, 1, 1),
    (0, 1): (0, 0, 1, 1),
    (0, 2): (0, 0, 1, 1),
    (0, 3): (0, 0, 1, 1),
    (1, 0): (0, 0, 1, 1),
    (1, 1): (0, 1, 1, 0),
    (1, 2): (1, 1, 0, 0),
    (1, 3): (1, 0, 0, 1),
    (2, 0): (0, 0, 1, 1),
    (2, 1): (1, 1, 0, 0),
    (2, 2): (0, 0, 1, 1),
    (2, 3): (1, 1, 0, 0),
    (3, 0): (0, 0, 1, 1),
    (3, 1): (1, 0, 0, 1),
    (3, 2): (1, 1, 0, 0),
    (3, 3): (0, 1, 1, 0),
}


@dataclass(frozen=True)
class MaTables:
    """Truth tables of the two single-bit LUTs.

    ``l0[(alpha0 << 2) | (beta0 << 1) | sigma0]`` and ``l1[(a << 4) | (b << 2) | s]``.
    """

    l0: tuple
    l1: tuple

    def as_arrays(self):
        return np.array(self.l0, dtype=np.uint8), np.array(self.l1, dtype=np.uint8)


def _build_tables():
    l0 = [0] * 8
    for (a0, b0), row in _L0_ROWS.items():
        for s0, bit in enumerate(row):
            l0[(a0 << 2) | (b0 << 1) | s0] = bit
    l1 = [0] * 64
    for (a, b), row in _L1_ROWS.items():
        for s, bit in enumerate(row):
            l1[(a << 4) | (b << 2) | s] = bit
    return MaTables(tuple(l0), tuple(l1))


TABLES = _build_tables()
L0, L1 = TABLES.as_arrays()


def _boolean_ma(a, b, s):
    a0, a1 = a & 1, a >> 1
    b0, b1 = b & 1, b >> 1
    s0, s1 = s & 1, s >> 1
    p0 = a0 & b0
    p1 = (a1 & b0) ^ (a0 & b1)
    return (p1 ^ s1 ^ (p0 & s0)) << 1 | (p0 ^ s0)


def _self_check():
    for a in range(4):
        for b in range(4):
            for s in range(4):
                c = _boolean_ma(a, b, s)
                lo = TABLES.l0[((a & 1) << 2) | ((b & 1) << 1) | (s & 1)]
                hi = TABLES.l1[(a << 4) | (b << 2) | s]
                if c != (hi << 1 | lo):
                    raise RuntimeError(f"MA tables disagree with boolean form at {(a, b, s)}")


_self_check()


def _check_digit(x, name):
    if not 0 <= x < 4:
        raise DomainError(f"{name}={x} is not a Z4 digit")


def ma(a: int, b: int, s: int) -> int:
    """Return ``(a*b + s) mod 4`` as read from the two LUTs."""
    _check_digit(a, "a")
    _check_digit(b, "b")
    _check_digit(s, "s")
    lo = TABLES.l0[((a & 1) << 2) | ((b & 1) << 1) | (s & 1)]
    hi = TABLES.l1[(a << 4) | (b << 2) | s]
    return hi << 1 | lo


# ---------------------------------------------------------------- bit-planes


def words_for(length):
    return -(-length // WORD)


def pack_rows(digits):
    """Pack a 2-D array of Z4 digits into ``(lo, hi)`` word planes.

    Each row starts on a word boundary; padding bits are zero.
    """
    d = np.asarray(digits, dtype=np.uint8)
    if d.ndim != 2:
        raise DimensionError("pack_rows expects a 2-D array")
    rows, cols = d.shape
    nw = words_for(cols)
    planes = []
    for bit in (d & 1, d >> 1):
        padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
        padded[:, :cols] = bit
        packed = np.packbits(padded, axis=1, bitorder="little")
        planes.append(packed.view("<u8").astype(np.uint64, copy=False).reshape(rows, nw))
    return planes[0], planes[1]


def unpack_rows(lo, hi, cols):
    """Inverse of :func:`pack_rows`."""
    rows = lo.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    out = []
    for plane in (lo, hi):
        raw = np.ascontiguousarray(plane, dtype="<u8").view(np.uint8).reshape(rows, -1)
        out.append(np.unpackbits(raw, axis=1, bitorder="little")[:, :cols])
    return (out[1] << 1 | out[0]).astype(np.uint8)


def dot_planes(ulo, uhi, vlo, vhi):
    """Lane-summed products of packed operands, reduced mod 4.

    Operands broadcast against each other; the last axis holds words.  The
    sum of the low product bits and twice the sum of the high product bits is
    taken with popcounts, which is the carry-save reduction collapsed into a
    counter.
    """
    p0 = ulo & vlo
    p1 = (uhi & vlo) ^ (ulo & vhi)
    n0 = np.bitwise_count(p0).sum(axis=-1, dtype=np.int64)
    n1 = np.bitwise_count(p1).sum(axis=-1, dtype=np.int64)
    return ((n0 + 2 * n1) & 3).astype(np.uint8)


@lru_cache(maxsize=4096)
def lane_window(start, stop):
    """Word slice and mask words selecting lanes ``[start, stop)``."""
    w0 = start // WORD
    w1 = words_for(stop)
    mask = np.zeros(w1 - w0, dtype=np.uint64)
    for lane in range(start, stop):
        w = lane // WORD - w0
        mask[w] |= np.uint64(1) << np.uint64(lane % WORD)
    mask.flags.writeable = False
    return slice(w0, w1), mask


# ---------------------------------------------------------------- vectors


@dataclass(frozen=True, eq=False)
class PackedZ4Vector:
    """A length-``length`` vector of Z4 digits held as two word bit-planes."""

    length: int
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def from_digits(cls, digits):
        d = np.asarray(digits, dtype=np.int64).reshape(-1)
        if d.size and (d.min() < 0 or d.max() > 3):
            raise DomainError("vector entries must lie in {0,1,2,3}")
        lo, hi = pack_rows(d.astype(np.uint8)[None, :])
        return cls(int(d.size), lo[0], hi[0])

    @classmethod
    def zeros(cls, length):
        nw = words_for(length)
        return cls(length, np.zeros(nw, dtype=np.uint64), np.zeros(nw, dtype=np.uint64))

    def to_digits(self):
        return unpack_rows(self.lo[None, :], self.hi[None, :], self.length)[0]

    def __len__(self):
        return self.length

    def __getitem__(self, i):
        if not 0 <= i < self.length:
            raise IndexError(i)
        w, b = divmod(i, WORD)
        return int((self.hi[w] >> np.uint64(b)) & np.uint64(1)) << 1 | int(
            (self.lo[w] >> np.uint64(b)) & np.uint64(1))

    def __eq__(self, other):
        if not isinstance(other, PackedZ4Vector):
            return NotImplemented
        return (self.length == other.length and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))

    def __repr__(self):
        digits = "".join(map(str, self.to_digits()[:32]))
        tail = "..." if self.length > 32 else ""
        return f"PackedZ4Vector({self.length}, '{digits}{tail}')"


def _same_length(*vectors):
    n = vectors[0].length
    for v in vectors[1:]:
        if v.length != n:
            raise DimensionError(f"vector lengths differ: {n} vs {v.length}")


def ma_packed(a: PackedZ4Vector, b: PackedZ4Vector, s: PackedZ4Vector) -> PackedZ4Vector:
    """Lane-wise ``ma`` on packed vectors."""
    _same_length(a, b, s)
    p0 = a.lo & b.lo
    p1 = (a.hi & b.lo) ^ (a.lo & b.hi)
    c0 = p0 ^ s.lo
    c1 = p1 ^ s.hi ^ (p0 & s.lo)
    return PackedZ4Vector(a.length, c0, c1)


def dot(u: PackedZ4Vector, v: PackedZ4Vector, acc_in: int = 0) -> int:
    """Return ``(acc_in + sum(u[i]*v[i])) mod 4``."""
    _same_length(u, v)
    _check_digit(acc_in, "acc_in")
    return (acc_in + int(dot_planes(u.lo, u.hi, v.lo, v.hi))) & 3


def dot_iterated(u: Sequence[int], v: Sequence[int], n: int = DEFAULT_CHUNK) -> int:
    """Dot product of arbitrary-length digit sequences through an ``n``-wide unit.

    Both inputs are zero-padded to a multiple of ``n`` and fed in ``n``-element
    chunks; each chunk's result becomes the accumulator of the next one.
    """
    u = np.asarray(u, dtype=np.int64).reshape(-1)
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    if u.size != v.size:
        raise DimensionError(f"vector lengths differ: {u.size} vs {v.size}")
    if n < 1:
        raise DomainError("chunk width n must be >= 1")
    k = u.size
    if k == 0:
        return 0
    for x in (u, v):
        if x.min() < 0 or x.max() > 3:
            raise DomainError("vector entries must lie in {0,1,2,3}")
    chunks = -(-k // n)
    up = np.zeros(chunks * n, dtype=np.uint8)
    vp = np.zeros(chunks * n, dtype=np.uint8)
    up[:k] = u
    vp[:k] = v
    ulo, uhi = pack_rows(up.reshape(chunks, n))
    vlo, vhi = pack_rows(vp.reshape(chunks, n))
    # every chunk goes through the n-wide unit at once; only the carry of the
    # accumulator from one chunk to the next is sequential
    w = 0
    for partial in dot_planes(ulo, uhi, vlo, vhi).tolist():
        w = (w + partial) & 3
    return w


def lut_chain(u, v, acc=None):
    """Cascade of table-driven MA units over the last axis of ``u`` and ``v``.

    Works on plain digit arrays and broadcasts over leading axes; this is the
    slow reference path, independent of the packed kernels.
    """
    u = np.asarray(u, dtype=np.uint8)
    v = np.asarray(v, dtype=np.uint8)
    shape = np.broadcast_shapes(u.shape, v.shape)[:-1]
    c = np.zeros(shape, dtype=np.uint8) if acc is None else np.asarray(acc, dtype=np.uint8).copy()
    for i in range(u.shape[-1]):
        a = u[..., i]
        b = v[..., i]
        lo = L0[((a & 1) << 2) | ((b & 1) << 1) | (c & 1)]
        hi = L1[(a << 4) | (b << 2) | c]
        c = (hi << 1) | lo
    return c
