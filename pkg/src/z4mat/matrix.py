"""Z4 matrices on bit-planes: elementwise ops, products and powers."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .z4core import WORD, dot_planes, lane_window, pack_rows, unpack_rows, words_for


class Z4Matrix:
    """A ``rows x cols`` matrix over Z4.

    ``lo`` and ``hi`` are ``(rows, words)`` uint64 arrays; each row starts on a
    word boundary and the bits past ``cols`` in its last word are zero.
    """

    __slots__ = ("rows", "cols", "lo", "hi")

    def __init__(self, rows, cols, lo=None, hi=None):
        if rows < 0 or cols < 0:
            raise DimensionError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        shape = (rows, words_for(cols))
        self.lo = np.zeros(shape, dtype=np.uint64) if lo is None else lo
        self.hi = np.zeros(shape, dtype=np.uint64) if hi is None else hi
        if self.lo.shape != shape or self.hi.shape != shape:
            raise DimensionError(f"plane shape {self.lo.shape} does not match {shape}")

    @classmethod
    def zeros(cls, rows, cols=None):
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def from_array(cls, arr):
        a = np.asarray(arr)
        if a.ndim != 2:
            raise DimensionError("expected a 2-D array")
        if a.size and (a.min() < 0 or a.max() > 3):
            raise DomainError("matrix entries must lie in {0,1,2,3}")
        lo, hi = pack_rows(a.astype(np.uint8))
        return cls(a.shape[0], a.shape[1], lo, hi)

    def to_array(self):
        return unpack_rows(self.lo, self.hi, self.cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def copy(self):
        return Z4Matrix(self.rows, self.cols, self.lo.copy(), self.hi.copy())

    def _locate(self, i, j):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DimensionError(f"index ({i}, {j}) outside {self.rows}x{self.cols}")
        w, b = divmod(j, WORD)
        return w, np.uint64(b)

    def get(self, i, j):
        w, b = self._locate(i, j)
        one = np.uint64(1)
        return int((self.hi[i, w] >> b) & one) << 1 | int((self.lo[i, w] >> b) & one)

    def set(self, i, j, v):
        if not 0 <= v < 4:
            raise DomainError(f"{v} is not a Z4 digit")
        w, b = self._locate(i, j)
        bit = np.uint64(1) << b
        for plane, on in ((self.lo, v & 1), (self.hi, v >> 1)):
            if on:
                plane[i, w] |= bit
            else:
                plane[i, w] &= ~bit

    def __getitem__(self, ij):
        return self.get(*ij)

    def __setitem__(self, ij, v):
        self.set(*ij, v)

    def transpose(self):
        return Z4Matrix.from_array(self.to_array().T)

    def resized(self, rows, cols):
        """Top-left crop or zero-pad to ``rows x cols``."""
        out = np.zeros((rows, cols), dtype=np.uint8)
        r, c = min(rows, self.rows), min(cols, self.cols)
        out[:r, :c] = self.to_array()[:r, :c]
        return Z4Matrix.from_array(out)

    def __eq__(self, other):
        if not isinstance(other, Z4Matrix):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __matmul__(self, other):
        return mul_naive(self, other)

    def __repr__(self):
        if self.rows * self.cols <= 64:
            body = "/".join("".join(map(str, r)) for r in self.to_array())
            return f"Z4Matrix({self.rows}x{self.cols}: {body})"
        return f"Z4Matrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class BlockParams:
    """Output tile edge, dot-unit width and container depth."""

    block: int = 20
    n: int = 28
    depth: int = 32

    def __post_init__(self):
        if self.block < 1 or self.n < 1 or self.depth < 1:
            raise DomainError(f"block parameters must be >= 1: {self}")


DESIGN_BLOCK = BlockParams(20, 28, 32)


def identity(k):
    return Z4Matrix.from_array(np.eye(k, dtype=np.uint8))


def _same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def add(a: Z4Matrix, b: Z4Matrix) -> Z4Matrix:
    _same_shape(a, b)
    lo = a.lo ^ b.lo
    hi = a.hi ^ b.hi ^ (a.lo & b.lo)
    return Z4Matrix(a.rows, a.cols, lo, hi)


def neg(a: Z4Matrix) -> Z4Matrix:
    # -(2h + l) = 2(h ^ l) + l  (mod 4)
    return Z4Matrix(a.rows, a.cols, a.lo.copy(), a.hi ^ a.lo)


def sub(a: Z4Matrix, b: Z4Matrix) -> Z4Matrix:
    _same_shape(a, b)
    return add(a, neg(b))


def mul_naive(a: Z4Matrix, b: Z4Matrix) -> Z4Matrix:
    """Each output entry is one packed dot of a row of ``a`` with a column of ``b``."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    bt = b.transpose()
    return Z4Matrix.from_array(_rows_by_columns(a.lo, a.hi, bt.lo, bt.hi))


def _rows_by_columns(alo, ahi, btlo, bthi):
    out = np.empty((alo.shape[0], btlo.shape[0]), dtype=np.uint8)
    for i in range(alo.shape[0]):
        out[i] = dot_planes(alo[i], ahi[i], btlo, bthi)
    return out


def mul_naive_digits(a, b):
    """:func:`mul_naive` on plain digit arrays, skipping the matrix wrapper."""
    alo, ahi = pack_rows(a)
    btlo, bthi = pack_rows(np.ascontiguousarray(np.asarray(b).T))
    return _rows_by_columns(alo, ahi, btlo, bthi)


def mul_blocked(a: Z4Matrix, b: Z4Matrix, p: BlockParams = DESIGN_BLOCK) -> Z4Matrix:
    """Tile-by-tile product mirroring the hardware dataflow.

    Both operands are zero-padded to a multiple of ``p.block``.  Every
    ``block x block`` output tile takes its ``block`` rows of ``a`` and
    ``block`` columns of ``b`` and streams them through the dot units ``p.n``
    lanes per activation, carrying the partial sums from one activation to the
    next; then the padding is cut away.

    Padding goes to a multiple of the tile edge, not of ``n``: the tile loop
    walks ``block * kappa`` rows, and a ``kappa * n`` side only matches that
    when ``n == block``.
    """
    if a.shape != b.shape or a.rows != a.cols:
        raise DimensionError(f"blocked product needs equal square operands, got {a.shape} and {b.shape}")
    k = a.rows
    if k == 0:
        return Z4Matrix(0, 0)
    blk = p.block
    tiles = -(-k // blk)
    size = tiles * blk
    ap = a.resized(size, size)
    bt = b.transpose().resized(size, size)
    activations = -(-size // p.n)
    windows = [lane_window(c * p.n, min((c + 1) * p.n, size)) for c in range(activations)]
    out = np.empty((size, size), dtype=np.uint8)
    for ti in range(tiles):
        rlo = ap.lo[ti * blk:(ti + 1) * blk, None, :]
        rhi = ap.hi[ti * blk:(ti + 1) * blk, None, :]
        for tj in range(tiles):
            clo = bt.lo[None, tj * blk:(tj + 1) * blk, :]
            chi = bt.hi[None, tj * blk:(tj + 1) * blk, :]
            acc = np.zeros((blk, blk), dtype=np.uint8)
            for ws, mask in windows:
                acc = (acc + dot_planes(rlo[..., ws] & mask, rhi[..., ws] & mask,
                                        clo[..., ws], chi[..., ws])) & 3
            out[ti * blk:(ti + 1) * blk, tj * blk:(tj + 1) * blk] = acc
    return Z4Matrix.from_array(out[:k, :k])


def matpow(m: Z4Matrix, e: int, mul=mul_naive) -> Z4Matrix:
    """``m**e`` by left-to-right square-and-multiply; ``e`` may be any size."""
    if m.rows != m.cols:
        raise DimensionError(f"matrix power needs a square matrix, got {m.shape}")
    e = int(e)
    if e < 0:
        raise DomainError("exponent must be non-negative")
    result = identity(m.rows)
    for bit in bin(e)[2:] if e else "":
        result = mul(result, result)
        if bit == "1":
            result = mul(result, m)
    return result


def random_matrix(rows, cols=None, rng=None):
    rng = np.random.default_rng(rng)
    cols = rows if cols is None else cols
    return Z4Matrix.from_array(rng.integers(0, 4, size=(rows, cols), dtype=np.uint8))


__all__ = [
    "Z4Matrix", "BlockParams", "DESIGN_BLOCK", "identity", "add", "sub", "neg",
    "mul_naive", "mul_naive_digits", "mul_blocked", "matpow", "random_matrix",
]
