"""Seven-product block recursion over Z4.

    C11 = -D2 + D4 + D5 + D6        C12 = D1 + D2
    C21 =  D3 + D4                  C22 = D1 - D3 + D5 - D7

    D1 = A11 (B12 - B22)            D5 = (A11 + A22)(B11 + B22)
    D2 = (A11 + A12) B22            D6 = (A12 - A22)(B21 + B22)
    D3 = (A21 + A22) B11            D7 = (A11 - A21)(B11 + B12)
    D4 = A22 (B21 - B11)

Z4 has exact additive inverses, so the subtractions need no sign tracking.
The recursion runs on uint8 digit arrays; ``(x - y) & 3`` is correct under
uint8 wrap-around because 256 is a multiple of 4.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .matrix import DESIGN_BLOCK, Z4Matrix, mul_blocked, mul_naive_digits


@dataclass(frozen=True)
class StrassenConfig:
    threshold: int = 64
    base: str = "naive"  # or "blocked"

    def __post_init__(self):
        if self.threshold < 1:
            raise DomainError("threshold must be >= 1")
        if self.base not in ("naive", "blocked"):
            raise DomainError(f"unknown base multiplier {self.base!r}")


@dataclass
class RecursionStats:
    """Products issued by internal nodes, keyed by recursion level."""

    products: Counter = field(default_factory=Counter)
    nodes: Counter = field(default_factory=Counter)
    leaves: int = 0

    def products_per_node(self):
        return {lvl: self.products[lvl] / self.nodes[lvl] for lvl in self.nodes}


def padded_size(k, threshold):
    size = threshold
    while size < k:
        size *= 2
    return size


def _base_product(a, b, base):
    if a.shape[0] == 1:
        return (a * b) & 3
    if base == "blocked":
        return mul_blocked(Z4Matrix.from_array(a), Z4Matrix.from_array(b), DESIGN_BLOCK).to_array()
    return mul_naive_digits(a, b)


class _Recursion:
    def __init__(self, size, cfg, stats):
        self.cfg = cfg
        self.stats = stats
        # one set of operand/product buffers per level, shared by all nodes on it
        self.scratch = []
        m = size
        while m > cfg.threshold:
            h = m // 2
            self.scratch.append(tuple(np.empty((h, h), dtype=np.uint8) for _ in range(3)))
            m = h

    def strassen(self, a, b, out, level=0):
        m = a.shape[0]
        if m <= self.cfg.threshold:
            out[...] = _base_product(a, b, self.cfg.base)
            if self.stats is not None:
                self.stats.leaves += 1
            return
        h = m // 2
        sa, sb, d = self.scratch[level]
        a11, a12, a21, a22 = a[:h, :h], a[:h, h:], a[h:, :h], a[h:, h:]
        b11, b12, b21, b22 = b[:h, :h], b[:h, h:], b[h:, :h], b[h:, h:]
        c11, c12, c21, c22 = out[:h, :h], out[:h, h:], out[h:, :h], out[h:, h:]

        def product(x, y):
            self.strassen(x, y, d, level + 1)
            if self.stats is not None:
                self.stats.products[level] += 1

        def acc(target, sign):
            if sign > 0:
                np.add(target, d, out=target)
            else:
                np.subtract(target, d, out=target)
            np.bitwise_and(target, 3, out=target)

        def combine(x, y, sign, dst):
            if sign > 0:
                np.add(x, y, out=dst)
            else:
                np.subtract(x, y, out=dst)
            np.bitwise_and(dst, 3, out=dst)
            return dst

        if self.stats is not None:
            self.stats.nodes[level] += 1
        out[...] = 0

        product(a11, combine(b12, b22, -1, sb))          # D1
        acc(c12, +1)
        acc(c22, +1)
        product(combine(a11, a12, +1, sa), b22)          # D2
        acc(c11, -1)
        acc(c12, +1)
        product(combine(a21, a22, +1, sa), b11)          # D3
        acc(c21, +1)
        acc(c22, -1)
        product(a22, combine(b21, b11, -1, sb))          # D4
        acc(c11, +1)
        acc(c21, +1)
        product(combine(a11, a22, +1, sa), combine(b11, b22, +1, sb))  # D5
        acc(c11, +1)
        acc(c22, +1)
        product(combine(a12, a22, -1, sa), combine(b21, b22, +1, sb))  # D6
        acc(c11, +1)
        product(combine(a11, a21, -1, sa), combine(b11, b12, +1, sb))  # D7
        acc(c22, -1)

    def classical(self, a, b, out, level=0):
        """Eight-product recursion with the same padding; a control for counting."""
        m = a.shape[0]
        if m <= self.cfg.threshold:
            out[...] = _base_product(a, b, self.cfg.base)
            if self.stats is not None:
                self.stats.leaves += 1
            return
        h = m // 2
        d = np.empty((h, h), dtype=np.uint8)
        if self.stats is not None:
            self.stats.nodes[level] += 1
        for i in (0, 1):
            for j in (0, 1):
                tgt = out[i * h:(i + 1) * h, j * h:(j + 1) * h]
                tgt[...] = 0
                for l in (0, 1):
                    self.classical(a[i * h:(i + 1) * h, l * h:(l + 1) * h],
                                   b[l * h:(l + 1) * h, j * h:(j + 1) * h], d, level + 1)
                    if self.stats is not None:
                        self.stats.products[level] += 1
                    np.add(tgt, d, out=tgt)
                    np.bitwise_and(tgt, 3, out=tgt)


def _run(a, b, cfg, stats, method):
    if a.shape != b.shape or a.rows != a.cols:
        raise DimensionError(f"Strassen needs equal square operands, got {a.shape} and {b.shape}")
    k = a.rows
    if k == 0:
        return Z4Matrix(0, 0)
    size = padded_size(k, cfg.threshold)
    ap = np.zeros((size, size), dtype=np.uint8)
    bp = np.zeros((size, size), dtype=np.uint8)
    ap[:k, :k] = a.to_array()
    bp[:k, :k] = b.to_array()
    out = np.empty((size, size), dtype=np.uint8)
    rec = _Recursion(size, cfg, stats)
    getattr(rec, method)(ap, bp, out)
    return Z4Matrix.from_array(out[:k, :k])


def mul_strassen(a: Z4Matrix, b: Z4Matrix, cfg: StrassenConfig = StrassenConfig(),
                 stats: RecursionStats = None) -> Z4Matrix:
    """Product of square ``a`` and ``b`` by seven-product recursion.

    Operands are zero-padded to ``threshold * 2**m``; blocks at or below the
    threshold go to the base multiplier.
    """
    return _run(a, b, cfg, stats, "strassen")


def mul_recursive8(a: Z4Matrix, b: Z4Matrix, cfg: StrassenConfig = StrassenConfig(),
                   stats: RecursionStats = None) -> Z4Matrix:
    return _run(a, b, cfg, stats, "classical")
