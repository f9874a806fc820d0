"""Polynomials over GF(2) and the admissibility test for recurrence coefficients.

A polynomial is an int bitset: bit ``i`` is the coefficient of ``x**i``.
"""

from dataclasses import dataclass
from functools import total_ordering
from typing import Optional

from .errors import DomainError
from .recurrence import RecurrenceSpec

ORDER_DEGREE_CAP = 24


@total_ordering
class _MinusInfinity:
    """Degree of the zero polynomial.  Compares below every int; no arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf-degree")

    def __repr__(self):
        return "-inf"


MINUS_INF = _MinusInfinity()


@dataclass(frozen=True)
class Gf2Poly:
    bits: int = 0

    def __post_init__(self):
        if self.bits < 0:
            raise DomainError("coefficient bitset must be non-negative")

    @classmethod
    def from_exponents(cls, *exps):
        bits = 0
        for e in exps:
            bits ^= 1 << e
        return cls(bits)

    @property
    def degree(self):
        return self.bits.bit_length() - 1 if self.bits else MINUS_INF

    def is_zero(self):
        return self.bits == 0

    def __add__(self, other):
        return Gf2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other):
        return Gf2Poly(_clmul(self.bits, other.bits))

    def __mod__(self, other):
        return divrem(self, other)[1]

    def __floordiv__(self, other):
        return divrem(self, other)[0]

    def __bool__(self):
        return self.bits != 0

    def __str__(self):
        if not self.bits:
            return "0"
        terms = []
        for i in range(self.bits.bit_length() - 1, -1, -1):
            if self.bits >> i & 1:
                terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
        return "+".join(terms)


X = Gf2Poly(0b10)
ONE = Gf2Poly(1)
X_PLUS_1_SQUARED = Gf2Poly(0b101)  # (x+1)^2 = x^2+1 over GF(2)


def _clmul(a, b):
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def _divmod_bits(a, b):
    db = b.bit_length() - 1
    q = 0
    while a and a.bit_length() - 1 >= db:
        shift = a.bit_length() - 1 - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


def _mulmod(a, b, m):
    return _divmod_bits(_clmul(a, b), m)[1]


def _powmod(a, e, m):
    r = 1
    a = _divmod_bits(a, m)[1]
    while e:
        if e & 1:
            r = _mulmod(r, a, m)
        a = _mulmod(a, a, m)
        e >>= 1
    return _divmod_bits(r, m)[1]


def _gcd(a, b):
    while b:
        a, b = b, _divmod_bits(a, b)[1]
    return a


def divrem(a: Gf2Poly, b: Gf2Poly):
    """Return ``(q, r)`` with ``a = q*b + r`` and ``deg r < deg b``."""
    if b.is_zero():
        raise DomainError("division by the zero polynomial")
    q, r = _divmod_bits(a.bits, b.bits)
    return Gf2Poly(q), Gf2Poly(r)


def char_poly_mod2(spec: RecurrenceSpec) -> Gf2Poly:
    """``x^d - a[d-1] x^(d-1) - ... - a0`` reduced mod 2."""
    bits = 1 << spec.d
    for i, a in enumerate(spec.coeffs):
        if a & 1:
            bits |= 1 << i
    return Gf2Poly(bits)


def is_irreducible(p: Gf2Poly) -> bool:
    """Ben-Or test: ``gcd(x^(2^i) - x, p) = 1`` for ``i = 1 .. deg(p)//2``."""
    if p.is_zero() or p.degree < 1:
        raise DomainError("irreducibility is undefined for constant polynomials")
    n = p.degree
    m = p.bits
    xp = 0b10
    for _ in range(n // 2):
        xp = _mulmod(xp, xp, m)
        if _gcd(m, xp ^ 0b10) != 1:
            return False
    return True


@dataclass(frozen=True)
class ConditionReport:
    admissible: bool
    P: Optional[Gf2Poly]
    char_poly: Gf2Poly
    remainder: Gf2Poly


def check_condition(spec: RecurrenceSpec) -> ConditionReport:
    """Does the characteristic polynomial factor as ``(x+1)^2 P(x)`` with P irreducible?

    ``P = x+1`` is accepted and reported; excluding it is left to the caller.
    """
    if spec.d < 3:
        raise DomainError("the admissibility test needs d >= 3")
    f = char_poly_mod2(spec)
    q, r = divrem(f, X_PLUS_1_SQUARED)
    ok = r.is_zero() and is_irreducible(q)
    return ConditionReport(ok, q if ok else None, f, r)


def _prime_factors(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def order(p: Gf2Poly) -> int:
    """Smallest ``e >= 1`` with ``x^e = 1 (mod p)`` for irreducible ``p != x``.

    The order of an irreducible polynomial divides ``2^deg - 1``; it is found
    by stripping prime factors from that bound.  Degrees above 24 are refused.
    """
    if p.is_zero() or p.degree < 1:
        raise DomainError("order needs a non-constant polynomial")
    if p == X:
        raise DomainError("x has no multiplicative order modulo itself")
    if p.degree > ORDER_DEGREE_CAP:
        raise DomainError(f"degree {p.degree} exceeds the desk-scale cap of {ORDER_DEGREE_CAP}")
    if not is_irreducible(p):
        raise DomainError(f"{p} is not irreducible")
    e = (1 << p.degree) - 1
    for q in _prime_factors(e):
        while e % q == 0 and _powmod(0b10, e // q, p.bits) == 1:
            e //= q
    return e


def is_maximal(p: Gf2Poly) -> bool:
    return order(p) == (1 << p.degree) - 1
