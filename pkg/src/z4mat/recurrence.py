"""Linear recurrence description shared by the polynomial and sequence code."""

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class RecurrenceSpec:
    """``u[n] = a[d-1]*u[n-1] + ... + a[0]*u[n-d]  (mod 2**s)``.

    ``coeffs`` is ``(a0, a1, ..., a_{d-1})``; every coefficient is a Z4 digit.
    """

    coeffs: tuple
    s: int = 2

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not coeffs:
            raise DomainError("recurrence order d must be >= 1")
        if any(not 0 <= a < 4 for a in coeffs):
            raise DomainError(f"coefficients must lie in {{0,1,2,3}}: {coeffs}")
        if self.s < 1:
            raise DomainError("modulus exponent s must be >= 1")

    @property
    def d(self):
        return len(self.coeffs)

    @property
    def modulus(self):
        return 1 << self.s

    def with_coeffs(self, coeffs):
        return RecurrenceSpec(tuple(coeffs), self.s)
