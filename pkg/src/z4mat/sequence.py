"""Linear recurring sequences mod 2**s and selection of the uniform candidate.

For admissible coefficients, exactly one of four related recurrences (the
base one, with ``a0 + 2``, with ``a1 + 2``, with both) is expected to be
uniformly distributed.  A candidate whose companion matrix satisfies
``M**(2**(d+1) - 2) == I (mod 4)`` is ruled out.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError
from .gf2poly import check_condition
from .matrix import Z4Matrix, identity, matpow
from .recurrence import RecurrenceSpec

MAX_EMPIRICAL_S = 4
MAX_EMPIRICAL_D = 8

CANDIDATE_SHIFTS = ((0, 0), (2, 0), (0, 2), (2, 2))


def companion(spec: RecurrenceSpec) -> Z4Matrix:
    """Ones on the superdiagonal, ``(a0, ..., a_{d-1})`` on the last row."""
    return Z4Matrix.from_array(companion_array(spec) & 3)


def companion_array(spec: RecurrenceSpec):
    d = spec.d
    m = np.zeros((d, d), dtype=np.int64)
    m[np.arange(d - 1), np.arange(1, d)] = 1
    m[d - 1] = spec.coeffs
    return m


@dataclass(frozen=True)
class CandidateSet:
    specs: tuple

    def __iter__(self):
        return iter(self.specs)

    def __len__(self):
        return len(self.specs)

    def __getitem__(self, i):
        return self.specs[i]

    @property
    def base(self):
        return self.specs[0]


def candidates(spec: RecurrenceSpec) -> CandidateSet:
    if spec.d < 2:
        raise DomainError("candidate set needs d >= 2")
    out = []
    for s0, s1 in CANDIDATE_SHIFTS:
        c = list(spec.coeffs)
        c[0] = (c[0] + s0) % 4
        c[1] = (c[1] + s1) % 4
        out.append(spec.with_coeffs(c))
    return CandidateSet(tuple(out))


def identity_exponent(d):
    return 2 ** (d + 1) - 2


@dataclass(frozen=True)
class CandidateResult:
    index: int
    spec: RecurrenceSpec
    identity_test: bool

    @property
    def survivor(self):
        return not self.identity_test


@dataclass(frozen=True)
class SelectionReport:
    exponent: int
    results: tuple
    admissible: bool

    @property
    def survivors(self):
        return tuple(r for r in self.results if r.survivor)

    @property
    def unique(self):
        return len(self.survivors) == 1

    def table(self):
        lines = [f"{'idx':>3}  {'coefficients':<24}  {'identity':>8}  {'survivor':>8}"]
        for r in self.results:
            coeffs = ",".join(map(str, r.spec.coeffs))
            if len(coeffs) > 24:
                coeffs = coeffs[:21] + "..."
            lines.append(f"{r.index:>3}  {coeffs:<24}  {str(r.identity_test).lower():>8}  "
                         f"{str(r.survivor).lower():>8}")
        lines.append(f"survivors={len(self.survivors)} unique={str(self.unique).lower()}")
        return "\n".join(lines)


def select_uniform(spec: RecurrenceSpec) -> SelectionReport:
    """Run the identity test on all four candidates (always mod 4, whatever ``s``)."""
    if spec.d < 2:
        raise DomainError("candidate selection needs d >= 2")
    admissible = spec.d >= 3 and check_condition(spec).admissible
    if not admissible:
        warnings.warn(f"coefficients {spec.coeffs} are not admissible; "
                      "the identity test is only meaningful for admissible recurrences",
                      stacklevel=2)
    e = identity_exponent(spec.d)
    eye = identity(spec.d)
    results = []
    for i, cand in enumerate(candidates(spec)):
        results.append(CandidateResult(i, cand, matpow(companion(cand), e) == eye))
    return SelectionReport(e, tuple(results), admissible)


def _check_init(spec, init):
    init = [int(x) for x in init]
    if len(init) != spec.d:
        raise DomainError(f"need {spec.d} initial values, got {len(init)}")
    if any(not 0 <= x < spec.modulus for x in init):
        raise DomainError(f"initial values must lie in [0, {spec.modulus})")
    return init


def generate(spec: RecurrenceSpec, init, count):
    """Emit ``u[d], ..., u[d+count-1]`` from ``init = (u[0], ..., u[d-1])``."""
    state = _check_init(spec, init)
    mod = spec.modulus
    a = spec.coeffs
    out = []
    for _ in range(count):
        nxt = sum(x * y for x, y in zip(a, state)) % mod
        out.append(nxt)
        state.append(nxt)
        del state[0]
    return out


def generate_by_matrix(spec: RecurrenceSpec, init, count):
    """Same stream as :func:`generate`, by multiplying the state by the companion matrix."""
    state = np.array(_check_init(spec, init), dtype=np.int64)
    m = companion_array(spec) % spec.modulus
    out = []
    for _ in range(count):
        state = (m @ state) % spec.modulus
        out.append(int(state[-1]))
    return out


def default_init(spec):
    return (0,) * (spec.d - 1) + (1,)


@dataclass(frozen=True)
class EmpiricalReport:
    period: int
    tail: int
    counts: tuple
    uniform: bool
    degenerate: bool


def _step(state, coeffs, mod):
    nxt = sum(x * y for x, y in zip(coeffs, state)) % mod
    return state[1:] + (nxt,), nxt


def empirical_check(spec: RecurrenceSpec, init=None) -> EmpiricalReport:
    """Walk the state sequence around its cycle and tally the emitted values."""
    if spec.s > MAX_EMPIRICAL_S or spec.d > MAX_EMPIRICAL_D:
        raise BudgetError(f"empirical check limited to s <= {MAX_EMPIRICAL_S}, d <= {MAX_EMPIRICAL_D}")
    init = tuple(_check_init(spec, default_init(spec) if init is None else init))
    mod = spec.modulus
    a = spec.coeffs
    degenerate = not any(init)

    if a[0] % 2:
        # the state map is invertible, so the orbit is a pure cycle through init
        start, tail = init, 0
    else:
        start, tail = _find_cycle_entry(init, a, mod)

    counts = [0] * mod
    state, period = start, 0
    while True:
        state, v = _step(state, a, mod)
        counts[v] += 1
        period += 1
        if state == start:
            break
    uniform = len(set(counts)) == 1
    return EmpiricalReport(period, tail, tuple(counts), uniform, degenerate)


def _find_cycle_entry(init, a, mod):
    # Brent: find the cycle length, then the first state on the cycle
    power = lam = 1
    tortoise = init
    hare, _ = _step(init, a, mod)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare, _ = _step(hare, a, mod)
        lam += 1
    tortoise = hare = init
    for _ in range(lam):
        hare, _ = _step(hare, a, mod)
    mu = 0
    while tortoise != hare:
        tortoise, _ = _step(tortoise, a, mod)
        hare, _ = _step(hare, a, mod)
        mu += 1
    return tortoise, mu


__all__ = [
    "RecurrenceSpec", "CandidateSet", "CandidateResult", "SelectionReport", "EmpiricalReport",
    "companion", "companion_array", "candidates", "select_uniform", "identity_exponent",
    "generate", "generate_by_matrix", "empirical_check", "default_init",
]
