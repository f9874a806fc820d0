"""Memory/compute overlap model of the tiled multiplier, and its self-test harness.

Quantities, all in fabric clock cycles:

* ``kappa = ceil(k / block)``: matrix edge counted in tiles.
* ``K``: number of container fills (one fill = ``block`` rows or columns).
* ``Phi = K*delta + kappa*delta``: total memory time, the second term being
  the write-back of the result.
* ``Gamma = depth * kappa**2``: total compute time.

The improved schedule keeps ``z`` row-stores and two column-stores.  Each
macro-step runs ``z - 1`` tile computations against one column-store while the
idle column-store takes the next ``block`` columns and the idle row-store takes
``(z - 1) * block / kappa`` more rows.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DataReadyError, DomainError
from .z4core import dot_planes, lut_chain, pack_rows


@dataclass(frozen=True)
class ScheduleParams:
    n: int
    depth: int
    k: int
    z: int
    delta: int
    block: int = 20


DESIGN_PARAMS = ScheduleParams(n=28, depth=32, k=896, z=10, delta=140, block=20)


def _num(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


@dataclass
class StepRecord:
    step: int
    compute: object
    memory: object
    rowstore: str
    colstore: str

    def line(self):
        return (f"step={self.step} compute={self.compute} memory={self.memory} "
                f"rowstore={self.rowstore} colstore={self.colstore}")


@dataclass
class ScheduleReport:
    params: ScheduleParams
    kappa: int
    K_naive: int
    K_improved: object
    Phi_naive: int
    Phi_improved: object
    Gamma: int
    feasible: bool
    reasons: tuple = ()
    simulated_cycles: Optional[object] = None
    row_fills: Optional[int] = None
    col_fills: Optional[int] = None
    prologue_cycles: Optional[int] = None
    violations: Optional[int] = None
    tiles_computed_once: Optional[bool] = None
    trace: list = field(default_factory=list, repr=False)

    @property
    def memory_bound_margin(self):
        """``Gamma - Phi_improved``; negative when memory is the bottleneck."""
        return _num(self.Gamma - self.Phi_improved)

    def table(self):
        rows = [
            ("kappa", self.kappa),
            ("K_naive", self.K_naive),
            ("K_improved", self.K_improved),
            ("Phi_naive", self.Phi_naive),
            ("Phi_improved", self.Phi_improved),
            ("Gamma", self.Gamma),
            ("margin", self.memory_bound_margin),
            ("feasible", str(self.feasible).lower()),
        ]
        if self.simulated_cycles is not None:
            rows += [
                ("simulated_cycles", self.simulated_cycles),
                ("row_fills", self.row_fills),
                ("col_fills", self.col_fills),
                ("prologue_cycles", self.prologue_cycles),
                ("violations", self.violations),
            ]
        lines = [f"{name:<18}{str(value):>14}" for name, value in rows]
        lines += [f"reason: {r}" for r in self.reasons]
        return "\n".join(lines)


def _structural_problems(p):
    out = []
    if min(p.n, p.depth, p.k, p.block) < 1:
        out.append("n, depth, k and block must all be >= 1")
        return out
    if p.z < 2:
        out.append(f"z={p.z}: need at least two row-stores")
    if p.delta < 1:
        out.append(f"delta={p.delta}: fill time must be >= 1")
    if -(-p.k // p.n) > p.depth:
        out.append(f"a row of {p.k} digits needs {-(-p.k // p.n)} activations, "
                   f"containers hold {p.depth}")
    kappa = -(-p.k // p.block)
    if p.z >= 2 and kappa % (p.z - 1):
        out.append(f"(z-1)={p.z - 1} does not divide kappa={kappa}")
    return out


def cost_model(p: ScheduleParams) -> ScheduleReport:
    """Closed-form fill counts and times for the naive and improved schedules."""
    kappa = -(-p.k // p.block) if p.block >= 1 else 0
    reasons = _structural_problems(p)
    K_naive = kappa * kappa + kappa
    if p.z >= 2:
        K_improved = _num(Fraction(kappa * kappa, p.z - 1) + kappa)
    else:
        K_improved = K_naive
    Phi_naive = K_naive * p.delta + kappa * p.delta
    Phi_improved = _num(K_improved * p.delta + kappa * p.delta)
    Gamma = p.depth * kappa * kappa
    if Gamma < Phi_improved:
        reasons.append(f"memory time {Phi_improved} exceeds compute time {Gamma}")
    return ScheduleReport(p, kappa, K_naive, K_improved, Phi_naive, Phi_improved, Gamma,
                          feasible=not reasons, reasons=tuple(reasons))


def simulate(p: ScheduleParams, stall: bool = True) -> ScheduleReport:
    """Step the improved schedule macro-step by macro-step.

    Every tile computation checks that its row-store and column-store are
    full.  Loads run concurrently with the computation; with ``stall=True`` a
    macro-step lasts until both finish, with ``stall=False`` the compute clock
    never waits and an unfinished load surfaces as :class:`DataReadyError` in
    the step that needs it.

    The initial row-store and column-store loads form a prologue reported on
    its own.  The loads issued during the last macro-steps wrap around to the
    first tiles, which is exactly the prologue of a following product, so a
    chain of products (as in a matrix power) pays it once.
    """
    report = cost_model(p)
    problems = [r for r in report.reasons if not r.startswith("memory time")]
    if problems:
        raise DomainError("; ".join(problems))

    kappa, z, blk = report.kappa, p.z, p.block
    steps = kappa * kappa // (z - 1)
    per_swap = kappa // (z - 1)  # macro-steps between row-store swaps
    rows_per_step = Fraction(blk, per_swap)

    compute = (z - 1) * p.depth
    memory = p.delta + Fraction(p.delta, per_swap) + Fraction(kappa * p.delta, steps)
    done = Fraction(1) if stall or memory <= compute else Fraction(compute) / memory

    row_tile = list(range(z - 1)) + [(z - 1) % kappa]
    row_fill = [Fraction(blk)] * (z - 1) + [Fraction(0)]
    active_rows = deque(range(z - 1))
    idle_row = z - 1
    next_row_tile = z % kappa

    col_tile = [0, 1 % kappa]
    col_fill = [Fraction(blk), Fraction(0)]
    active_col = 0

    coverage = np.zeros((kappa, kappa), dtype=np.int64)
    row_fills = col_fills = 0
    total = Fraction(0)
    trace = []

    for i in range(steps):
        j = i % kappa
        if col_tile[active_col] != j or col_fill[active_col] != blk:
            raise DataReadyError(i, f"column-store {active_col} holds {col_fill[active_col]} of "
                                    f"{blk} columns of tile {col_tile[active_col]}, need tile {j}")
        for st in active_rows:
            if row_fill[st] != blk:
                raise DataReadyError(i, f"row-store {st} holds {row_fill[st]} of {blk} rows")
            coverage[row_tile[st], j] += 1

        idle_col = 1 - active_col
        col_fill[idle_col] += blk * done
        row_fill[idle_row] += rows_per_step * done
        cycles = max(compute, memory) if stall else compute
        total += cycles
        trace.append(StepRecord(
            i, _num(compute), _num(memory),
            "".join("0" if s == idle_row else "1" for s in range(z)),
            "".join("1" if s == active_col else "0" for s in range(2)),
        ))

        if col_fill[idle_col] == blk:
            col_fills += 1
        col_tile[active_col] = (i + 2) % kappa
        col_fill[active_col] = Fraction(0)
        active_col = idle_col

        if (i + 1) % per_swap == 0:
            if row_fill[idle_row] == blk:
                row_fills += 1
            retired = active_rows.popleft()
            active_rows.append(idle_row)
            idle_row = retired
            row_tile[retired] = next_row_tile
            row_fill[retired] = Fraction(0)
            next_row_tile = (next_row_tile + 1) % kappa

    report.simulated_cycles = _num(total)
    report.row_fills = row_fills
    report.col_fills = col_fills
    report.prologue_cycles = z * p.delta
    report.violations = 0
    report.tiles_computed_once = bool((coverage == 1).all())
    report.trace = trace
    return report


# ---------------------------------------------------------------- test data


class TestGenState:
    """``D[i] = D[i-1] + D[i-2] + 2 D[i-4] + D[i-5]  (mod 4)``, seeded 0,0,0,0,1."""

    __test__ = False  # not a pytest class

    def __init__(self, history=(0, 0, 0, 0, 1)):
        if len(history) != 5 or any(not 0 <= h < 4 for h in history):
            raise DomainError("history must be five Z4 digits")
        self.buf = deque(history, maxlen=5)
        self.index = 4

    def next(self):
        b = self.buf
        v = (b[4] + b[3] + 2 * b[1] + b[0]) & 3
        b.append(v)
        self.index += 1
        return v

    def skip(self, count):
        self.draw(count)
        return self

    def draw(self, count):
        """The next ``count`` values as an array.

        The state space has only 4**5 points, so the orbit is found once and
        tiled instead of stepping value by value.
        """
        st = tuple(self.buf)
        seen, states, vals = {}, [], []
        while len(vals) < count and st not in seen:
            seen[st] = len(vals)
            states.append(st)
            v = (st[4] + st[3] + 2 * st[1] + st[0]) & 3
            vals.append(v)
            st = st[1:] + (v,)
        if len(vals) < count:
            mu = seen[st]
            lam = len(vals) - mu
            out = np.concatenate([np.array(vals, dtype=np.uint8),
                                  np.resize(np.array(vals[mu:], dtype=np.uint8), count - len(vals))])
            st = states[mu + (count - mu) % lam]
        else:
            out = np.array(vals, dtype=np.uint8)
        self.buf = deque(st, maxlen=5)
        self.index += count
        return out


def testgen_next(state: TestGenState) -> int:
    return state.next()


testgen_next.__test__ = False


def testgen_matrix(rows, cols=None, skip=0):
    """A matrix filled row-major from the test-data sequence after ``skip`` draws."""
    from .matrix import Z4Matrix

    cols = rows if cols is None else cols
    gen = TestGenState().skip(skip)
    return Z4Matrix.from_array(gen.draw(rows * cols).reshape(rows, cols))


# ---------------------------------------------------------------- self-test


def packed_subject(u, v):
    """Fast path under test: bit-sliced dot of each row pair."""
    ulo, uhi = pack_rows(u)
    vlo, vhi = pack_rows(v)
    return dot_planes(ulo, uhi, vlo, vhi)


def lost_carry_subject(u, v):
    """A subject whose last MA stage drops the carry from the low bit."""
    head = packed_subject(u[:, :-1], v[:, :-1]) if u.shape[1] > 1 else np.zeros(len(u), np.uint8)
    a, b = u[:, -1], v[:, -1]
    p0 = a & b & 1
    p1 = ((a >> 1) & b ^ a & (b >> 1)) & 1
    c0 = p0 ^ (head & 1)
    c1 = p1 ^ (head >> 1)
    return (c1 << 1 | c0).astype(np.uint8)


@dataclass(frozen=True)
class SelfTestReport:
    width: int
    rounds: int
    errors: int


def staggered_selftest(n: int, rounds: int, inject_fault: bool = False, subject=None,
                       batch: int = 8192) -> SelfTestReport:
    """One subject checked every clock against ten examiners on rotating data.

    At clock ``i`` with ``p = i mod 10``: the subject's output is compared to
    examiner ``p``; examiner ``p - 1`` receives fresh test vectors; the subject
    receives the vectors examiner ``p + 1`` is holding.  Examiners run the
    table-driven MA cascade, the subject the packed kernel (or ``subject``).
    Each fresh pair ``(u, v)`` takes ``2n`` consecutive generator values.
    """
    if n < 1:
        raise DomainError("width n must be >= 1")
    if rounds < 10:
        raise DomainError("need at least 10 rounds for a full examiner rotation")
    if subject is None:
        subject = lost_carry_subject if inject_fault else packed_subject
    gen = TestGenState()

    def fresh(count):
        data = gen.draw(count * 2 * n).reshape(count, 2, n)
        u, v = data[:, 0], data[:, 1]
        return lut_chain(u, v).tolist(), np.asarray(subject(u, v), dtype=np.uint8).tolist()

    ex_out, ex_subject = fresh(10)
    s_out = ex_subject[1]
    errors = 0
    pending_ex, pending_s, cursor = [], [], 0
    for i in range(1, rounds + 1):
        p = i % 10
        if s_out != ex_out[p]:
            errors += 1
        if cursor == len(pending_ex):
            pending_ex, pending_s = fresh(min(batch, rounds - i + 1))
            cursor = 0
        slot = (p - 1) % 10
        ex_out[slot] = pending_ex[cursor]
        ex_subject[slot] = pending_s[cursor]
        cursor += 1
        s_out = ex_subject[(p + 1) % 10]
    return SelfTestReport(n, rounds, errors)
