"""Bit-sliced arithmetic over Z4: matrix products and powers, uniform
recurrence selection, and a cost model of a tiled FPGA multiplier."""

from .errors import (BudgetError, DataReadyError, DimensionError, DomainError, FormatError,
                     Z4Error)
from .gf2poly import Gf2Poly, char_poly_mod2, check_condition, divrem, is_irreducible, order
from .matrix import (BlockParams, Z4Matrix, add, identity, matpow, mul_blocked, mul_naive,
                     random_matrix, sub)
from .recurrence import RecurrenceSpec
from .schedule import (DESIGN_PARAMS, ScheduleParams, ScheduleReport, TestGenState, cost_model,
                       simulate, staggered_selftest, testgen_next)
from .sequence import (candidates, companion, empirical_check, generate, select_uniform)
from .strassen import StrassenConfig, mul_strassen
from .z4core import PackedZ4Vector, dot, dot_iterated, ma, ma_packed

__version__ = "0.1.0"
