"""Exception hierarchy shared by all z4mat modules."""


class Z4Error(Exception):
    """Base class for every error raised by z4mat."""


class DimensionError(Z4Error, ValueError):
    """Operand shapes or lengths do not fit together."""


class DomainError(Z4Error, ValueError):
    """An argument lies outside the domain of the operation."""


class BudgetError(DomainError):
    """A desk-scale computation was asked to exceed its size bound."""


class FormatError(Z4Error, ValueError):
    """A matrix file is malformed."""


class DataReadyError(Z4Error, RuntimeError):
    """A schedule step found an operand container that was not yet full."""

    def __init__(self, step, detail):
        super().__init__(f"data-ready violation at macro-step {step}: {detail}")
        self.step = step
        self.detail = detail
