"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by stabletrace."""


class StructuralError(LabError, ValueError):
    """Operands have incompatible shapes (rank mismatch and the like)."""


class EvaluationError(LabError, ArithmeticError):
    """A substitution hit a non-invertible coordinate."""


class UnsupportedError(LabError, NotImplementedError):
    """Requested root system, rank or place is outside what is built."""


class PrecisionError(LabError, ArithmeticError):
    """A p-adic quantity is not known to enough digits for the request."""


class NotRegularError(LabError, ArithmeticError):
    """The discriminant vanishes at working precision."""


class ModelDegreeError(LabError, ValueError):
    """An interpolant disagrees with a held-out data point."""


class ParameterError(LabError, ValueError):
    """Parameters violate an operation's precondition."""


class FalsificationError(LabError, AssertionError):
    """A verified identity failed; ``report`` carries the evidence."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
