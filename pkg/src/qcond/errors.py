"""Exception hierarchy shared by the kernel, state and entropy layers."""


class QcondError(Exception):
    """Base class for all library errors."""


class NotSquare(QcondError, ValueError):
    pass


class NotHermitian(QcondError, ValueError):
    pass


class DomainError(QcondError, ValueError):
    pass


class DimMismatch(QcondError, ValueError):
    pass


class EmptyKeep(QcondError, ValueError):
    pass


class NormError(QcondError, ValueError):
    pass


class LimitExceeded(QcondError, ValueError):
    pass


class DuplicateIndex(QcondError, ValueError):
    pass


class LabelClash(QcondError, ValueError):
    pass


class UnknownLabel(QcondError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class PartitionError(QcondError, ValueError):
    pass


class PositivityError(QcondError, ValueError):
    pass


class SupportError(QcondError, ValueError):
    pass


class ArakiLiebViolation(QcondError, ArithmeticError):
    """Raised when S(A:B) > 2 min(S(A), S(B)); always a numerical fault."""


class ParseError(QcondError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        ctx = []
        if line is not None:
            ctx.append(f"line {line}")
        if field is not None:
            ctx.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(ctx)})" if ctx else message)


class InvariantError(QcondError, ValueError):
    """A density-matrix invariant failed; carries the invariant name and residual."""

    def __init__(self, invariant: str, residual: float, detail: str = ""):
        self.invariant = invariant
        self.residual = residual
        msg = f"{invariant} invariant violated (measured {residual:.6g})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
