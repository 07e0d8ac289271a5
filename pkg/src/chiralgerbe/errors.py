"""Exception hierarchy shared by every module of the workbench."""


class WorkbenchError(Exception):
    pass


class DivisionByZeroError(WorkbenchError, ZeroDivisionError):
    pass


class NonInvertibleError(WorkbenchError):
    pass


class NonInvertibleChangeError(NonInvertibleError):
    pass


class AmbientMismatchError(WorkbenchError, ValueError):
    pass


class IndexOutOfRangeError(WorkbenchError, IndexError):
    pass


class UnsupportedShapeError(WorkbenchError):
    pass


class ConsistencyError(WorkbenchError):
    """Two independent computations of the same quantity disagree."""


class SeriesInversionError(WorkbenchError):
    pass


class TruncationError(WorkbenchError):
    pass


class SimplicityViolationError(WorkbenchError, ValueError):
    pass


class ParseError(WorkbenchError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class SpecError(WorkbenchError):
    pass


class NonHolonomicError(WorkbenchError):
    """A computation that relies on Jacobian identities got a non-holonomic change."""


class InhomogeneousError(WorkbenchError):
    """An eigenvalue was asked of an element that is not homogeneous."""
