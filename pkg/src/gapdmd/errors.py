"""Exception and warning types shared across the package."""


class GapDMDError(Exception):
    """Base class for all errors raised by gapdmd."""


class ParseError(GapDMDError, ValueError):
    """A matrix file could not be parsed.

    ``row`` and ``column`` are 1-based locations inside the file when known.
    """

    def __init__(self, message, path=None, row=None, column=None):
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.row = row
        self.column = column


class ValidationError(GapDMDError, ValueError):
    """Input data or parameters violate a documented precondition."""


class BoundsError(ValidationError, IndexError):
    """A window or index falls outside the snapshot range."""


class ShapeError(ValidationError):
    """Operands live in ambient spaces of different dimension."""


class DegenerateInputError(ValidationError):
    """An input vector is zero (or numerically zero) where a direction is required."""


class SizeError(GapDMDError, MemoryError):
    """A dense computation was refused because the problem is too large."""


class MatrixIOError(GapDMDError, OSError):
    """Reading or writing a matrix file failed at the OS level."""


class DegenerateRankWarning(UserWarning):
    """A data window is numerically rank deficient."""


class ConditioningWarning(UserWarning):
    """An eigenvector basis or data window is badly conditioned."""


class PeriodWarning(UserWarning):
    """A requested period cannot be observed within the generated record."""
