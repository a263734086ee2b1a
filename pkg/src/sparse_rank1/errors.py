"""Exception types shared across the package.

Two families: :class:`InputError` for malformed arguments, files, or
violated preconditions (CLI exit code 2), and :class:`NumericalError`
for degenerate numerics such as all-zero inputs (CLI exit code 3).
"""


class Error(Exception):
    """Base class for every package exception."""


class InputError(Error, ValueError):
    """Bad argument, file, or precondition."""


class NumericalError(Error, ArithmeticError):
    """Degenerate numerical situation (zero input, guard tripped)."""


class ShapeMismatch(InputError):
    """Shapes or element counts are incompatible."""


class DimensionMismatch(InputError):
    """A vector length does not match the mode it is contracted against."""


class ModeOutOfRange(InputError):
    """Mode index outside 0..d-1."""


class IndexOutOfRange(InputError):
    """Entry index outside the valid range of its mode."""


class BadCardinality(InputError):
    """Sparsity level r outside 1..n."""


class InfeasibleInit(InputError):
    """Initial factors violate the unit-norm or cardinality constraints."""


class BadK(InputError):
    """Invalid number of clusters."""


class BadN(InputError):
    """Invalid sample count."""


class LengthMismatch(InputError):
    """Two sequences that must have equal length do not."""


class TooLarge(InputError):
    """Problem size exceeds an enumeration guard."""


class SpecFileError(InputError):
    """Malformed experiment spec file."""


class ZeroInput(NumericalError):
    """An operation that requires a nonzero vector received zeros."""


class ZeroMatrix(NumericalError):
    """An operation that requires a nonzero matrix received zeros."""


class ZeroTensor(NumericalError):
    """An operation that requires a nonzero tensor received zeros."""
