"""Exception hierarchy.

The CLI maps these onto exit codes: configuration problems exit 2, data
problems exit 3, numerical failures exit 4.
"""


class SpecUQError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SpecUQError, ValueError):
    """An argument violates a documented precondition (shape, sign, length)."""


class InvalidConfigError(SpecUQError, ValueError):
    """An experiment configuration is inconsistent or incomplete."""


class DataError(SpecUQError):
    """A data set cannot be used as provided."""


class CSVParseError(DataError):
    """A CSV cell or row could not be parsed; message names row and column."""


class DegenerateDataError(DataError):
    """The data admits no meaningful answer (zero spread, constant column)."""


class EmptySampleError(DataError):
    """A corrupted sample ended up empty and cannot be clustered."""


class InvalidSimilarityError(DataError):
    """A foreign similarity matrix violates positivity requirements."""


class NoSamplesError(SpecUQError, ValueError):
    """An estimator was finalized before any Monte Carlo sample was added."""


class NumericError(SpecUQError):
    """A numerical routine failed or produced an unusable result."""


class EigenvalueOneError(NumericError):
    """The eigenfunction representation is singular at eigenvalue one."""
