"""Exception hierarchy for submc."""


class SubmcError(Exception):
    """Base class for all submc errors."""


class OutOfRange(SubmcError):
    """A probability entry lies outside [0, 1]."""


class EmptyMatrix(SubmcError):
    """A matrix with zero rows or columns was supplied."""


class DimensionMismatch(SubmcError):
    """Operand shapes are incompatible."""


class NotMonotonizable(SubmcError):
    """Row/column sorting failed to produce a monotone matrix."""


class NotMonotone(SubmcError):
    """Operation requires a monotone-certified probability matrix."""


class InvalidRank(SubmcError):
    """Requested rank is outside [1, min(n, m)]."""


class RankDeficient(SubmcError):
    """Matrix has (numerically) fewer than the requested rank."""


class AllZero(SubmcError):
    """Every candidate objective value is zero; the entry is unestimable."""


class DivisionByZeroProbability(SubmcError):
    """An observed entry has sampling probability zero."""


class NumericalFailure(SubmcError):
    """A dense linear algebra routine failed to converge."""


class RankExceedsSubmatrix(SubmcError):
    """Requested rank exceeds the selected submatrix size."""


class ConfigError(SubmcError):
    """Experiment configuration is malformed or inconsistent."""


class IoError(SubmcError):
    """File output failed; message carries the offending path."""
