"""Exception hierarchy shared by all memgrid modules."""


class MemgridError(Exception):
    """Base class for every error raised by memgrid."""


class DomainError(MemgridError, ValueError):
    """Non-finite or otherwise invalid numeric input."""


class OutOfRangeError(MemgridError, ValueError):
    """A time or position lies outside the sampled span."""


class InvalidGridError(MemgridError, ValueError):
    """A finite-difference grid is too small or not increasing."""


class PreconditionError(MemgridError, ValueError):
    """An operation was called outside its admissible parameter domain."""


class SingularBranchError(MemgridError, ArithmeticError):
    """A logarithm argument is exactly zero."""


class IntegrityError(MemgridError, RuntimeError):
    """The simulation produced a state the model says cannot occur."""


class ConfigError(MemgridError, ValueError):
    """Invalid or unknown configuration entry."""


class CandidateError(MemgridError, ValueError):
    """Inconsistent flags on a constitutive-relation candidate."""
