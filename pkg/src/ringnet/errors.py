"""Exception hierarchy shared by all ringnet modules."""


class RingNetError(Exception):
    """Base class for every error raised by ringnet."""


class DimensionError(RingNetError, ValueError):
    """Operand shapes are incompatible."""


class RingError(RingNetError, ValueError):
    """Invalid ring construction or an operation the ring does not support."""


class NotAProductRingError(RingError):
    pass


class EnumerationBudgetExceeded(RingNetError):
    """Ring enumeration ran past its time budget.

    ``partial`` holds the rings found so far (unsorted), ``progress`` a short
    description of how far the search got.
    """

    def __init__(self, message, partial=(), progress=""):
        super().__init__(message)
        self.partial = list(partial)
        self.progress = progress


class DslError(RingNetError, ValueError):
    """Syntax or semantic error in network source text, with a location."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)
        self.bare_message = message


class BudgetExceeded(RingNetError):
    """An instance needs more ASSR columns than the configured budget allows."""

    def __init__(self, needed, budget, what="state space"):
        super().__init__(f"{what} needs {needed} columns, budget is {budget} (raise with --budget or RINGNET_BUDGET)")
        self.needed = needed
        self.budget = budget


class AssrMismatchError(RingNetError):
    """The symbolic and brute-force ASSR compilations disagree (an internal defect)."""


class PreconditionError(RingNetError, ValueError):
    """Arguments violate an operation's precondition (distinct from a negative verdict)."""


class VerificationError(RingNetError):
    """A constructed object failed its own verification gate."""
