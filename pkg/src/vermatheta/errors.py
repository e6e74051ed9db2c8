"""Exception hierarchy shared by all vermatheta modules."""


class UsageError(ValueError):
    """Caller misuse: incompatible dimensions, windows, or depth limits."""


class TruncationError(UsageError):
    """An operator matrix would need weight-space data beyond the depth cutoff."""


class DivergenceError(UsageError):
    """A geometric expansion cannot escape the requested window."""


class GenericityError(UsageError):
    """The highest weight fails the genericity guard for the requested depth."""


class VerificationError(RuntimeError):
    """An internal consistency check failed (this indicates a real bug or a
    wrong mathematical assumption, never bad user input)."""
