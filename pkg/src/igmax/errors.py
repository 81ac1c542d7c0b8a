"""Shared exception types.

Each maps to a distinct CLI exit code, so library code should raise these
rather than bare ValueError wherever a user-facing precondition fails.
"""


class InvalidParameters(ValueError):
    """Out-of-range or mutually inconsistent arguments (n, r, sizes...)."""


class TransversalityViolation(ValueError):
    """A subset was required to meet every block of a partition exactly once."""


class NotASquare(ValueError):
    """A (kernel, kernel, image, image) quadruple missing a transversality."""


class NotEliminable(ValueError):
    """No usable defining relation for the generator to be eliminated."""


class BudgetExhausted(RuntimeError):
    """A bounded search or enumeration hit its configured limit."""
