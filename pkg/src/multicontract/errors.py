"""Exception hierarchy shared by all modules.

None of these subclass ValueError, so they pass through pydantic validators
unchanged instead of being folded into a ValidationError.
"""


class MulticontractError(Exception):
    """Base class for all multicontract errors."""

    pass


class InvariantViolation(MulticontractError):
    """Input data breaks a domain invariant (metric axioms, map ranges)."""

    pass


class PreconditionError(MulticontractError):
    """An operation was called outside the domain it is defined on."""

    pass
