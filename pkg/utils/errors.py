from typing import Any, Dict, Optional


class PowerMonoidError(Exception):
    """Base class for every error raised by the toolkit."""


class ContractViolation(PowerMonoidError, ValueError):
    """An operation was called outside of its precondition."""


class GroupParseError(ContractViolation):
    """A group literal such as "2,4" could not be parsed."""


class InvariantViolation(PowerMonoidError):
    """A structure handed to an operation breaks its defining invariant."""


class ResourceBoundExceeded(PowerMonoidError):
    """A configured size or search budget was exceeded.

    `stats` names the bound, its limit, the observed value and, for searches,
    the partial node counts reached before giving up.
    """

    def __init__(self, message: str, stats: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.stats = dict(stats or {})


class TheoremViolation(PowerMonoidError):
    """A statement that must hold for every automorphism failed.

    `witness` is a JSON-ready description of the counterexample.
    """

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.witness = dict(witness or {})
