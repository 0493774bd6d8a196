"""Exception taxonomy shared by the whole package.

The split mirrors the CLI exit codes: malformed input (3), failed
validation or precondition (1), numeric non-convergence (2).  Internal
consistency violations indicate a bug and are never silently absorbed.
"""


class FreemultError(Exception):
    """Base class for all package errors."""


class InputError(FreemultError, ValueError):
    """Malformed or undecodable input (bad JSON, unknown letters, bad shapes)."""


class ValidationError(FreemultError, ValueError):
    """Well-formed input violating a documented precondition or invariant."""


class NumericError(FreemultError, RuntimeError):
    """A numeric routine failed to converge or to certify its result."""


class ResourceLimitError(FreemultError, RuntimeError):
    """An operation would exceed a configured size or depth cap."""


class InternalCheckError(FreemultError, RuntimeError):
    """A self-check that should be unconditionally true failed; report as a bug."""
