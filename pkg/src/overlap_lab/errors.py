"""Exception types shared across the package.

Usage errors signal bad inputs (wrong lengths, violated preconditions) and map
to CLI exit code 2.  Internal errors signal broken invariants that callers
cannot cause with well-formed inputs; they are bugs and are never caught by
the CLI.  Resource errors signal exhausted supplies (e.g. no fresh ordinals
left while extending).
"""


class UsageError(ValueError):
    """Caller violated a documented precondition or passed malformed input."""


class InternalError(RuntimeError):
    """An invariant the library guarantees failed; indicates a bug."""


class ResourceError(RuntimeError):
    """A finite supply (fresh ordinals, iteration budget) ran out."""


class OracleError(UsageError):
    """A rank oracle could not answer (missing entry, inconsistent data)."""
