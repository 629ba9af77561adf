"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes (config error -> 2,
precision failure -> 3, cutoff insufficiency -> 4).
"""


class OpthermError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(OpthermError, ValueError):
    """Invalid parameter value or malformed run configuration."""


class PrecisionError(OpthermError, RuntimeError):
    """A numerical result failed its internal consistency check."""


class CutoffError(OpthermError, RuntimeError):
    """A Fock-space truncation is too small for the requested tolerance."""


class StateValidationError(OpthermError, ValueError):
    """A density matrix violates Hermiticity / positivity invariants."""
