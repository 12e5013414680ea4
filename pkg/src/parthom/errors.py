"""Exceptions shared across the package."""


class ResourceAbort(RuntimeError):
    """A computation was stopped by a resource budget, not by mathematics.

    Callers (and the CLI, via exit code 4) must keep this distinct from a
    wrong result.
    """


class ConsistencyError(RuntimeError):
    """Two routes that must agree produced different answers."""
