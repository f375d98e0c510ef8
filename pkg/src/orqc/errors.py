"""Failure categories that map onto the CLI exit codes."""


class ConfigError(ValueError):
    """Invalid or unknown configuration content (exit code 2)."""


class BudgetError(RuntimeError):
    """A run would exceed the configured memory budget (exit code 3)."""


class InvariantError(RuntimeError):
    """A numerical invariant was violated at run time (exit code 4)."""
