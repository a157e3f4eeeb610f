"""Exception types shared across the package.

ValidationError maps to CLI exit code 1, NumericalInvariantError to exit
code 2.
"""


class ValidationError(ValueError):
    """Bad user input: config fields, CLI flags, dimension mismatches."""


class NumericalInvariantError(RuntimeError):
    """A numerical self-consistency check failed (not a user error)."""
