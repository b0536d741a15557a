"""Exceptions shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2, OSError -> 3,
NumericalError -> 4.
"""


class ConfigError(Exception):
    """Invalid or incomplete run configuration."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (singular matrix, non-convergent quadrature)."""
