"""Exception types raised across the package.

The CLI maps these onto exit codes, so every error a user can trigger from a
config or flag derives from one of the classes below.
"""


class MQNMRError(Exception):
    """Base class for all package errors."""


class ConfigError(MQNMRError, ValueError):
    """Invalid run configuration, flag, or input file content."""


class SizeError(ConfigError):
    """A spin count lies outside the supported range."""


class DomainError(ConfigError):
    """A numeric argument lies outside its mathematical domain."""


class SpinIndexError(ConfigError, IndexError):
    """A spin or basis index is out of range."""


class CouplingParseError(ConfigError):
    """A coupling file line could not be parsed."""

    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class CouplingConflictError(ConfigError):
    """The same spin pair was given two different coupling values."""


class ValidationError(MQNMRError, ValueError):
    """An array violates a structural contract (shape, Hermiticity)."""


class NumericError(MQNMRError, ArithmeticError):
    """A numerical routine failed or produced non-finite output."""


class DegenerateStateError(NumericError):
    """Both corner populations vanish, so a state cannot be classified."""
