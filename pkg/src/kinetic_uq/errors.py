"""Exception types shared across the package.

The command line interface maps these onto exit codes: configuration
problems exit with 2, numerical failures with 3.
"""


class KineticUQError(Exception):
    """Base class for all package errors."""


class ConfigError(KineticUQError):
    """Invalid configuration: unknown test id, bad override, missing file."""


class ParameterError(KineticUQError, ValueError):
    """An operation was called with out-of-range or inconsistent arguments."""


class NumericalError(KineticUQError, RuntimeError):
    """A numerical method failed: blow-up, lost positivity, no convergence."""


class PairingError(KineticUQError):
    """Control variate samples do not share the random inputs of the
    kinetic samples they are meant to correct."""
