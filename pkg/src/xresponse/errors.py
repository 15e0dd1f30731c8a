"""Exception hierarchy shared across the package.

Each error class maps to a distinct process exit code in the command line
interface so that callers can distinguish bad input data from numerical
failures.
"""

from __future__ import annotations


class XResponseError(Exception):
    """Base class for all package-specific errors."""


class DataError(XResponseError):
    """Raised when input data is malformed, inconsistent, or unusable.

    Examples: a tick file whose rows cannot be parsed, a quote file with
    crossed bid/ask on every row, or a request for a date that has no data.
    """


class NumericError(XResponseError):
    """Raised when a numerical procedure cannot produce a valid result.

    Examples: a curve fit with fewer points than free parameters, or an
    optimizer that fails to converge to finite parameter values.
    """


class ConfigError(DataError):
    """Raised when a run configuration file is invalid.

    Subclasses DataError because a bad config is bad input: the command
    line maps both to the same exit code.
    """
