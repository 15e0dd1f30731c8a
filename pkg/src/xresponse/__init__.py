"""Cross-response analysis toolkit for tick-level market data.

Reconstructs, from trades-and-quotes files or from the built-in synthetic
market generator, the full chain: per-second trade signs, forward-filled
midpoints, price response and sign-correlator lag curves, response noise,
market response matrices, pool averages, power-law fits, and rankings.
"""

from ._kernels import BACKEND, HAS_COMPILED
from .errors import ConfigError, DataError, NumericError, XResponseError

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAS_COMPILED",
    "ConfigError",
    "DataError",
    "NumericError",
    "XResponseError",
    "__version__",
]
