"""Intraday time grid and lag grids.

All intraday series live on a common one second grid covering the liquid
part of the trading day. Slots are half-open: the first second belongs to
the grid, the terminal second does not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Liquid window of a New York trading day, seconds after midnight local time.
# 09:40:00 inclusive through 15:50:00 exclusive.
SESSION_START_SECOND = 9 * 3600 + 40 * 60
SESSION_END_SECOND = 15 * 3600 + 50 * 60

# Lag grids used throughout: a dense scan of the first thousand seconds, a
# logarithmic grid for long-range curves, and a small fixed set for matrices.
DENSE_MAX_LAG = 1000
LOG_GRID_SIZE = 34
LOG_GRID_MAX = 10_000
MATRIX_LAGS = (1, 2, 60, 300, 1800, 7200)
RANK_LAGS = (1, 2, 60, 300)
RANK_PRIMARY_LAG = 300


def parse_hms(text: str) -> int:
    """Parse a wall-clock time 'HH:MM:SS' into seconds after midnight.

    Args:
        text: Time string with exactly two digits per field.

    Returns:
        Seconds after midnight in [0, 86400).

    Raises:
        ValueError: If the string is not a valid time of day.
    """
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"not a HH:MM:SS time: {text!r}")
    h, m, s = (int(p) for p in parts)
    if not (0 <= h < 24 and 0 <= m < 60 and 0 <= s < 60):
        raise ValueError(f"time of day out of range: {text!r}")
    return h * 3600 + m * 60 + s


def format_hms(second: int) -> str:
    """Inverse of parse_hms."""
    if not 0 <= second < 86400:
        raise ValueError(f"second out of range: {second}")
    h, rem = divmod(int(second), 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


@dataclass(frozen=True)
class IntradayGrid:
    """Half-open window [start_second, end_second) on a one second grid.

    Attributes:
        start_second: First grid slot, seconds after midnight.
        end_second: One past the last grid slot.
    """

    start_second: int = SESSION_START_SECOND
    end_second: int = SESSION_END_SECOND

    def __post_init__(self):
        if not 0 <= self.start_second < self.end_second <= 86400:
            raise ValueError(
                f"invalid grid window [{self.start_second}, {self.end_second})"
            )

    @property
    def size(self) -> int:
        """Number of one second slots in the window."""
        return self.end_second - self.start_second

    def contains(self, second: int) -> bool:
        """True if a wall-clock second falls inside the half-open window."""
        return self.start_second <= second < self.end_second

    def slot_of(self, second: int) -> int:
        """Map a wall-clock second to its slot index.

        Raises:
            ValueError: If the second is outside the window.
        """
        if not self.contains(second):
            raise ValueError(
                f"second {second} outside grid [{self.start_second}, {self.end_second})"
            )
        return second - self.start_second

    def seconds(self) -> np.ndarray:
        """All wall-clock seconds of the window, ascending."""
        return np.arange(self.start_second, self.end_second, dtype=np.int64)


DEFAULT_GRID = IntradayGrid()


def dense_lags(max_lag: int = DENSE_MAX_LAG) -> np.ndarray:
    """Every integer lag from 1 to max_lag inclusive."""
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    return np.arange(1, max_lag + 1, dtype=np.int64)


def log_spaced_lags(
    n: int = LOG_GRID_SIZE, max_lag: int = LOG_GRID_MAX
) -> np.ndarray:
    """Approximately geometric integer lag grid from 1 to max_lag.

    Values are rounded to the nearest integer; collisions after rounding are
    bumped upward one step at a time so the grid stays strictly increasing.

    Args:
        n: Number of grid points.
        max_lag: Largest lag, always included exactly.

    Returns:
        Strictly increasing int64 array of length n starting at 1.
    """
    if n < 2:
        raise ValueError("need at least two grid points")
    raw = np.rint(np.geomspace(1.0, float(max_lag), n)).astype(np.int64)
    lags = raw.copy()
    for k in range(1, n):
        if lags[k] <= lags[k - 1]:
            lags[k] = lags[k - 1] + 1
    if lags[-1] > max_lag:
        raise ValueError("grid does not fit: too many points for max_lag")
    return lags
