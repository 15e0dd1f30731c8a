import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xresponse.grid import (
    DEFAULT_GRID,
    LOG_GRID_MAX,
    LOG_GRID_SIZE,
    MATRIX_LAGS,
    RANK_LAGS,
    RANK_PRIMARY_LAG,
    IntradayGrid,
    dense_lags,
    format_hms,
    log_spaced_lags,
    parse_hms,
)

# The committed long-range lag grid. Frozen: any change to the construction
# shows up here first.
EXPECTED_LOG_GRID = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 16, 22, 28, 38, 50, 66, 87, 115, 152,
    201, 266, 351, 464, 614, 811, 1072, 1417, 1874, 2477, 3275, 4329,
    5722, 7565, 10000,
]


def test_default_session_window():
    assert DEFAULT_GRID.start_second == 9 * 3600 + 40 * 60
    assert DEFAULT_GRID.end_second == 15 * 3600 + 50 * 60
    assert DEFAULT_GRID.size == 22200


def test_half_open_membership():
    g = DEFAULT_GRID
    assert not g.contains(g.start_second - 1)
    assert g.contains(g.start_second)
    assert g.contains(g.end_second - 1)
    assert not g.contains(g.end_second)
    assert g.slot_of(g.start_second) == 0
    assert g.slot_of(g.end_second - 1) == g.size - 1
    with pytest.raises(ValueError):
        g.slot_of(g.end_second)


def test_grid_validation():
    with pytest.raises(ValueError):
        IntradayGrid(100, 100)
    with pytest.raises(ValueError):
        IntradayGrid(200, 100)
    with pytest.raises(ValueError):
        IntradayGrid(-1, 100)
    with pytest.raises(ValueError):
        IntradayGrid(0, 86401)


def test_parse_format_hms_roundtrip():
    assert parse_hms("09:40:00") == 34800
    assert parse_hms("15:50:00") == 57000
    assert parse_hms("00:00:00") == 0
    assert format_hms(34800) == "09:40:00"
    for text in ("24:00:00", "10:60:00", "10:00:60", "1000", "aa:bb:cc"):
        with pytest.raises(ValueError):
            parse_hms(text)
    with pytest.raises(ValueError):
        format_hms(86400)


@given(st.integers(min_value=0, max_value=86399))
def test_hms_inverse_property(second):
    assert parse_hms(format_hms(second)) == second


def test_dense_lags():
    lags = dense_lags(1000)
    assert lags[0] == 1 and lags[-1] == 1000 and len(lags) == 1000
    assert (np.diff(lags) == 1).all()
    with pytest.raises(ValueError):
        dense_lags(0)


def test_log_grid_frozen_values():
    lags = log_spaced_lags()
    assert lags.tolist() == EXPECTED_LOG_GRID
    assert len(lags) == LOG_GRID_SIZE == 34
    assert lags[-1] == LOG_GRID_MAX == 10_000


@given(
    n=st.integers(min_value=2, max_value=60),
    max_lag=st.integers(min_value=100, max_value=100_000),
)
def test_log_grid_properties(n, max_lag):
    lags = log_spaced_lags(n, max_lag)
    assert len(lags) == n
    assert lags[0] == 1
    assert lags[-1] == max_lag
    assert (np.diff(lags) > 0).all()


def test_log_grid_too_dense_rejected():
    with pytest.raises(ValueError):
        log_spaced_lags(20, 10)


def test_fixed_lag_sets():
    assert MATRIX_LAGS == (1, 2, 60, 300, 1800, 7200)
    assert RANK_LAGS == (1, 2, 60, 300)
    assert RANK_PRIMARY_LAG in RANK_LAGS
