import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xresponse.grid import IntradayGrid
from xresponse.signing import (
    SignSeries,
    TradeSignSeries,
    aggregate_second_signs,
    classify_trade_signs,
    sign_day,
)

from .conftest import trades_from_rows
from .oracles import oracle_second_signs, oracle_tick_signs

GRID = IntradayGrid(34800, 34810)


def classify(prices):
    trades = trades_from_rows([(34800 + i, p) for i, p in enumerate(prices)])
    return classify_trade_signs(trades).signs.tolist()


def test_tick_rule_hand_examples():
    # up, equal carries, down
    assert classify([10.00, 10.01, 10.01, 10.00]) == [0, 1, 1, -1]
    # single trade has no prior change
    assert classify([5.00]) == [0]
    # equal price with an undefined prior stays undefined
    assert classify([7.00, 7.00, 7.01]) == [0, 0, 1]


def test_undefined_prefix_tracked():
    trades = trades_from_rows(
        [(34800, 50.0), (34801, 50.0), (34801, 50.0), (34802, 50.01), (34803, 50.0)]
    )
    ts = classify_trade_signs(trades)
    assert ts.undefined_prefix == 3
    assert ts.signs.tolist() == [0, 0, 0, 1, -1]


def test_no_price_change_all_day():
    assert classify([9.5, 9.5, 9.5]) == [0, 0, 0]
    ts = classify_trade_signs(trades_from_rows([]))
    assert ts.signs.size == 0 and ts.undefined_prefix == 0


def test_trade_sign_series_validation():
    with pytest.raises(ValueError):
        TradeSignSeries(signs=np.array([1, 0, 1], dtype=np.int8), undefined_prefix=0)
    with pytest.raises(ValueError):
        TradeSignSeries(signs=np.array([0, 1], dtype=np.int8), undefined_prefix=0)


def test_aggregation_majority_balanced_empty():
    # second 34800: +1 +1 -1 -> +1; second 34801: +1 -1 -> 0; 34802: no trades
    prices = [10.00, 10.01, 10.02, 10.01, 10.02, 10.01]
    seconds = [34800, 34800, 34800, 34800, 34801, 34801]
    trades = trades_from_rows(list(zip(seconds, prices)))
    per_second, per_trade = sign_day(trades, GRID, "AAA")
    assert per_trade.signs.tolist() == [0, 1, 1, -1, 1, -1]
    assert per_second.values[0] == 1
    assert per_second.values[1] == 0
    assert (per_second.values[2:] == 0).all()
    assert per_second.buy_seconds == 1
    assert per_second.zero_seconds == GRID.size - 1


def test_undefined_signs_contribute_zero():
    # both trades in second 0 undefined, second 1 defines the first change
    trades = trades_from_rows([(34800, 10.0), (34800, 10.0), (34801, 10.01)])
    ss, _ = sign_day(trades, GRID, "AAA")
    assert ss.values[0] == 0
    assert ss.values[1] == 1


def test_trades_outside_grid_ignored_in_aggregation():
    # the out-of-window trade still participates in classification order
    trades = trades_from_rows([(34799, 10.0), (34800, 10.01), (34815, 9.0)])
    ss, ts = sign_day(trades, GRID, "AAA")
    assert ts.signs.tolist() == [0, 1, -1]
    assert ss.values[0] == 1
    assert (ss.values[1:] == 0).all()


def test_carry_policy_validated():
    with pytest.raises(ValueError):
        classify_trade_signs([], carry_policy="previous_day")


def test_sign_day_matches_oracle(rng):
    for _ in range(5):
        n = int(rng.integers(1, 60))
        seconds = np.sort(rng.integers(34800, 34810, n)).tolist()
        prices = np.round(100 + np.cumsum(rng.choice([-0.01, 0, 0.01], n)), 2).tolist()
        trades = trades_from_rows(list(zip(seconds, prices)))
        ss, ts = sign_day(trades, GRID, "AAA")
        want_trade = oracle_tick_signs(prices)
        assert ts.signs.tolist() == want_trade
        want_sec = oracle_second_signs(seconds, want_trade, 34800, GRID.size)
        assert ss.values.tolist() == want_sec


@given(
    st.lists(
        st.tuples(
            st.integers(min_value=34800, max_value=34809),
            st.integers(min_value=-2, max_value=2),
        ),
        max_size=50,
    )
)
def test_mirror_antisymmetry(moves):
    """Mirroring the price path about its start negates all signs."""
    secs = sorted(m[0] for m in moves)
    steps = [m[1] * 0.01 for m in moves]
    up = 100 + np.cumsum(steps) if steps else np.array([])
    dn = 100 - np.cumsum(steps) if steps else np.array([])
    t_up = trades_from_rows(list(zip(secs, np.round(up, 2))))
    t_dn = trades_from_rows(list(zip(secs, np.round(dn, 2))))
    s_up, p_up = sign_day(t_up, GRID)
    s_dn, p_dn = sign_day(t_dn, GRID)
    assert np.array_equal(p_up.signs, -p_dn.signs)
    assert np.array_equal(s_up.values, -s_dn.values)


@given(
    st.lists(
        st.tuples(
            st.integers(min_value=34800, max_value=34809),
            st.floats(min_value=1.0, max_value=200.0, allow_nan=False),
        ),
        max_size=40,
    )
)
def test_output_domain_and_causality(rows):
    rows = sorted(rows, key=lambda r: r[0])
    trades = trades_from_rows(rows)
    ss, ts = sign_day(trades, GRID)
    assert set(np.unique(ss.values)) <= {-1, 0, 1}
    assert set(np.unique(ts.signs)) <= {-1, 0, 1}
    # causality: appending later trades never changes earlier seconds
    extended = trades_from_rows(rows + [(34809, 500.0)])
    ss2, _ = sign_day(extended, GRID)
    cut = 34809 - 34800
    assert np.array_equal(ss.values[:cut], ss2.values[:cut])


def test_sign_series_counters():
    s = SignSeries("AAA", None, np.array([1, -1, 0, 1], dtype=np.int8))
    assert s.buy_seconds == 2 and s.sell_seconds == 1 and s.zero_seconds == 1
