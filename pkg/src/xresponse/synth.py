"""Synthetic markets with known ground truth.

Three generators cover the validation needs of the estimators: independent
random order flow with random-walk midpoints (the null market), sign pairs
with a prescribed power-law cross correlator (latent factor model), and
midpoints driven by a transient impact kernel applied to another stock's
signs.

Determinism: all randomness flows through Philox counter-based substreams
derived purely from (seed, purpose, stock index, day index), so any subset
of the market can be regenerated independently, in any order, on any
platform. Prices are quantized to integer cents before use, which makes
the emitted tick files reproduce the in-memory series exactly after a trip
through the parser.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .batch import DayPanel
from .errors import DataError
from .grid import DEFAULT_GRID, IntradayGrid, format_hms
from .returns import MidpointSeries
from .signing import SignSeries

TRADE_VOLUME = 100
CALIBRATION_RESOURCE = "data/sign_amplitude_calibration.json"

_PURPOSES = {"signs": 1, "mid": 2, "latent": 3, "idio": 4, "cal": 5}


def substream(seed: int, purpose: str, stock_idx: int = 0, day_idx: int = 0):
    """Independent random generator for one (purpose, stock, day) cell.

    Substreams are Philox streams whose 256-bit counter starts at a value
    derived from the cell coordinates, spaced 2**128 draws apart, so they
    never overlap and depend only on the arguments.
    """
    code = _PURPOSES[purpose]
    if not (0 <= stock_idx < 1 << 24 and 0 <= day_idx < 1 << 32):
        raise ValueError("stock/day index out of substream range")
    stream_id = (code << 56) | (stock_idx << 32) | day_idx
    bitgen = np.random.Philox(
        key=seed & ((1 << 128) - 1), counter=stream_id << 128
    )
    return np.random.Generator(bitgen)


def date_for_day(day_idx: int, start: dt.date = dt.date(2008, 1, 2)) -> dt.date:
    """Synthetic trading calendar: consecutive weekdays from a start date."""
    d = start
    remaining = day_idx
    while d.weekday() >= 5:
        d += dt.timedelta(days=1)
    while remaining > 0:
        d += dt.timedelta(days=1)
        if d.weekday() < 5:
            remaining -= 1
    return d


@dataclass(frozen=True)
class IidSignModel:
    """Independent signs: trade with p_trade, buy with p_buy given a trade."""

    p_trade: float = 1.0
    p_buy: float = 0.5
    kind: str = field(default="iid", init=False)

    def __post_init__(self):
        if not (0.0 <= self.p_trade <= 1.0 and 0.0 <= self.p_buy <= 1.0):
            raise DataError("sign model probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class LatentSignModel:
    """Two-stock sign pair whose cross correlator follows a power law.

    The target curve is theta / (1 + (tau/tau0)^2)^(gamma/2). A shared
    Gaussian factor with matching autocovariance drives both stocks'
    signs by thresholding; the factor-to-sign amplitude mapping comes from
    the committed calibration table.
    """

    theta: float
    tau0: float
    gamma: float
    p_trade: float = 1.0
    kind: str = field(default="latent", init=False)

    def __post_init__(self):
        if not (self.theta >= 0 and self.tau0 > 0 and self.gamma > 0):
            raise DataError("latent model needs theta >= 0, tau0 > 0, gamma > 0")
        if not 0.0 < self.p_trade <= 1.0:
            raise DataError("latent model needs 0 < p_trade <= 1")

    def target_curve(self, lags) -> np.ndarray:
        lags = np.asarray(lags, dtype=np.float64)
        return self.theta / (1.0 + (lags / self.tau0) ** 2) ** (self.gamma / 2.0)


@dataclass(frozen=True)
class RiseDecayKernel:
    """Transient impact level G(tau) = amplitude * (tau/peak) * e^(1 - tau/peak).

    G rises from G(0) = 0 to its maximum at tau = peak_lag, then decays to
    zero: a single trade moves the price and the move then bleeds away.
    """

    amplitude: float
    peak_lag: float
    support: int = 0  # truncation length; 0 means 30 * peak_lag

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and math.isfinite(self.peak_lag)):
            raise DataError("kernel parameters must be finite")
        if self.peak_lag <= 0:
            raise DataError("kernel peak lag must be positive")

    @property
    def support_length(self) -> int:
        return self.support if self.support > 0 else int(math.ceil(30 * self.peak_lag))

    def level(self, taus) -> np.ndarray:
        """Level impact G at the given lags."""
        taus = np.asarray(taus, dtype=np.float64)
        g = self.amplitude * (taus / self.peak_lag) * np.exp(1.0 - taus / self.peak_lag)
        return np.where(taus >= 0, g, 0.0)

    def level_sequence(self) -> np.ndarray:
        """G evaluated at 0..support; the convolution weights."""
        seq = self.level(np.arange(self.support_length + 1))
        if not np.isfinite(seq).all():
            raise DataError("kernel produced non-finite values")
        return seq

    def increments(self) -> np.ndarray:
        """Per-lag return impact: first differences of the level."""
        return np.diff(self.level_sequence(), prepend=0.0)

    def implied_argmax(self, lag_grid) -> int:
        """Position in lag_grid where the accumulated increments peak."""
        lag_grid = np.asarray(lag_grid, dtype=np.int64)
        cumulative = np.cumsum(self.increments())
        padded = np.zeros(int(lag_grid.max()) + 1)
        upto = min(len(cumulative), len(padded))
        padded[:upto] = cumulative[:upto]
        if len(cumulative) < len(padded):
            padded[len(cumulative):] = cumulative[-1]
        return int(np.argmax(padded[lag_grid]))


@dataclass(frozen=True)
class ImpactModel:
    """Directed impact couplings: driver j's signs move driven i's price.

    couplings holds (driven_idx, driver_idx, scale) triples; the applied
    level kernel is scale * kernel.level.
    """

    kernel: RiseDecayKernel
    couplings: tuple[tuple[int, int, float], ...]


@dataclass(frozen=True)
class SynthSpec:
    """Complete recipe for one synthetic market; equal specs give equal data."""

    seed: int
    n_stocks: int
    n_days: int
    slots: int = DEFAULT_GRID.size
    sign_model: IidSignModel | LatentSignModel = IidSignModel()
    impact_model: ImpactModel | None = None
    noise_sigma: float = 1e-4
    base_price: float = 100.0
    symbols: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n_stocks < 1 or self.n_days < 1 or self.slots < 2:
            raise DataError("synth spec needs n_stocks, n_days >= 1 and slots >= 2")
        if self.symbols is not None and len(self.symbols) != self.n_stocks:
            raise DataError("symbols length must equal n_stocks")
        if not (self.noise_sigma >= 0 and self.base_price > 0):
            raise DataError("noise_sigma must be >= 0 and base_price > 0")

    def resolved_symbols(self) -> tuple[str, ...]:
        if self.symbols is not None:
            return self.symbols
        return tuple(f"S{i:02d}" for i in range(self.n_stocks))

    def to_dict(self) -> dict:
        sm: dict = {"kind": self.sign_model.kind}
        if isinstance(self.sign_model, IidSignModel):
            sm.update(p_trade=self.sign_model.p_trade, p_buy=self.sign_model.p_buy)
        else:
            sm.update(
                theta=self.sign_model.theta,
                tau0=self.sign_model.tau0,
                gamma=self.sign_model.gamma,
                p_trade=self.sign_model.p_trade,
            )
        out = {
            "seed": self.seed,
            "n_stocks": self.n_stocks,
            "n_days": self.n_days,
            "slots": self.slots,
            "sign_model": sm,
            "noise_sigma": self.noise_sigma,
            "base_price": self.base_price,
        }
        if self.symbols is not None:
            out["symbols"] = list(self.symbols)
        if self.impact_model is not None:
            out["impact_model"] = {
                "kernel": {
                    "amplitude": self.impact_model.kernel.amplitude,
                    "peak_lag": self.impact_model.kernel.peak_lag,
                    "support": self.impact_model.kernel.support,
                },
                "couplings": [list(c) for c in self.impact_model.couplings],
            }
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "SynthSpec":
        sm = d.get("sign_model", {"kind": "iid"})
        if sm.get("kind", "iid") == "iid":
            sign_model = IidSignModel(
                p_trade=float(sm.get("p_trade", 1.0)),
                p_buy=float(sm.get("p_buy", 0.5)),
            )
        elif sm["kind"] == "latent":
            sign_model = LatentSignModel(
                theta=float(sm["theta"]),
                tau0=float(sm["tau0"]),
                gamma=float(sm["gamma"]),
                p_trade=float(sm.get("p_trade", 1.0)),
            )
        else:
            raise DataError(f"unknown sign model kind {sm.get('kind')!r}")
        impact = None
        im = d.get("impact_model")
        if im is not None:
            k = im["kernel"]
            impact = ImpactModel(
                kernel=RiseDecayKernel(
                    amplitude=float(k["amplitude"]),
                    peak_lag=float(k["peak_lag"]),
                    support=int(k.get("support", 0)),
                ),
                couplings=tuple(
                    (int(c[0]), int(c[1]), float(c[2])) for c in im.get("couplings", ())
                ),
            )
        symbols = d.get("symbols")
        return cls(
            seed=int(d["seed"]),
            n_stocks=int(d["n_stocks"]),
            n_days=int(d["n_days"]),
            slots=int(d.get("slots", DEFAULT_GRID.size)),
            sign_model=sign_model,
            impact_model=impact,
            noise_sigma=float(d.get("noise_sigma", 1e-4)),
            base_price=float(d.get("base_price", 100.0)),
            symbols=tuple(symbols) if symbols is not None else None,
        )


# ---------------------------------------------------------------------------
# calibration of the latent-to-sign amplitude mapping


def build_calibration(
    n_samples: int = 10_000_000, seed: int = 20080102, latent_grid=None
) -> dict:
    """Measure the sign correlation produced by each latent correlation.

    Two unit Gaussians sharing a common factor with correlation c are
    thresholded at zero; the table records the empirical mean sign product
    for each c. The committed table is regenerated by the `calibrate`
    subcommand, never silently at run time.
    """
    if latent_grid is None:
        latent_grid = [round(0.05 * k, 2) for k in range(19)] + [
            0.925,
            0.95,
            0.975,
            0.99,
            0.995,
            1.0,
        ]
    latent = np.asarray(sorted(set(latent_grid)), dtype=np.float64)
    if latent[0] != 0.0 or latent[-1] != 1.0 or (latent < 0).any() or (latent > 1).any():
        raise DataError("latent grid must span [0, 1] inclusive")
    sign_corr = np.zeros(len(latent))
    chunk = 1_000_000
    for idx, c in enumerate(latent):
        g = substream(seed, "cal", stock_idx=idx)
        total = 0
        done = 0
        while done < n_samples:
            m = min(chunk, n_samples - done)
            f = g.standard_normal(m)
            x = math.sqrt(c) * f + math.sqrt(1.0 - c) * g.standard_normal(m)
            y = math.sqrt(c) * f + math.sqrt(1.0 - c) * g.standard_normal(m)
            # sign products are +-1; the integer sum is exact
            total += int(np.sum(np.sign(x) * np.sign(y)))
            done += m
        sign_corr[idx] = total / n_samples
    # enforce the structure interpolation relies on
    sign_corr[0] = 0.0
    sign_corr[-1] = 1.0
    sign_corr = np.maximum.accumulate(sign_corr)
    return {
        "latent_correlation": [float(v) for v in latent],
        "sign_correlation": [float(v) for v in sign_corr],
        "n_samples": int(n_samples),
        "seed": int(seed),
    }


def write_calibration(table: Mapping, path: str | Path) -> None:
    Path(path).write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")


@lru_cache(maxsize=4)
def _load_calibration_cached(path_key: str) -> tuple[np.ndarray, np.ndarray]:
    if path_key == "":
        ref = resources.files("xresponse").joinpath(CALIBRATION_RESOURCE)
        if not ref.is_file():
            raise DataError(
                "calibration table missing; run `xresponse calibrate` and commit it"
            )
        raw = json.loads(ref.read_text())
    else:
        raw = json.loads(Path(path_key).read_text())
    latent = np.asarray(raw["latent_correlation"], dtype=np.float64)
    sign = np.asarray(raw["sign_correlation"], dtype=np.float64)
    if latent.shape != sign.shape or latent.ndim != 1 or len(latent) < 2:
        raise DataError("malformed calibration table")
    return latent, sign


def load_calibration(path: str | Path | None = None):
    """Load the (latent correlation -> sign correlation) table."""
    return _load_calibration_cached("" if path is None else str(path))


def max_achievable_sign_corr(p_trade: float = 1.0, path=None) -> float:
    """Largest correlator amplitude the generator can produce."""
    _, sign = load_calibration(path)
    return float(sign[-1]) * p_trade


def latent_for_sign_corr(s, p_trade: float = 1.0, path=None) -> np.ndarray:
    """Invert the calibration: latent correlation producing sign corr s.

    Raises:
        DataError: If s / p_trade exceeds the calibrated range.
    """
    latent, sign = load_calibration(path)
    s = np.asarray(s, dtype=np.float64) / p_trade
    if (s < 0).any() or (s > sign[-1]).any():
        raise DataError(
            f"target correlator amplitude out of range; achievable max is "
            f"{sign[-1] * p_trade:.6f} at this trading probability"
        )
    return np.interp(s, sign, latent)


# ---------------------------------------------------------------------------
# latent factor sampling


@lru_cache(maxsize=8)
def _latent_embedding(
    theta: float, tau0: float, gamma: float, p_trade: float, slots: int, cal_key: str
):
    """Square-root eigenvalues of the circulant embedding of the factor.

    The factor's autocovariance is chosen so that after thresholding and
    trade dilution the measured pair correlator matches the target power
    law: rho_factor(tau) = g(target(tau)/p) / g(target(0)/p) with g the
    calibration inverse.
    """
    m = 1
    while m < 2 * slots:
        m *= 2
    taus = np.minimum(np.arange(m), m - np.arange(m)).astype(np.float64)
    target = theta / (1.0 + (taus / tau0) ** 2) ** (gamma / 2.0)
    latent = latent_for_sign_corr(target, p_trade, None if cal_key == "" else cal_key)
    c0 = latent[0]
    if c0 <= 0:
        # zero coupling: factor is irrelevant, white noise stands in
        cov = np.zeros(m)
        cov[0] = 1.0
        c0 = 0.0
    else:
        cov = latent / c0
    lam = np.fft.fft(cov).real
    lam = np.maximum(lam, 0.0)
    return np.sqrt(lam), float(c0), m


def _sample_latent_factor(spec: SynthSpec, day_idx: int) -> tuple[np.ndarray, float]:
    model = spec.sign_model
    sqrt_lam, c0, m = _latent_embedding(
        model.theta, model.tau0, model.gamma, model.p_trade, spec.slots, ""
    )
    g = substream(spec.seed, "latent", 0, day_idx)
    xi = g.standard_normal(m) + 1j * g.standard_normal(m)
    f = np.fft.fft(xi * sqrt_lam) / math.sqrt(m)
    return f.real[: spec.slots], c0


# ---------------------------------------------------------------------------
# day generation


def _gen_signs(spec: SynthSpec, day_idx: int) -> np.ndarray:
    """int8 (n_stocks, slots) sign matrix for one day."""
    n, s = spec.n_stocks, spec.slots
    model = spec.sign_model
    eps = np.zeros((n, s), dtype=np.int8)
    if isinstance(model, IidSignModel):
        for i in range(n):
            g = substream(spec.seed, "signs", i, day_idx)
            trading = g.random(s) < model.p_trade
            buys = g.random(s) < model.p_buy
            eps[i] = np.where(trading, np.where(buys, 1, -1), 0).astype(np.int8)
        return eps
    if not isinstance(model, LatentSignModel):
        raise DataError("unknown sign model")
    if n != 2:
        raise DataError("the latent sign model generates exactly two stocks")
    factor, c0 = _sample_latent_factor(spec, day_idx)
    root_c = math.sqrt(c0)
    root_n = math.sqrt(1.0 - c0)
    for i in range(n):
        eta = substream(spec.seed, "idio", i, day_idx).standard_normal(s)
        latent = root_c * factor + root_n * eta
        signs = np.where(latent > 0, 1, -1).astype(np.int8)
        trading = substream(spec.seed, "signs", i, day_idx).random(s) < model.p_trade
        eps[i] = np.where(trading, signs, 0).astype(np.int8)
    return eps


def _gen_log_midpoints(spec: SynthSpec, day_idx: int, eps: np.ndarray) -> np.ndarray:
    """Raw (pre-quantization) log-midpoints for one day."""
    n, s = spec.n_stocks, spec.slots
    x = np.empty((n, s), dtype=np.float64)
    for i in range(n):
        g = substream(spec.seed, "mid", i, day_idx)
        steps = g.standard_normal(s) * spec.noise_sigma
        x[i] = math.log(spec.base_price) + np.cumsum(steps)
    if spec.impact_model is not None:
        kernel_seq = spec.impact_model.kernel.level_sequence()
        for driven, driver, scale in spec.impact_model.couplings:
            x[driven] += scale * np.convolve(
                eps[driver].astype(np.float64), kernel_seq
            )[:s]
    return x


def quantize_to_cents(log_mids: np.ndarray) -> np.ndarray:
    """Midpoint cents implied by a raw log-price path, floored at 1 cent."""
    cents = np.rint(np.exp(log_mids) * 100.0).astype(np.int64)
    return np.maximum(cents, 1)




def mid_from_cents(cents: np.ndarray) -> np.ndarray:
    """Midpoints exactly as the parser reconstructs them from emitted quotes."""
    bid = (cents - 1) / 100.0
    ask = (cents + 1) / 100.0
    return (bid + ask) / 2.0


def _day_arrays(spec: SynthSpec, day_idx: int) -> tuple[dt.date, np.ndarray, np.ndarray]:
    """(date, signs, midpoint cents) for one day."""
    if not 0 <= day_idx < spec.n_days:
        raise ValueError(f"day index {day_idx} outside 0..{spec.n_days - 1}")
    eps = _gen_signs(spec, day_idx)
    raw = _gen_log_midpoints(spec, day_idx, eps)
    return date_for_day(day_idx), eps, quantize_to_cents(raw)


def generate_day_panel(spec: SynthSpec, day_idx: int) -> DayPanel:
    """All stocks' signs and quantized log-midpoints for one day."""
    date, eps, cents = _day_arrays(spec, day_idx)
    return DayPanel(
        date=date,
        symbols=spec.resolved_symbols(),
        signs=eps,
        logmids=np.log(mid_from_cents(cents)),
        first_defined=np.zeros(spec.n_stocks, dtype=np.int64),
        trade_present=(eps != 0).any(axis=1),
    )


def panel_factory(spec: SynthSpec) -> Callable[[int], DayPanel]:
    """Factory suitable for run_batch: day index -> DayPanel."""
    return lambda day_idx: generate_day_panel(spec, day_idx)


def day_series(
    spec: SynthSpec, day_idx: int
) -> tuple[dict[str, SignSeries], dict[str, MidpointSeries]]:
    """Per-stock series view of one generated day (for pair estimators).

    The midpoint values are the parser-identical cent midpoints, so
    statistics computed through these series, through batch panels, and
    through emitted-then-parsed files all agree bit for bit.
    """
    date, eps, cents = _day_arrays(spec, day_idx)
    symbols = spec.resolved_symbols()
    mids_matrix = mid_from_cents(cents)
    signs = {}
    mids = {}
    for i, sym in enumerate(symbols):
        signs[sym] = SignSeries(symbol=sym, date=date, values=eps[i])
        mids[sym] = MidpointSeries(
            symbol=sym,
            date=date,
            values=mids_matrix[i],
            first_defined_slot=0,
        )
    return signs, mids


def gen_null_market(spec: SynthSpec):
    """Per-day series for a zero-information market (iid sign model only)."""
    if not isinstance(spec.sign_model, IidSignModel):
        raise DataError("null market requires the iid sign model")
    return [day_series(spec, d) for d in range(spec.n_days)]


def gen_correlated_signs(spec: SynthSpec):
    """Per-day sign series for a latent-factor pair."""
    if not isinstance(spec.sign_model, LatentSignModel):
        raise DataError("correlated signs require the latent sign model")
    return [day_series(spec, d)[0] for d in range(spec.n_days)]


def gen_impact_prices(
    driver_signs: np.ndarray,
    kernel: RiseDecayKernel,
    noise_sigma: float,
    rng,
    base_price: float = 100.0,
    scale: float = 1.0,
) -> np.ndarray:
    """Log-midpoints of a stock driven by another stock's signs.

    The path is idiosyncratic noise plus the kernel level convolved with
    the driver's signs; no cent quantization is applied here.
    """
    eps = np.asarray(driver_signs, dtype=np.float64)
    s = eps.shape[0]
    steps = rng.standard_normal(s) * noise_sigma if noise_sigma > 0 else np.zeros(s)
    path = math.log(base_price) + np.cumsum(steps)
    path += scale * np.convolve(eps, kernel.level_sequence())[:s]
    return path


# ---------------------------------------------------------------------------
# tick file emission


def _cents_str(cents: int) -> str:
    return f"{cents // 100}.{cents % 100:02d}"


def synth_grid(spec: SynthSpec) -> IntradayGrid:
    """Grid used when emitting a synthetic market to tick files."""
    if spec.slots == DEFAULT_GRID.size:
        return DEFAULT_GRID
    start = DEFAULT_GRID.start_second
    if start + spec.slots > 86400:
        start = 0
    return IntradayGrid(start, start + spec.slots)


def emit_day_rows(
    eps: np.ndarray, cents: np.ndarray, date: dt.date, grid: IntradayGrid
) -> tuple[list[str], list[str]]:
    """Trade and quote CSV rows reproducing one stock-day exactly.

    Trades: the first active second gets an anchor trade at the reference
    price followed by a trade one cent in the sign's direction; later
    active seconds get one trade at reference +- 1 cent. Run through the
    tick rule this yields exactly the per-second signs in eps.

    Quotes: one row whenever the midpoint cents change (plus the first
    second), bid/ask one cent either side of the midpoint.
    """
    day = date.isoformat()
    trade_rows: list[str] = []
    quote_rows: list[str] = []
    active = np.nonzero(eps)[0]
    if active.size:
        ref = int(cents[0])
        t0 = grid.start_second + int(active[0])
        trade_rows.append(f"{day},{format_hms(t0)},{_cents_str(ref)},{TRADE_VOLUME}")
        for t in active:
            sec = grid.start_second + int(t)
            price = ref + int(eps[t])
            trade_rows.append(
                f"{day},{format_hms(sec)},{_cents_str(price)},{TRADE_VOLUME}"
            )
    prev = None
    for t in range(len(cents)):
        c = int(cents[t])
        if prev is None or c != prev:
            sec = grid.start_second + t
            quote_rows.append(
                f"{day},{format_hms(sec)},{_cents_str(c - 1)},{_cents_str(c + 1)}"
            )
            prev = c
    return trade_rows, quote_rows


def emit_market(
    spec: SynthSpec, out_dir: str | Path, grid: IntradayGrid | None = None
) -> dict:
    """Write the market as per-stock trades/quotes files plus ground truth.

    Returns the ground-truth manifest (also written as JSON), recording the
    spec and, where applicable, target correlator parameters and the
    impact kernel.
    """
    grid = grid or synth_grid(spec)
    if grid.size != spec.slots:
        raise DataError("grid size must match spec slots for emission")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    symbols = spec.resolved_symbols()
    handles = {}
    try:
        for sym in symbols:
            th = open(out / f"{sym}_trades.csv", "w")
            qh = open(out / f"{sym}_quotes.csv", "w")
            th.write("date,time,price,volume\n")
            qh.write("date,time,bid,ask\n")
            handles[sym] = (th, qh)
        for d in range(spec.n_days):
            date, eps, cents = _day_arrays(spec, d)
            for i, sym in enumerate(symbols):
                trade_rows, quote_rows = emit_day_rows(eps[i], cents[i], date, grid)
                th, qh = handles[sym]
                if trade_rows:
                    th.write("\n".join(trade_rows) + "\n")
                if quote_rows:
                    qh.write("\n".join(quote_rows) + "\n")
    finally:
        for th, qh in handles.values():
            th.close()
            qh.close()

    truth: dict = {"spec": spec.to_dict(), "files": {}}
    for sym in symbols:
        truth["files"][sym] = {
            "trades": f"{sym}_trades.csv",
            "quotes": f"{sym}_quotes.csv",
        }
    if isinstance(spec.sign_model, LatentSignModel):
        truth["target_correlator"] = {
            "theta": spec.sign_model.theta,
            "tau0": spec.sign_model.tau0,
            "gamma": spec.sign_model.gamma,
        }
    if spec.impact_model is not None:
        kern = spec.impact_model.kernel
        truth["kernel"] = {
            "amplitude": kern.amplitude,
            "peak_lag": kern.peak_lag,
            "support": kern.support_length,
            "couplings": [list(c) for c in spec.impact_model.couplings],
        }
    (out / "ground_truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n"
    )
    return truth
