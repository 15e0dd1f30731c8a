"""Power-law fits for sign-correlator curves.

The model is y(tau) = theta / (1 + (tau/tau0)^2)^(gamma/2). theta enters
linearly, so every candidate (tau0, gamma) has a closed-form optimal
amplitude; a coarse grid over (tau0, gamma) seeds a bounded least-squares
refinement of the two nonlinear parameters. Unweighted residuals
throughout; the reported quality is the mean squared residual per degree
of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import NumericError
from .estimators import LagCurve

N_PARAMS = 3
MIN_POINTS = N_PARAMS + 1


@dataclass(frozen=True)
class FitBounds:
    """Search box and grid resolution for the nonlinear parameters."""

    tau0_lo: float = 1e-3
    tau0_hi: float = 1e3
    gamma_lo: float = 0.1
    gamma_hi: float = 3.0
    grid_tau0: int = 25
    grid_gamma: int = 25
    refine_top: int = 4

    def __post_init__(self):
        if not (0 < self.tau0_lo < self.tau0_hi):
            raise ValueError("need 0 < tau0_lo < tau0_hi")
        if not (0 < self.gamma_lo < self.gamma_hi):
            raise ValueError("need 0 < gamma_lo < gamma_hi")


DEFAULT_BOUNDS = FitBounds()


@dataclass(frozen=True)
class FitResult:
    """Fitted power-law parameters and fit quality.

    Attributes:
        theta: Amplitude; the model value at lag 0.
        tau0: Crossover lag in seconds (NaN when non-identifiable).
        gamma: Decay exponent (NaN when non-identifiable).
        chi2: Mean squared residual per degree of freedom, >= 0.
        n_points: Number of fitted points M.
        n_params: Number of model parameters (3).
        memory_class: "long" when gamma < 1, "short" when gamma >= 1,
            "unclassified" for non-identifiable fits.
        identifiable: False when the data pin down only the amplitude
            (e.g. an all-zero curve).
    """

    theta: float
    tau0: float
    gamma: float
    chi2: float
    n_points: int
    n_params: int = N_PARAMS
    memory_class: str = "unclassified"
    identifiable: bool = True

    def __post_init__(self):
        if self.chi2 < 0:
            raise ValueError("chi2 must be >= 0")
        if self.identifiable and not self.tau0 > 0:
            raise ValueError("identifiable fit requires tau0 > 0")

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "tau0": self.tau0,
            "gamma": self.gamma,
            "chi2": self.chi2,
            "M": self.n_points,
            "M_P": self.n_params,
            "memory_class": self.memory_class,
            "identifiable": self.identifiable,
        }


def power_law_eval(theta: float, tau0: float, gamma: float, tau):
    """Model value theta / (1 + (tau/tau0)^2)^(gamma/2).

    Raises:
        ValueError: For tau0 <= 0 (outside the model's domain).
    """
    if not tau0 > 0:
        raise ValueError(f"tau0 must be > 0, got {tau0}")
    tau_arr = np.asarray(tau, dtype=np.float64)
    out = theta / (1.0 + (tau_arr / tau0) ** 2) ** (gamma / 2.0)
    if np.ndim(tau) == 0:
        return float(out)
    return out


def normalized_chi2(model_values, data_values, n_params: int = N_PARAMS) -> float:
    """Sum of squared residuals divided by (M - n_params).

    Raises:
        NumericError: When M <= n_params (no degrees of freedom).
    """
    f = np.asarray(model_values, dtype=np.float64)
    y = np.asarray(data_values, dtype=np.float64)
    if f.shape != y.shape or f.ndim != 1:
        raise ValueError("model and data must be 1-d arrays of equal length")
    m = len(y)
    if m <= n_params:
        raise NumericError(f"chi2 needs more than {n_params} points, got {m}")
    resid = f - y
    return float(np.sum(resid * resid, dtype=np.longdouble) / (m - n_params))


def _basis(x: np.ndarray, tau0: float, gamma: float) -> np.ndarray:
    return 1.0 / (1.0 + (x / tau0) ** 2) ** (gamma / 2.0)


def _profiled(x: np.ndarray, y: np.ndarray, tau0: float, gamma: float):
    """Optimal linear amplitude and residual sum for fixed (tau0, gamma)."""
    g = _basis(x, tau0, gamma)
    gg = float(np.dot(g, g))
    if gg == 0.0 or not math.isfinite(gg):
        return 0.0, float(np.dot(y, y)), g
    theta = float(np.dot(g, y)) / gg
    r = theta * g - y
    return theta, float(np.dot(r, r)), g


def fit_power_law(curve: LagCurve, bounds: FitBounds | None = None) -> FitResult:
    """Least-squares fit of the power law to a lag curve.

    Missing values (NaN) are skipped. The fit is deterministic: a fixed
    (tau0, gamma) grid picks seeds, each seed is refined with a bounded
    trust-region least-squares solve over (log tau0, gamma) with the
    amplitude profiled out, and the best candidate (grid point or refined)
    wins.

    Raises:
        NumericError: Fewer than four defined points.
    """
    b = bounds or DEFAULT_BOUNDS
    mask = np.isfinite(curve.values)
    x = np.asarray(curve.lags, dtype=np.float64)[mask]
    y = np.asarray(curve.values, dtype=np.float64)[mask]
    m = len(y)
    if m < MIN_POINTS:
        raise NumericError(f"fit needs at least {MIN_POINTS} defined points, got {m}")
    if not y.any():
        return FitResult(
            theta=0.0,
            tau0=math.nan,
            gamma=math.nan,
            chi2=0.0,
            n_points=m,
            memory_class="unclassified",
            identifiable=False,
        )

    tau0s = np.geomspace(b.tau0_lo, b.tau0_hi, b.grid_tau0)
    gammas = np.linspace(b.gamma_lo, b.gamma_hi, b.grid_gamma)
    seeds = []
    for t0 in tau0s:
        for g in gammas:
            theta, ss, _ = _profiled(x, y, t0, g)
            seeds.append((ss, t0, g, theta))
    seeds.sort(key=lambda s: s[0])
    best_ss, best_t0, best_g, best_theta = seeds[0]

    lo = np.array([math.log(b.tau0_lo), b.gamma_lo])
    hi = np.array([math.log(b.tau0_hi), b.gamma_hi])

    def residual(u):
        t0 = math.exp(u[0])
        theta, _, g = _profiled(x, y, t0, u[1])
        return theta * g - y

    for ss, t0, g, theta in seeds[: b.refine_top]:
        u0 = np.clip(np.array([math.log(t0), g]), lo, hi)
        try:
            sol = least_squares(
                residual,
                u0,
                bounds=(lo, hi),
                method="trf",
                xtol=1e-14,
                ftol=1e-14,
                gtol=1e-14,
                max_nfev=400,
            )
        except Exception:
            continue
        t0_r = math.exp(float(sol.x[0]))
        g_r = float(sol.x[1])
        theta_r, ss_r, _ = _profiled(x, y, t0_r, g_r)
        if math.isfinite(ss_r) and ss_r < best_ss:
            best_ss, best_t0, best_g, best_theta = ss_r, t0_r, g_r, theta_r

    chi2 = best_ss / (m - N_PARAMS)
    return FitResult(
        theta=best_theta,
        tau0=best_t0,
        gamma=best_g,
        chi2=chi2,
        n_points=m,
        memory_class="long" if best_g < 1.0 else "short",
    )
