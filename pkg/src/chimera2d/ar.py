"""Seasonal autoregressive simulators and their state-space realization.

simulate_sar generates x_k = sum_i phi_i x_{k-i} + sum_j eta_j x_{k-js}
(+ Gaussian noise). sar_to_ssm builds discrete SSM heads that reproduce
the recursion as one-step-ahead predictors: each head keeps a sliding
buffer of the needed lags via a shift-structured transition (a companion
matrix with zero coefficient column), injects the input at the first
state, and reads the prediction out with the AR coefficients. The
seasonal head advances with stride s, i.e. it runs on the time axis
subsampled by s (the operational meaning of a step size s times the
trend head's).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretize import DiscreteSSM2D


def simulate_sar(
    phi,
    eta,
    s: int,
    init,
    noise_std: float,
    t_count: int,
    seed: int = 0,
) -> np.ndarray:
    """Simulate SAR(p, q, s); `init` supplies the presample history and
    the returned series continues it for t_count further steps."""
    phi = np.asarray(phi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    init = np.asarray(init, dtype=float)
    p, q = phi.size, eta.size
    if s < 1:
        raise ValueError("seasonal stride must be >= 1")
    if t_count < 1:
        raise ValueError("series length must be >= 1")
    need = max(p, q * s)
    if init.size < need:
        raise ValueError(f"init history must supply at least {need} values")
    rng = np.random.default_rng(seed)
    x = np.concatenate([init, np.zeros(t_count)])
    for k in range(init.size, init.size + t_count):
        val = 0.0
        for i in range(1, p + 1):
            val += phi[i - 1] * x[k - i]
        for j in range(1, q + 1):
            val += eta[j - 1] * x[k - j * s]
        if noise_std > 0:
            val += rng.normal(0.0, noise_std)
        x[k] = val
    return x[init.size :]


def _shift_head(coeffs: np.ndarray) -> DiscreteSSM2D:
    """1D predictor head: shift-buffer state, input injected at the top,
    coefficients as the readout. Feeding the series x gives output
    y_t = sum_i c_i x_{t-i+1}, the AR one-step prediction."""
    n = coeffs.size
    shift = np.zeros((n, n))
    shift[1:, :-1] = np.eye(n - 1)
    zero = np.zeros((n, n))
    e1 = np.zeros(n)
    e1[0] = 1.0
    return DiscreteSSM2D(
        Abar1=shift, Abar2=zero, Abar3=zero.copy(), Abar4=zero.copy(),
        Bbar1=e1, Bbar2=np.zeros(n),
        C1=np.asarray(coeffs, dtype=float), C2=np.zeros(n),
    )


@dataclass(frozen=True)
class SARRealization:
    """Trend head plus seasonal head (stride s) realizing a SAR process."""

    trend: DiscreteSSM2D | None
    seasonal: DiscreteSSM2D | None
    s: int


def sar_to_ssm(phi, eta, s: int) -> SARRealization:
    """State-space realization whose one-step predictions reproduce the
    SAR recursion exactly on noise-free data."""
    phi = np.asarray(phi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if phi.size + eta.size == 0:
        raise ValueError("at least one coefficient set must be nonempty")
    if s < 1:
        raise ValueError("seasonal stride must be >= 1")
    trend = _shift_head(phi) if phi.size else None
    seasonal = _shift_head(eta) if eta.size else None
    return SARRealization(trend=trend, seasonal=seasonal, s=s)


def _head_outputs(dp: DiscreteSSM2D, series: np.ndarray) -> np.ndarray:
    """Cheap 1D pass of a predictor head over a univariate series."""
    n = dp.n
    h = np.zeros(n)
    out = np.empty(series.size)
    for t, value in enumerate(series):
        h = dp.Abar1 @ h + dp.Bbar1 * value
        out[t] = dp.C1 @ h
    return out


def sar_predict(real: SARRealization, series) -> np.ndarray:
    """One-step-ahead predictions: out[t] forecasts series[t + 1].

    The trend head consumes every sample; the seasonal head, stepping s
    times as coarsely, consumes the subsampled phase of the series that
    contains the lags x_{t+1-js}.
    """
    series = np.asarray(series, dtype=float)
    out = np.zeros(series.size)
    if real.trend is not None:
        out += _head_outputs(real.trend, series)
    if real.seasonal is not None:
        s = real.s
        for phase in range(s):
            idx = np.arange(phase, series.size, s)
            if idx.size == 0:
                continue
            sub_out = _head_outputs(real.seasonal, series[idx])
            # the prediction made at subsample m targets series[phase+(m+1)s],
            # so it contributes to out at time phase+(m+1)s-1
            targets = idx + s - 1
            keep = targets < series.size
            out[targets[keep]] += sub_out[keep]
    return out
