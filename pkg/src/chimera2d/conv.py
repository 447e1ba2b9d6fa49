"""Convolution form of the data-independent 2D SSM.

A time-invariant system's response is translation invariant, so the
whole map is a causal 2D convolution. The kernels are read off from the
hidden-state response to a unit impulse at the grid origin: K1/K2 hold
the (N-vector) h1/h2 responses per offset, and the scalar kernel applied
to the input is C1 K1 + C2 K2.
"""

from __future__ import annotations

import numpy as np

from .discretize import DiscreteSSM2D
from .recurrence import as_series, forward_recurrence


def impulse_kernels(dp: DiscreteSSM2D, v_count: int, t_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Hidden-state impulse responses per offset, shapes (V, T, N)."""
    if v_count < 1 or t_count < 1:
        raise ValueError("kernel extents must be positive")
    impulse = np.zeros((v_count, t_count, 1))
    impulse[0, 0, 0] = 1.0
    _, (h1, h2) = forward_recurrence(dp, impulse)
    return h1[:, :, :, 0], h2[:, :, :, 0]


def conv_apply(
    k1: np.ndarray,
    k2: np.ndarray,
    c1: np.ndarray,
    c2: np.ndarray,
    x,
) -> np.ndarray:
    """Causal 2D convolution y[v,t] = sum_{dv,dt>=0} k[dv,dt] x[v-dv,t-dt]
    with the scalar kernel k = C1 K1 + C2 K2, applied per channel."""
    x = as_series(x)
    v_count, t_count, d = x.shape
    if k1.shape[0] < v_count or k1.shape[1] < t_count:
        raise ValueError("kernel extents must cover the input extents")
    kern = k1 @ np.asarray(c1, dtype=float) + k2 @ np.asarray(c2, dtype=float)
    y = np.zeros((v_count, t_count, d))
    for dv in range(v_count):
        for dt in range(t_count):
            y[dv:, dt:] += kern[dv, dt] * x[: v_count - dv, : t_count - dt]
    return y
