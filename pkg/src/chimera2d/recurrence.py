"""Sequential reference implementation of the discrete 2D recurrence.

Series are plain float arrays of shape (V, T, d): V variates, T time
steps, d channels. Everything here is deliberately written as explicit
loops over grid cells; it is the oracle that the scan, convolution, and
restricted variants are tested against.

Cell update, with zero state outside the grid:

    h1[v, t] = Abar1 h1[v, t-1] + Abar2 h2[v, t-1] + Bbar1 x[v, t]
    h2[v, t] = Abar3 h1[v-1, t] + Abar4 h2[v-1, t] + Bbar2 x[v, t]
    y[v, t]  = C1 h1[v, t] + C2 h2[v, t]

The input term is the outer product (N,1) @ (1,d), so each channel runs
through the same state dynamics independently.
"""

from __future__ import annotations

import numpy as np

from .discretize import DiscreteSSM2D


def as_series(x) -> np.ndarray:
    """Validate and coerce a (V, T, d) series array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3 or min(x.shape) < 1:
        raise ValueError("series must have shape (V, T, d) with positive extents")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    return x


def forward_recurrence(dp: DiscreteSSM2D, x) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """Run the 2D recurrence; returns (y, (h1, h2)) with hidden grids of
    shape (V, T, N, d)."""
    x = as_series(x)
    v_count, t_count, d = x.shape
    n = dp.n
    h1 = np.zeros((v_count, t_count, n, d))
    h2 = np.zeros((v_count, t_count, n, d))
    y = np.zeros((v_count, t_count, d))
    for v in range(v_count):
        for t in range(t_count):
            bx1 = np.outer(dp.Bbar1, x[v, t])
            bx2 = np.outer(dp.Bbar2, x[v, t])
            s1 = bx1
            if t > 0:
                s1 = s1 + dp.Abar1 @ h1[v, t - 1] + dp.Abar2 @ h2[v, t - 1]
            s2 = bx2
            if v > 0:
                s2 = s2 + dp.Abar3 @ h1[v - 1, t] + dp.Abar4 @ h2[v - 1, t]
            h1[v, t] = s1
            h2[v, t] = s2
            y[v, t] = dp.C1 @ s1 + dp.C2 @ s2
    return y, (h1, h2)


def bidirectional_forward(dp_f: DiscreteSSM2D, dp_b: DiscreteSSM2D, x) -> np.ndarray:
    """Forward module on x plus backward module on the variate-reversed x,
    un-reversed and summed."""
    if dp_f.n != dp_b.n:
        raise ValueError("forward and backward modules must share N")
    x = as_series(x)
    y_f, _ = forward_recurrence(dp_f, x)
    y_b, _ = forward_recurrence(dp_b, x[::-1])
    return y_f + y_b[::-1]


def closed_loop_decode(
    dp: DiscreteSSM2D,
    d1: np.ndarray,
    d2: np.ndarray,
    x_ctx,
    horizon: int,
) -> np.ndarray:
    """Autoregressive rollout: after consuming the context, D1/D2 read the
    hidden pair to predict the next input column, which is fed back; the
    emitted outputs for the `horizon` generated columns are returned."""
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    x_ctx = as_series(x_ctx)
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    v_count, t_ctx, d = x_ctx.shape
    n = dp.n
    if horizon == 0:
        return np.zeros((v_count, 0, d))

    # previous-column hidden pair, advanced one time column at a time
    h1_prev = np.zeros((v_count, n, d))
    h2_prev = np.zeros((v_count, n, d))
    h1_col = np.zeros((v_count, n, d))
    h2_col = np.zeros((v_count, n, d))

    def advance(col_x, first):
        for v in range(v_count):
            s1 = np.outer(dp.Bbar1, col_x[v])
            if not first:
                s1 = s1 + dp.Abar1 @ h1_prev[v] + dp.Abar2 @ h2_prev[v]
            s2 = np.outer(dp.Bbar2, col_x[v])
            if v > 0:
                s2 = s2 + dp.Abar3 @ h1_col[v - 1] + dp.Abar4 @ h2_col[v - 1]
            h1_col[v] = s1
            h2_col[v] = s2
        h1_prev[:] = h1_col
        h2_prev[:] = h2_col

    for t in range(t_ctx):
        advance(x_ctx[:, t], first=(t == 0))

    out = np.zeros((v_count, horizon, d))
    for step in range(horizon):
        u = np.einsum("n,vnd->vd", d1, h1_prev) + np.einsum("n,vnd->vd", d2, h2_prev)
        advance(u, first=False)
        out[:, step] = np.einsum("n,vnd->vd", dp.C1, h1_prev) + np.einsum(
            "n,vnd->vd", dp.C2, h2_prev
        )
    return out
