"""Forecast accuracy metrics (MSE, MAE, SMAPE, MASE, OWA).

SMAPE and MASE follow the M4-competition definitions; OWA averages the
two relative to a seasonal-naive reference forecast computed from the
in-sample series by the harness itself.
"""

from __future__ import annotations

import numpy as np


def smape(pred: np.ndarray, truth: np.ndarray) -> float:
    """(200/n) * sum |p - t| / (|p| + |t|); cells where both values are
    zero contribute 0."""
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    denom = np.abs(pred) + np.abs(truth)
    terms = np.where(denom == 0.0, 0.0, np.abs(pred - truth) / np.where(denom == 0.0, 1.0, denom))
    return float(200.0 * terms.mean())


def mase(pred: np.ndarray, truth: np.ndarray, insample: np.ndarray, season: int = 1) -> float:
    """Mean absolute error scaled by the in-sample seasonal-naive error."""
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    insample = np.asarray(insample, dtype=float).ravel()
    if insample.size <= season:
        raise ValueError("in-sample series too short for the seasonal naive scale")
    scale = np.abs(insample[season:] - insample[:-season]).mean()
    if scale == 0.0:
        raise ValueError("MASE undefined: in-sample naive error is zero")
    return float(np.abs(pred - truth).mean() / scale)


def seasonal_naive_forecast(insample: np.ndarray, horizon: int, season: int = 1) -> np.ndarray:
    """Repeat the last observed seasonal cycle over the horizon."""
    insample = np.asarray(insample, dtype=float).ravel()
    tail = insample[-season:]
    reps = int(np.ceil(horizon / season))
    return np.tile(tail, reps)[:horizon]


def compute_metrics(
    pred,
    truth,
    insample,
    season: int = 1,
) -> dict[str, float]:
    """All metrics for one forecast; the naive reference used inside OWA
    is the seasonal-naive forecast built from `insample`."""
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.shape != truth.shape:
        raise ValueError("pred and truth must have equal lengths")
    err = pred - truth
    out = {
        "MSE": float(np.mean(err**2)),
        "MAE": float(np.mean(np.abs(err))),
        "SMAPE": smape(pred, truth),
        "MASE": mase(pred, truth, insample, season),
    }
    naive = seasonal_naive_forecast(np.asarray(insample, dtype=float), pred.size, season)
    naive_smape = smape(naive, truth)
    naive_mase = mase(naive, truth, insample, season)
    if naive_smape == 0.0 or naive_mase == 0.0:
        out["OWA"] = 0.0 if (out["SMAPE"] == 0.0 and out["MASE"] == 0.0) else float("inf")
    else:
        out["OWA"] = float(0.5 * (out["SMAPE"] / naive_smape + out["MASE"] / naive_mase))
    return out
