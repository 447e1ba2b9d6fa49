"""Zero-order-hold discretization of the continuous 2D SSM.

The continuous model carries four transition matrices (two companion
along time, two diagonal along variates), input columns B1/B2, readout
rows C1/C2, and one step size per axis. ZOH gives

    Abar = exp(dt * A),   Bbar = A^{-1} (Abar - I) B,

with the phi1-series fallback Bbar = dt * phi1(dt*A) B when A is close
to singular; phi1(z) = (e^z - 1)/z. Abar1/Abar2 use the time step,
Abar3/Abar4 the variate step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .structured import DIAGONAL, StructuredMatrix, expm

# below this smallest singular value the inverse branch is abandoned
SINGULARITY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ContinuousSSM2D:
    """Continuous-time parameter set, before discretization."""

    A1: StructuredMatrix
    A2: StructuredMatrix
    A3: StructuredMatrix
    A4: StructuredMatrix
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    dt1: float
    dt2: float

    def __post_init__(self):
        if self.dt1 <= 0 or self.dt2 <= 0:
            raise ValueError("step sizes must be positive")
        n = self.A1.n
        for mat in (self.A2, self.A3, self.A4):
            if mat.n != n:
                raise ValueError("all transition matrices must share N")
        for vec in (self.B1, self.B2, self.C1, self.C2):
            if np.asarray(vec).shape != (n,):
                raise ValueError("B and C vectors must have length N")


@dataclass(frozen=True)
class DiscreteSSM2D:
    """Discrete parameter set driving the 2D recurrence."""

    Abar1: np.ndarray
    Abar2: np.ndarray
    Abar3: np.ndarray
    Abar4: np.ndarray
    Bbar1: np.ndarray
    Bbar2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray

    @property
    def n(self) -> int:
        return self.Abar1.shape[0]


def phi1(m: np.ndarray, rel_tol: float = 1e-16) -> np.ndarray:
    """phi1(M) = sum_k M^k / (k+1)!, truncated when terms stop mattering."""
    n = m.shape[0]
    term = np.eye(n)
    total = term.copy()
    scale = max(np.abs(total).max(), 1.0)
    for k in range(1, 200):
        term = term @ m / (k + 1)
        total += term
        if np.abs(term).max() < rel_tol * scale:
            break
        scale = max(np.abs(total).max(), scale)
    return total


def _expm_scaled(a: StructuredMatrix, dt: float) -> np.ndarray:
    """exp(dt * A), keeping the elementwise path for diagonal A."""
    if a.kind == DIAGONAL:
        return expm(StructuredMatrix(DIAGONAL, dt * a.data))
    return expm(StructuredMatrix("dense", dt * a.dense()))


def zoh_pair(a: StructuredMatrix, b: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Discretize one (A, B) pair: returns (exp(dt*A), ZOH input matrix)."""
    if dt <= 0:
        raise ValueError("step size must be positive")
    b = np.asarray(b, dtype=float)
    abar = _expm_scaled(a, dt)
    if a.kind == DIAGONAL:
        diag = dt * np.asarray(a.data, dtype=float)
        # dt * phi1(dt*a) elementwise, exact at a == 0
        bbar = np.where(diag == 0.0, dt, np.expm1(diag) / np.where(diag == 0.0, 1.0, a.data)) * b
        return abar, bbar
    a_dense = a.dense()
    svals = np.linalg.svd(a_dense, compute_uv=False)
    if svals.min() > SINGULARITY_THRESHOLD:
        bbar = np.linalg.solve(a_dense, (abar - np.eye(a.n)) @ b)
    else:
        bbar = dt * (phi1(dt * a_dense) @ b)
    return abar, bbar


def discretize_all(p: ContinuousSSM2D) -> DiscreteSSM2D:
    """Discretize the full parameter set (time step for A1/A2, variate
    step for A3/A4; B1 rides the (A1, dt1) pair, B2 the (A4, dt2) pair)."""
    abar1, bbar1 = zoh_pair(p.A1, p.B1, p.dt1)
    abar2 = _expm_scaled(p.A2, p.dt1)
    abar3 = _expm_scaled(p.A3, p.dt2)
    abar4, bbar2 = zoh_pair(p.A4, p.B2, p.dt2)
    return DiscreteSSM2D(
        Abar1=abar1,
        Abar2=abar2,
        Abar3=abar3,
        Abar4=abar4,
        Bbar1=bbar1,
        Bbar2=bbar2,
        C1=np.asarray(p.C1, dtype=float).copy(),
        C2=np.asarray(p.C2, dtype=float).copy(),
    )
