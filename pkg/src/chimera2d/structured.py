"""Structured square matrices: companion, diagonal, and dense.

A companion matrix is a shift matrix (ones on the subdiagonal) plus a
rank-1 last column, so applying it to a state costs O(N d). Diagonal
matrices apply, power, and exponentiate elementwise. Dense is the
fallback used wherever structure is lost (e.g. after a matrix
exponential of a companion).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

COMPANION = "companion"
DIAGONAL = "diagonal"
DENSE = "dense"


@dataclass(frozen=True)
class StructuredMatrix:
    """Tagged N x N matrix. `data` holds the coefficient column for
    companion, the diagonal for diagonal, and the full entries for dense."""

    kind: str
    data: np.ndarray

    def __post_init__(self):
        if self.kind not in (COMPANION, DIAGONAL, DENSE):
            raise ValueError(f"unknown matrix kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.data.shape[-1] if self.kind != DENSE else self.data.shape[0]

    def dense(self) -> np.ndarray:
        """Materialize as a plain dense array."""
        if self.kind == DENSE:
            return self.data.copy()
        if self.kind == DIAGONAL:
            return np.diag(self.data)
        n = self.data.shape[0]
        out = np.zeros((n, n))
        out[1:, :-1] = np.eye(n - 1)
        out[:, -1] = self.data
        return out


def companion_from_coeffs(a) -> StructuredMatrix:
    """Companion matrix with subdiagonal ones and last column `a`."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("companion coefficients must be a nonempty 1-d vector")
    return StructuredMatrix(COMPANION, a)


def diagonal_matrix(diag) -> StructuredMatrix:
    diag = np.asarray(diag, dtype=float)
    if diag.ndim != 1 or diag.size == 0:
        raise ValueError("diagonal must be a nonempty 1-d vector")
    return StructuredMatrix(DIAGONAL, diag)


def dense_matrix(entries) -> StructuredMatrix:
    entries = np.asarray(entries, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
        raise ValueError("dense matrix must be square and nonempty")
    return StructuredMatrix(DENSE, entries)


def apply(m: StructuredMatrix, x: np.ndarray) -> np.ndarray:
    """M @ X for X of shape (N,) or (N, d), using the structure of M."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != m.n:
        raise ValueError(f"shape mismatch: matrix is {m.n}x{m.n}, operand has leading dim {x.shape[0]}")
    if m.kind == DENSE:
        return m.data @ x
    if m.kind == DIAGONAL:
        return m.data.reshape(-1, *([1] * (x.ndim - 1))) * x
    # companion: shifted rows plus coefficient column times the last row
    out = np.empty_like(x, dtype=float)
    out[1:] = x[:-1]
    out[0] = 0.0
    a = m.data.reshape(-1, *([1] * (x.ndim - 1)))
    out += a * x[-1]
    return out


def matrix_power(m: StructuredMatrix, k: int) -> np.ndarray:
    """M**k as a dense array (diagonal stays O(N) internally)."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    if m.kind == DIAGONAL:
        return np.diag(m.data**k)
    return np.linalg.matrix_power(m.dense(), k)


def expm(m: StructuredMatrix) -> np.ndarray:
    """Matrix exponential as a dense array.

    Diagonal is elementwise exp; companion/dense go through
    scaling-and-squaring (scipy's Pade implementation).
    """
    if not np.all(np.isfinite(m.data)):
        raise ValueError("non-finite entries")
    if m.kind == DIAGONAL:
        return np.diag(np.exp(m.data))
    return scipy.linalg.expm(m.dense())
