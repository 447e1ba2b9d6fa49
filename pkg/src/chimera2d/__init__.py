"""2D state space models for multivariate time series.

The package implements a coupled two-axis (time x variate) linear state
space model with structured transition matrices, zero-order-hold
discretization, an associative-operator parallel scan, a convolution
form, input-dependent parameters, and a trend/seasonal layer stack with
a closed-loop forecasting decoder.
"""

from .structured import (
    StructuredMatrix,
    companion_from_coeffs,
    diagonal_matrix,
    dense_matrix,
    apply,
    matrix_power,
    expm,
)
from .discretize import ContinuousSSM2D, DiscreteSSM2D, zoh_pair, discretize_all
from .recurrence import (
    forward_recurrence,
    bidirectional_forward,
    closed_loop_decode,
)
from .scan import ScanElement, op_star, inclusive_scan, scan_forward, CellParams
from .conv import impulse_kernels, conv_apply
from .selective import SelectiveProjections, project_cell_params, project_grid_params
from .variants import mamba2d_forward, materialize_matrices
from .ar import simulate_sar, sar_to_ssm, sar_predict
from .model import ChimeraModel, ModelConfig, fd_gradient, fit
from .metrics import compute_metrics

__all__ = [
    "StructuredMatrix",
    "companion_from_coeffs",
    "diagonal_matrix",
    "dense_matrix",
    "apply",
    "matrix_power",
    "expm",
    "ContinuousSSM2D",
    "DiscreteSSM2D",
    "zoh_pair",
    "discretize_all",
    "forward_recurrence",
    "bidirectional_forward",
    "closed_loop_decode",
    "ScanElement",
    "op_star",
    "inclusive_scan",
    "scan_forward",
    "CellParams",
    "impulse_kernels",
    "conv_apply",
    "SelectiveProjections",
    "project_cell_params",
    "project_grid_params",
    "mamba2d_forward",
    "materialize_matrices",
    "simulate_sar",
    "sar_to_ssm",
    "sar_predict",
    "ChimeraModel",
    "ModelConfig",
    "fd_gradient",
    "fit",
    "compute_metrics",
]
