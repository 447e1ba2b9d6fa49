"""Layered trend/seasonal architecture on top of the 2D SSM.

Each layer runs a trend block (one or more 2D SSMs, bi-directional
along variates) and a seasonal block whose time-axis step size is its
own learnable parameter, followed by a linear re-discretization map.
The blocks are combined by residual decomposition:

    trend_l    = trend_block(residual_{l-1})
    residual_l = redisc(seasonal_block(residual_{l-1} - trend_l))

The model output sums the trend components and the final residual, adds
a SwiGLU gate branch computed from the raw input, and applies a linear
readout. Training is plain gradient descent with central-difference
gradients over the flat parameter store; the same store is what the
JSON checkpoint format serializes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .discretize import ContinuousSSM2D, discretize_all
from .recurrence import as_series, closed_loop_decode
from .scan import scan_forward
from .selective import SelectiveProjections, inv_softplus, project_grid_params, softplus
from .structured import companion_from_coeffs, diagonal_matrix


@dataclass
class ModelConfig:
    """Hyperparameters; `n_trend_ssm` is the number of chained 2D SSMs
    inside each trend block."""

    layers: int = 2
    state_dim: int = 4
    channels: int = 8
    gate_dim: int = 0  # 0 means same as channels
    out_channels: int = 0  # 0 means same as channels
    season_hint: float = 1.0
    selective: bool = False
    bidirectional: bool = True
    n_trend_ssm: int = 1
    dt_init: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.layers < 0 or self.state_dim < 1 or self.channels < 1:
            raise ValueError("invalid model dimensions")
        if self.gate_dim == 0:
            self.gate_dim = self.channels
        if self.out_channels == 0:
            self.out_channels = self.channels


# smallest allowed discretization step (softplus output underflows below it)
DT_FLOOR = 1e-12

SSM_PARAM_NAMES = ("a1", "a2", "a3", "a4", "b1", "b2", "c1", "c2", "dt1_raw", "dt2_raw")
PROJ_PARAM_NAMES = (
    "W_B1", "W_B2", "W_C1", "W_C2", "b_B1", "b_B2", "b_C1", "b_C2",
    "w_d1", "w_d2", "b_d1", "b_d2",
)


def _swish(z):
    return z / (1.0 + np.exp(-z))


@dataclass
class ChimeraModel:
    config: ModelConfig
    params: dict[str, np.ndarray] = field(default_factory=dict)
    loss_history: list[float] = field(default_factory=list)

    # ------------------------------------------------------------------
    # construction / serialization

    @staticmethod
    def init_random(config: ModelConfig) -> "ChimeraModel":
        rng = np.random.default_rng(config.seed)
        n, d = config.state_dim, config.channels
        p: dict[str, np.ndarray] = {}

        def ssm_block(prefix: str, dt_time: float):
            # mildly contractive transition structure; B/C near unit scale
            p[f"{prefix}.a1"] = rng.uniform(-0.4, -0.05, n)
            p[f"{prefix}.a2"] = rng.uniform(-0.4, -0.05, n)
            p[f"{prefix}.a3"] = rng.uniform(-1.0, -0.1, n)
            p[f"{prefix}.a4"] = rng.uniform(-1.0, -0.1, n)
            p[f"{prefix}.dt1_raw"] = np.array(inv_softplus(dt_time))
            p[f"{prefix}.dt2_raw"] = np.array(inv_softplus(config.dt_init))
            if config.selective:
                lim = 1.0 / np.sqrt(d)
                for name in ("W_B1", "W_B2", "W_C1", "W_C2"):
                    p[f"{prefix}.{name}"] = rng.uniform(-lim, lim, (n, d))
                for name in ("b_B1", "b_B2", "b_C1", "b_C2"):
                    p[f"{prefix}.{name}"] = rng.uniform(-lim, lim, n)
                for name in ("w_d1", "w_d2"):
                    p[f"{prefix}.{name}"] = rng.uniform(-lim, lim, d)
                p[f"{prefix}.b_d1"] = np.array(inv_softplus(dt_time))
                p[f"{prefix}.b_d2"] = np.array(inv_softplus(config.dt_init))
            else:
                scale = 1.0 / np.sqrt(n)
                for name in ("b1", "b2", "c1", "c2"):
                    p[f"{prefix}.{name}"] = rng.normal(0.0, scale, n)

        dirs = ("f", "b") if config.bidirectional else ("f",)
        for layer in range(config.layers):
            for j in range(config.n_trend_ssm):
                for tau in dirs:
                    ssm_block(f"layer{layer}.trend{j}.{tau}", config.dt_init)
            for tau in dirs:
                ssm_block(f"layer{layer}.seasonal.{tau}", config.season_hint)
            p[f"layer{layer}.redisc.w"] = np.eye(d) + rng.normal(0.0, 0.02, (d, d))
        lim = 1.0 / np.sqrt(d)
        p["gate.w_in"] = rng.uniform(-lim, lim, (config.gate_dim, d))
        p["gate.w_val"] = rng.uniform(-lim, lim, (config.gate_dim, d))
        p["gate.w_out"] = rng.uniform(-1.0 / np.sqrt(config.gate_dim), 1.0 / np.sqrt(config.gate_dim), (d, config.gate_dim))
        p["head.w"] = np.eye(config.out_channels, d) + rng.normal(0.0, 0.02, (config.out_channels, d))
        ssm_block("decoder", config.dt_init)
        if config.selective:
            # the decoder is driven through closed_loop_decode, which is
            # data-independent; give it plain B/C parameters as well
            scale = 1.0 / np.sqrt(n)
            for name in ("b1", "b2", "c1", "c2"):
                p[f"decoder.{name}"] = rng.normal(0.0, scale, n)
        p["decoder.d1"] = rng.normal(0.0, 1.0 / np.sqrt(n), n)
        p["decoder.d2"] = rng.normal(0.0, 1.0 / np.sqrt(n), n)
        return ChimeraModel(config=config, params=p)

    def copy(self) -> "ChimeraModel":
        return ChimeraModel(
            config=self.config,
            params={k: v.copy() for k, v in self.params.items()},
            loss_history=list(self.loss_history),
        )

    def to_checkpoint(self) -> dict:
        return {
            "config": asdict(self.config),
            "params": {k: v.tolist() for k, v in self.params.items()},
        }

    @staticmethod
    def from_checkpoint(blob: dict) -> "ChimeraModel":
        config = ModelConfig(**blob["config"])
        params = {k: np.asarray(v, dtype=float) for k, v in blob["params"].items()}
        return ChimeraModel(config=config, params=params)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_checkpoint(), fh)

    @staticmethod
    def load(path) -> "ChimeraModel":
        with open(path, encoding="utf-8") as fh:
            return ChimeraModel.from_checkpoint(json.load(fh))

    # ------------------------------------------------------------------
    # forward pieces

    def _a_set(self, prefix: str):
        p = self.params
        return (
            companion_from_coeffs(p[f"{prefix}.a1"]),
            companion_from_coeffs(p[f"{prefix}.a2"]),
            diagonal_matrix(p[f"{prefix}.a3"]),
            diagonal_matrix(p[f"{prefix}.a4"]),
        )

    def _block_dp(self, prefix: str):
        p = self.params
        a1, a2, a3, a4 = self._a_set(prefix)
        cont = ContinuousSSM2D(
            A1=a1, A2=a2, A3=a3, A4=a4,
            B1=p[f"{prefix}.b1"], B2=p[f"{prefix}.b2"],
            C1=p[f"{prefix}.c1"], C2=p[f"{prefix}.c2"],
            # softplus underflows to 0.0 for very negative raws; keep the
            # step size strictly positive so the model stays valid mid-fit
            dt1=max(float(softplus(p[f"{prefix}.dt1_raw"])), DT_FLOOR),
            dt2=max(float(softplus(p[f"{prefix}.dt2_raw"])), DT_FLOOR),
        )
        return discretize_all(cont)

    def _block_proj(self, prefix: str) -> SelectiveProjections:
        p = self.params
        kw = {name: p[f"{prefix}.{name}"] for name in PROJ_PARAM_NAMES}
        kw["b_d1"] = float(kw["b_d1"])
        kw["b_d2"] = float(kw["b_d2"])
        return SelectiveProjections(**kw)

    def _ssm_pass(self, prefix: str, x: np.ndarray) -> np.ndarray:
        if self.config.selective:
            cells = project_grid_params(self._block_proj(prefix), x, self._a_set(prefix))
            return scan_forward(cells, x)
        return scan_forward(self._block_dp(prefix), x)

    def _directional_pass(self, prefix: str, x: np.ndarray) -> np.ndarray:
        y = self._ssm_pass(f"{prefix}.f", x)
        if self.config.bidirectional:
            y = y + self._ssm_pass(f"{prefix}.b", x[::-1])[::-1]
        return y

    def trend_forward(self, layer: int, x: np.ndarray) -> np.ndarray:
        out = x
        for j in range(self.config.n_trend_ssm):
            out = self._directional_pass(f"layer{layer}.trend{j}", out)
        return out

    def seasonal_forward(self, layer: int, x: np.ndarray) -> np.ndarray:
        y = self._directional_pass(f"layer{layer}.seasonal", x)
        return y @ self.params[f"layer{layer}.redisc.w"].T

    def layer_forward(self, layer: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        trend = self.trend_forward(layer, x)
        residual = self.seasonal_forward(layer, x - trend)
        return trend, residual

    def gate(self, x: np.ndarray) -> np.ndarray:
        p = self.params
        return (_swish(x @ p["gate.w_in"].T) * (x @ p["gate.w_val"].T)) @ p["gate.w_out"].T

    def forward(self, x) -> np.ndarray:
        x = as_series(x)
        residual = x
        combined = np.zeros_like(x)
        for layer in range(self.config.layers):
            trend, residual = self.layer_forward(layer, residual)
            combined = combined + trend
        if self.config.layers > 0:
            combined = combined + residual
        combined = combined + self.gate(x)
        return combined @ self.params["head.w"].T

    __call__ = forward

    def decode(self, x_ctx, horizon: int) -> np.ndarray:
        """Closed-loop forecast through the decoder SSM and the readout."""
        dp = self._block_dp("decoder")
        out = closed_loop_decode(
            dp, self.params["decoder.d1"], self.params["decoder.d2"], x_ctx, horizon
        )
        return out @ self.params["head.w"].T


# ----------------------------------------------------------------------
# finite-difference training


def fd_gradient(
    model: ChimeraModel,
    loss_fn,
    names: list[str] | None = None,
    step_scale: float = 1.0,
) -> dict[str, np.ndarray]:
    """Central-difference gradient of loss_fn(model) with respect to the
    named parameters (all of them by default); per-coordinate step is
    1e-4 * max(1, |theta|) * step_scale."""
    names = list(model.params) if names is None else names
    grads: dict[str, np.ndarray] = {}
    work = model.copy()
    for name in names:
        theta = work.params[name]
        grad = np.zeros_like(theta)
        flat = theta.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            h = 1e-4 * max(1.0, abs(orig)) * step_scale
            flat[i] = orig + h
            up = loss_fn(work)
            flat[i] = orig - h
            down = loss_fn(work)
            flat[i] = orig
            if not (np.isfinite(up) and np.isfinite(down)):
                raise FloatingPointError(f"non-finite loss while differentiating {name}")
            gflat[i] = (up - down) / (2.0 * h)
        grads[name] = grad
    return grads


def mse_loss(pred: np.ndarray, target: np.ndarray) -> float:
    return float(np.mean((pred - target) ** 2))


def fit(
    model: ChimeraModel,
    data: tuple[np.ndarray, np.ndarray],
    steps: int,
    lr: float,
    names: list[str] | None = None,
    tol: float | None = None,
) -> ChimeraModel:
    """Plain gradient descent on the MSE between model(x) and y.

    Returns an updated copy; the per-step losses are recorded on its
    `loss_history`. Aborts with FloatingPointError if the loss diverges.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    x, y = data
    x = as_series(x)
    y = as_series(y)
    model = model.copy()
    names = [n for n in (names or model.params) if not n.startswith("decoder.")]

    def loss_fn(m: ChimeraModel) -> float:
        try:
            loss = mse_loss(m.forward(x), y)
        except ValueError as exc:
            # forward pass overflowed before the loss could be formed
            raise FloatingPointError(f"training diverged: {exc}; reduce lr") from exc
        if not np.isfinite(loss):
            raise FloatingPointError(f"training diverged: loss={loss}; reduce lr")
        return loss

    # overflow inside a diverging step surfaces as FloatingPointError
    # above; the intermediate numpy warnings are just noise
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            loss = loss_fn(model)
            model.loss_history.append(loss)
            if tol is not None and loss < tol:
                break
            grads = fd_gradient(model, loss_fn, names)
            for name, g in grads.items():
                model.params[name] -= lr * g
    return model
