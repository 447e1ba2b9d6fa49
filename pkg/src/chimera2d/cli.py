"""Command-line surface.

Subcommands: ``generate`` (synthetic trend+seasonal series), ``fit``
(gradient-descent training to a JSON checkpoint), ``forecast``
(closed-loop rollout), ``eval`` (forecast metrics), ``bench-scan``
(timing table for the scan paths), and ``selftest`` (the full invariant
registry).

Exit codes: 0 success, 1 runtime failure, 2 bad configuration or usage.
Errors are reported as a single machine-parsable line on stderr of the
form ``error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ar import simulate_sar
from .metrics import compute_metrics
from .model import ChimeraModel, ModelConfig, fit
from .recurrence import forward_recurrence
from .scan import resolve_threads, scan_forward
from . import invariants

DEFAULT_BENCH_SIZES = (256, 512, 1024, 2048, 4096)
BENCH_VARIATES = 8
# enough channels that per-step work, not call overhead, dominates timings
BENCH_CHANNELS = 4


class ConfigError(ValueError):
    """Configuration or usage problem; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs beyond command-line flags; loaded from the
    ``--config`` JSON file, with unknown keys rejected."""

    # model
    layers: int = 2
    state_dim: int = 4
    channels: int = 1
    season_hint: float = 1.0
    selective: bool = False
    bidirectional: bool = True
    # training
    steps: int = 100
    lr: float = 0.05
    seed: int = 0
    tol: float = 0.0
    # data / forecasting
    data: str = ""
    horizon: int = 8
    # synthetic generation
    variates: int = 2
    length: int = 128
    phi: tuple[float, ...] = (0.5,)
    eta: tuple[float, ...] = ()
    season: int = 1
    noise_std: float = 0.0
    # benchmarking
    bench_sizes: tuple[int, ...] = DEFAULT_BENCH_SIZES

    def __post_init__(self):
        positive = {
            "state_dim": self.state_dim,
            "channels": self.channels,
            "season_hint": self.season_hint,
            "lr": self.lr,
            "horizon": self.horizon,
            "variates": self.variates,
            "length": self.length,
            "season": self.season,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        for name, value in (("layers", self.layers), ("steps", self.steps),
                            ("tol", self.tol), ("noise_std", self.noise_std)):
            if value < 0:
                raise ConfigError(f"{name} must be nonnegative, got {value}")
        if any(t <= 0 for t in self.bench_sizes):
            raise ConfigError("bench_sizes must be positive")

    def to_dict(self) -> dict:
        blob = dataclasses.asdict(self)
        for name in ("phi", "eta", "bench_sizes"):
            blob[name] = list(blob[name])
        return blob

    @staticmethod
    def from_dict(blob: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = sorted(set(blob) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        blob = dict(blob)
        for name in ("phi", "eta", "bench_sizes"):
            if name in blob:
                blob[name] = tuple(blob[name])
        try:
            return RunConfig(**blob)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @staticmethod
    def load(path: str | None, seed_override: int | None = None) -> "RunConfig":
        blob = {}
        if path:
            try:
                with open(path, encoding="utf-8") as fh:
                    blob = json.load(fh)
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {path}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
            if not isinstance(blob, dict):
                raise ConfigError("config must be a JSON object")
        if seed_override is not None:
            blob["seed"] = seed_override
        return RunConfig.from_dict(blob)

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            layers=self.layers,
            state_dim=self.state_dim,
            channels=self.channels,
            season_hint=self.season_hint,
            selective=self.selective,
            bidirectional=self.bidirectional,
            seed=self.seed,
        )


# ----------------------------------------------------------------------
# CSV plumbing


def write_series_csv(fh, series: np.ndarray) -> None:
    """Write a (V, T) series with header ``t,var_0,...,var_{V-1}``, one
    row per time step."""
    series = np.atleast_2d(np.asarray(series, dtype=float))
    v_count, t_count = series.shape
    fh.write("t," + ",".join(f"var_{v}" for v in range(v_count)) + "\n")
    for t in range(t_count):
        fh.write(f"{t}," + ",".join(repr(float(x)) for x in series[:, t]) + "\n")


def read_series_csv(path: str) -> np.ndarray:
    """Read the CSV written by :func:`write_series_csv` back to (V, T)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [line.strip() for line in fh if line.strip()]
    except FileNotFoundError as exc:
        raise ConfigError(f"series file not found: {path}") from exc
    if not lines:
        raise ConfigError(f"empty series file: {path}")
    header = lines[0].split(",")
    if header[0] != "t" or any(not c.startswith("var_") for c in header[1:]):
        raise ConfigError(f"unrecognized CSV header in {path}: {lines[0]}")
    v_count = len(header) - 1
    if v_count == 0:
        raise ConfigError(f"no variate columns in {path}")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != v_count + 1:
            raise ConfigError(f"ragged CSV row in {path}: {line}")
        rows.append([float(c) for c in cells[1:]])
    return np.asarray(rows, dtype=float).T


def _out_path(args, name: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# ----------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    cfg = RunConfig.load(args.config, args.seed)
    rng = np.random.default_rng(cfg.seed)
    need = max(len(cfg.phi), len(cfg.eta) * cfg.season, 1)
    series = np.empty((cfg.variates, cfg.length))
    for v in range(cfg.variates):
        init = rng.standard_normal(need)
        series[v] = simulate_sar(
            cfg.phi, cfg.eta, cfg.season, init,
            noise_std=cfg.noise_std, t_count=cfg.length,
            seed=int(rng.integers(2**32)),
        )
    path = _out_path(args, "series.csv")
    with open(path, "w", encoding="utf-8") as fh:
        write_series_csv(fh, series)
    print(f"wrote {path} ({cfg.variates} variates x {cfg.length} steps)")
    return 0


def cmd_fit(args) -> int:
    cfg = RunConfig.load(args.config, args.seed)
    if not cfg.data:
        raise ConfigError("fit requires a 'data' path in the config")
    series = read_series_csv(cfg.data)
    if series.shape[1] < 2:
        raise ConfigError("training series needs at least 2 time steps")
    if cfg.channels != 1:
        raise ConfigError("CSV training data is univariate per variate; set channels=1")
    x = series[:, :-1, None]
    y = series[:, 1:, None]
    model = ChimeraModel.init_random(cfg.model_config())
    trained = fit(model, (x, y), steps=cfg.steps, lr=cfg.lr,
                  tol=cfg.tol if cfg.tol > 0 else None)
    ckpt = _out_path(args, "checkpoint.json")
    trained.save(ckpt)
    losses = _out_path(args, "loss_log.json")
    with open(losses, "w", encoding="utf-8") as fh:
        json.dump(trained.loss_history, fh)
    final = trained.loss_history[-1] if trained.loss_history else float("nan")
    print(f"wrote {ckpt} and {losses} (final loss {final:.6g})")
    return 0


def cmd_forecast(args) -> int:
    cfg = RunConfig.load(args.config, args.seed)
    if not cfg.data:
        raise ConfigError("forecast requires a 'data' path in the config")
    model = ChimeraModel.load(args.checkpoint)
    series = read_series_csv(cfg.data)
    forecast = model.decode(series[:, :, None], cfg.horizon)[..., 0]
    path = _out_path(args, "forecast.csv")
    with open(path, "w", encoding="utf-8") as fh:
        write_series_csv(fh, forecast)
    print(f"wrote {path} ({forecast.shape[0]} variates x {cfg.horizon} steps)")
    return 0


def cmd_eval(args) -> int:
    pred = read_series_csv(args.pred)
    truth = read_series_csv(args.truth)
    insample = read_series_csv(args.insample)
    if pred.shape != truth.shape:
        raise ConfigError(f"prediction shape {pred.shape} != truth shape {truth.shape}")
    metrics = compute_metrics(pred, truth, insample.ravel(), season=args.season)
    path = _out_path(args, "metrics.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2)
    print(json.dumps(metrics))
    return 0


def _bench_once(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cmd_bench_scan(args) -> int:
    cfg = RunConfig.load(args.config, args.seed)
    threads = resolve_threads(args.threads)
    rng = np.random.default_rng(cfg.seed)
    dp = invariants._random_dp(rng, cfg.state_dim)
    rows = []
    for t_count in cfg.bench_sizes:
        x = rng.standard_normal((BENCH_VARIATES, t_count, BENCH_CHANNELS))
        seq = _bench_once(lambda: forward_recurrence(dp, x))
        scan = _bench_once(lambda: scan_forward(dp, x, schedule="rowscan", threads=threads))
        wave = _bench_once(lambda: scan_forward(dp, x, schedule="wavefront"))
        rows.append((t_count, seq, scan, wave))
    path = _out_path(args, "bench.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("T,sequential_s,scan_s,wavefront_s\n")
        for t_count, seq, scan, wave in rows:
            fh.write(f"{t_count},{seq:.6f},{scan:.6f},{wave:.6f}\n")
    for t_count, seq, scan, wave in rows:
        print(f"T={t_count:5d}  sequential={seq:.4f}s  scan={scan:.4f}s  wavefront={wave:.4f}s")
    print(f"wrote {path}")
    return 0


def cmd_selftest(args) -> int:
    results = invariants.run_all()
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status} {res.name}"
        if not res.passed:
            line += f": {res.detail}"
            failures += 1
        print(line)
    print(f"{len(results) - failures}/{len(results)} invariants passed")
    return 1 if failures else 0


# ----------------------------------------------------------------------
# dispatch


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one-line, exit 2 via ConfigError
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chimera2d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="PRNG seed (overrides config)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--threads", type=int,
                       help="worker threads (default: CHIMERA2D_THREADS or 1)")
        return p

    common(sub.add_parser("generate", help="write a synthetic series CSV")) \
        .set_defaults(fn=cmd_generate)
    common(sub.add_parser("fit", help="train a model, write checkpoint + loss log")) \
        .set_defaults(fn=cmd_fit)
    p = common(sub.add_parser("forecast", help="closed-loop multi-step forecast CSV"))
    p.add_argument("--checkpoint", required=True, help="model checkpoint JSON")
    p.set_defaults(fn=cmd_forecast)
    p = common(sub.add_parser("eval", help="forecast metrics JSON"))
    p.add_argument("--pred", required=True, help="forecast CSV")
    p.add_argument("--truth", required=True, help="ground-truth CSV")
    p.add_argument("--insample", required=True, help="in-sample history CSV")
    p.add_argument("--season", type=int, default=1, help="seasonal period for MASE")
    p.set_defaults(fn=cmd_eval)
    common(sub.add_parser("bench-scan", help="time sequential vs scan paths")) \
        .set_defaults(fn=cmd_bench_scan)
    common(sub.add_parser("selftest", help="run the invariant registry")) \
        .set_defaults(fn=cmd_selftest)
    return parser


def cmd_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 1
        print(f"error: runtime: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cmd_dispatch())


if __name__ == "__main__":
    main()
