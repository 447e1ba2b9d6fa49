"""Registry of executable invariant checks.

Every behavioral guarantee the library makes is registered here by name,
grouped by the module it belongs to. The ``selftest`` CLI subcommand runs
the whole registry; the test suite contains a meta-test asserting that
the registry and the per-module manifest stay in sync, so an invariant
cannot be added without being wired into the selftest.

Each check is a zero-argument callable that raises ``AssertionError``
(with a short message) on failure and returns ``None`` on success.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .structured import (
    StructuredMatrix,
    companion_from_coeffs,
    diagonal_matrix,
    dense_matrix,
    apply,
    matrix_power,
    expm,
)
from .discretize import ContinuousSSM2D, DiscreteSSM2D, phi1, zoh_pair, discretize_all
from .recurrence import forward_recurrence, bidirectional_forward
from .scan import ScanElement, op_star, inclusive_scan, scan_forward, CellParams
from .conv import impulse_kernels, conv_apply
from .selective import SelectiveProjections, softplus, project_grid_params
from .variants import materialize_matrices, matrix_form_apply
from .ar import simulate_sar, sar_to_ssm, sar_predict
from .model import ChimeraModel, ModelConfig, fd_gradient, mse_loss


@dataclass(frozen=True)
class InvariantResult:
    name: str
    passed: bool
    detail: str


REGISTRY: dict[str, Callable[[], None]] = {}

# Manifest of declared invariants per library module. The meta-test and
# run_all() both treat this as the single source of truth.
MODULE_INVARIANTS: dict[str, tuple[str, ...]] = {
    "structured": (
        "structured.apply_matches_dense",
        "structured.power_consistency",
        "structured.expm_doubling",
        "structured.companion_nilpotent",
    ),
    "discretize": (
        "discretize.step_resolution",
        "discretize.input_branch_agreement",
    ),
    "recurrence": (
        "recurrence.linearity",
        "recurrence.causality",
        "recurrence.decoupled_sum",
    ),
    "scan": (
        "scan.associativity",
        "scan.split_invariance",
        "scan.oracle_equivalence",
        "scan.chunk_determinism",
    ),
    "conv": (
        "conv.matches_recurrence",
        "conv.translation_invariance",
    ),
    "selective": (
        "selective.step_monotonicity",
        "selective.zero_weight_degeneration",
    ),
    "model": (
        "model.zero_seasonal_reduction",
        "model.gate_closed_linearity",
        "model.gradient_sanity",
    ),
    "variants": (
        "variants.matrix_matches_recurrence",
        "variants.time_matrix_causal",
    ),
    "ar": (
        "ar.constructive_embedding",
        "ar.zero_noise_determinism",
    ),
    "cli": (
        "cli.config_roundtrip",
        "cli.forecast_csv_shape",
    ),
}


def invariant(name: str):
    def register(fn: Callable[[], None]) -> Callable[[], None]:
        REGISTRY[name] = fn
        return fn

    return register


# ----------------------------------------------------------------------
# shared helpers


def _contraction(rng: np.random.Generator, n: int, scale: float = 0.6) -> np.ndarray:
    a = rng.standard_normal((n, n))
    return scale * a / max(1.0, np.linalg.norm(a, 2))


def _random_dp(rng: np.random.Generator, n: int, coupled: bool = True) -> DiscreteSSM2D:
    zero = np.zeros((n, n))
    return DiscreteSSM2D(
        Abar1=_contraction(rng, n),
        Abar2=_contraction(rng, n) if coupled else zero,
        Abar3=_contraction(rng, n) if coupled else zero,
        Abar4=_contraction(rng, n),
        Bbar1=rng.standard_normal(n),
        Bbar2=rng.standard_normal(n),
        C1=rng.standard_normal(n),
        C2=rng.standard_normal(n),
    )


def _random_element(rng: np.random.Generator, n: int, d: int) -> ScanElement:
    return ScanElement(
        rng.standard_normal((n, n)),
        rng.standard_normal((n, n)),
        rng.standard_normal((n, d)),
        rng.standard_normal((n, n)),
        rng.standard_normal((n, n)),
        rng.standard_normal((n, d)),
    )


def _element_diff(p: ScanElement, q: ScanElement) -> float:
    num = 0.0
    for i in range(1, 7):
        a, b = getattr(p, f"p{i}"), getattr(q, f"p{i}")
        num = max(num, float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(b)))))
    return num


def _fold(elems: list[ScanElement]) -> ScanElement:
    acc = elems[0]
    for e in elems[1:]:
        acc = op_star(acc, e)
    return acc


# ----------------------------------------------------------------------
# structured transition matrices


@invariant("structured.apply_matches_dense")
def _check_apply_matches_dense():
    rng = np.random.default_rng(11)
    n = 5
    mats = [
        companion_from_coeffs(rng.standard_normal(n)),
        diagonal_matrix(rng.standard_normal(n)),
        dense_matrix(rng.standard_normal((n, n))),
    ]
    for m in mats:
        x = rng.standard_normal(n)
        diff = np.max(np.abs(apply(m, x) - m.dense() @ x))
        assert diff < 1e-12, f"{m.kind}: apply vs dense diff {diff:.3e}"


@invariant("structured.power_consistency")
def _check_power_consistency():
    rng = np.random.default_rng(12)
    n = 4
    mats = [
        companion_from_coeffs(0.3 * rng.standard_normal(n)),
        diagonal_matrix(rng.uniform(-1, 1, n)),
        dense_matrix(0.4 * rng.standard_normal((n, n))),
    ]
    for m in mats:
        for j, k in [(1, 2), (2, 3), (3, 3), (0, 6)]:
            lhs = matrix_power(m, j + k)
            rhs = matrix_power(m, j) @ matrix_power(m, k)
            diff = np.max(np.abs(lhs - rhs))
            assert diff < 1e-10, f"{m.kind}: M^{j + k} != M^{j} M^{k} ({diff:.3e})"


@invariant("structured.expm_doubling")
def _check_expm_doubling():
    rng = np.random.default_rng(13)
    diag = rng.uniform(-1, 1, 4)
    dense = 0.5 * rng.standard_normal((4, 4))
    for m, m2 in [
        (diagonal_matrix(diag), diagonal_matrix(2 * diag)),
        (dense_matrix(dense), dense_matrix(2 * dense)),
    ]:
        diff = np.max(np.abs(expm(m) @ expm(m) - expm(m2)))
        assert diff < 1e-9, f"{m.kind}: expm(A)^2 vs expm(2A) diff {diff:.3e}"


@invariant("structured.companion_nilpotent")
def _check_companion_nilpotent():
    for n in (1, 2, 4, 6):
        m = companion_from_coeffs(np.zeros(n))
        p = matrix_power(m, n)
        assert np.all(p == 0.0), f"shift^{n} not exactly zero for N={n}"


# ----------------------------------------------------------------------
# zero-order-hold discretization


@invariant("discretize.step_resolution")
def _check_step_resolution():
    rng = np.random.default_rng(21)
    n = 3
    a = dense_matrix(0.5 * rng.standard_normal((n, n)))
    b = rng.standard_normal(n)
    dt = 0.15
    for k in (2, 3, 4):
        abar_big, bbar_big = zoh_pair(a, b, k * dt)
        abar, bbar = zoh_pair(a, b, dt)
        # homogeneous: one big step equals k small steps
        small = np.linalg.matrix_power(abar, k)
        diff = np.max(np.abs(abar_big - small))
        assert diff < 1e-10, f"k={k}: transition resolution diff {diff:.3e}"
        # forced with input held constant over the k-block
        h_small = np.zeros(n)
        for _ in range(k):
            h_small = abar @ h_small + bbar
        diff = np.max(np.abs(bbar_big - h_small))
        assert diff < 1e-10, f"k={k}: forced resolution diff {diff:.3e}"


@invariant("discretize.input_branch_agreement")
def _check_input_branch_agreement():
    rng = np.random.default_rng(22)
    n = 4
    for trial in range(20):
        a = rng.standard_normal((n, n))
        if abs(np.linalg.det(a)) <= 1e-6:
            continue
        b = rng.standard_normal(n)
        dt = rng.uniform(0.05, 0.5)
        abar, _ = zoh_pair(dense_matrix(a), b, dt)
        via_inverse = np.linalg.solve(a, (abar - np.eye(n)) @ b)
        via_series = dt * phi1(dt * a) @ b
        rel = np.max(np.abs(via_inverse - via_series)) / (1.0 + np.max(np.abs(via_series)))
        assert rel < 1e-9, f"trial {trial}: branch disagreement {rel:.3e}"


# ----------------------------------------------------------------------
# sequential 2D recurrence


@invariant("recurrence.linearity")
def _check_recurrence_linearity():
    rng = np.random.default_rng(31)
    dp = _random_dp(rng, 3)
    xa = rng.standard_normal((4, 6, 2))
    xb = rng.standard_normal((4, 6, 2))
    a, b = 1.7, -0.4
    ya, _ = forward_recurrence(dp, xa)
    yb, _ = forward_recurrence(dp, xb)
    y, _ = forward_recurrence(dp, a * xa + b * xb)
    diff = np.max(np.abs(y - (a * ya + b * yb)))
    assert diff < 1e-10, f"superposition violated by {diff:.3e}"


@invariant("recurrence.causality")
def _check_recurrence_causality():
    rng = np.random.default_rng(32)
    dp = _random_dp(rng, 2)
    x = rng.standard_normal((5, 7, 1))
    y, _ = forward_recurrence(dp, x)
    vp, tp = 2, 4
    bumped = x.copy()
    bumped[vp, tp, 0] += 1.0
    yb, _ = forward_recurrence(dp, bumped)
    changed = np.abs(yb - y) > 1e-14
    for v in range(5):
        for t in range(7):
            if t < tp or v < vp:
                assert not changed[v, t].any(), f"acausal influence at ({v}, {t})"


@invariant("recurrence.decoupled_sum")
def _check_recurrence_decoupled_sum():
    rng = np.random.default_rng(33)
    n = 3
    dp = _random_dp(rng, n, coupled=False)
    x = rng.standard_normal((4, 5, 2))
    y, _ = forward_recurrence(dp, x)
    # independent 1D recurrence along each axis
    expected = np.zeros_like(y)
    for v in range(4):
        h = np.zeros((n, x.shape[2]))
        for t in range(5):
            h = dp.Abar1 @ h + np.outer(dp.Bbar1, x[v, t])
            expected[v, t] += dp.C1 @ h
    for t in range(5):
        h = np.zeros((n, x.shape[2]))
        for v in range(4):
            h = dp.Abar4 @ h + np.outer(dp.Bbar2, x[v, t])
            expected[v, t] += dp.C2 @ h
    diff = np.max(np.abs(y - expected))
    assert diff < 1e-10, f"decoupled output differs from 1D sum by {diff:.3e}"


# ----------------------------------------------------------------------
# associative parallel scan


@invariant("scan.associativity")
def _check_scan_associativity():
    rng = np.random.default_rng(41)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(1, 4))
        p, q, r = (_random_element(rng, n, d) for _ in range(3))
        worst = max(worst, _element_diff(op_star(op_star(p, q), r), op_star(p, op_star(q, r))))
    assert worst < 1e-9, f"associativity violated: {worst:.3e}"


@invariant("scan.split_invariance")
def _check_scan_split_invariance():
    rng = np.random.default_rng(42)
    elems = [_random_element(rng, 3, 2) for _ in range(9)]
    whole = _fold(elems)
    for k in (1, 3, 4, 8):
        split = op_star(_fold(elems[:k]), _fold(elems[k:]))
        diff = _element_diff(split, whole)
        assert diff < 1e-9, f"cut at {k}: diff {diff:.3e}"


@invariant("scan.oracle_equivalence")
def _check_scan_oracle_equivalence():
    rng = np.random.default_rng(43)
    for v_count, t_count in [(1, 8), (8, 1), (4, 7), (8, 8)]:
        dp = _random_dp(rng, 3)
        x = rng.standard_normal((v_count, t_count, 2))
        y_ref, _ = forward_recurrence(dp, x)
        for schedule in ("rowscan", "rowscan-star", "wavefront"):
            y = scan_forward(dp, x, schedule=schedule)
            diff = np.max(np.abs(y - y_ref))
            assert diff < 1e-9, f"{schedule} {v_count}x{t_count}: diff {diff:.3e}"
        # selective (input-dependent) parameters on the same grid
        a_set = (
            companion_from_coeffs(rng.uniform(-0.4, 0, 3)),
            companion_from_coeffs(rng.uniform(-0.4, 0, 3)),
            diagonal_matrix(rng.uniform(-1, -0.1, 3)),
            diagonal_matrix(rng.uniform(-1, -0.1, 3)),
        )
        proj = SelectiveProjections.init_random(3, 2, seed=v_count * 10 + t_count)
        cells = project_grid_params(proj, x, a_set)
        y_ref = _selective_reference(cells, x)
        for schedule in ("rowscan", "rowscan-star", "wavefront"):
            y = scan_forward(cells, x, schedule=schedule)
            diff = np.max(np.abs(y - y_ref))
            assert diff < 1e-9, f"selective {schedule} {v_count}x{t_count}: diff {diff:.3e}"


def _selective_reference(cells: CellParams, x: np.ndarray) -> np.ndarray:
    """Direct per-cell recurrence with position-dependent parameters."""
    v_count, t_count, d = x.shape
    n = cells.n
    h1 = np.zeros((v_count, t_count, n, d))
    h2 = np.zeros((v_count, t_count, n, d))
    y = np.empty((v_count, t_count, d))
    for v in range(v_count):
        for t in range(t_count):
            bx = np.outer(cells.Bbar1[v, t], x[v, t])
            h1[v, t] = bx
            if t > 0:
                h1[v, t] = h1[v, t] + cells.Abar1[v, t] @ h1[v, t - 1]
                h1[v, t] = h1[v, t] + cells.Abar2[v, t] @ h2[v, t - 1]
            h2[v, t] = np.outer(cells.Bbar2[v, t], x[v, t])
            if v > 0:
                h2[v, t] = h2[v, t] + cells.Abar3[v, t] @ h1[v - 1, t]
                h2[v, t] = h2[v, t] + cells.Abar4[v, t] @ h2[v - 1, t]
            y[v, t] = cells.C1[v, t] @ h1[v, t] + cells.C2[v, t] @ h2[v, t]
    return y


@invariant("scan.chunk_determinism")
def _check_scan_chunk_determinism():
    rng = np.random.default_rng(44)
    elems = [_random_element(rng, 3, 1) for _ in range(33)]
    base = inclusive_scan(elems, mode="tree", threads=1)
    for threads in (2, 3, 5):
        other = inclusive_scan(elems, mode="tree", threads=threads)
        diff = max(_element_diff(a, b) for a, b in zip(other, base))
        assert diff < 1e-9, f"threads={threads}: diff {diff:.3e}"


# ----------------------------------------------------------------------
# convolution form


@invariant("conv.matches_recurrence")
def _check_conv_matches_recurrence():
    rng = np.random.default_rng(51)
    for v_count, t_count in [(3, 5), (8, 8)]:
        dp = _random_dp(rng, 2)
        x = rng.standard_normal((v_count, t_count, 2))
        k1, k2 = impulse_kernels(dp, v_count, t_count)
        y_conv = conv_apply(k1, k2, dp.C1, dp.C2, x)
        y_rec, _ = forward_recurrence(dp, x)
        diff = np.max(np.abs(y_conv - y_rec))
        assert diff < 1e-10, f"{v_count}x{t_count}: conv vs recurrence diff {diff:.3e}"


@invariant("conv.translation_invariance")
def _check_conv_translation_invariance():
    rng = np.random.default_rng(52)
    dp = _random_dp(rng, 2)
    v_count, t_count = 7, 9
    v0, t0 = 2, 3

    def impulse_response(vi, ti):
        x = np.zeros((v_count, t_count, 1))
        x[vi, ti, 0] = 1.0
        y, _ = forward_recurrence(dp, x)
        return y[..., 0]

    base = impulse_response(0, 0)
    shifted = impulse_response(v0, t0)
    interior = shifted[v0:, t0:] - base[: v_count - v0, : t_count - t0]
    diff = np.max(np.abs(interior))
    assert diff < 1e-12, f"impulse response not shift-equivariant: {diff:.3e}"


# ----------------------------------------------------------------------
# input-dependent parameters


@invariant("selective.step_monotonicity")
def _check_selective_step_monotonicity():
    z = np.linspace(-6, 6, 101)
    dt = softplus(z)
    assert np.all(np.diff(dt) > 0), "softplus step sizes not strictly increasing"


@invariant("selective.zero_weight_degeneration")
def _check_selective_zero_weight_degeneration():
    rng = np.random.default_rng(61)
    n, d = 3, 2
    a_set = (
        companion_from_coeffs(rng.uniform(-0.4, 0, n)),
        companion_from_coeffs(rng.uniform(-0.4, 0, n)),
        diagonal_matrix(rng.uniform(-1, -0.1, n)),
        diagonal_matrix(rng.uniform(-1, -0.1, n)),
    )
    proj = replace(
        SelectiveProjections.zeros(n, d),
        b_B1=rng.standard_normal(n),
        b_B2=rng.standard_normal(n),
        b_C1=rng.standard_normal(n),
        b_C2=rng.standard_normal(n),
        b_d1=0.3,
        b_d2=-0.2,
    )
    x = rng.standard_normal((4, 6, d))
    y_sel = scan_forward(project_grid_params(proj, x, a_set), x)
    dp = discretize_all(
        ContinuousSSM2D(
            A1=a_set[0], A2=a_set[1], A3=a_set[2], A4=a_set[3],
            B1=proj.b_B1, B2=proj.b_B2, C1=proj.b_C1, C2=proj.b_C2,
            dt1=float(softplus(0.3)), dt2=float(softplus(-0.2)),
        )
    )
    y_const, _ = forward_recurrence(dp, x)
    diff = np.max(np.abs(y_sel - y_const))
    assert diff < 1e-10, f"zero-weight selective differs from constant by {diff:.3e}"


# ----------------------------------------------------------------------
# layered model


@invariant("model.zero_seasonal_reduction")
def _check_model_zero_seasonal_reduction():
    rng = np.random.default_rng(71)
    cfg = ModelConfig(layers=1, state_dim=2, channels=3, seed=7)
    model = ChimeraModel.init_random(cfg)
    model.params["layer0.redisc.w"] = np.zeros_like(model.params["layer0.redisc.w"])
    x = rng.standard_normal((3, 8, cfg.channels))
    y = model.forward(x)
    expected = (model.trend_forward(0, x) + model.gate(x)) @ model.params["head.w"].T
    diff = np.max(np.abs(y - expected))
    assert diff < 1e-10, f"zero seasonal map does not reduce to trend path: {diff:.3e}"


@invariant("model.gate_closed_linearity")
def _check_model_gate_closed_linearity():
    rng = np.random.default_rng(72)
    cfg = ModelConfig(layers=1, state_dim=2, channels=3, seed=8)
    model = ChimeraModel.init_random(cfg)
    model.params["gate.w_in"] = np.zeros_like(model.params["gate.w_in"])
    xa = rng.standard_normal((2, 7, cfg.channels))
    xb = rng.standard_normal((2, 7, cfg.channels))
    a, b = 0.9, -1.3
    lhs = model.forward(a * xa + b * xb)
    rhs = a * model.forward(xa) + b * model.forward(xb)
    diff = np.max(np.abs(lhs - rhs))
    assert diff < 1e-9, f"gate-closed model not linear: {diff:.3e}"


@invariant("model.gradient_sanity")
def _check_model_gradient_sanity():
    rng = np.random.default_rng(73)
    cfg = ModelConfig(layers=1, state_dim=2, channels=1, seed=9, bidirectional=False)
    model = ChimeraModel.init_random(cfg)
    x = rng.standard_normal((1, 16, 1))
    y = rng.standard_normal((1, 16, 1))

    def loss_fn(m):
        return mse_loss(m.forward(x), y)

    names = [n for n in model.params if not n.startswith("decoder.")]
    g1 = fd_gradient(model, loss_fn, names)
    g2 = fd_gradient(model, loss_fn, names, step_scale=0.5)
    agree, total = 0, 0
    for name in names:
        a, b = np.ravel(g1[name]), np.ravel(g2[name])
        assert np.all(np.isfinite(a)), f"non-finite gradient in {name}"
        scale = np.maximum(np.abs(b), 1e-8)
        agree += int(np.sum(np.abs(a - b) / scale < 1e-3))
        total += a.size
    assert agree >= 0.95 * total, f"only {agree}/{total} coords step-size consistent"


# ----------------------------------------------------------------------
# decoupled variant and its matrix form


@invariant("variants.matrix_matches_recurrence")
def _check_variants_matrix_matches_recurrence():
    rng = np.random.default_rng(81)
    for v_count, t_count in [(2, 4), (4, 4), (8, 8)]:
        dp_f = _random_dp(rng, 2, coupled=False)
        dp_b = _random_dp(rng, 2, coupled=False)
        x = rng.standard_normal((v_count, t_count, 1))
        y_ref = bidirectional_forward(dp_f, dp_b, x)
        m_time, m_var = materialize_matrices(dp_f, dp_b, v_count, t_count)
        y_mat = matrix_form_apply(m_time, m_var, x)
        diff = np.max(np.abs(y_mat - y_ref))
        assert diff < 1e-9, f"{v_count}x{t_count}: matrix form diff {diff:.3e}"


@invariant("variants.time_matrix_causal")
def _check_variants_time_matrix_causal():
    rng = np.random.default_rng(82)
    dp_f = _random_dp(rng, 3, coupled=False)
    dp_b = _random_dp(rng, 3, coupled=False)
    m_time, _ = materialize_matrices(dp_f, dp_b, 4, 6)
    upper = np.triu(np.ones((6, 6)), k=1).astype(bool)
    leak = np.max(np.abs(m_time[:, upper]))
    assert leak == 0.0, f"time-mixing matrix has acausal entries up to {leak:.3e}"


# ----------------------------------------------------------------------
# autoregressive oracle and embedding


@invariant("ar.constructive_embedding")
def _check_ar_constructive_embedding():
    rng = np.random.default_rng(91)
    for trial in range(8):
        p = int(rng.integers(0, 4))
        q = int(rng.integers(0 if p else 1, 4))
        s = int(rng.integers(1, 5))
        phi = _stable_coeffs(rng, p)
        eta = _stable_coeffs(rng, q)
        need = max(p, q * s, 1)
        init = rng.standard_normal(need)
        series = simulate_sar(phi, eta, s, init, noise_std=0.0, t_count=50, seed=trial)
        full = np.concatenate([init, series])
        pred = sar_predict(sar_to_ssm(phi, eta, s), full)
        diff = np.max(np.abs(pred[need - 1 : -1] - full[need:]))
        assert diff < 1e-8, f"trial {trial} (p={p}, q={q}, s={s}): diff {diff:.3e}"


def _stable_coeffs(rng: np.random.Generator, order: int) -> np.ndarray:
    """Draw lag polynomials with all roots outside the unit circle."""
    while True:
        coeffs = rng.uniform(-0.9, 0.9, order)
        if order == 0:
            return coeffs
        companion = companion_from_coeffs(coeffs[::-1]).dense().T
        if np.max(np.abs(np.linalg.eigvals(companion))) < 0.95:
            return coeffs


@invariant("ar.zero_noise_determinism")
def _check_ar_zero_noise_determinism():
    a = simulate_sar([0.5, 0.2], [0.3], 2, [1.0, -1.0], noise_std=0.1, t_count=30, seed=5)
    b = simulate_sar([0.5, 0.2], [0.3], 2, [1.0, -1.0], noise_std=0.1, t_count=30, seed=5)
    assert np.array_equal(a, b), "identical seeds produced different series"


# ----------------------------------------------------------------------
# command-line surface


@invariant("cli.config_roundtrip")
def _check_cli_config_roundtrip():
    from . import cli

    cfg = cli.RunConfig(layers=1, state_dim=2, channels=1, steps=3, horizon=5, seed=42)
    again = cli.RunConfig.from_dict(cfg.to_dict())
    assert cfg == again, "config did not survive a serialize/parse round trip"


@invariant("cli.forecast_csv_shape")
def _check_cli_forecast_csv_shape():
    from . import cli

    v_count, horizon = 3, 4
    forecast = np.arange(v_count * horizon, dtype=float).reshape(v_count, horizon)
    buf = io.StringIO()
    cli.write_series_csv(buf, forecast)
    lines = buf.getvalue().strip().splitlines()
    header = lines[0].split(",")
    assert header == ["t"] + [f"var_{v}" for v in range(v_count)], f"bad header {header}"
    assert len(lines) - 1 == horizon, f"expected {horizon} rows, got {len(lines) - 1}"
    assert all(len(line.split(",")) == v_count + 1 for line in lines[1:]), "bad column count"


# ----------------------------------------------------------------------
# runner


def run_all(names: list[str] | None = None) -> list[InvariantResult]:
    """Run the selected (default: all) registered invariants in manifest
    order and report one result per check."""
    ordered = [n for group in MODULE_INVARIANTS.values() for n in group]
    if names is not None:
        unknown = sorted(set(names) - set(ordered))
        if unknown:
            raise KeyError(f"unknown invariants: {', '.join(unknown)}")
        ordered = [n for n in ordered if n in set(names)]
    results = []
    for name in ordered:
        try:
            REGISTRY[name]()
        except AssertionError as exc:
            results.append(InvariantResult(name, False, str(exc)))
        except Exception as exc:  # noqa: BLE001 - report, don't crash the suite
            results.append(InvariantResult(name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append(InvariantResult(name, True, "ok"))
    return results
