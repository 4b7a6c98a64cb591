"""Batch experiment runner.

Seven experiment kinds wrap the library: Marcinkiewicz norms, Mellin
decay fits, square-function constants, the kernel-vs-spectral Riesz
cross-check, kernel-estimate audits, Calderon-Zygmund decomposition
demos, and empirical operator-norm estimation.

Every run writes CSV tables plus a ``summary.json`` with the echoed
config, results, and a pass/fail flag per invariant.  Outputs are
deterministic for a fixed config and seed, except the recorded
``runtime_seconds``.  Exit codes: 0 ok, 2 usage error, 3 numerical
failure, 4 invariant violation.

Config files are flat ``key=value`` text; ``--override key=value``
(repeatable) wins over the file, and ``--seed``/``--out`` flags win
over both.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .dyadic import cz_decompose, dyadic_maximal, dyadic_system
from .multipliers import (
    ATLViolation,
    BUILTIN_MULTIPLIERS,
    MarcOrder,
    MellinTailError,
    builtin_multiplier,
    decay_check,
    marcinkiewicz_seminorm,
    square_constant,
    square_function,
    square_function_params,
)
from .ouhermite import ou_system
from .products import (
    apply_T_split,
    cz_growth_check,
    cz_smooth_check,
    euclidean_heat_model,
    kappa_indicator,
    multiplier_from_kappa,
    product_grid,
    sample_product_pairs,
    sample_product_triples,
    torus_heat_model,
    torus_system,
)
from .spectral import (
    EvaluationError,
    MultiplierSpec,
    SpectralSystem,
    apply_multiplier,
    reconstruct,
    tensor,
)

__all__ = [
    "ExperimentConfig",
    "NormEstimate",
    "NumericalFailure",
    "UsageError",
    "build_config",
    "estimate_pnorm",
    "main",
    "operator_registry",
    "parse_config_file",
    "run",
    "spectral_sup_norm",
]


class UsageError(ValueError):
    """Invalid configuration; the message names the offending field."""


class NumericalFailure(RuntimeError):
    """An experiment produced non-finite output or an evaluation error."""


# -- configuration -----------------------------------------------------------


@dataclass(frozen=True)
class _Field:
    default: str
    parse: Callable[[str], object]
    check: Callable[[object], bool]
    doc: str


def _int_range(lo: int, hi: int) -> Callable[[object], bool]:
    return lambda v: lo <= v <= hi


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected a boolean")


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(part) for part in raw.split(","))


_ONE_ARG_BUILTINS = ("one", "riesz1", "imag", "imag_decay", "log_bump")

_SCHEMAS: Mapping[str, Mapping[str, _Field]] = {
    "marcinkiewicz": {
        "multiplier": _Field(
            "riesz2", str, lambda v: v in BUILTIN_MULTIPLIERS, "a built-in multiplier name"
        ),
        "rho": _Field(
            "1,1",
            _parse_int_list,
            lambda v: len(v) >= 1 and all(0 <= r <= 4 for r in v),
            "comma-separated orders, each in 0..4",
        ),
    },
    "mellin-decay": {
        "multiplier": _Field(
            "one", str, lambda v: v in _ONE_ARG_BUILTINS, "a one-variable built-in multiplier"
        ),
        "rho": _Field("1", int, _int_range(1, 3), "an integer order in 1..3"),
        "u_count": _Field("25", int, _int_range(5, 200), "number of u samples in 5..200"),
        "svg": _Field("false", _parse_bool, lambda v: True, "true/false"),
    },
    "square-function": {
        "n_order": _Field(
            "1",
            _parse_int_list,
            lambda v: 1 <= len(v) <= 2 and all(1 <= e <= 4 for e in v),
            "one or two comma-separated exponents in 1..4",
        ),
        "k_max": _Field("12", int, _int_range(4, 40), "an integer in 4..40"),
        "trials": _Field("20", int, _int_range(1, 200), "an integer in 1..200"),
    },
    "riesz-cross-check": {
        "trials": _Field("5", int, _int_range(1, 50), "an integer in 1..50"),
        "k_max": _Field("12", int, _int_range(4, 24), "an integer in 4..24"),
        "n_x": _Field("128", int, _int_range(32, 256), "an integer in 32..256"),
        "n_max": _Field("3", int, _int_range(1, 8), "an integer in 1..8"),
        "n_y": _Field("32", int, _int_range(8, 128), "an integer in 8..128"),
    },
    "cz-estimates": {
        "model_dim": _Field("1", int, _int_range(1, 2), "1 or 2"),
        "pairs": _Field("200", int, _int_range(10, 2000), "an integer in 10..2000"),
    },
    "cz-decompose": {
        "fixture": _Field("step", str, lambda v: v in ("step", "random"), "step or random"),
        "threshold": _Field("1.0", float, lambda v: v > 0, "a positive real"),
        "grid": _Field(
            "256", int, lambda v: v >= 8 and v & (v - 1) == 0, "a power of two, at least 8"
        ),
        "fibers": _Field("1", int, _int_range(1, 64), "an integer in 1..64"),
    },
    "norm-estimate": {
        "operator": _Field(
            "riesz", str, lambda v: v in operator_registry(), "a registered operator id"
        ),
        "p": _Field("2.0", float, lambda v: 1.0 < v < math.inf, "a real in (1, inf)"),
        "trials": _Field("20", int, _int_range(1, 500), "an integer in 1..500"),
    },
}

# kinds whose experiments draw random samples and therefore need a seed
_SAMPLED = ("square-function", "riesz-cross-check", "cz-estimates", "norm-estimate")


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment: kind, seed, output directory, parameters."""

    kind: str
    seed: int | None
    out: str
    params: Mapping[str, object]

    def param(self, name: str):
        return self.params[name]


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"config line {lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        values[key.strip()] = raw.strip()
    return values


def build_config(
    kind: str,
    file_values: Mapping[str, str] | None = None,
    overrides: Mapping[str, str] | None = None,
    seed: int | None = None,
    out: str | None = None,
) -> ExperimentConfig:
    if kind not in _SCHEMAS:
        raise UsageError(f"kind: unknown experiment {kind!r}")
    schema = _SCHEMAS[kind]
    raw = {name: field.default for name, field in schema.items()}
    reserved: dict[str, str] = {}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key in ("seed", "out"):
                reserved[key] = value
            elif key in schema:
                raw[key] = value
            else:
                raise UsageError(f"{key}: not a parameter of {kind}")

    params: dict[str, object] = {}
    for name, field in schema.items():
        try:
            value = field.parse(raw[name])
        except ValueError:
            raise UsageError(f"{name}: expected {field.doc} (got {raw[name]!r})") from None
        if not field.check(value):
            raise UsageError(f"{name}: expected {field.doc} (got {raw[name]!r})")
        params[name] = value

    if seed is None and "seed" in reserved:
        try:
            seed = int(reserved["seed"])
        except ValueError:
            raise UsageError(f"seed: expected an integer (got {reserved['seed']!r})") from None
    if seed is not None and seed < 0:
        raise UsageError("seed: must be non-negative")
    if seed is None and (kind in _SAMPLED or params.get("fixture") == "random"):
        raise UsageError("seed: required for sampled experiments")
    if out is None:
        out = reserved.get("out", f"reports/{kind}")
    return ExperimentConfig(kind=kind, seed=seed, out=str(out), params=params)


# -- operator registry and norm estimation -----------------------------------

_SYSTEM_CACHE: dict[str, SpectralSystem] = {}


def _cached_system(key: str, build: Callable[[], SpectralSystem]) -> SpectralSystem:
    if key not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[key] = build()
    return _SYSTEM_CACHE[key]


def _ou16() -> SpectralSystem:
    return _cached_system("ou16", lambda: ou_system(1, 16))


def _ou_torus() -> SpectralSystem:
    return _cached_system("ou12xtorus3", lambda: tensor(ou_system(1, 12), torus_system(3, 32)))


def operator_registry() -> dict[str, tuple[Callable[[], SpectralSystem], str, bool]]:
    """id -> (system builder, built-in multiplier name, needs ATL-safe draws)."""
    reg: dict[str, tuple[Callable[[], SpectralSystem], str, bool]] = {
        "identity": (_ou16, "one", False),
        "zero": (_ou16, "zero", False),
        "riesz": (_ou_torus, "riesz2", False),
    }
    for name in BUILTIN_MULTIPLIERS:
        if name == "riesz2":
            reg[name] = (_ou_torus, name, False)
        else:
            # imaginary-power multipliers are singular at the zero eigenvalue
            reg[name] = (_ou16, name, name in ("imag", "imag_decay", "log_bump"))
    return reg


def spectral_sup_norm(m: MultiplierSpec, sys_: SpectralSystem, atl_safe: bool) -> float:
    """sup |m| over the truncated spectrum reachable by the sampler."""
    lam = sys_.eigenvalue_matrix()
    if atl_safe:
        lam = lam[np.all(lam > 0, axis=1)]
    if len(lam) == 0:
        return 0.0
    return float(np.max(np.abs(m(lam))))


@dataclass(frozen=True)
class NormEstimate:
    """Empirical lower bound for an operator p-norm from random inputs."""

    p: float
    estimate: float
    trials: int
    argmax_trial: int

    def __post_init__(self):
        if self.estimate < 0:
            raise ValueError("estimate must be non-negative")


def _pnorm_ratios(operator: str, p: float, trials: int, seed: int) -> list[float]:
    registry = operator_registry()
    if operator not in registry:
        raise UsageError(f"operator: unknown id {operator!r}")
    build, mult_name, atl_safe = registry[operator]
    sys_ = build()
    m = builtin_multiplier(mult_name)
    ratios = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        for _ in range(8):
            c = sys_.random_coefficients(rng, atl_safe=atl_safe)
            f = reconstruct(c, sys_)
            norm_f = f.norm_lp(p)
            if norm_f > 1e-12:
                break
        else:
            raise NumericalFailure("could not draw an input with non-degenerate norm")
        g = reconstruct(apply_multiplier(m, sys_, c), sys_)
        ratios.append(g.norm_lp(p) / norm_f)
    return ratios


def _estimate_from_ratios(p: float, ratios: list[float]) -> NormEstimate:
    best = -1.0
    best_id = 0
    for i, r in enumerate(ratios):
        if r > best:
            best, best_id = r, i
    return NormEstimate(
        p=float(p), estimate=max(best, 0.0), trials=len(ratios), argmax_trial=best_id
    )


def estimate_pnorm(operator: str, p: float, trials: int, seed: int) -> NormEstimate:
    """Max of ||Tf||_p / ||f||_p over random band-limited inputs.

    Trials use independent child streams spawned from the seed, so the
    estimate is non-decreasing in ``trials`` for a fixed seed.
    """
    if not 1.0 < p < math.inf:
        raise UsageError("p: must lie in (1, inf)")
    if trials < 1:
        raise UsageError("trials: must be at least 1")
    return _estimate_from_ratios(p, _pnorm_ratios(operator, p, trials, seed))


# -- experiments --------------------------------------------------------------

Tables = dict[str, tuple[list[str], list[list]]]


def _run_marcinkiewicz(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    m = builtin_multiplier(cfg.param("multiplier"))
    rho = cfg.param("rho")
    if len(rho) != m.arity:
        raise UsageError(f"rho: length {len(rho)} != multiplier arity {m.arity}")
    order = MarcOrder(rho)
    grids = np.meshgrid(*[np.arange(r + 1) for r in order.rho], indexing="ij")
    rows = []
    norm = 0.0
    for gamma in zip(*(g.ravel() for g in grids)):
        gamma = tuple(int(e) for e in gamma)
        value = marcinkiewicz_seminorm(m, gamma)
        norm = max(norm, value)
        rows.append([",".join(map(str, gamma)), value])
    results = {"multiplier": m.name or cfg.param("multiplier"), "mar_norm": norm}
    invariants = {"seminorms_finite": all(math.isfinite(r[1]) for r in rows)}
    return results, invariants, {"seminorms": (["gamma", "seminorm"], rows)}


def _run_mellin_decay(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    m = builtin_multiplier(cfg.param("multiplier"))
    rho = cfg.param("rho")
    u_grid = np.geomspace(2.0, 40.0, cfg.param("u_count"))
    report = decay_check(m, N=[rho + 1], rho=[rho], u_grid=u_grid)
    rows = [[float(u), float(s)] for u, s in zip(report.u_grid, report.sup_abs)]
    results = {
        "multiplier": m.name or cfg.param("multiplier"),
        "n_order": rho + 1,
        "rho": rho,
        "slope": float(report.slopes[0]),
        "constant": report.constant,
    }
    invariants = {
        "slope_within_margin": report.slope_ok(),
        "constant_finite": math.isfinite(report.constant),
    }
    tables: Tables = {"decay": (["u", "sup_abs"], rows)}
    if cfg.param("svg"):
        tables["decay_fit_svg"] = (["__svg__"], _decay_svg_rows(report))
    return results, invariants, tables


def _decay_svg_rows(report) -> list[list]:
    fit = report.constant * (1.0 + report.u_grid) ** (-report.rho[0])
    svg = _svg_line_chart(
        report.u_grid,
        {"measured": report.sup_abs, "envelope": fit},
        title="Mellin decay of sup_t |M(m_{N,t})|",
    )
    return [[svg]]


def _svg_line_chart(x: np.ndarray, curves: dict[str, np.ndarray], title: str) -> str:
    """A minimal static log-log polyline chart; no plotting dependency."""
    width, height, pad = 640, 400, 50
    lx = np.log10(np.asarray(x, dtype=float))
    all_y = np.concatenate([np.maximum(np.asarray(y, dtype=float), 1e-300) for y in curves.values()])
    ly_min, ly_max = math.floor(np.log10(all_y.min())), math.ceil(np.log10(all_y.max()))
    if ly_max == ly_min:
        ly_max += 1
    def sx(v):
        return pad + (v - lx[0]) / (lx[-1] - lx[0]) * (width - 2 * pad)
    def sy(v):
        return height - pad - (v - ly_min) / (ly_max - ly_min) * (height - 2 * pad)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="black"/>',
    ]
    colors = ("steelblue", "firebrick", "seagreen")
    for (label, y), color in zip(curves.items(), colors):
        ly = np.log10(np.maximum(np.asarray(y, dtype=float), 1e-300))
        points = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(lx, ly))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}"/>')
        parts.append(
            f'<text x="{width - pad + 4}" y="{sy(ly[-1]):.2f}" font-size="11" '
            f'fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _square_system(d: int, k_max: int) -> SpectralSystem:
    if d == 1:
        return _cached_system(f"ou{k_max}", lambda: ou_system(1, k_max))
    return _cached_system(
        f"ou{k_max}xtorus3", lambda: tensor(ou_system(1, k_max), torus_system(3, 32))
    )


def _run_square_function(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    N = cfg.param("n_order")
    sys_ = _square_system(len(N), cfg.param("k_max"))
    params = square_function_params(sys_, N)
    const = square_constant(N)
    rows = []
    worst = 0.0
    for i, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.param("trials"))):
        rng = np.random.default_rng(child)
        c = sys_.random_coefficients(rng, atl_safe=True)
        f = reconstruct(c, sys_)
        g = square_function(sys_, c, params)
        ratio = g.norm_lp(2) ** 2 / f.norm_lp(2) ** 2
        err = abs(ratio - const)
        worst = max(worst, err)
        rows.append([i, float(ratio), float(err)])
    results = {"n_order": list(N), "constant": const, "max_abs_error": worst}
    invariants = {"constant_within_1e-6": worst <= 1e-6}
    return results, invariants, {"trials": (["trial", "ratio", "abs_error"], rows)}


def _run_riesz_cross_check(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    kappa = kappa_indicator(0.1, 0.9)
    model = torus_heat_model()
    n_x, k_max = cfg.param("n_x"), cfg.param("k_max")
    grid = product_grid(model, d=1, k_max=k_max, n_y=cfg.param("n_y"), n_x=n_x)
    sys_ = tensor(ou_system(1, k_max, n_x), torus_system(cfg.param("n_max"), cfg.param("n_y")))
    m_ker = multiplier_from_kappa(kappa)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = 0.0
    for trial in range(cfg.param("trials")):
        c = sys_.random_coefficients(rng)
        f = reconstruct(c, sys_)
        g_spec = reconstruct(apply_multiplier(m_ker, sys_, c), sys_)
        loc, glob = apply_T_split(f, kappa, model, grid)
        diff = grid.function(loc.values + glob.values - g_spec.values)
        rel = diff.norm_lp(2) / f.norm_lp(2)
        worst = max(worst, rel)
        rows.append([trial, float(rel)])

    # resolvent partition: L(L+A)^{-1} + A(L+A)^{-1} = I on the joint spectrum
    riesz = builtin_multiplier("riesz2")
    flip = MultiplierSpec(
        2,
        lambda lam: np.where(
            np.atleast_2d(lam).sum(axis=1) == 0.0,
            0.0,
            np.atleast_2d(lam)[:, 1] / np.atleast_2d(lam).sum(axis=1),
        ).astype(complex),
        name="riesz2-flip",
    )
    c = sys_.random_coefficients(np.random.default_rng(cfg.seed))
    ca = apply_multiplier(riesz, sys_, c)
    cb = apply_multiplier(flip, sys_, c)
    resid = max(abs(ca.get(k) + cb.get(k) - c.get(k)) for k in sys_.basis_index_set)
    results = {"max_relative_error": worst, "identity_residual": float(resid)}
    invariants = {
        "kernel_spectral_agreement_1e-5": worst <= 1e-5,
        "riesz_identity_1e-12": resid <= 1e-12,
    }
    return results, invariants, {"trials": (["trial", "relative_error"], rows)}


def _run_cz_estimates(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    model = euclidean_heat_model(cfg.param("model_dim"))
    kappa = kappa_indicator(0.1, 0.9)
    n = cfg.param("pairs")
    pairs = sample_product_pairs(2 * n, cfg.seed, model, d=1)
    growth_half = cz_growth_check(pairs[:n], kappa, model)
    growth_full = cz_growth_check(pairs, kappa, model)
    triples = sample_product_triples(2 * n, cfg.seed + 1, model, d=1)
    smooth_half = cz_smooth_check(triples[:n], kappa, model)
    smooth_full = cz_smooth_check(triples, kappa, model)

    def stable(half: float, full: float) -> bool:
        return full <= 1.5 * half if half > 0 else full == 0.0

    rows = [
        ["growth", n, float(growth_half.sup), growth_half.n_filtered],
        ["growth", 2 * n, float(growth_full.sup), growth_full.n_filtered],
        ["smooth", n, float(smooth_half.sup), smooth_half.n_filtered],
        ["smooth", 2 * n, float(smooth_full.sup), smooth_full.n_filtered],
    ]
    results = {
        "growth_sup": float(growth_full.sup),
        "smooth_sup": float(smooth_full.sup),
    }
    invariants = {
        "growth_finite": math.isfinite(growth_full.sup),
        "smooth_finite": math.isfinite(smooth_full.sup),
        "growth_doubling_stable": stable(growth_half.sup, growth_full.sup),
        "smooth_doubling_stable": stable(smooth_half.sup, smooth_full.sup),
    }
    return results, invariants, {"sups": (["kind", "samples", "sup", "filtered"], rows)}


def _run_cz_decompose(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    system = dyadic_system(cfg.param("grid"))
    s = cfg.param("threshold")
    if cfg.param("fixture") == "step":
        f = np.where(system.points < 0.25, 4.0, 0.0)[None, :]
    else:
        # constant on finest cubes, threshold scaled above the fiber averages
        rng = np.random.default_rng(cfg.seed)
        pts = system.n >> system.l_max
        raw = rng.random((cfg.param("fibers"), 1 << system.l_max)) ** 2 * 6.0
        f = np.repeat(raw, pts, axis=1)
        s = s * float((f @ system.weights).max()) * 1.5
    res = cz_decompose(f, s, system)
    w = system.weights
    l1_f = float((np.abs(f) @ w).sum())
    l1_split = float((np.abs(res.good) @ w).sum()) + sum(
        float((np.abs(bad.expand(res.n_fibers, system.n)) @ w).sum()) for bad in res.bads
    )
    exact = float(np.max(np.abs(f - res.good - res.bad_sum()), initial=0.0))
    mask_ok = bool(np.array_equal(res.selection_mask(), dyadic_maximal(f, system) > s))
    mean_ok = all(
        np.all(np.abs(bad.values.mean(axis=1)) < 1e-12 * max(f.max(), 1.0)) for bad in res.bads
    )
    band_ok = all(
        np.all(bad.averages > s / system.doubling_constant - 1e-12)
        and np.all(bad.averages <= system.doubling_constant * s + 1e-12)
        for bad in res.bads
    )
    rows = [
        [bad.cube.level, bad.cube.lo, bad.cube.hi, len(bad.fibers)] for bad in res.bads
    ]
    results = {
        "threshold": float(s),
        "bad_cubes": [
            {"level": bad.cube.level, "lo": bad.cube.lo, "hi": bad.cube.hi} for bad in res.bads
        ],
        "good_sup": float(np.max(np.abs(res.good), initial=0.0)),
    }
    invariants = {
        "exact_to_machine": exact <= 1e-12 * max(float(f.max()), 1.0),
        "l1_constant_4": l1_split <= 4.0 * l1_f + 1e-12,
        "good_bounded": results["good_sup"] <= system.doubling_constant * s + 1e-12,
        "bad_means_zero": mean_ok,
        "selected_averages_in_band": band_ok,
        "union_matches_maximal_set": mask_ok,
    }
    return results, invariants, {"bad_cubes": (["level", "lo", "hi", "fibers"], rows)}


def _run_norm_estimate(cfg: ExperimentConfig) -> tuple[dict, dict, Tables]:
    operator, p = cfg.param("operator"), cfg.param("p")
    trials = cfg.param("trials")
    ratios = _pnorm_ratios(operator, p, trials, cfg.seed)
    est = _estimate_from_ratios(p, ratios)
    build, mult_name, atl_safe = operator_registry()[operator]
    ceiling = spectral_sup_norm(builtin_multiplier(mult_name), build(), atl_safe)
    rows = [[i, float(r)] for i, r in enumerate(ratios)]
    results = {
        "operator": operator,
        "p": est.p,
        "estimate": est.estimate,
        "trials": est.trials,
        "argmax_trial": est.argmax_trial,
        "spectral_sup": ceiling,
    }
    invariants = {"estimate_nonnegative": est.estimate >= 0.0}
    if p == 2.0:
        invariants["p2_spectral_ceiling"] = est.estimate <= ceiling + 1e-9
    return results, invariants, {"trials": (["trial", "ratio"], rows)}


_EXPERIMENTS: Mapping[str, Callable[[ExperimentConfig], tuple[dict, dict, Tables]]] = {
    "marcinkiewicz": _run_marcinkiewicz,
    "mellin-decay": _run_mellin_decay,
    "square-function": _run_square_function,
    "riesz-cross-check": _run_riesz_cross_check,
    "cz-estimates": _run_cz_estimates,
    "cz-decompose": _run_cz_decompose,
    "norm-estimate": _run_norm_estimate,
}


# -- report writing -----------------------------------------------------------


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def run(config: ExperimentConfig) -> dict:
    """Execute one experiment and write its report files.

    Returns the summary dict; writes ``summary.json`` plus one CSV per
    result table under ``config.out``.
    """
    start = time.perf_counter()
    runner = _EXPERIMENTS[config.kind]
    try:
        results, invariants, tables = runner(config)
    except (EvaluationError, MellinTailError, ATLViolation, FloatingPointError) as exc:
        raise NumericalFailure(str(exc)) from exc
    for key, value in results.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise NumericalFailure(f"result {key} is not finite")

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in tables.items():
        if header == ["__svg__"]:
            (out / f"{name.removesuffix('_svg')}.svg").write_text(rows[0][0] + "\n")
            continue
        with open(out / f"{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_csv_cell(cell) for cell in row])

    summary = {
        "schema": 1,
        "config": _jsonable(
            {"kind": config.kind, "seed": config.seed, "out": config.out, **config.params}
        ),
        "results": _jsonable(results),
        "invariants": _jsonable(invariants),
        "runtime_seconds": time.perf_counter() - start,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


# -- entry point --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specmult",
        description="Run spectral-multiplier experiments and write CSV/JSON reports.",
    )
    sub = parser.add_subparsers(dest="kind", required=True, metavar="EXPERIMENT")
    for kind, schema in _SCHEMAS.items():
        fields = ", ".join(f"{n} (default {f.default})" for n, f in schema.items())
        p = sub.add_parser(kind, help=f"parameters: {fields}")
        p.add_argument("--config", metavar="PATH", help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed for sampled experiments")
        p.add_argument("--out", metavar="DIR", default=None, help="report output directory")
        p.add_argument(
            "--override",
            metavar="KEY=VALUE",
            action="append",
            default=[],
            help="override one config value (repeatable)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        overrides: dict[str, str] = {}
        for item in args.override:
            if "=" not in item:
                raise UsageError(f"override: expected KEY=VALUE, got {item!r}")
            key, _, value = item.partition("=")
            overrides[key.strip()] = value.strip()
        config = build_config(
            args.kind, file_values, overrides, seed=args.seed, out=args.out
        )
        summary = run(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"usage error: config: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    for name, passed in summary["invariants"].items():
        print(f"{'PASS' if passed else 'FAIL'} {name}")
    print(f"report written to {config.out}")
    return 0 if all(summary["invariants"].values()) else 4


if __name__ == "__main__":
    sys.exit(main())
