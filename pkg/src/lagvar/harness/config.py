"""Experiment configuration: YAML with a flat, typed, fail-closed schema."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import yaml

from ..operators import default_epsilon
from ..specfun import AlphaParam
from ..varlp import ExponentField, a_epsilon
from .experiments import OPERATORS, THEOREM_OPERATORS


class ConfigError(ValueError):
    """Malformed or inadmissible configuration."""


DEFAULT_EXPONENT = {"kind": "decay-power", "p_infty": 2.0, "A": 1.0, "q": 2.0}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 1
    alpha: tuple = (0.0,)
    exponent: dict = field(default_factory=lambda: dict(DEFAULT_EXPONENT))
    operators: tuple = THEOREM_OPERATORS
    grid_order: int = 0
    truncation: int = 0
    s_order: int = 0
    t_lo: float = 1e-3
    t_hi: float = 20.0
    t_points: int = 30
    maximal_samples: int = 500
    kernel_points: int = 8
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    out: str = "reports"
    threads: int = 1

    @property
    def alpha_param(self) -> AlphaParam:
        return AlphaParam.of(self.alpha)

    @property
    def exponent_field(self) -> ExponentField:
        return ExponentField.from_config(self.exponent)

    @property
    def exponent_id(self) -> str:
        e = self.exponent
        parts = [str(e["kind"])] + [f"{k}={e[k]}" for k in sorted(e) if k not in ("kind", "nodes", "values")]
        return ";".join(parts)

    def tolerance(self, metric: str, default: float) -> float:
        return float(self.tolerances.get(metric, default))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return validate(replace(self, **kw))


_TYPES = {
    "n": int, "alpha": list, "exponent": dict, "operators": list, "grid_order": int, "truncation": int,
    "s_order": int, "t_lo": float, "t_hi": float, "t_points": int, "maximal_samples": int,
    "kernel_points": int, "seed": int, "tolerances": dict, "out": str, "threads": int,
}


def _coerce(key, value):
    want = _TYPES[key]
    if want is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if want is int and isinstance(value, bool) or not isinstance(value, want):
        raise ConfigError(f"key {key!r}: expected {want.__name__}, got {type(value).__name__}")
    return value


def from_mapping(data: dict | None, known_metrics=None) -> ExperimentConfig:
    data = dict(data or {})
    unknown = sorted(set(data) - set(_TYPES))
    if unknown:
        raise ConfigError(f"unknown keys {unknown}")
    kw = {k: _coerce(k, v) for k, v in data.items()}
    if "alpha" in kw:
        kw["alpha"] = tuple(float(a) for a in kw["alpha"])
    if "operators" in kw:
        kw["operators"] = tuple(str(o) for o in kw["operators"])
    if "n" in kw and "alpha" not in kw:
        kw["alpha"] = (0.0,) * kw["n"]
    cfg = validate(ExperimentConfig(**kw))
    if known_metrics is not None:
        bad = sorted(set(cfg.tolerances) - set(known_metrics))
        if bad:
            raise ConfigError(f"unknown tolerance keys {bad}")
    return cfg


def load_config(path=None, known_metrics=None) -> ExperimentConfig:
    if path is None:
        return from_mapping({}, known_metrics)
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return from_mapping(data, known_metrics)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.n not in (1, 2):
        raise ConfigError("n must be 1 or 2")
    if len(cfg.alpha) != cfg.n or any(not (a >= 0 and math.isfinite(a)) for a in cfg.alpha):
        raise ConfigError("alpha must list n finite nonnegative entries")
    bad = sorted(set(cfg.operators) - set(OPERATORS))
    if bad:
        raise ConfigError(f"unknown operators {bad}; choose from {list(OPERATORS)}")
    try:
        p = cfg.exponent_field
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"exponent block: {exc}") from exc
    if any(op in THEOREM_OPERATORS for op in cfg.operators):
        if not p.p_minus > 1:
            raise ConfigError("hypothesis violation: the boundedness regime needs p_minus > 1 "
                              f"(got p_minus = {p.p_minus})")
        if "h_aux" in cfg.operators and not a_epsilon(p, default_epsilon(cfg.alpha_param, p)) > 0:
            raise ConfigError("hypothesis violation: a_epsilon must be positive for the majorant operator")
    if not (0 < cfg.t_lo < cfg.t_hi) or cfg.t_points < 2:
        raise ConfigError("t-grid needs 0 < t_lo < t_hi and t_points >= 2")
    for key in ("grid_order", "truncation", "s_order"):
        if getattr(cfg, key) < 0:
            raise ConfigError(f"{key} must be >= 0 (0 selects the default)")
    if cfg.maximal_samples < 1 or cfg.kernel_points < 2 or cfg.threads < 1:
        raise ConfigError("sample counts and threads must be positive")
    if cfg.seed < 0 or cfg.seed >= 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    for k, v in cfg.tolerances.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"tolerance {k!r} must be a number")
    return cfg
