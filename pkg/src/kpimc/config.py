"""Run configuration: one strict JSON document, flags override values."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .bootstrap import BootstrapSettings
from .errors import ConfigError, InvalidParameterError
from .experiment import (
    DEFAULT_DRAW_COUNT,
    DEFAULT_SEED,
    ScenarioConfig,
    default_suite,
)
from .mcmc import McmcSettings

_TOP_KEYS = {"seed", "out_dir", "draw_count", "bootstrap", "mcmc", "scenarios"}
_BOOTSTRAP_KEYS = {"resample_count", "method", "level"}
_MCMC_KEYS = {"iterations", "burn_in_fraction", "mu_scale", "sigma_scale"}
_SCENARIO_KEYS = {"name", "generator", "generator_params", "dataset_count",
                  "dataset_size", "true_mu", "true_sigma"}


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    out_dir: str = "."
    draw_count: int = DEFAULT_DRAW_COUNT
    bootstrap: BootstrapSettings = field(default_factory=BootstrapSettings)
    mcmc: McmcSettings = field(default_factory=McmcSettings)
    scenarios: list[ScenarioConfig] = field(default_factory=default_suite)


def _reject_unknown(doc: dict, allowed: set[str], where: str) -> None:
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' at {where}")


def _require_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    return value


def _scenario_from_doc(doc: dict, where: str) -> ScenarioConfig:
    _require_mapping(doc, where)
    _reject_unknown(doc, _SCENARIO_KEYS, where)
    for key in ("name", "generator", "generator_params", "dataset_size"):
        if key not in doc:
            raise ConfigError(f"missing key '{key}' at {where}")
    params = _require_mapping(doc["generator_params"],
                              f"{where}.generator_params")
    try:
        return ScenarioConfig(
            name=doc["name"],
            generator=doc["generator"],
            generator_params=dict(params),
            dataset_size=int(doc["dataset_size"]),
            dataset_count=int(doc.get("dataset_count", 100)),
            true_mu=doc.get("true_mu"),
            true_sigma=doc.get("true_sigma"),
        )
    except (InvalidParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def config_from_dict(doc: dict, source: str = "config") -> RunConfig:
    _require_mapping(doc, source)
    _reject_unknown(doc, _TOP_KEYS, source)
    try:
        bootstrap = BootstrapSettings(
            **_checked_section(doc, "bootstrap", _BOOTSTRAP_KEYS, source))
        mcmc = McmcSettings(
            **_checked_section(doc, "mcmc", _MCMC_KEYS, source))
    except (InvalidParameterError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    scenarios_doc = doc.get("scenarios")
    if scenarios_doc is None:
        scenarios = default_suite()
    else:
        if not isinstance(scenarios_doc, list) or not scenarios_doc:
            raise ConfigError(f"{source}.scenarios must be a non-empty array")
        scenarios = [
            _scenario_from_doc(sc, f"{source}.scenarios[{i}]")
            for i, sc in enumerate(scenarios_doc)
        ]
    try:
        return RunConfig(
            seed=int(doc.get("seed", DEFAULT_SEED)),
            out_dir=str(doc.get("out_dir", ".")),
            draw_count=int(doc.get("draw_count", DEFAULT_DRAW_COUNT)),
            bootstrap=bootstrap,
            mcmc=mcmc,
            scenarios=scenarios,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _checked_section(doc: dict, name: str, allowed: set[str],
                     source: str) -> dict:
    section = doc.get(name)
    if section is None:
        return {}
    _require_mapping(section, f"{source}.{name}")
    _reject_unknown(section, allowed, f"{source}.{name}")
    return dict(section)


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON config file; unknown keys are rejected."""
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(doc, source=str(path))


def apply_overrides(cfg: RunConfig, *, seed: int | None = None,
                    out_dir: str | None = None,
                    level: float | None = None) -> RunConfig:
    """Apply command-line flag overrides on top of a config."""
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if out_dir is not None:
        cfg = replace(cfg, out_dir=out_dir)
    if level is not None:
        if not 0.0 < level < 1.0:
            raise ConfigError("--level must be in (0, 1)")
        cfg = replace(cfg, bootstrap=BootstrapSettings(
            resample_count=cfg.bootstrap.resample_count,
            method=cfg.bootstrap.method,
            level=level))
    return cfg
