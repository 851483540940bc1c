"""End-to-end comparison workflow.

For each scenario a synthetic (or CSV-derived) population is generated
once, then ``dataset_count`` stochastic datasets are resampled from it.
Each dataset is fitted by a method (empirical-CDF Monte Carlo or
Gaussian MCMC), a fixed number of values is drawn from the fitted
distribution, and a bootstrap interval for the reference point is built
from those draws.  The fraction of intervals containing the analytic
truth is the coverage probability reported per
(method, reference, scenario) cell.

Determinism: the population stream is ``(master_seed, scenario_index, 0)``
and dataset ``i`` runs entirely on ``(master_seed, scenario_index, 1 + i)``,
so cells are independent of execution order and both methods see the
same stochastic datasets.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .bootstrap import BootstrapSettings, ConfidenceInterval, bootstrap_ci_pair
from .empirical_mc import build_empirical_cdf, default_bounds, sample_cdf
from .errors import InvalidParameterError, PipelineError
from .kpi_data import (
    Dataset,
    add_observation_noise,
    efficiencies,
    generate_normal_dataset,
    generate_skew_shift_dataset,
    NoiseSpec,
    parse_shift_csv,
    resample,
    skew_normal_moments,
)
from .mcmc import McmcSettings, fit_gaussian_mcmc
from .rng import RngStream, derive_stream, substream

METHODS = ("mc", "mcmc")
REFERENCES = ("mu", "sigma")
GENERATORS = ("normal", "normal_with_noise", "skew_shift", "csv_file")

DEFAULT_SEED = 42
DEFAULT_DATASET_COUNT = 100
DEFAULT_DRAW_COUNT = 1000
DEFAULT_POPULATION_SIZE = 10_000

_REQUIRED_PARAMS = {
    "normal": {"mu", "sigma"},
    "normal_with_noise": {"mu", "sigma", "lo", "hi"},
    "skew_shift": {"location", "scale", "shape"},
    "csv_file": {"path"},
}
_OPTIONAL_PARAMS = {
    "normal": {"population_size"},
    "normal_with_noise": {"population_size"},
    "skew_shift": {"population_size"},
    "csv_file": set(),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """One column of the comparison table."""

    name: str
    generator: str
    generator_params: dict
    dataset_size: int
    dataset_count: int = DEFAULT_DATASET_COUNT
    true_mu: float | None = None
    true_sigma: float | None = None

    def __post_init__(self):
        if not self.name:
            raise InvalidParameterError("scenario name must be non-empty")
        if self.generator not in GENERATORS:
            raise InvalidParameterError(
                f"generator must be one of {GENERATORS} "
                f"(got {self.generator!r})")
        if self.dataset_count < 1:
            raise InvalidParameterError("dataset_count must be >= 1")
        if self.dataset_size < 10:
            raise InvalidParameterError("dataset_size must be >= 10")
        if self.true_sigma is not None and not self.true_sigma > 0.0:
            raise InvalidParameterError("true_sigma must be > 0")
        required = _REQUIRED_PARAMS[self.generator]
        allowed = required | _OPTIONAL_PARAMS[self.generator]
        missing = required - set(self.generator_params)
        if missing:
            raise InvalidParameterError(
                f"scenario {self.name!r}: missing generator_params "
                f"{sorted(missing)}")
        unknown = set(self.generator_params) - allowed
        if unknown:
            raise InvalidParameterError(
                f"scenario {self.name!r}: unknown generator_params "
                f"{sorted(unknown)}")
        if self.generator in ("normal", "normal_with_noise"):
            if not float(self.generator_params["sigma"]) > 0.0:
                raise InvalidParameterError(
                    f"scenario {self.name!r}: sigma must be > 0")
        if self.generator == "normal_with_noise":
            if not (float(self.generator_params["lo"])
                    < float(self.generator_params["hi"])):
                raise InvalidParameterError(
                    f"scenario {self.name!r}: noise needs lo < hi")
        if self.generator == "skew_shift":
            if not float(self.generator_params["scale"]) > 0.0:
                raise InvalidParameterError(
                    f"scenario {self.name!r}: scale must be > 0")

    def population_size(self) -> int:
        return int(self.generator_params.get(
            "population_size", DEFAULT_POPULATION_SIZE))


@dataclass(frozen=True)
class CoverageCell:
    method: str
    reference: str
    scenario: str
    coverage: float
    interval_count: int


@dataclass(frozen=True)
class IntervalRecord:
    scenario: str
    method: str
    reference: str
    dataset_index: int
    lower: float
    upper: float
    covers: bool


@dataclass
class CoverageReport:
    cells: list[CoverageCell]
    averages: dict[tuple[str, str], float]
    method_fit_seconds: dict[str, float]
    level: float
    master_seed: int
    scenario_names: list[str]
    intervals: list[IntervalRecord] = field(default_factory=list)

    def cell(self, method: str, reference: str, scenario: str) -> CoverageCell:
        for c in self.cells:
            if (c.method, c.reference, c.scenario) == (method, reference,
                                                       scenario):
                return c
        raise KeyError((method, reference, scenario))

    @property
    def interval_total(self) -> int:
        return sum(c.interval_count for c in self.cells)

    @property
    def mcmc_over_mc_ratio(self) -> float:
        mc = self.method_fit_seconds.get("mc", 0.0)
        if mc <= 0.0:
            return float("inf")
        return self.method_fit_seconds.get("mcmc", 0.0) / mc


def true_reference_points(cfg: ScenarioConfig) -> tuple[float, float]:
    """Analytic (mu, sigma) the intervals are judged against.

    The noise scenario folds the uniform-noise variance (hi-lo)^2/12 into
    sigma because the noisy values are the observed population.  CSV
    scenarios use the mean and population std of the file's efficiencies.
    """
    if cfg.true_mu is not None and cfg.true_sigma is not None:
        return cfg.true_mu, cfg.true_sigma
    p = cfg.generator_params
    if cfg.generator == "normal":
        return float(p["mu"]), float(p["sigma"])
    if cfg.generator == "normal_with_noise":
        width = float(p["hi"]) - float(p["lo"])
        sigma = float(np.sqrt(float(p["sigma"]) ** 2 + width ** 2 / 12.0))
        noise_mid = (float(p["hi"]) + float(p["lo"])) / 2.0
        return float(p["mu"]) + noise_mid, sigma
    if cfg.generator == "skew_shift":
        return skew_normal_moments(float(p["location"]), float(p["scale"]),
                                   float(p["shape"]))
    eff = efficiencies(parse_shift_csv(p["path"]))
    return float(np.mean(eff.values)), float(np.std(eff.values))


def generate_population(cfg: ScenarioConfig, s: RngStream) -> Dataset:
    """The scenario's source population, generated once per scenario."""
    p = cfg.generator_params
    if cfg.generator == "normal":
        return generate_normal_dataset(cfg.population_size(),
                                       float(p["mu"]), float(p["sigma"]), s)
    if cfg.generator == "normal_with_noise":
        clean = generate_normal_dataset(cfg.population_size(),
                                        float(p["mu"]), float(p["sigma"]), s)
        return add_observation_noise(
            clean, NoiseSpec(float(p["lo"]), float(p["hi"])), s)
    if cfg.generator == "skew_shift":
        return generate_skew_shift_dataset(
            cfg.population_size(), float(p["location"]), float(p["scale"]),
            float(p["shape"]), s)
    return efficiencies(parse_shift_csv(p["path"]))


def coverage_probability(intervals: list[ConfidenceInterval],
                         truth: float) -> float:
    """Fraction of intervals with lower <= truth <= upper."""
    if not intervals:
        raise InvalidParameterError("need at least one interval")
    covered = sum(1 for ci in intervals if ci.contains(truth))
    return covered / len(intervals)


def _fit_and_draw(method: str, ds: Dataset, s: RngStream,
                  mcmc_settings: McmcSettings, draw_count: int) -> Dataset:
    """Fit one method to one stochastic dataset and sample its output."""
    if method == "mc":
        lower, upper = default_bounds(ds.values)
        cdf = build_empirical_cdf(ds, lower, upper)
        return sample_cdf(cdf, draw_count, s)
    summary, _ = fit_gaussian_mcmc(ds, mcmc_settings, s)
    vals = summary.mu_hat + summary.sigma_hat * kernels.normals(
        s.generator, draw_count)
    return Dataset(values=vals, label="posterior-sample",
                   seed_used=s.master_seed)


def _run_method_pipelines(cfg: ScenarioConfig, scenario_index: int,
                          method: str, settings: BootstrapSettings,
                          master_seed: int, mcmc_settings: McmcSettings,
                          draw_count: int):
    """All per-dataset pipelines of one (scenario, method) pair.

    Returns per-reference interval lists plus the wall-clock seconds
    spent inside the method itself (fitting and drawing from the fitted
    distribution; the shared bootstrap stage is excluded so the timing
    compares the methods, not common postprocessing).
    """
    kernels.warmup()
    root = derive_stream(master_seed, scenario_index)
    population = generate_population(cfg, substream(root, 0))
    intervals: dict[str, list[ConfidenceInterval]] = {r: [] for r in REFERENCES}
    fit_seconds = 0.0
    for i in range(cfg.dataset_count):
        stream = substream(root, 1 + i)
        try:
            ds = resample(population, cfg.dataset_size, stream)
            t0 = time.perf_counter()
            output = _fit_and_draw(method, ds, stream, mcmc_settings,
                                   draw_count)
            fit_seconds += time.perf_counter() - t0
            pair = bootstrap_ci_pair(output, settings, stream)
        except Exception as exc:
            raise PipelineError(
                f"scenario {cfg.name!r} dataset {i} ({method}): {exc}"
            ) from exc
        intervals["mu"].append(pair["mean"])
        intervals["sigma"].append(pair["std"])
    return intervals, fit_seconds


def run_scenario(cfg: ScenarioConfig, method: str, reference: str,
                 settings: BootstrapSettings, master_seed: int, *,
                 scenario_index: int = 0,
                 mcmc_settings: McmcSettings = McmcSettings(),
                 draw_count: int = DEFAULT_DRAW_COUNT) -> CoverageCell:
    """Coverage of one (scenario, method, reference) cell."""
    if method not in METHODS:
        raise InvalidParameterError(f"method must be one of {METHODS}")
    if reference not in REFERENCES:
        raise InvalidParameterError(f"reference must be one of {REFERENCES}")
    truth = true_reference_points(cfg)
    intervals, _ = _run_method_pipelines(
        cfg, scenario_index, method, settings, master_seed, mcmc_settings,
        draw_count)
    target = truth[0] if reference == "mu" else truth[1]
    return CoverageCell(
        method=method,
        reference=reference,
        scenario=cfg.name,
        coverage=coverage_probability(intervals[reference], target),
        interval_count=cfg.dataset_count,
    )


def run_full_comparison(scenarios: list[ScenarioConfig],
                        settings: BootstrapSettings, master_seed: int, *,
                        mcmc_settings: McmcSettings = McmcSettings(),
                        draw_count: int = DEFAULT_DRAW_COUNT,
                        collect_intervals: bool = False) -> CoverageReport:
    """Every method x reference x scenario cell plus averages and timings."""
    if not scenarios:
        raise InvalidParameterError("need at least one scenario")
    names = [c.name for c in scenarios]
    if len(set(names)) != len(names):
        raise InvalidParameterError("scenario names must be unique")

    cells: list[CoverageCell] = []
    records: list[IntervalRecord] = []
    fit_seconds = {m: 0.0 for m in METHODS}
    for idx, cfg in enumerate(scenarios):
        truth = true_reference_points(cfg)
        for method in METHODS:
            intervals, secs = _run_method_pipelines(
                cfg, idx, method, settings, master_seed, mcmc_settings,
                draw_count)
            fit_seconds[method] += secs
            for reference in REFERENCES:
                target = truth[0] if reference == "mu" else truth[1]
                cells.append(CoverageCell(
                    method=method,
                    reference=reference,
                    scenario=cfg.name,
                    coverage=coverage_probability(intervals[reference],
                                                  target),
                    interval_count=cfg.dataset_count,
                ))
                if collect_intervals:
                    for i, ci in enumerate(intervals[reference]):
                        records.append(IntervalRecord(
                            scenario=cfg.name, method=method,
                            reference=reference, dataset_index=i,
                            lower=ci.lower, upper=ci.upper,
                            covers=ci.contains(target)))

    averages = {}
    for method in METHODS:
        for reference in REFERENCES:
            vals = [c.coverage for c in cells
                    if c.method == method and c.reference == reference]
            averages[(method, reference)] = float(np.mean(vals))
    return CoverageReport(
        cells=cells,
        averages=averages,
        method_fit_seconds=fit_seconds,
        level=settings.level,
        master_seed=master_seed,
        scenario_names=names,
        intervals=records,
    )


def default_suite() -> list[ScenarioConfig]:
    """The stock scenario columns.

    Two normal columns (sizes 1500 and 150), a noisy-normal column, and
    two left-skewed efficiency columns standing in for real value-stream
    data in the 100-150 shift range.
    """
    skew = {"location": 0.85, "scale": 0.12, "shape": -4.0}
    return [
        ScenarioConfig(name="normal_1500", generator="normal",
                       generator_params={"mu": 10.0, "sigma": 3.0},
                       dataset_size=1500),
        ScenarioConfig(name="normal_150", generator="normal",
                       generator_params={"mu": 10.0, "sigma": 3.0},
                       dataset_size=150),
        ScenarioConfig(name="noise_150", generator="normal_with_noise",
                       generator_params={"mu": 10.0, "sigma": 3.0,
                                         "lo": -0.2, "hi": 0.2},
                       dataset_size=150),
        ScenarioConfig(name="skew_m1_150", generator="skew_shift",
                       generator_params=dict(skew), dataset_size=150),
        ScenarioConfig(name="skew_m2_100", generator="skew_shift",
                       generator_params=dict(skew), dataset_size=100),
    ]


def write_report_csv(report: CoverageReport, dest) -> None:
    """Coverage table: rows are method x reference, columns scenarios."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_report_csv(report, fh)
            return
    header = ["method", "reference"] + report.scenario_names + ["average"]
    dest.write(",".join(header) + "\n")
    for method in METHODS:
        for reference in REFERENCES:
            row = [method, reference]
            for name in report.scenario_names:
                row.append(repr(report.cell(method, reference, name).coverage))
            row.append(repr(report.averages[(method, reference)]))
            dest.write(",".join(row) + "\n")


def report_to_dict(report: CoverageReport) -> dict:
    return {
        "master_seed": report.master_seed,
        "level": report.level,
        "scenarios": report.scenario_names,
        "interval_total": report.interval_total,
        "cells": [
            {"method": c.method, "reference": c.reference,
             "scenario": c.scenario, "coverage": c.coverage,
             "interval_count": c.interval_count}
            for c in report.cells
        ],
        "averages": {
            f"{m}/{r}": report.averages[(m, r)]
            for m in METHODS for r in REFERENCES
        },
        "method_fit_seconds": dict(report.method_fit_seconds),
        "mcmc_over_mc_ratio": report.mcmc_over_mc_ratio,
    }


def write_report_json(report: CoverageReport, dest) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w") as fh:
            write_report_json(report, fh)
            return
    json.dump(report_to_dict(report), dest, indent=2, sort_keys=True)
    dest.write("\n")


def write_intervals_csv(report: CoverageReport, dest) -> None:
    """Per-dataset interval log for interval-comparison plots."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_intervals_csv(report, fh)
            return
    dest.write("scenario,method,reference,dataset_index,lower,upper,covers\n")
    for r in report.intervals:
        dest.write(f"{r.scenario},{r.method},{r.reference},"
                   f"{r.dataset_index},{r.lower!r},{r.upper!r},"
                   f"{int(r.covers)}\n")
