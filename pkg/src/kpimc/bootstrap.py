"""Bootstrap confidence intervals: percentile and BCa.

BCa adjusts the percentile levels with a bias-correction term z0 (from
the fraction of resampled statistics below the point estimate) and an
acceleration term a (from the jackknife skewness of the statistic), then
reads the interval off the resampled-statistic distribution.  When the
jackknife denominator underflows, a falls back to 0 and the interval
degrades gracefully to bias-correction only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError
from .kpi_data import Dataset
from .rng import RngStream

STATISTICS = ("mean", "std")
METHODS = ("percentile", "bca")
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    degenerate: bool = False

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise InvalidParameterError(
                f"interval bounds out of order: [{self.lower}, {self.upper}]")
        if not 0.0 < self.level < 1.0:
            raise InvalidParameterError("level must be in (0, 1)")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def record(self, method: str, reference: str) -> dict:
        """JSON-ready record of this interval for a method/reference pair."""
        return {"method": method, "reference": reference,
                "lower": self.lower, "upper": self.upper,
                "level": self.level}


@dataclass(frozen=True)
class BootstrapSettings:
    resample_count: int = 2000
    method: str = "bca"
    level: float = 0.90

    def __post_init__(self):
        if self.resample_count < 100:
            raise InvalidParameterError("resample_count must be >= 100")
        if self.method not in METHODS:
            raise InvalidParameterError(
                f"method must be one of {METHODS} (got {self.method!r})")
        if not 0.0 < self.level < 1.0:
            raise InvalidParameterError("level must be in (0, 1)")


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erfc; accurate to ~1e-16."""
    return 0.5 * math.erfc(-z / _SQRT2)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF for p strictly inside (0, 1)."""
    if not 0.0 < p < 1.0:
        raise InvalidParameterError(f"p must be in (0, 1) (got {p})")
    return float(kernels.ppnd16(p))


def _point_estimate(values: np.ndarray, statistic: str) -> float:
    if statistic == "mean":
        return float(np.mean(values))
    return float(np.std(values, ddof=1))


def _jackknife_acceleration(values: np.ndarray, statistic: str) -> float:
    """a = sum d^3 / (6 (sum d^2)^1.5) over leave-one-out statistics."""
    n = values.shape[0]
    if statistic == "mean":
        s1 = float(np.sum(values))
        loo = (s1 - values) / (n - 1)
    else:
        # Work on centered data; the variance is shift-invariant and the
        # centering kills catastrophic cancellation in s2 - s1^2 / m.
        y = values - np.mean(values)
        s1 = float(np.sum(y))
        s2 = float(np.sum(y * y))
        loo_s1 = s1 - y
        loo_s2 = s2 - y * y
        loo_var = (loo_s2 - loo_s1 * loo_s1 / (n - 1)) / (n - 2)
        loo = np.sqrt(np.maximum(loo_var, 0.0))
    dev = np.mean(loo) - loo
    denom = float(np.sum(dev * dev)) ** 1.5
    if denom < 1e-300:
        return 0.0
    return float(np.sum(dev ** 3)) / (6.0 * denom)


def _interval_from_stats(values: np.ndarray, stats: np.ndarray,
                         statistic: str,
                         settings: BootstrapSettings) -> ConfidenceInterval:
    point = _point_estimate(values, statistic)
    alpha = 1.0 - settings.level
    if settings.method == "percentile":
        q_lo, q_hi = alpha / 2.0, 1.0 - alpha / 2.0
    else:
        b = stats.shape[0]
        frac = np.count_nonzero(stats < point) / b
        frac = min(max(frac, 0.5 / b), 1.0 - 0.5 / b)
        z0 = normal_quantile(frac)
        a = _jackknife_acceleration(values, statistic)
        z_lo = normal_quantile(alpha / 2.0)
        z_hi = normal_quantile(1.0 - alpha / 2.0)
        q_lo = normal_cdf(z0 + (z0 + z_lo) / (1.0 - a * (z0 + z_lo)))
        q_hi = normal_cdf(z0 + (z0 + z_hi) / (1.0 - a * (z0 + z_hi)))
    lo, hi = np.quantile(stats, [q_lo, q_hi])
    if lo > hi:
        lo, hi = hi, lo
    return ConfidenceInterval(lower=float(lo), upper=float(hi),
                              level=settings.level)


def _check_sample(sample: Dataset) -> np.ndarray:
    values = sample.values
    if values.shape[0] < 10:
        raise InvalidParameterError(
            f"sample must have >= 10 values (got {values.shape[0]})")
    return values


def bootstrap_ci(sample: Dataset, statistic: str, settings: BootstrapSettings,
                 s: RngStream) -> ConfidenceInterval:
    """Resample the statistic and read off a percentile or BCa interval."""
    if statistic not in STATISTICS:
        raise InvalidParameterError(
            f"statistic must be one of {STATISTICS} (got {statistic!r})")
    values = _check_sample(sample)
    if np.all(values == values[0]):
        # No resampling variance; [0, 0] for std, [c, c] for mean.
        point = _point_estimate(values, statistic)
        return ConfidenceInterval(lower=point, upper=point,
                                  level=settings.level, degenerate=True)
    means, stds = kernels.bootstrap_stats(s.generator, values,
                                          settings.resample_count)
    stats = means if statistic == "mean" else stds
    return _interval_from_stats(values, stats, statistic, settings)


def bootstrap_ci_pair(sample: Dataset, settings: BootstrapSettings,
                      s: RngStream) -> dict[str, ConfidenceInterval]:
    """Both statistics' intervals from one resampling pass.

    Consumes exactly the same draws as a single :func:`bootstrap_ci`
    call, so each returned interval matches the standalone computation
    bit for bit.
    """
    values = _check_sample(sample)
    if np.all(values == values[0]):
        out = {}
        for statistic in STATISTICS:
            point = _point_estimate(values, statistic)
            out[statistic] = ConfidenceInterval(
                lower=point, upper=point, level=settings.level,
                degenerate=True)
        return out
    means, stds = kernels.bootstrap_stats(s.generator, values,
                                          settings.resample_count)
    return {
        "mean": _interval_from_stats(values, means, "mean", settings),
        "std": _interval_from_stats(values, stds, "std", settings),
    }


def ci_for_method_output(method_output: Dataset, reference: str,
                         settings: BootstrapSettings,
                         s: RngStream) -> ConfidenceInterval:
    """Interval for a reference point over a method's sampled output.

    Reference ``mu`` bootstraps the mean, ``sigma`` the standard
    deviation, of the values drawn from the fitted distribution.
    """
    if reference not in ("mu", "sigma"):
        raise InvalidParameterError(
            f"reference must be 'mu' or 'sigma' (got {reference!r})")
    if len(method_output) < 100:
        raise InvalidParameterError(
            f"method output must have >= 100 values (got {len(method_output)})")
    statistic = "mean" if reference == "mu" else "std"
    return bootstrap_ci(method_output, statistic, settings, s)
