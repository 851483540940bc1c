"""Cumulative Monte Carlo: empirical CDFs and inverse-transform sampling.

The CDF over observed data x_1 <= ... <= x_n assigns the i-th point the
cumulative probability i / (n + 1) and anchors user-supplied bounds
(strictly outside the data) at probabilities 0 and 1.  Sampling inverts
the resulting piecewise-linear CDF at uniform draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import EmptyDatasetError, InvalidBoundsError, InvalidParameterError
from .kpi_data import Dataset
from .rng import RngStream

# Relative padding used when no bounds are supplied.
DEFAULT_BOUND_PAD = 0.05
# Tie-break step, as a fraction of the data magnitude.
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class EmpiricalCdf:
    """Piecewise-linear CDF knots; immutable and shareable once built."""

    support: np.ndarray
    probs: np.ndarray
    n_observations: int

    def __post_init__(self):
        for name in ("support", "probs"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def lower(self) -> float:
        return float(self.support[0])

    @property
    def upper(self) -> float:
        return float(self.support[-1])


def default_bounds(values: np.ndarray) -> tuple[float, float]:
    """Padding rule for bounds when the caller has no domain knowledge.

    Pads by 5% of the data range on each side; a constant dataset falls
    back to max(|value|, 1) as the range surrogate.
    """
    lo = float(np.min(values))
    hi = float(np.max(values))
    span = hi - lo
    if span == 0.0:
        span = max(abs(lo), 1.0)
    return lo - DEFAULT_BOUND_PAD * span, hi + DEFAULT_BOUND_PAD * span


def _break_ties(sorted_vals: np.ndarray) -> np.ndarray:
    """Perturb tied values by k*eps (k = rank within the tie group)."""
    if sorted_vals.shape[0] < 2:
        return sorted_vals
    scale = max(float(np.max(np.abs(sorted_vals))), 1.0)
    eps = _TIE_EPS * scale
    out = sorted_vals.copy()
    run = 0
    for i in range(1, out.shape[0]):
        if sorted_vals[i] == sorted_vals[i - 1]:
            run += 1
            out[i] = sorted_vals[i] + run * eps
        else:
            run = 0
    return out


def build_empirical_cdf(d: Dataset, lower: float, upper: float) -> EmpiricalCdf:
    """Sort the data, attach bounds, and assign rank probabilities i/(n+1)."""
    if len(d) == 0:
        raise EmptyDatasetError("cannot build a CDF from an empty dataset")
    data_min = float(np.min(d.values))
    data_max = float(np.max(d.values))
    if not (lower < data_min and upper > data_max):
        raise InvalidBoundsError(
            f"bounds ({lower}, {upper}) must strictly bracket the data "
            f"range [{data_min}, {data_max}]")
    points = _break_ties(np.sort(d.values))
    if points[-1] >= upper:
        raise InvalidBoundsError(
            "upper bound too close to the data maximum for tie perturbation")
    n = points.shape[0]
    support = np.concatenate(([lower], points, [upper]))
    probs = np.concatenate(([0.0], np.arange(1, n + 1) / (n + 1), [1.0]))
    if not np.all(np.diff(support) > 0.0):
        raise InvalidBoundsError("support knots are not strictly increasing")
    return EmpiricalCdf(support=support, probs=probs, n_observations=n)


def quantile(cdf: EmpiricalCdf, p: float) -> float:
    """Piecewise-linear inverse of the CDF; exact at p = 0 and p = 1."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must be in [0, 1] (got {p})")
    if p >= 1.0:
        return cdf.upper
    probs = cdf.probs
    idx = int(np.searchsorted(probs, p, side="right")) - 1
    idx = min(max(idx, 0), probs.shape[0] - 2)
    t = (p - probs[idx]) / (probs[idx + 1] - probs[idx])
    return float(cdf.support[idx] + t * (cdf.support[idx + 1] - cdf.support[idx]))


def cdf_value(cdf: EmpiricalCdf, x: float) -> float:
    """Forward CDF evaluation on the same knots (clamped outside bounds)."""
    support = cdf.support
    if x <= support[0]:
        return 0.0
    if x >= support[-1]:
        return 1.0
    idx = int(np.searchsorted(support, x, side="right")) - 1
    idx = min(max(idx, 0), support.shape[0] - 2)
    t = (x - support[idx]) / (support[idx + 1] - support[idx])
    return float(cdf.probs[idx] + t * (cdf.probs[idx + 1] - cdf.probs[idx]))


def sample_cdf(cdf: EmpiricalCdf, count: int, s: RngStream) -> Dataset:
    """count inverse-transform draws; each output is quantile(u)."""
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    vals = kernels.pwl_sample(s.generator, cdf.support, cdf.probs, count)
    return Dataset(values=vals, label="cdf-sample", seed_used=s.master_seed)


def write_cdf_csv(cdf: EmpiricalCdf, dest) -> None:
    """Two-column ``support,prob`` export for plotting."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_cdf_csv(cdf, fh)
            return
    dest.write("support,prob\n")
    for x, p in zip(cdf.support, cdf.probs):
        dest.write(f"{float(x)!r},{float(p)!r}\n")
