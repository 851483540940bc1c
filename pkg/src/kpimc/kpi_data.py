"""Shift records, the Efficiency KPI, and synthetic dataset generation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    EmptyDatasetError,
    InvalidParameterError,
    RowError,
    SchemaError,
)
from .rng import RngStream

SHIFT_CSV_COLUMNS = ("shift_id", "start_time", "actual_qty", "target_qty")
DATASET_CSV_COLUMN = "value"


@dataclass(frozen=True)
class ShiftRecord:
    """One twelve-hour production shift."""

    shift_id: str
    start_time: datetime
    actual_qty: int
    target_qty: int

    def __post_init__(self):
        if self.actual_qty < 0:
            raise InvalidParameterError("actual_qty must be >= 0")
        if self.target_qty < 1:
            raise InvalidParameterError("target_qty must be >= 1")


@dataclass(frozen=True)
class Dataset:
    """An ordered sequence of finite real observations with provenance."""

    values: np.ndarray
    label: str = ""
    seed_used: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError(
                f"dataset {self.label!r} contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class NoiseSpec:
    """A uniform observation-noise band [lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidParameterError(
                f"noise interval requires lo < hi (got [{self.lo}, {self.hi}])")


def _require_nonempty(d: Dataset, what: str = "dataset") -> None:
    if len(d) == 0:
        raise EmptyDatasetError(f"{what} is empty")


def efficiency(actual_qty: int, target_qty: int) -> float:
    """Actual quantity produced as a fraction of the target quantity.

    Values above 1.0 are legal and mean the shift over-performed.
    """
    if target_qty <= 0:
        raise InvalidParameterError("target_qty must be > 0")
    if actual_qty < 0:
        raise InvalidParameterError("actual_qty must be >= 0")
    return actual_qty / target_qty


def parse_shift_csv(source) -> list[ShiftRecord]:
    """Read shift records from a CSV path, text stream, or byte stream.

    The header must contain exactly the columns
    ``shift_id,start_time,actual_qty,target_qty`` (any order).  Rows are
    returned in file order; bad rows raise :class:`RowError` with the
    physical line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return parse_shift_csv(fh)
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    reader = csv.reader(io.StringIO(raw))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("missing header row") from None
    header = [h.strip() for h in header]
    for col in SHIFT_CSV_COLUMNS:
        if col not in header:
            raise SchemaError(f"missing column '{col}'")
    for col in header:
        if col not in SHIFT_CSV_COLUMNS:
            raise SchemaError(f"unexpected column '{col}'")
    pos = {col: header.index(col) for col in SHIFT_CSV_COLUMNS}

    records: list[ShiftRecord] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise RowError(line_no, f"expected {len(header)} fields, got {len(row)}")
        try:
            start_time = datetime.fromisoformat(row[pos["start_time"]].strip())
        except ValueError:
            raise RowError(
                line_no, f"invalid timestamp {row[pos['start_time']]!r}") from None
        qty = {}
        for col in ("actual_qty", "target_qty"):
            text = row[pos[col]].strip()
            try:
                qty[col] = int(text)
            except ValueError:
                raise RowError(line_no, f"non-numeric {col} {text!r}") from None
        try:
            records.append(ShiftRecord(
                shift_id=row[pos["shift_id"]].strip(),
                start_time=start_time,
                actual_qty=qty["actual_qty"],
                target_qty=qty["target_qty"],
            ))
        except InvalidParameterError as exc:
            raise RowError(line_no, str(exc)) from None
    return records


def write_shift_csv(records: Iterable[ShiftRecord], dest) -> None:
    """Write shift records in the same schema :func:`parse_shift_csv` reads."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_shift_csv(records, fh)
            return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(SHIFT_CSV_COLUMNS)
    for rec in records:
        writer.writerow([rec.shift_id, rec.start_time.isoformat(),
                         rec.actual_qty, rec.target_qty])


def efficiencies(records: Sequence[ShiftRecord]) -> Dataset:
    """Per-shift efficiency values, order preserved."""
    if len(records) == 0:
        raise EmptyDatasetError("no shift records to compute efficiencies from")
    vals = np.array([efficiency(r.actual_qty, r.target_qty) for r in records])
    return Dataset(values=vals, label="efficiency")


def generate_normal_dataset(n: int, mu: float, sigma: float,
                            s: RngStream) -> Dataset:
    """n independent draws from N(mu, sigma^2)."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if not sigma > 0.0:
        raise InvalidParameterError(f"sigma must be > 0 (got {sigma})")
    vals = mu + sigma * kernels.normals(s.generator, n)
    return Dataset(values=vals, label=f"normal(mu={mu}, sigma={sigma})",
                   seed_used=s.master_seed)


def add_observation_noise(d: Dataset, spec: NoiseSpec, s: RngStream) -> Dataset:
    """Add an independent Uniform[lo, hi) draw to every value."""
    _require_nonempty(d)
    u = s.generator.random(len(d))
    noisy = d.values + (spec.lo + u * (spec.hi - spec.lo))
    return Dataset(values=noisy, label=f"{d.label}+noise[{spec.lo},{spec.hi}]",
                   seed_used=d.seed_used)


def generate_skew_shift_dataset(n: int, location: float, scale: float,
                                shape: float, s: RngStream) -> Dataset:
    """n skew-normal draws; stands in for shift-efficiency source data."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if not scale > 0.0:
        raise InvalidParameterError(f"scale must be > 0 (got {scale})")
    vals = kernels.skew_normals(s.generator, n, location, scale, shape)
    return Dataset(
        values=vals,
        label=f"skew(loc={location}, scale={scale}, shape={shape})",
        seed_used=s.master_seed)


def skew_normal_moments(location: float, scale: float,
                        shape: float) -> tuple[float, float]:
    """Analytic (mean, std) of the skew-normal distribution."""
    if not scale > 0.0:
        raise InvalidParameterError(f"scale must be > 0 (got {scale})")
    delta = shape / np.sqrt(1.0 + shape * shape)
    mean = location + scale * delta * np.sqrt(2.0 / np.pi)
    std = scale * np.sqrt(1.0 - 2.0 * delta * delta / np.pi)
    return float(mean), float(std)


def resample(d: Dataset, m: int, s: RngStream) -> Dataset:
    """m values drawn uniformly with replacement from d."""
    _require_nonempty(d, "resample source")
    if m < 1:
        raise InvalidParameterError("m must be >= 1")
    vals = kernels.resample_values(s.generator, d.values, m)
    return Dataset(values=vals, label=f"resample({d.label}, m={m})",
                   seed_used=d.seed_used)


def write_dataset_csv(d: Dataset, dest) -> None:
    """Single-column CSV export with header ``value``."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_dataset_csv(d, fh)
            return
    dest.write(f"{DATASET_CSV_COLUMN}\n")
    for v in d.values:
        dest.write(f"{float(v)!r}\n")


def read_dataset_csv(source, label: str = "") -> Dataset:
    """Read a single-column ``value`` CSV written by :func:`write_dataset_csv`."""
    if isinstance(source, (str, Path)):
        with open(source, "r") as fh:
            return read_dataset_csv(fh, label=label or str(source))
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("missing header row") from None
    if [h.strip() for h in header] != [DATASET_CSV_COLUMN]:
        raise SchemaError(f"expected single column '{DATASET_CSV_COLUMN}'")
    vals = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            vals.append(float(row[0]))
        except ValueError:
            raise RowError(line_no, f"non-numeric value {row[0]!r}") from None
    if not vals:
        raise EmptyDatasetError("value CSV has no data rows")
    return Dataset(values=np.array(vals), label=label)
