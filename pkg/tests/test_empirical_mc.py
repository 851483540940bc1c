import io

import numpy as np
import pytest

from kpimc import (
    Dataset,
    build_empirical_cdf,
    cdf_value,
    default_bounds,
    derive_stream,
    generate_normal_dataset,
    quantile,
    sample_cdf,
)
from kpimc.empirical_mc import write_cdf_csv
from kpimc.errors import (
    EmptyDatasetError,
    InvalidBoundsError,
    InvalidParameterError,
)


def _cdf123():
    return build_empirical_cdf(Dataset(values=np.array([1.0, 2.0, 3.0])),
                               0.0, 4.0)


def test_rank_probabilities_are_exact():
    cdf = _cdf123()
    assert np.array_equal(cdf.support, [0.0, 1.0, 2.0, 3.0, 4.0])
    assert np.max(np.abs(cdf.probs - [0.0, 0.25, 0.5, 0.75, 1.0])) <= 1e-12


def test_single_point_gets_half():
    cdf = build_empirical_cdf(Dataset(values=np.array([7.0])), 0.0, 10.0)
    assert list(cdf.probs) == [0.0, 0.5, 1.0]
    assert list(cdf.support) == [0.0, 7.0, 10.0]


def test_input_order_does_not_matter():
    a = _cdf123()
    b = build_empirical_cdf(Dataset(values=np.array([3.0, 1.0, 2.0])), 0.0, 4.0)
    assert np.array_equal(a.support, b.support)
    assert np.array_equal(a.probs, b.probs)


def test_bounds_must_bracket_strictly():
    ds = Dataset(values=np.array([1.0, 2.0, 3.0]))
    with pytest.raises(InvalidBoundsError):
        build_empirical_cdf(ds, 1.0, 4.0)
    with pytest.raises(InvalidBoundsError):
        build_empirical_cdf(ds, 0.0, 3.0)
    with pytest.raises(InvalidBoundsError):
        build_empirical_cdf(ds, 4.0, 0.0)
    with pytest.raises(EmptyDatasetError):
        build_empirical_cdf(Dataset(values=np.array([])), 0.0, 1.0)


def test_ties_are_perturbed_to_strict_monotonicity():
    ds = Dataset(values=np.array([2.0, 2.0, 2.0, 1.0]))
    cdf = build_empirical_cdf(ds, 0.0, 5.0)
    assert np.all(np.diff(cdf.support) > 0.0)
    assert cdf.n_observations == 4
    # perturbation is invisible at plotting scale
    assert np.allclose(cdf.support[2:5], 2.0, atol=1e-10)


def test_probs_always_monotone():
    s = derive_stream(21, 0)
    for n in (1, 2, 10, 333):
        ds = generate_normal_dataset(n, 0.0, 1.0, s)
        lo, hi = default_bounds(ds.values)
        cdf = build_empirical_cdf(ds, lo, hi)
        assert np.all(np.diff(cdf.probs) >= 0.0)
        assert cdf.probs[0] == 0.0 and cdf.probs[-1] == 1.0


def test_quantile_examples():
    cdf = _cdf123()
    assert quantile(cdf, 0.5) == 2.0
    assert quantile(cdf, 0.0) == 0.0
    assert quantile(cdf, 1.0) == 4.0
    # hand-derived: between knots (0.25 -> 1) and (0.5 -> 2)
    assert quantile(cdf, 0.375) == pytest.approx(1.5, abs=1e-15)


def test_quantile_domain():
    cdf = _cdf123()
    with pytest.raises(InvalidParameterError):
        quantile(cdf, -0.01)
    with pytest.raises(InvalidParameterError):
        quantile(cdf, 1.01)


def test_round_trip_quantile_cdf_value():
    s = derive_stream(22, 0)
    ds = generate_normal_dataset(50, 10.0, 3.0, s)
    lo, hi = default_bounds(ds.values)
    cdf = build_empirical_cdf(ds, lo, hi)
    for p in np.linspace(0.0, 1.0, 1001):
        assert abs(cdf_value(cdf, quantile(cdf, p)) - p) <= 1e-12


def test_default_bounds_pad_and_constant_fallback():
    lo, hi = default_bounds(np.array([1.0, 2.0, 3.0]))
    assert lo == pytest.approx(0.9)
    assert hi == pytest.approx(3.1)
    lo, hi = default_bounds(np.array([5.0, 5.0]))
    assert lo < 5.0 < hi


def test_samples_stay_inside_bounds():
    cdf = _cdf123()
    out = sample_cdf(cdf, 10_000, derive_stream(23, 0))
    assert out.values.min() >= 0.0
    assert out.values.max() <= 4.0


def test_sampling_reproduces_source_moments():
    s = derive_stream(24, 0)
    source = generate_normal_dataset(10_000, 10.0, 3.0, s)
    lo, hi = default_bounds(source.values)
    cdf = build_empirical_cdf(source, lo, hi)
    draws = sample_cdf(cdf, 100_000, derive_stream(24, 1))
    assert abs(draws.values.mean() - 10.0) < 0.1
    assert abs(draws.values.std(ddof=1) - 3.0) < 0.1


def test_sampling_determinism():
    cdf = _cdf123()
    a = sample_cdf(cdf, 1000, derive_stream(25, 0))
    b = sample_cdf(cdf, 1000, derive_stream(25, 0))
    assert np.array_equal(a.values, b.values)
    with pytest.raises(InvalidParameterError):
        sample_cdf(cdf, 0, derive_stream(25, 1))


def test_ks_distance_to_source_is_small():
    ks_2samp = pytest.importorskip("scipy.stats").ks_2samp
    s = derive_stream(26, 0)
    source = generate_normal_dataset(10_000, 10.0, 3.0, s)
    lo, hi = default_bounds(source.values)
    cdf = build_empirical_cdf(source, lo, hi)
    draws = sample_cdf(cdf, 10_000, derive_stream(26, 1))
    assert ks_2samp(source.values, draws.values).statistic < 0.03


def test_cdf_csv_export():
    buf = io.StringIO()
    write_cdf_csv(_cdf123(), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "support,prob"
    assert lines[1] == "0.0,0.0"
    assert lines[2] == "1.0,0.25"
    assert len(lines) == 6
