import numpy as np
import pytest

from kpimc import (
    Dataset,
    bootstrap_ci,
    ci_for_method_output,
    derive_stream,
    generate_normal_dataset,
    normal_cdf,
    normal_quantile,
)
from kpimc.bootstrap import BootstrapSettings, bootstrap_ci_pair
from kpimc.errors import InvalidParameterError


def test_normal_cdf_center_and_symmetry():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.0) + normal_cdf(-1.0) == pytest.approx(1.0, abs=1e-15)


def test_normal_quantile_reference_value():
    assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
    assert normal_quantile(0.5) == 0.0


def test_phi_and_inverse_are_mutually_inverse():
    for p in np.linspace(0.001, 0.999, 97):
        assert normal_cdf(normal_quantile(p)) == pytest.approx(p, abs=1e-6)
    for z in np.linspace(-5, 5, 81):
        assert normal_quantile(normal_cdf(z)) == pytest.approx(z, abs=1e-6)


def test_phi_accuracy_against_scipy():
    stats = pytest.importorskip("scipy.stats")
    zs = np.linspace(-6.0, 6.0, 481)
    for z in zs:
        assert abs(normal_cdf(z) - stats.norm.cdf(z)) < 1e-7
    for p in np.linspace(1e-6, 1 - 1e-6, 481):
        assert abs(normal_quantile(p) - stats.norm.ppf(p)) < 1e-7


def test_normal_quantile_domain():
    for bad in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(InvalidParameterError):
            normal_quantile(bad)


def test_settings_validation():
    with pytest.raises(InvalidParameterError):
        BootstrapSettings(resample_count=50)
    with pytest.raises(InvalidParameterError):
        BootstrapSettings(method="wild")
    with pytest.raises(InvalidParameterError):
        BootstrapSettings(level=1.0)


def test_mean_interval_matches_clt_width():
    sample = generate_normal_dataset(1000, 10.0, 3.0, derive_stream(51, 0))
    ci = bootstrap_ci(sample, "mean", BootstrapSettings(), derive_stream(51, 1))
    assert ci.contains(10.0)
    width = ci.upper - ci.lower
    clt = 2.0 * 1.645 * 3.0 / np.sqrt(1000)
    assert abs(width - clt) < 0.25 * clt


def test_constant_sample_degenerates():
    ds = Dataset(values=np.full(50, 5.0))
    ci = bootstrap_ci(ds, "mean", BootstrapSettings(), derive_stream(52, 0))
    assert (ci.lower, ci.upper) == (5.0, 5.0)
    assert ci.degenerate
    ci = bootstrap_ci(ds, "std", BootstrapSettings(), derive_stream(52, 1))
    assert (ci.lower, ci.upper) == (0.0, 0.0)
    assert ci.degenerate


def test_interval_determinism():
    sample = generate_normal_dataset(500, 0.0, 1.0, derive_stream(53, 0))
    a = bootstrap_ci(sample, "std", BootstrapSettings(), derive_stream(53, 1))
    b = bootstrap_ci(sample, "std", BootstrapSettings(), derive_stream(53, 1))
    assert a == b


def test_small_samples_rejected():
    ds = Dataset(values=np.arange(9, dtype=float))
    with pytest.raises(InvalidParameterError):
        bootstrap_ci(ds, "mean", BootstrapSettings(), derive_stream(54, 0))
    with pytest.raises(InvalidParameterError):
        bootstrap_ci(ds, "median", BootstrapSettings(), derive_stream(54, 1))


def test_wider_level_nests_narrower():
    sample = generate_normal_dataset(400, 10.0, 3.0, derive_stream(55, 0))
    narrow = bootstrap_ci(sample, "mean", BootstrapSettings(level=0.90),
                          derive_stream(55, 1))
    wide = bootstrap_ci(sample, "mean", BootstrapSettings(level=0.95),
                        derive_stream(55, 1))
    assert wide.lower <= narrow.lower <= narrow.upper <= wide.upper


def test_percentile_and_bca_agree_on_symmetric_statistic():
    sample = generate_normal_dataset(5000, 0.0, 1.0, derive_stream(56, 0))
    bca = bootstrap_ci(sample, "mean", BootstrapSettings(method="bca"),
                       derive_stream(56, 1))
    pct = bootstrap_ci(sample, "mean", BootstrapSettings(method="percentile"),
                       derive_stream(56, 1))
    width = bca.upper - bca.lower
    assert abs(bca.lower - pct.lower) < 0.1 * width
    assert abs(bca.upper - pct.upper) < 0.1 * width


def test_bca_tracks_scipy_bootstrap():
    scipy_stats = pytest.importorskip("scipy.stats")
    sample = generate_normal_dataset(1000, 10.0, 3.0, derive_stream(57, 0))
    mine = bootstrap_ci(sample, "mean",
                        BootstrapSettings(resample_count=4000),
                        derive_stream(57, 1))
    ref = scipy_stats.bootstrap(
        (sample.values,), np.mean, confidence_level=0.90, method="BCa",
        n_resamples=4000, random_state=np.random.default_rng(0))
    lo, hi = ref.confidence_interval
    width = mine.upper - mine.lower
    # different resampling streams; endpoints agree to quantile noise
    assert abs(mine.lower - lo) < 0.15 * width
    assert abs(mine.upper - hi) < 0.15 * width


def test_nominal_coverage_sanity():
    # 200 independent N(0,1) samples of size 200 at level 0.90
    covered = 0
    for i in range(200):
        sample = generate_normal_dataset(200, 0.0, 1.0, derive_stream(58, i))
        ci = bootstrap_ci(sample, "mean", BootstrapSettings(),
                          derive_stream(59, i))
        covered += ci.contains(0.0)
    assert abs(covered / 200 - 0.90) < 0.07


def test_ci_for_method_output_mapping():
    draws = generate_normal_dataset(1000, 10.0, 3.0, derive_stream(60, 0))
    mu_ci = ci_for_method_output(draws, "mu", BootstrapSettings(),
                                 derive_stream(60, 1))
    sigma_ci = ci_for_method_output(draws, "sigma", BootstrapSettings(),
                                    derive_stream(60, 1))
    assert mu_ci == bootstrap_ci(draws, "mean", BootstrapSettings(),
                                 derive_stream(60, 1))
    assert sigma_ci == bootstrap_ci(draws, "std", BootstrapSettings(),
                                    derive_stream(60, 1))
    assert mu_ci.contains(10.0)
    assert sigma_ci.contains(3.0)


def test_ci_for_method_output_validation():
    short = generate_normal_dataset(99, 0.0, 1.0, derive_stream(61, 0))
    with pytest.raises(InvalidParameterError):
        ci_for_method_output(short, "mu", BootstrapSettings(),
                             derive_stream(61, 1))
    ok = generate_normal_dataset(100, 0.0, 1.0, derive_stream(61, 2))
    with pytest.raises(InvalidParameterError):
        ci_for_method_output(ok, "median", BootstrapSettings(),
                             derive_stream(61, 3))


def test_pair_matches_individual_calls():
    sample = generate_normal_dataset(300, 10.0, 3.0, derive_stream(62, 0))
    pair = bootstrap_ci_pair(sample, BootstrapSettings(), derive_stream(62, 1))
    assert pair["mean"] == bootstrap_ci(sample, "mean", BootstrapSettings(),
                                        derive_stream(62, 1))
    assert pair["std"] == bootstrap_ci(sample, "std", BootstrapSettings(),
                                       derive_stream(62, 1))


def test_interval_json_record():
    import json
    ci = bootstrap_ci(generate_normal_dataset(200, 10.0, 3.0,
                                              derive_stream(65, 0)),
                      "mean", BootstrapSettings(), derive_stream(65, 1))
    record = ci.record("mc", "mu")
    assert set(record) == {"method", "reference", "lower", "upper", "level"}
    assert json.loads(json.dumps(record)) == record


def test_intervals_are_finite_and_ordered():
    for i in range(10):
        sample = generate_normal_dataset(50, 0.0, 1.0, derive_stream(63, i))
        ci = bootstrap_ci(sample, "std", BootstrapSettings(resample_count=200),
                          derive_stream(64, i))
        assert np.isfinite(ci.lower) and np.isfinite(ci.upper)
        assert ci.lower <= ci.upper
