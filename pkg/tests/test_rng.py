import math

import numpy as np
import pytest

from kpimc import derive_stream, next_normal, next_uniform, substream
from kpimc.errors import InvalidParameterError

N_MOMENT = 100_000


def test_same_key_gives_identical_sequence():
    a = derive_stream(42, 0)
    b = derive_stream(42, 0)
    assert [next_uniform(a) for _ in range(100)] == \
           [next_uniform(b) for _ in range(100)]


def test_distinct_stream_ids_differ():
    a = derive_stream(42, 0)
    b = derive_stream(42, 1)
    xs = [next_uniform(a) for _ in range(100)]
    ys = [next_uniform(b) for _ in range(100)]
    assert xs != ys


def test_sequence_is_pinned_across_builds():
    # Frozen values pin the PCG64 + SeedSequence stream; a change here
    # means reproducibility across machines/versions broke.
    s = derive_stream(42, 7)
    got = [next_uniform(s) for _ in range(3)]
    assert got == [0.0015791460415535141, 0.09275783559869999,
                   0.8990427120008879]
    s = derive_stream(42, 7)
    assert next_normal(s, 0.0, 1.0) == -2.9518960746530025


def test_uniform_range_and_mean():
    s = derive_stream(7, 0)
    draws = np.array([next_uniform(s) for _ in range(N_MOMENT)])
    assert np.all(draws >= 0.0) and np.all(draws < 1.0)
    assert abs(draws.mean() - 0.5) < 0.01


def test_kth_draw_reproducible():
    a = derive_stream(5, 3)
    for _ in range(999):
        next_uniform(a)
    kth = next_uniform(a)
    b = derive_stream(5, 3)
    for _ in range(999):
        next_uniform(b)
    assert next_uniform(b) == kth


def test_normal_moments():
    s = derive_stream(11, 0)
    draws = np.array([next_normal(s, 10.0, 3.0) for _ in range(N_MOMENT)])
    assert abs(draws.mean() - 10.0) < 0.05
    assert abs(draws.std(ddof=1) - 3.0) < 0.05


def test_normal_symmetry():
    s = derive_stream(13, 0)
    draws = np.array([next_normal(s, 0.0, 1.0) for _ in range(N_MOMENT)])
    below = np.mean(draws < 0.0)
    assert abs(below - 0.5) < 0.01


def test_normal_rejects_bad_sigma():
    s = derive_stream(1, 0)
    with pytest.raises(InvalidParameterError):
        next_normal(s, 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        next_normal(s, 0.0, -1.0)


def test_substreams_are_distinct_and_deterministic():
    root = derive_stream(42, 0)
    a = substream(root, 0)
    b = substream(root, 1)
    xs = [next_uniform(a) for _ in range(50)]
    ys = [next_uniform(b) for _ in range(50)]
    assert xs != ys
    again = substream(derive_stream(42, 0), 0)
    assert [next_uniform(again) for _ in range(50)] == xs
    # children of different parents do not collide either
    c = substream(derive_stream(42, 1), 0)
    assert [next_uniform(c) for _ in range(50)] != xs


def test_seed_validation():
    with pytest.raises(InvalidParameterError):
        derive_stream(-1, 0)
    with pytest.raises(InvalidParameterError):
        derive_stream(2**64, 0)
    with pytest.raises(InvalidParameterError):
        derive_stream(1.5, 0)
    with pytest.raises(InvalidParameterError):
        derive_stream(0, -3)


def test_normal_sigma_scales_spread():
    s = derive_stream(17, 0)
    wide = np.array([next_normal(s, 0.0, 5.0) for _ in range(5000)])
    s2 = derive_stream(17, 0)
    narrow = np.array([next_normal(s2, 0.0, 0.5) for _ in range(5000)])
    assert math.isclose(wide.std() / narrow.std(), 10.0, rel_tol=1e-9)
