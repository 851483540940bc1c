"""Deterministic, splittable random number streams.

A stream is a PCG64 generator keyed by ``SeedSequence(master_seed,
spawn_key=key)``.  The key is a tuple of unsigned integers: top-level
streams carry ``(stream_id,)`` and :func:`substream` appends one more
component, so every stream is a pure function of ``(master_seed, key)``
and distinct keys never collide.  This is what lets per-dataset work run
in any order (or in parallel) without changing results.

Normal variates are produced by one pinned transform, the AS241 inverse
normal CDF applied to a half-offset 53-bit uniform (see
:mod:`kpimc.kernels`), never by platform-dependent rejection samplers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidParameterError

_U64_MAX = 2**64 - 1


@dataclass
class RngStream:
    """A seeded generator plus the identity that produced it.

    Not shareable across concurrent tasks; derive one stream per unit of
    work instead.
    """

    master_seed: int
    stream_id: int
    key: tuple[int, ...]
    generator: np.random.Generator = field(repr=False)


def _check_u64(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise InvalidParameterError(f"{name} must be an integer")
    value = int(value)
    if value < 0 or value > _U64_MAX:
        raise InvalidParameterError(f"{name} must fit in an unsigned 64-bit int")
    return value


def _make(master_seed: int, key: tuple[int, ...]) -> RngStream:
    seq = np.random.SeedSequence(master_seed, spawn_key=key)
    return RngStream(
        master_seed=master_seed,
        stream_id=key[-1],
        key=key,
        generator=np.random.Generator(np.random.PCG64(seq)),
    )


def derive_stream(master_seed: int, stream_id: int) -> RngStream:
    """Create the stream identified by ``(master_seed, stream_id)``."""
    master_seed = _check_u64(master_seed, "master_seed")
    stream_id = _check_u64(stream_id, "stream_id")
    return _make(master_seed, (stream_id,))


def substream(parent: RngStream, child_id: int) -> RngStream:
    """Derive a child stream; children of distinct keys never overlap."""
    child_id = _check_u64(child_id, "child_id")
    return _make(parent.master_seed, parent.key + (child_id,))


def next_uniform(s: RngStream) -> float:
    """One draw from Uniform[0, 1); advances the stream state."""
    return float(s.generator.random())


def next_normal(s: RngStream, mu: float, sigma: float) -> float:
    """One draw from N(mu, sigma^2) via the pinned inverse-CDF transform."""
    if not sigma > 0.0:
        raise InvalidParameterError(f"sigma must be > 0 (got {sigma})")
    return mu + sigma * float(kernels.std_normal_from_u(s.generator.random()))
