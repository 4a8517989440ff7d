"""Random-walk autocorrelation of fitness.

Walks start at uniform random configs and step to uniform random neighbors.
rho(d) pools the (f_t, f_{t+d}) pairs of every walk into one Pearson
correlation per lag. Starts and step draws come from a single PCG64 stream
seeded from the master seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ValidationError
from .landscape import Landscape
from .stats import pearson

DEFAULT_WALK_COUNT = 200
DEFAULT_WALK_LENGTH = 10_000
DEFAULT_MAX_LAG = 10


@dataclass(frozen=True)
class AutocorrelationResult:
    lags: tuple[int, ...]
    rho: tuple[float, ...]
    walk_count: int
    walk_length: int
    seed: int

    def rho_at(self, lag: int) -> float:
        return self.rho[self.lags.index(lag)]


def autocorrelation(l: Landscape, walk_count: int = DEFAULT_WALK_COUNT,
                    walk_length: int = DEFAULT_WALK_LENGTH,
                    max_lag: int = DEFAULT_MAX_LAG, seed: int = 0) -> AutocorrelationResult:
    l.require_complete("random-walk autocorrelation")
    if walk_count < 1:
        raise ValidationError("walk count must be at least 1")
    if max_lag < 1:
        raise ValidationError("max lag must be at least 1")
    if walk_length <= max_lag:
        raise ValidationError("walk length must exceed the maximum lag")
    s = l.space
    rng = np.random.default_rng(np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF))
    starts = rng.integers(0, s.cardinality, size=walk_count, dtype=np.int64)
    draws = rng.integers(0, 2**64, size=(walk_count, walk_length), dtype=np.uint64)
    paths = _kernels.walk_paths(s.radices, s.place, s.kinds, starts, draws)
    f = l.values[paths]
    if np.ptp(f) == 0.0:
        raise ValidationError("zero variance along walks: autocorrelation undefined")
    lags = tuple(range(1, max_lag + 1))
    rho = tuple(pearson(f[:, :-d].ravel(), f[:, d:].ravel()) for d in lags)
    return AutocorrelationResult(
        lags=lags, rho=rho, walk_count=walk_count, walk_length=walk_length, seed=seed
    )
