"""cos² channel representation of an orientation.

Channel k answers cos²(w·(θ − θ_k)) inside its support |θ − θ_k| < π/(2w) and
0 outside. With the default w = π/(3·spacing) every orientation on the span is
seen by three channels. Channel vectors compare with the Bhattacharyya angle
of their L1-normalised activations, the same measure as outcome
distributions.
"""

import math

import numpy as np

from statdist.distance import wootters_measure
from statdist.errors import CoverageError, DimensionError, InputError, UndecodableError
from statdist.models import ChannelBank, DiscreteDistribution


def coverage(bank: ChannelBank) -> tuple[float, float]:
    """Open interval on which at least one channel responds"""
    return bank.lo - bank.support, bank.hi + bank.support


def encode(bank: ChannelBank, theta: float) -> np.ndarray:
    lo, hi = coverage(bank)
    if not (math.isfinite(theta) and lo < theta < hi):
        raise CoverageError(theta, lo, hi)
    offsets = theta - bank.centers
    return np.where(
        np.abs(offsets) < bank.support, np.cos(bank.width * offsets) ** 2, 0.0
    )


def _check_vector(bank: ChannelBank, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (bank.count,):
        raise DimensionError(bank.count, v.size)
    if np.any(v < 0) or np.any(v > 1):
        raise InputError("channel activations must lie in [0, 1]")
    if not np.any(v > 0):
        raise UndecodableError("all channel activations are zero")
    return v


def decode(bank: ChannelBank, v) -> float:
    """θ̂ from the strongest channel and its stronger neighbour.

    With c = √a the pair satisfies c_k = cos x and c_m = cos(x − d), where
    x = w(θ − θ_k) and d = w(θ_m − θ_k), which gives x = atan2(sin x, cos x)
    with sin x = (c_m − c_k cos d) / sin d. Exact whenever both channels are
    inside their supports, i.e. everywhere but the outer half-support margins.
    """
    v = _check_vector(bank, v)
    k = int(np.argmax(v))
    neighbours = [m for m in (k - 1, k + 1) if 0 <= m < bank.count]
    m = max(neighbours, key=lambda j: v[j])
    center = bank.centers[k]
    if v[m] == 0.0:
        return float(center)

    d = bank.width * (bank.centers[m] - center)
    c_k, c_m = math.sqrt(v[k]), math.sqrt(v[m])
    x = math.atan2((c_m - c_k * math.cos(d)) / math.sin(d), c_k)
    return float(center + x / bank.width)


def channel_similarity(v1, v2) -> float:
    """Bhattacharyya angle between L1-normalised activation vectors"""
    a = np.asarray(v1, dtype=float)
    b = np.asarray(v2, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(a.size, b.size)
    for v in (a, b):
        if np.any(v < 0):
            raise InputError("channel activations must be non-negative")
        if not np.any(v > 0):
            raise UndecodableError("all channel activations are zero")
    return wootters_measure(
        DiscreteDistribution(probabilities=tuple(a / a.sum())),
        DiscreteDistribution(probabilities=tuple(b / b.sum())),
    )
