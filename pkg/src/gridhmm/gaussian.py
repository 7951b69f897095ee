"""Scalar Gaussian utilities and reproducible random streams.

Everything downstream of this module draws randomness through
:class:`RngStream`, which addresses an independent generator by
``(seed, stream_index)``.  Identical addresses give bitwise-identical
draws on every platform, and distinct stream indices give statistically
independent streams without any shared mutable state.  That property is
what lets the Monte Carlo harness hand one stream to each trial and stay
deterministic under any execution order.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = [
    "probability",
    "q_function",
    "RngStream",
    "sample_gaussian",
    "sample_categorical",
]

_SQRT2 = math.sqrt(2.0)

_WEIGHT_SUM_TOL = 1e-9


def probability(value: float) -> float:
    """Return ``value`` as a float after checking it lies in [0, 1].

    NaN fails both bound checks and is rejected.
    """
    v = float(value)
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"probability out of range [0, 1]: {value!r}")
    return v


def q_function(x: float) -> float:
    """Upper-tail probability of the standard normal distribution.

    Evaluated through the complementary error function rather than a
    series or rational approximation; the result is monotone decreasing
    in ``x`` and accurate to well below 1e-12 absolute over the argument
    ranges that arise here.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("q_function requires a non-NaN argument")
    return probability(0.5 * math.erfc(x / _SQRT2))


class RngStream:
    """One reproducible random stream addressed by ``(seed, stream_index)``.

    Backed by a PCG64 generator keyed through a seed sequence with the
    stream index as spawn key, so each index yields an independent
    stream derived directly from the root seed; creating stream ``t``
    never advances or touches stream ``u``.  Gaussian draws use the
    generator's native (ziggurat) sampler.

    A stream is single-owner state: never advance the same stream from
    two threads.  Distinct streams may be advanced concurrently.
    """

    def __init__(self, seed: int, stream_index: int = 0) -> None:
        seed = int(seed)
        stream_index = int(stream_index)
        if not (0 <= seed < 2**64):
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        if stream_index < 0:
            raise ValueError(f"stream_index must be non-negative, got {stream_index}")
        self.seed = seed
        self.stream_index = stream_index
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream_index,)))
        )

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_index={self.stream_index})"


def sample_gaussian(mean, sigma: float, rng: RngStream, size=None):
    """Draw from N(mean, sigma^2) on the given stream.

    ``mean`` may be scalar or an array; an array yields one draw per
    element in order.  Returns a float for scalar input, an ndarray
    otherwise.
    """
    sigma = float(sigma)
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    mean_arr = np.asarray(mean, dtype=float)
    if not np.all(np.isfinite(mean_arr)):
        raise ValueError("mean must be finite")
    out = rng.generator.normal(mean_arr, sigma, size=size)
    if size is None and mean_arr.ndim == 0:
        return float(out)
    return out


def _cumulative(weights) -> np.ndarray:
    """Validated cumulative weight vector with final entry exactly 1.0."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-D vector")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w < 0.0):
        raise ValueError(f"weights must be non-negative, got {w.tolist()}")
    total = float(w.sum())
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise ValueError(f"weights must sum to 1 within {_WEIGHT_SUM_TOL}, got sum {total!r}")
    cum = np.cumsum(w)
    cum /= cum[-1]  # last entry becomes exactly 1.0, so u < 1 always lands in range
    return cum


def _invert(cum: np.ndarray, u) -> np.ndarray:
    """Index of the category containing uniform draw ``u``.

    Inversion counts cumulative entries <= u, which skips zero-width
    (zero-probability) categories even when u hits a boundary exactly.
    """
    return np.searchsorted(cum, u, side="right")


def sample_categorical(weights, rng: RngStream, size=None):
    """Draw category indices with the given probabilities on the stream.

    Consumes exactly one uniform per draw, by inversion of the
    cumulative weight vector.  Zero-probability categories are never
    returned.  Returns an int for ``size=None``, an int64 ndarray
    otherwise.
    """
    cum = _cumulative(weights)
    u = rng.generator.random(size)
    idx = _invert(cum, u)
    if size is None:
        return int(idx)
    return idx.astype(np.int64)
