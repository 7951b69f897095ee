"""Synthetic data generation, Monte Carlo accuracy studies, and forecasting.

Reproducibility convention: every function that draws randomness takes
an :class:`~gridhmm.gaussian.RngStream` and consumes a documented
number of variates from it, so callers can reason about stream state.
The Monte Carlo driver derives one stream per trial index from a base
seed, which makes results independent of execution order and thread
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .detector import (
    DegenerateThresholdsError,
    DetectorParams,
    compute_thresholds,
    detection_probabilities,
)
from .gaussian import RngStream, _cumulative, _invert, sample_gaussian
from .model import SUM_TOL, HmmModel, _matrix_violation, _vector_violation, require_valid
from .viterbi import _symbol_indices, viterbi_decode

__all__ = [
    "HIST_BINS",
    "simulate_states",
    "emit_symbols",
    "synthesize_measurements",
    "accuracy",
    "TrialResult",
    "run_trial",
    "MonteCarloSummary",
    "run_monte_carlo",
    "SweepPoint",
    "detection_sweep",
    "PredictionVector",
    "predict",
    "expected_ht_accuracy",
]

# Accuracy histograms bin whole percentage points: [0,1), [1,2), ..., plus {100}.
HIST_BINS = 101


def simulate_states(model: HmmModel, length: int, rng: RngStream) -> np.ndarray:
    """Sample a hidden deviation path of the given length.

    The first state comes from the initial distribution, each later one
    from the transition row of its predecessor.  Consumes exactly
    ``length`` uniforms from the stream.  Returns symbols in {-1, 0, 1}.
    """
    require_valid(model)
    length = int(length)
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    cum_init = _cumulative(model.initial)
    cum_rows = [_cumulative(row) for row in model.transitions]
    u = rng.generator.random(length)
    idx = np.empty(length, dtype=np.int64)
    j = int(_invert(cum_init, u[0]))
    idx[0] = j
    for k in range(1, length):
        j = int(_invert(cum_rows[j], u[k]))
        idx[k] = j
    return idx - 1


def emit_symbols(hidden, emissions, rng: RngStream) -> np.ndarray:
    """Draw one detector symbol per hidden state through the emission channel.

    ``emissions`` must be column-stochastic; column j is the symbol law
    under true state j.  Draws are independent across positions and use
    the same single-uniform inversion as
    :func:`~gridhmm.gaussian.sample_categorical`, consuming one uniform
    per position.
    """
    r = np.asarray(emissions, dtype=float)
    if r.shape != (3, 3):
        raise ValueError(f"emissions must be 3x3, got shape {r.shape}")
    problem = _matrix_violation(r, "emissions", 0, SUM_TOL)
    if problem is not None:
        raise ValueError(problem)
    hid = _symbol_indices(hidden, "hidden")
    cum = np.cumsum(r, axis=0)
    cum /= cum[-1:, :]
    u = rng.generator.random(hid.size)
    picked = cum[:, hid]  # (3, K): cumulative column of each position's true state
    out = (picked <= u[None, :]).sum(axis=0)
    return out.astype(np.int64) - 1


def synthesize_measurements(hidden, params: DetectorParams, rng: RngStream) -> np.ndarray:
    """Gaussian frequency measurements around each hidden state's mean.

    Consumes one Gaussian variate per position.
    """
    hid = _symbol_indices(hidden, "hidden")
    means = np.asarray(params.means)[hid]
    return sample_gaussian(means, params.sigma, rng, size=hid.size)


def accuracy(estimate, truth) -> float:
    """Fraction of positions where the estimate matches the truth."""
    a = np.asarray(estimate)
    b = np.asarray(truth)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("sequences must be non-empty")
    return float(np.mean(a == b))


@dataclass(frozen=True)
class TrialResult:
    """One simulated trial with both estimators applied to it.

    ``ht_accuracy`` scores the memoryless per-symbol hypothesis test
    (the emitted symbols themselves, since they are the test's output);
    ``va_accuracy`` scores the Viterbi sequence estimate.
    """

    hidden: np.ndarray
    emitted: np.ndarray
    decoded: np.ndarray
    ht_accuracy: float
    va_accuracy: float


def run_trial(model: HmmModel, length: int, rng: RngStream) -> TrialResult:
    """Simulate one hidden path, emit symbols, decode, and score both ways."""
    hidden = simulate_states(model, length, rng)
    emitted = emit_symbols(hidden, model.emissions, rng)
    decoded = viterbi_decode(emitted, model)
    return TrialResult(
        hidden=hidden,
        emitted=emitted,
        decoded=decoded,
        ht_accuracy=accuracy(emitted, hidden),
        va_accuracy=accuracy(decoded, hidden),
    )


@dataclass(frozen=True)
class MonteCarloSummary:
    """Accuracy statistics over independent trials, in percentage points.

    Histograms count trials per whole percentage point, bin b covering
    [b, b+1) with a final closed bin at exactly 100.  Means and standard
    deviations are the maximum-likelihood Gaussian fit to the per-trial
    accuracies (population standard deviation).
    """

    trials: int
    ht_mean: float
    ht_std: float
    va_mean: float
    va_std: float
    histogram_ht: np.ndarray
    histogram_va: np.ndarray

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        for name in ("ht_mean", "va_mean"):
            v = getattr(self, name)
            if not (0.0 <= v <= 100.0):
                raise ValueError(f"{name} must lie in [0, 100], got {v!r}")
        for name in ("ht_std", "va_std"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("histogram_ht", "histogram_va"):
            h = np.asarray(getattr(self, name))
            if h.shape != (HIST_BINS,):
                raise ValueError(f"{name} must have {HIST_BINS} bins, got shape {h.shape}")
            if int(h.sum()) != self.trials:
                raise ValueError(f"{name} counts {int(h.sum())} trials, expected {self.trials}")
            object.__setattr__(self, name, h.astype(np.int64))


def _percent_stats(match_counts: np.ndarray, length: int) -> tuple[float, float, np.ndarray]:
    pct = match_counts * 100.0 / length
    # Integer floor keeps exact-percent trials in their own bin.
    bins = (match_counts * 100) // length
    hist = np.bincount(bins, minlength=HIST_BINS)
    return float(np.mean(pct)), float(np.std(pct)), hist


def run_monte_carlo(
    model: HmmModel,
    length: int,
    trials: int,
    base_seed: int,
    threads: int = 1,
) -> MonteCarloSummary:
    """Accuracy statistics of both estimators over independent trials.

    Trial t runs on ``RngStream(base_seed, stream_index=t)``, so the
    result is a pure function of (model, length, trials, base_seed):
    thread count affects wall time only.
    """
    require_valid(model)
    trials = int(trials)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")

    def matches(t: int) -> tuple[int, int]:
        res = run_trial(model, length, RngStream(base_seed, stream_index=t))
        return (
            int(np.count_nonzero(res.emitted == res.hidden)),
            int(np.count_nonzero(res.decoded == res.hidden)),
        )

    if threads == 1:
        pairs = [matches(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = list(pool.map(matches, range(trials)))

    ht_counts = np.array([p[0] for p in pairs], dtype=np.int64)
    va_counts = np.array([p[1] for p in pairs], dtype=np.int64)
    ht_mean, ht_std, ht_hist = _percent_stats(ht_counts, int(length))
    va_mean, va_std, va_hist = _percent_stats(va_counts, int(length))
    return MonteCarloSummary(
        trials=trials,
        ht_mean=ht_mean,
        ht_std=ht_std,
        va_mean=va_mean,
        va_std=va_std,
        histogram_ht=ht_hist,
        histogram_va=va_hist,
    )


@dataclass(frozen=True)
class SweepPoint:
    """Detection probabilities at one noise level.

    ``detection`` is None when the thresholds degenerate at this level
    (prior imbalance swallowing a decision region); ``note`` then says
    why.
    """

    snr_db: float
    sigma: float
    detection: tuple[float, float, float] | None
    note: str = ""


def detection_sweep(
    template: DetectorParams,
    snr_db_grid=None,
    sigma_grid=None,
) -> list[SweepPoint]:
    """Per-state detection probability across measurement noise levels.

    Exactly one grid must be given.  SNR in dB maps to noise through
    ``sigma = 10**(-snr_db / 10)``, i.e. SNR is the power ratio 1/sigma
    on the dB scale.  The template's sigma is replaced point by point;
    its means and priors are used as given.  Degenerate points are
    reported in place rather than aborting the sweep.
    """
    if (snr_db_grid is None) == (sigma_grid is None):
        raise ValueError("exactly one of snr_db_grid and sigma_grid is required")
    if snr_db_grid is not None:
        snr_db = [float(v) for v in snr_db_grid]
        if not all(math.isfinite(v) for v in snr_db):
            raise ValueError("snr_db_grid entries must be finite")
        sigmas = [10.0 ** (-v / 10.0) for v in snr_db]
    else:
        sigmas = [float(v) for v in sigma_grid]
        if not all(math.isfinite(v) and v > 0.0 for v in sigmas):
            raise ValueError("sigma_grid entries must be finite and positive")
        snr_db = [10.0 * math.log10(1.0 / v) for v in sigmas]
    if not sigmas:
        raise ValueError("the grid must contain at least one point")

    points: list[SweepPoint] = []
    for db, sg in zip(snr_db, sigmas):
        params = replace(template, sigma=sg)
        try:
            thresholds = compute_thresholds(params)
        except DegenerateThresholdsError as exc:
            points.append(SweepPoint(snr_db=db, sigma=sg, detection=None, note=str(exc)))
            continue
        probs = detection_probabilities(params, thresholds)
        points.append(
            SweepPoint(snr_db=db, sigma=sg, detection=(probs[0], probs[1], probs[2]))
        )
    return points


@dataclass(frozen=True)
class PredictionVector:
    """State occupancy distribution some number of steps ahead."""

    probs: np.ndarray
    horizon: int

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        problem = _vector_violation(p, "probs", SUM_TOL)
        if problem is not None:
            raise ValueError(problem)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")


def predict(transitions, initial, horizon: int) -> PredictionVector:
    """Occupancy distribution after ``horizon`` steps of the chain.

    Applies the forward equation ``v <- v P`` once per step, so
    predicting a steps and then feeding the result forward b more steps
    reproduces the (a+b)-step prediction bit for bit.  Horizon 0 returns
    the initial distribution unchanged.
    """
    p = np.asarray(transitions, dtype=float)
    if p.shape != (3, 3):
        raise ValueError(f"transitions must be 3x3, got shape {p.shape}")
    problem = _matrix_violation(p, "transitions", 1, SUM_TOL)
    if problem is not None:
        raise ValueError(problem)
    v = np.asarray(initial, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"initial must have 3 entries, got shape {v.shape}")
    problem = _vector_violation(v, "initial", SUM_TOL)
    if problem is not None:
        raise ValueError(problem)
    horizon = int(horizon)
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    out = v.copy()
    for _ in range(horizon):
        out = out @ p
    return PredictionVector(probs=out, horizon=horizon)


def expected_ht_accuracy(model: HmmModel, length: int) -> float:
    """Analytic mean matching fraction of the per-symbol test.

    The test is right at step k with probability equal to the
    occupancy-weighted diagonal of the emission matrix, so the expected
    accuracy over a length-K path averages the occupancy distribution
    across steps and weights the diagonal with it.  Serves as an
    independent check on Monte Carlo estimates.
    """
    require_valid(model)
    length = int(length)
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    occupancy = np.zeros(3)
    v = model.initial.copy()
    for _ in range(length):
        occupancy += v
        v = v @ model.transitions
    occupancy /= length
    # Clamp away float drift from repeated propagation; the result is a probability.
    return float(min(max(occupancy @ np.diagonal(model.emissions), 0.0), 1.0))
