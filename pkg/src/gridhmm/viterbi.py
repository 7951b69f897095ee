"""Maximum-likelihood sequence estimation over the symbol channel.

Given the emitted symbol stream, the decoder finds a hidden state
sequence maximising the joint probability of states and symbols under
the model: initial weight, one emission factor per step, one transition
factor per step after the first.  All scoring happens in the log domain
with -inf standing for zero-probability factors.

Tie handling is part of the contract: among all maximising sequences
the lexicographically smallest (under -1 < 0 < +1) is returned.  Two
distinct optimal sequences can have genuinely equal scores, e.g. when
they use the same multiset of factors in a different order, but the two
log-sums then typically differ by a few ulp because float addition is
not associative.  Scores within ``TIE_EPS`` of the running optimum are
therefore treated as ties; the window is far above accumulated rounding
noise and far below any genuine score gap at these sequence lengths.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HmmModel, require_valid

__all__ = [
    "TIE_EPS",
    "BRUTE_FORCE_MAX_LEN",
    "InfeasibleObservationError",
    "Trellis",
    "joint_log_prob",
    "compute_trellis",
    "viterbi_decode",
    "brute_force_mlse",
]

# Absolute log-domain window within which path scores count as tied.
TIE_EPS = 1e-9

# Enumeration guard: 3^12 sequences is the most brute_force_mlse will score.
BRUTE_FORCE_MAX_LEN = 12


class InfeasibleObservationError(ValueError):
    """Every state sequence has probability zero for the observations."""


def _symbol_indices(seq, name: str) -> np.ndarray:
    arr = np.asarray(seq)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = np.asarray(seq, dtype=np.int64)
        if not np.array_equal(as_int, np.asarray(seq)):
            raise ValueError(f"{name} must contain integers in {{-1, 0, 1}}")
        arr = as_int
    if arr.min() < -1 or arr.max() > 1:
        raise ValueError(f"{name} entries must lie in {{-1, 0, 1}}")
    return (arr + 1).astype(np.int64)


def _log_params(model: HmmModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore"):
        return (
            np.log(model.initial),
            np.log(model.transitions),
            np.log(model.emissions),
        )


def joint_log_prob(symbols, states, model: HmmModel) -> float:
    """Log joint probability of a state sequence and a symbol sequence.

    Sums the log initial weight of the first state, one log emission
    term per step, and one log transition term per adjacent state pair.
    Returns -inf when any factor is zero.
    """
    x = _symbol_indices(symbols, "symbols")
    s = _symbol_indices(states, "states")
    if x.shape != s.shape:
        raise ValueError(f"length mismatch: {x.size} symbols vs {s.size} states")
    log_init, log_trans, log_emit = _log_params(model)
    total = log_init[s[0]] + np.sum(log_emit[x, s]) + np.sum(log_trans[s[:-1], s[1:]])
    return float(total)


@dataclass(frozen=True)
class Trellis:
    """Forward dynamic-programming lattice for one observation sequence.

    ``log_scores[k, j]`` is the best log joint score over state prefixes
    ending in state index j after observation k.  ``backpointers[k, j]``
    is the predecessor symbol (-1, 0, +1) achieving it, with the
    smallest symbol kept on exact score ties; row 0 has no predecessor
    and is left as 0.
    """

    log_scores: np.ndarray
    backpointers: np.ndarray


def compute_trellis(symbols, model: HmmModel) -> Trellis:
    """Forward pass: best-prefix scores and predecessor choices per step."""
    x = _symbol_indices(symbols, "symbols")
    require_valid(model)
    log_init, log_trans, log_emit = _log_params(model)
    n = x.size
    scores = np.empty((n, 3))
    back = np.zeros((n, 3), dtype=np.int8)
    scores[0] = log_init + log_emit[x[0]]
    for k in range(1, n):
        cand = scores[k - 1][:, None] + log_trans  # cand[i, j]: from i into j
        best = cand.argmax(axis=0)
        scores[k] = cand[best, np.arange(3)] + log_emit[x[k]]
        back[k] = best - 1
    return Trellis(scores, back)


def _first_dead_step(x: np.ndarray, log_init, log_trans, log_emit) -> int:
    """0-based index of the first step whose trellis column is all -inf."""
    reach = log_init + log_emit[x[0]]
    if np.all(np.isneginf(reach)):
        return 0
    for k in range(1, x.size):
        reach = (reach[:, None] + log_trans).max(axis=0) + log_emit[x[k]]
        if np.all(np.isneginf(reach)):
            return k
    raise AssertionError("called on a feasible observation sequence")


def viterbi_decode(symbols, model: HmmModel) -> np.ndarray:
    """Most likely hidden state sequence for the observed symbols.

    Runs in O(K) time and memory over the three-state trellis.  Among
    equally scoring optima (within ``TIE_EPS``) the lexicographically
    smallest sequence wins.  Lexicographic selection needs the score-to-go
    from each state, so the recursion runs backward and the sequence is
    then built front to back, at each step taking the smallest state
    that still achieves the optimum.  Raises
    :class:`InfeasibleObservationError` when no sequence has positive
    probability.
    """
    x = _symbol_indices(symbols, "symbols")
    require_valid(model)
    log_init, log_trans, log_emit = _log_params(model)
    n = x.size

    # to_go[k, j]: best log score of the path suffix after step k, given state j at k.
    to_go = np.zeros((n, 3))
    for k in range(n - 2, -1, -1):
        cand = log_trans + (log_emit[x[k + 1]] + to_go[k + 1])[None, :]
        to_go[k] = cand.max(axis=1)

    head = log_init + log_emit[x[0]] + to_go[0]
    best = float(head.max())
    if not np.isfinite(best):
        step = _first_dead_step(x, log_init, log_trans, log_emit)
        raise InfeasibleObservationError(
            f"no state sequence has positive probability; every path dies at step {step}"
        )

    out = np.empty(n, dtype=np.int64)
    out[0] = int(np.argmax(head >= best - TIE_EPS))
    for k in range(n - 1):
        cand = log_trans[out[k]] + log_emit[x[k + 1]] + to_go[k + 1]
        out[k + 1] = int(np.argmax(cand >= float(cand.max()) - TIE_EPS))
    return out - 1


def brute_force_mlse(symbols, model: HmmModel) -> np.ndarray:
    """Reference decoder: score every one of the 3^K state sequences.

    Exists as an independent check on :func:`viterbi_decode`; refuses
    sequences longer than ``BRUTE_FORCE_MAX_LEN``.  Applies the same
    tie rule: first sequence in lexicographic order whose score is
    within ``TIE_EPS`` of the maximum.
    """
    x = _symbol_indices(symbols, "symbols")
    require_valid(model)
    n = x.size
    if n > BRUTE_FORCE_MAX_LEN:
        raise ValueError(
            f"brute-force enumeration is limited to {BRUTE_FORCE_MAX_LEN} steps, got {n}"
        )
    log_init, log_trans, log_emit = _log_params(model)
    count = 3**n
    # seqs rows enumerate state-index sequences in lexicographic order.
    seqs = np.empty((count, n), dtype=np.int8)
    base = np.arange(count)
    for k in range(n):
        seqs[:, k] = (base // 3 ** (n - 1 - k)) % 3
    idx = seqs.astype(np.int64)
    scores = log_init[idx[:, 0]] + log_emit[x[0], idx[:, 0]]
    for k in range(1, n):
        scores = scores + log_trans[idx[:, k - 1], idx[:, k]] + log_emit[x[k], idx[:, k]]
    top = float(scores.max())
    if not np.isfinite(top):
        step = _first_dead_step(x, log_init, log_trans, log_emit)
        raise InfeasibleObservationError(
            f"no state sequence has positive probability; every path dies at step {step}"
        )
    winner = int(np.argmax(scores >= top - TIE_EPS))
    return idx[winner] - 1
