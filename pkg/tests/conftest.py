"""Shared fixtures: the reference configuration used across the suite."""
import numpy as np
import pytest

import gridhmm as gh

# Reference detector configuration and the 4-decimal emission matrix it
# must reproduce.
REFERENCE_MEANS = (49.0, 50.0, 51.0)
REFERENCE_SIGMA = 0.2
REFERENCE_PRIORS = (0.1, 0.8, 0.1)
REFERENCE_EMISSION_4DP = np.array(
    [
        [0.9814, 0.0018, 0.0000],
        [0.0186, 0.9965, 0.0186],
        [0.0000, 0.0018, 0.9814],
    ]
)
REFERENCE_THRESHOLDS = (49.41682233833281, 50.58317766166719)

REFERENCE_P = np.array(
    [
        [0.2, 0.7, 0.1],
        [0.1, 0.8, 0.1],
        [0.1, 0.7, 0.2],
    ]
)
REFERENCE_STATIONARY = np.array([1.0 / 9.0, 7.0 / 9.0, 1.0 / 9.0])

# Asymmetric study configuration for the Monte Carlo comparisons.
STUDY_INITIAL = (0.25, 0.6, 0.15)
STUDY_MEANS = (49.4, 50.0, 50.7)


@pytest.fixture
def ref_params() -> gh.DetectorParams:
    return gh.DetectorParams(
        m_neg=REFERENCE_MEANS[0],
        m_zero=REFERENCE_MEANS[1],
        m_pos=REFERENCE_MEANS[2],
        sigma=REFERENCE_SIGMA,
        priors=REFERENCE_PRIORS,
    )


@pytest.fixture
def ref_model(ref_params) -> gh.HmmModel:
    return gh.HmmModel(
        transitions=REFERENCE_P,
        emissions=gh.build_emission_matrix(ref_params),
        initial=np.array(REFERENCE_PRIORS),
    )


def random_model(gen: np.random.Generator, allow_zeros: bool = True) -> gh.HmmModel:
    """Random valid model; optionally sparsified to exercise -inf factors."""
    p = gen.dirichlet(np.ones(3), size=3)
    r = gen.dirichlet(np.ones(3), size=3).T
    pi = gen.dirichlet(np.ones(3))
    if allow_zeros and gen.random() < 0.4:
        i, j = gen.integers(0, 3, size=2)
        if p[i].max() > p[i, j] + 0.05:  # keep the row renormalizable
            p[i, j] = 0.0
            p[i] /= p[i].sum()
    if allow_zeros and gen.random() < 0.4:
        i, j = gen.integers(0, 3, size=2)
        if r[:, j].max() > r[i, j] + 0.05:
            r[i, j] = 0.0
            r[:, j] /= r[:, j].sum()
    return gh.HmmModel(transitions=p, emissions=r, initial=pi)


def feasible_observation(model: gh.HmmModel, length: int, gen: np.random.Generator) -> np.ndarray:
    """Symbol sequence drawn from the model itself, so decoding is feasible."""
    stream = gh.RngStream(int(gen.integers(0, 2**63)), 0)
    hidden = gh.simulate_states(model, length, stream)
    return gh.emit_symbols(hidden, model.emissions, stream)
