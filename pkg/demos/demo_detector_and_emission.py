"""
Three-hypothesis detection and the emission matrix
==================================================

A frequency measurement z is Gaussian around one of three means, one
per deviation state (-1, 0, +1).  The maximum-likelihood rule with
priors reduces to two thresholds on z, and integrating the Gaussian
tails over the decision regions gives the per-state confusion
probabilities: the emission matrix of the hidden Markov model.
"""
import numpy as np

from gridhmm import (
    DetectorParams,
    build_emission_matrix,
    classify,
    compute_thresholds,
    detection_probabilities,
    error_probabilities,
)

np.set_printoptions(precision=4, suppress=True)

# A nominal 50 Hz grid, 1 Hz deviation steps, noise sigma 0.2 Hz, and a
# prior that says the zero-deviation state holds 80% of the time.
params = DetectorParams(m_neg=49.0, m_zero=50.0, m_pos=51.0, sigma=0.2, priors=(0.1, 0.8, 0.1))

thresholds = compute_thresholds(params)
print("decision thresholds (Hz):", thresholds.delta_neg_zero, thresholds.delta_zero_pos)

# The skewed prior pushes both thresholds away from the plain midpoints
# 49.5 and 50.5, widening the zero-deviation region.
equal = compute_thresholds(DetectorParams(m_neg=49.0, m_zero=50.0, m_pos=51.0, sigma=0.2))
print("equal-prior midpoints  (Hz):", equal.delta_neg_zero, equal.delta_zero_pos)

# Classify a few raw measurements.
z = np.array([49.1, 49.95, 50.4, 50.7, 48.2])
print("\nmeasurements:", z)
print("decisions:   ", classify(z, thresholds))

# Per-state error and detection probabilities.
print("\nP(error | state):    ", error_probabilities(params, thresholds))
print("P(detection | state):", detection_probabilities(params, thresholds))

# The emission matrix collects the full confusion structure: column j is
# the distribution of the emitted symbol when the true state is j.
# Columns sum to one.
r = build_emission_matrix(params)
print("\nemission matrix (rows: emitted -1, 0, +1; columns: true -1, 0, +1)")
print(r)
print("column sums:", r.sum(axis=0))
