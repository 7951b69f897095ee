"""
Forecasting state occupancy
===========================

Given the transition matrix and where the chain is now, propagating the
occupancy row vector forecasts the state distribution any number of
steps ahead.  The forecasts converge to the stationary distribution,
which a power iteration computes directly.
"""
import numpy as np

from gridhmm import predict, stationary_distribution

np.set_printoptions(precision=6, suppress=True)

transitions = np.array([[0.2, 0.7, 0.1], [0.1, 0.8, 0.1], [0.1, 0.7, 0.2]])

# The chain currently sits in the negative-deviation state.
now = np.array([1.0, 0.0, 0.0])

stationary = stationary_distribution(transitions)
print("stationary occupancy:", stationary, "(exactly 1/9, 7/9, 1/9)")

print(f"\n{'horizon':>7} {'p_neg':>9} {'p_zero':>9} {'p_pos':>9} {'gap to stationary':>18}")
for m in (0, 1, 2, 3, 4, 8, 16, 64):
    fc = predict(transitions, now, horizon=m)
    gap = np.max(np.abs(fc.probs - stationary))
    p = fc.probs
    print(f"{m:>7} {p[0]:>9.6f} {p[1]:>9.6f} {p[2]:>9.6f} {gap:>18.2e}")

# One step from a known zero-deviation state is just the middle row of
# the transition matrix.
one = predict(transitions, np.array([0.0, 1.0, 0.0]), horizon=1)
print("\none step from state 0:", one.probs)
print("middle transition row:", transitions[1])
