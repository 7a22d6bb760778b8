"""
Estimating two sensitive proportions from answer counts
========================================================

Each respondent answers two questions through the two-deck protocol, and we
only see tallies of the four answer pairs. This script goes from a known
population to the answer probabilities and back.
"""

from rrtwo import (
    CellCounts,
    DesignParams,
    estimate_crossed,
    estimate_proposed,
    estimate_simple,
    forward_proposed,
    forward_simple,
    validate_truth,
)

params = DesignParams(p=0.6, lam=0.7)
truth = validate_truth(pi_a=0.3, pi_b=0.2, pi_ab=0.1)
print("joint cells (AB, A only, B only, neither):", truth.cells)

###############################################################################
# Forward maps: probability of each answer pair (yes/yes, yes/no, no/yes, no/no)

theta = forward_proposed(params, truth)
print("proposed design:", theta.as_array())
print("simple design:  ", forward_simple(params, truth).as_array())

###############################################################################
# Feeding exact answer proportions back into the estimators returns the truth.

print(estimate_proposed(theta, params).as_tuple())

###############################################################################
# With 1000 respondents matching those proportions exactly:

counts = CellCounts(272, 308, 168, 252)
print(estimate_proposed(counts, params))

###############################################################################
# Small samples can give estimates outside [0, 1]. They are reported raw;
# ``clamp`` projects onto the admissible region and says whether it moved.

small = CellCounts(1, 2, 3, 14)
est = estimate_proposed(small, params)
print("raw:", est.as_tuple())
print("clamped:", est.clamp())

###############################################################################
# The simple and crossed designs use the same count layout but their own
# estimators. Crossed-design counts have to come from the field.

print(estimate_simple(CellCounts(178, 282, 202, 338), params).as_tuple())
print(estimate_crossed(CellCounts(300, 200, 200, 300), params).as_tuple())
