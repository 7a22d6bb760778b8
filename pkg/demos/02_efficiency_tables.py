"""
Relative efficiency tables and thresholds
=========================================

Relative efficiency is the baseline design's variance divided by the
proposed design's variance. The grid runs pi_a and pi_b over 0.1..0.9 with
pi_a + pi_b < 0.99 and three pi_ab levels, at P = 0.6 and lambda = 0.7.
"""

import numpy as np

from rrtwo import DesignParams, Mode, ModelId, table_grid, thresholds, validate_truth
from rrtwo.analysis import relative_efficiency_table

params = DesignParams(0.6, 0.7)

###############################################################################
# Published mode reproduces the widely circulated tables. Its A and B columns
# divide by alpha * (1 - alpha) instead of the proposed estimator's variance.

published = relative_efficiency_table(table_grid(params, [0.05], Mode.PUBLISHED, ModelId.SIMPLE))
np.set_printoptions(precision=2, suppress=True)
print("pi_a  pi_b  pi_ab  RE_A  RE_B  RE_AB")
print(published[:5])

###############################################################################
# Formula mode uses the proposed estimator's own variance throughout. The A
# and B columns shrink by exactly P**2 and lambda**2; AB is unchanged.

formula = relative_efficiency_table(table_grid(params, [0.05], Mode.FORMULA, ModelId.SIMPLE))
print(formula[:5])
print("RE_A ratio:", np.unique(np.round(formula[:, 3] / published[:, 3], 12)))

###############################################################################
# Crossed baseline, pi_ab = 0.2

crossed = table_grid(params, [0.2], Mode.PUBLISHED, ModelId.CROSSED)
for r in crossed[:3]:
    print(f"{r.pi_a:.1f} {r.pi_b:.1f} {r.re_a:.1f} {r.re_b:.1f} {r.re_ab:.1f}")

###############################################################################
# Thresholds: the proposed A estimator beats the simple one when pi_a exceeds
# the bound. At P = 0.6 the bound is negative, so it always wins; at P = 0.3
# it only wins above 0.4375.

print(thresholds(params, validate_truth(0.1, 0.1, 0.05)))
print(thresholds(DesignParams(0.3, 0.7), validate_truth(0.1, 0.1, 0.05)))
