"""
Variance curves for plotting
============================

Variance of the A estimator under each design as pi_a varies, written as CSV
for an external plotting tool.
"""

import csv
import sys

import numpy as np

from rrtwo import DesignParams, validate_truth, variance_curves

params = DesignParams(0.6, 0.7)
fixed = validate_truth(0.1, 0.1, 0.05)
points = variance_curves(params, "pi_a", np.round(np.arange(0.1, 0.85, 0.1), 2), fixed, n=1000)

w = csv.writer(sys.stdout, lineterminator="\n")
w.writerow(["pi_a", "v_simple", "v_crossed", "v_proposed"])
for pt in points:
    w.writerow([pt.x, f"{pt.v_sm:.6g}", f"{pt.v_cm:.6g}", f"{pt.v_ea:.6g}"])
