"""Independent reference computations used by the tests.

Nothing here imports the package's forward maps or variance formulas.
"""

from itertools import product
from math import factorial

import numpy as np

# membership of the four truth cells (AB, A only, B only, neither)
IN_A = (True, True, False, False)
IN_B = (True, False, True, False)


def joint_cells(a, b, ab):
    return np.array([ab, a - ab, b - ab, 1 - a - b + ab])


def yes_prob(design, member, p):
    """Chance of a yes to one question for one respondent."""
    if design == "mangat":
        return 1.0 if member else 1.0 - p
    if design == "warner":
        return p if member else 1.0 - p
    raise ValueError(design)


def enumerate_profile(design, p, lam, a, b, ab):
    """Answer-pair probabilities by summing over truth cells and device outcomes."""
    cells = joint_cells(a, b, ab)
    theta = np.zeros(4)
    for c in range(4):
        ya = yes_prob(design, IN_A[c], p)
        yb = yes_prob(design, IN_B[c], lam)
        for k, (ans_a, ans_b) in enumerate(product((True, False), repeat=2)):
            pa = ya if ans_a else 1 - ya
            pb = yb if ans_b else 1 - yb
            theta[k] += cells[c] * pa * pb
    return theta


def multinomial_outcomes(n, theta):
    """All count vectors of size n with their probabilities."""
    out = []
    for n11 in range(n + 1):
        for n10 in range(n + 1 - n11):
            for n01 in range(n + 1 - n11 - n10):
                counts = (n11, n10, n01, n - n11 - n10 - n01)
                coef = factorial(n)
                for k in counts:
                    coef //= factorial(k)
                prob = coef * np.prod([t**k for t, k in zip(theta, counts)])
                out.append((counts, prob))
    return out


def exact_moments(fn, n, theta):
    """Exact mean and variance of fn(counts) under Multinomial(n, theta)."""
    outs = multinomial_outcomes(n, theta)
    vals = np.array([fn(c) for c, _ in outs])
    probs = np.array([pr for _, pr in outs])
    mean = (probs[:, None] * vals).sum(axis=0)
    var = (probs[:, None] * (vals - mean) ** 2).sum(axis=0)
    return mean, var
