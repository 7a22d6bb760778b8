"""
Moment estimators of (pi_a, pi_b, pi_ab) from observed answer-pair data.

Every estimator here is affine in the observed proportions
``theta_hat = (n11, n10, n01, n00) / n`` and is returned raw: finite-sample
estimates may fall outside [0, 1]. Use :meth:`EstimateTriple.clamp` for the
projection onto the admissible region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from rrtwo.core import (
    CellCounts,
    DesignParams,
    InvalidParams,
    ModelId,
    PopulationTruth,
    ResponseProfile,
)

Observed = Union[CellCounts, ResponseProfile]


@dataclass(frozen=True)
class EstimateTriple:
    pi_a_hat: float
    pi_b_hat: float
    pi_ab_hat: float
    model: ModelId

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pi_a_hat, self.pi_b_hat, self.pi_ab_hat)

    def clamp(self) -> tuple[PopulationTruth, bool]:
        """Project onto the admissible region.

        ``pi_a`` and ``pi_b`` are clipped to [0, 1], then ``pi_ab`` is clipped to
        ``[max(0, pi_a + pi_b - 1), min(pi_a, pi_b)]``. The flag is True when any
        component moved.
        """
        a = min(max(self.pi_a_hat, 0.0), 1.0)
        b = min(max(self.pi_b_hat, 0.0), 1.0)
        ab = min(max(self.pi_ab_hat, max(0.0, a + b - 1.0)), min(a, b))
        changed = (a, b, ab) != self.as_tuple()
        return PopulationTruth(a, b, ab), changed


def observed_proportions(observed: Observed) -> np.ndarray:
    """``theta_hat`` as a length-4 array from either counts or a ready profile."""
    if isinstance(observed, CellCounts):
        return observed.proportions()
    if isinstance(observed, ResponseProfile):
        return observed.as_array()
    raise TypeError(f"expected CellCounts or ResponseProfile, got {type(observed).__name__}")


def estimate_mangat(counts_yes: int, n: int, p: float) -> float:
    """Mangat estimator ``(alpha_hat - 1 + p) / p`` with ``alpha_hat = counts_yes / n``."""
    if p == 0:
        raise InvalidParams("p must be positive")
    if not 0.0 < p <= 1.0:
        raise InvalidParams(f"p must lie in (0, 1], got {p!r}")
    if n < 1:
        raise InvalidParams("at least one respondent is required (n >= 1)")
    if not 0 <= counts_yes <= n:
        raise InvalidParams(f"counts_yes must lie in [0, n], got {counts_yes!r} with n={n}")
    alpha_hat = counts_yes / n
    return (alpha_hat - 1.0 + p) / p


def estimate_proposed(observed: Observed, params: DesignParams) -> EstimateTriple:
    t11, t10, t01, t00 = observed_proportions(observed)
    p, lam = params.p, params.lam
    pi_a = (t11 + t10 - t01 - t00 + (2 * p - 1)) / (2 * p)
    pi_b = (t11 - t10 + t01 - t00 + (2 * lam - 1)) / (2 * lam)
    pi_ab = (
        (2 * p + 2 * lam - 1) * t11
        - (2 * p - 2 * lam + 1) * t10
        + (2 * p - 2 * lam - 1) * t01
        - (2 * p + 2 * lam - 3) * t00
        + (2 * p - 1) * (2 * lam - 1)
    ) / (4 * p * lam)
    return EstimateTriple(float(pi_a), float(pi_b), float(pi_ab), ModelId.PROPOSED)


def estimate_simple(observed: Observed, params: DesignParams) -> EstimateTriple:
    params.require_simple()
    t11, t10, t01, t00 = observed_proportions(observed)
    p, t = params.p, params.lam
    u, v = 2 * p - 1, 2 * t - 1
    pi_a = (t11 + t10 - t01 - t00 + u) / (2 * u)
    pi_b = (t11 - t10 + t01 - t00 + v) / (2 * v)
    pi_ab = (
        (p + t) * t11 + (t - p) * t10 + (p - t) * t01 + (2 - p - t) * t00 - t * (1 - p) - p * (1 - t)
    ) / (2 * u * v)
    return EstimateTriple(float(pi_a), float(pi_b), float(pi_ab), ModelId.SIMPLE)


def estimate_crossed(observed: Observed, params: DesignParams) -> EstimateTriple:
    """Crossed-model estimators applied to crossed-design proportions.

    No respondent mechanism for this design is implemented, so ``observed`` must
    come from outside the package (field counts or a user-supplied profile).
    """
    params.require_crossed()
    t11, t10, t01, t00 = observed_proportions(observed)
    p, t = params.p, params.lam
    s = p + t - 1
    k = p * t + (1 - p) * (1 - t)
    pi_a = 0.5 + ((t - p + 1) * (t11 - t00) + s * (t10 - t01)) / (2 * s)
    pi_b = 0.5 + ((t - p + 1) * (t11 - t00) + s * (t01 - t10)) / (2 * s)
    pi_ab = (p * t * t11 - (1 - p) * (1 - t) * t00) / (k * s)
    return EstimateTriple(float(pi_a), float(pi_b), float(pi_ab), ModelId.CROSSED)


def estimate(model: ModelId, observed: Observed, params: DesignParams) -> EstimateTriple:
    """Dispatch on ``model``. Mangat models fill only their own component; the rest are NaN."""
    model = ModelId(model)
    if model is ModelId.PROPOSED:
        return estimate_proposed(observed, params)
    if model is ModelId.SIMPLE:
        return estimate_simple(observed, params)
    if model is ModelId.CROSSED:
        return estimate_crossed(observed, params)
    if not isinstance(observed, CellCounts):
        raise TypeError("Mangat estimates need CellCounts")
    nan = float("nan")
    if model is ModelId.MANGAT_A:
        return EstimateTriple(estimate_mangat(observed.n11 + observed.n10, observed.n, params.p), nan, nan, model)
    return EstimateTriple(nan, estimate_mangat(observed.n11 + observed.n01, observed.n, params.lam), nan, model)
