"""
Closed-form variances, relative efficiencies and efficiency thresholds.

All variances are for a sample of ``n`` respondents drawn with replacement.
Relative efficiencies are ratios of a baseline design's variance to the
proposed design's variance, so values above one favour the proposed design.

Two evaluation modes are supported for relative efficiency:

``FORMULA``
    Every variance is the closed form for its estimator.
``PUBLISHED``
    The proposed design's A and B variances are replaced by the answer-level
    quantity ``alpha * (1 - alpha) / n`` (no division by ``p**2`` or
    ``lam**2``). This is the evaluation behind the widely reproduced
    relative-efficiency tables for P=0.6, lambda=0.7. The AB column is the same
    in both modes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from rrtwo.core import (
    DesignParams,
    InvalidParams,
    ModelId,
    PopulationTruth,
    admissibility_violation,
    mangat_alpha,
    validate_truth,
)

BOUNDARY_TOL = 1e-9
GRID_STEPS = tuple(round(0.1 * k, 1) for k in range(1, 10))
TABLE_PI_AB_LEVELS = (0.05, 0.1, 0.2)


class Mode(str, enum.Enum):
    PUBLISHED = "published"
    FORMULA = "formula"


@dataclass(frozen=True)
class VarianceTriple:
    var_a: float
    var_b: float
    var_ab: float
    model: ModelId
    n: int

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.var_a, self.var_b, self.var_ab)


@dataclass(frozen=True)
class EfficiencyRecord:
    pi_a: float
    pi_b: float
    pi_ab: float
    re_a: float
    re_b: float
    re_ab: float
    mode: Mode
    baseline: ModelId
    admissible: bool = True

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.re_a, self.re_b, self.re_ab)


@dataclass(frozen=True)
class ThresholdReport:
    threshold_a: float
    threshold_b: float
    threshold_ab: float
    satisfied_a: bool
    satisfied_b: bool
    satisfied_ab: bool
    boundary_a: bool = False
    boundary_b: bool = False
    boundary_ab: bool = False


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n!r}")


def var_mangat(p: float, n: int, *, pi: float | None = None, alpha: float | None = None,
               convention: str = "n") -> float:
    """Variance of the Mangat estimator.

    Supply either the true proportion ``pi`` (alpha is then computed from the
    protocol) or an observed yes-rate ``alpha``. ``convention="n-1"`` uses the
    ``n - 1`` denominator appropriate for a plug-in estimate.
    """
    if p <= 0 or p > 1:
        raise InvalidParams(f"p must lie in (0, 1], got {p!r}")
    if (pi is None) == (alpha is None):
        raise InvalidParams("give exactly one of pi or alpha")
    if alpha is None:
        alpha = mangat_alpha(p, pi)
    if convention == "n":
        _check_n(n)
        d = n
    elif convention == "n-1":
        if n < 2:
            raise InvalidParams("n must be >= 2 under the n-1 convention")
        d = n - 1
    else:
        raise InvalidParams(f"unknown convention {convention!r}")
    return alpha * (1 - alpha) / (d * p * p)


# Raw evaluators take plain floats and skip admissibility checks so that
# table reproduction can evaluate the formulas at any grid point.

def _proposed_raw(p, lam, a, b, ab):
    va = (a * ((2 * p - 1) - p * a) + (1 - p)) / p
    vb = (b * ((2 * lam - 1) - lam * b) + (1 - lam)) / lam
    vab = (
        ab * ((2 * p - 1) * (2 * lam - 1) - p * lam * ab)
        + (2 * p - 1) * (1 - lam) * a
        + (1 - p) * (2 * lam - 1) * b
        + (1 - p) * (1 - lam)
    ) / (p * lam)
    return va, vb, vab


def _simple_raw(p, t, a, b, ab):
    u2, v2 = (2 * p - 1) ** 2, (2 * t - 1) ** 2
    va = a * (1 - a) + p * (1 - p) / u2
    vb = b * (1 - b) + t * (1 - t) / v2
    vab = ab * (1 - ab) + (
        u2 * t * (1 - t) * a + p * (1 - p) * v2 * b + p * t * (1 - p) * (1 - t)
    ) / (u2 * v2)
    return va, vb, vab


def _crossed_raw(p, t, a, b, ab):
    k = p * t + (1 - p) * (1 - t)
    s2 = (p + t - 1) ** 2
    rest = 1 - a - b + 2 * ab
    va = a * (1 - a) + (1 - p) * t * k * rest / s2
    vb = b * (1 - b) + (1 - t) * p * k * rest / s2
    vab = ab * (1 - ab) + (
        ab * (p * p * t * t + (1 - p) ** 2 * (1 - t) ** 2 - k * s2)
        + p * t * (1 - p) * (1 - t) * (1 - a - b)
    ) / (k * s2)
    return va, vb, vab


def var_proposed(params: DesignParams, truth: PopulationTruth, n: int) -> VarianceTriple:
    _check_n(n)
    v = _proposed_raw(params.p, params.lam, *truth.as_tuple())
    return VarianceTriple(*(x / n for x in v), ModelId.PROPOSED, n)


def var_simple(params: DesignParams, truth: PopulationTruth, n: int) -> VarianceTriple:
    """Simple-model variances, evaluated at general (p, T) rather than only p == T."""
    params.require_simple()
    _check_n(n)
    v = _simple_raw(params.p, params.lam, *truth.as_tuple())
    return VarianceTriple(*(x / n for x in v), ModelId.SIMPLE, n)


def var_crossed(params: DesignParams, truth: PopulationTruth, n: int) -> VarianceTriple:
    params.require_crossed()
    _check_n(n)
    v = _crossed_raw(params.p, params.lam, *truth.as_tuple())
    return VarianceTriple(*(x / n for x in v), ModelId.CROSSED, n)


def variance(model: ModelId, params: DesignParams, truth: PopulationTruth, n: int) -> VarianceTriple:
    """Dispatch on ``model``; Mangat models fill only their own component."""
    model = ModelId(model)
    if model is ModelId.PROPOSED:
        return var_proposed(params, truth, n)
    if model is ModelId.SIMPLE:
        return var_simple(params, truth, n)
    if model is ModelId.CROSSED:
        return var_crossed(params, truth, n)
    nan = float("nan")
    if model is ModelId.MANGAT_A:
        return VarianceTriple(var_mangat(params.p, n, pi=truth.pi_a), nan, nan, model, n)
    return VarianceTriple(nan, var_mangat(params.lam, n, pi=truth.pi_b), nan, model, n)


def _baseline_raw(baseline: ModelId, params: DesignParams):
    baseline = ModelId(baseline)
    if baseline is ModelId.SIMPLE:
        params.require_simple()
        return _simple_raw
    if baseline is ModelId.CROSSED:
        params.require_crossed()
        return _crossed_raw
    raise InvalidParams(f"baseline must be simple or crossed, got {baseline.value!r}")


def _re_raw(params, a, b, ab, baseline, mode):
    base = _baseline_raw(baseline, params)
    p, lam = params.p, params.lam
    num = base(p, lam, a, b, ab)
    va, vb, vab = _proposed_raw(p, lam, a, b, ab)
    if Mode(mode) is Mode.PUBLISHED:
        alpha_a = a + (1 - a) * (1 - p)
        alpha_b = b + (1 - b) * (1 - lam)
        va, vb = alpha_a * (1 - alpha_a), alpha_b * (1 - alpha_b)
    return num[0] / va, num[1] / vb, num[2] / vab


def relative_efficiency(params: DesignParams, truth: PopulationTruth,
                        baseline: ModelId = ModelId.SIMPLE,
                        mode: Mode = Mode.FORMULA) -> EfficiencyRecord:
    """Baseline variance over proposed variance for each of A, B and AB.

    The sample size cancels, so no ``n`` is needed.
    """
    re = _re_raw(params, *truth.as_tuple(), baseline, mode)
    return EfficiencyRecord(*truth.as_tuple(), *re, Mode(mode), ModelId(baseline))


def _threshold_ab(p, lam, a, b):
    u, v = 2 * p - 1, 2 * lam - 1
    num = (
        u * u * (1 - lam) * a * (u * v * v - p * lam * lam)
        + (1 - p) * v * v * b * (u * u * v - p * p * lam)
    )
    den = u * u * v * v * (p * lam - u * v)
    return num / den


def thresholds(params: DesignParams, truth: PopulationTruth) -> ThresholdReport:
    """Lower bounds on each proportion above which the proposed design beats the simple one.

    The AB bound depends on ``pi_a`` and ``pi_b``. Satisfaction is strict; a
    proportion within ``1e-9`` of its bound is flagged as a boundary case.
    """
    params.require_simple()
    p, lam = params.p, params.lam
    ta = (3 * p - 1) * (p - 1) / (2 * p - 1) ** 2
    tb = (3 * lam - 1) * (lam - 1) / (2 * lam - 1) ** 2
    den = p * lam - (2 * p - 1) * (2 * lam - 1)
    tab = _threshold_ab(p, lam, truth.pi_a, truth.pi_b) if den != 0 else float("nan")
    vals = ((truth.pi_a, ta), (truth.pi_b, tb), (truth.pi_ab, tab))
    sat = [bool(x > th) for x, th in vals]
    bnd = [bool(abs(x - th) <= BOUNDARY_TOL) for x, th in vals]
    return ThresholdReport(ta, tb, tab, *sat, *bnd)


def grid_pairs(steps=GRID_STEPS, max_sum: float = 0.99) -> list[tuple[float, float]]:
    """(pi_a, pi_b) pairs in row-major order with ``pi_a + pi_b < max_sum``."""
    return [(a, b) for a in steps for b in steps if a + b < max_sum]


def table_grid(params: DesignParams, pi_ab_levels=TABLE_PI_AB_LEVELS,
               mode: Mode = Mode.PUBLISHED, baseline: ModelId = ModelId.SIMPLE,
               rows: str = "published") -> list[EfficiencyRecord]:
    """Relative efficiencies over the 0.1-step (pi_a, pi_b) grid, one block per level.

    ``rows`` selects which grid points are emitted for each ``pi_ab`` level:

    ``"published"``
        Simple baseline: every pair with ``pi_a + pi_b < 0.99`` at every level,
        including combinations that are not valid joint distributions (the
        AB formulas are still evaluated; ``admissible`` is False there).
        Crossed baseline: pairs with ``pi_ab <= min(pi_a, pi_b)`` and
        ``pi_a + pi_b + pi_ab <= 1``.
    ``"admissible"``
        Pairs with ``pi_a + pi_b < 0.99`` whose truth is a valid joint distribution.
    """
    baseline = ModelId(baseline)
    _baseline_raw(baseline, params)
    if rows not in ("published", "admissible"):
        raise InvalidParams(f"rows must be 'published' or 'admissible', got {rows!r}")
    out = []
    for ab in pi_ab_levels:
        ab = float(ab)
        if not 0.0 <= ab <= 1.0:
            raise InvalidParams(f"pi_ab level must lie in [0, 1], got {ab!r}")
        for a, b in grid_pairs():
            admissible = admissibility_violation(a, b, ab) is None
            if rows == "admissible":
                keep = admissible
            elif baseline is ModelId.CROSSED:
                keep = ab <= min(a, b) + BOUNDARY_TOL and a + b + ab <= 1 + BOUNDARY_TOL
            else:
                keep = True
            if keep:
                re = _re_raw(params, a, b, ab, baseline, mode)
                out.append(EfficiencyRecord(a, b, ab, *re, Mode(mode), baseline, admissible))
    return out


@dataclass(frozen=True)
class CurvePoint:
    x: float
    v_sm: float
    v_cm: float
    v_ea: float


_COMPONENT = {"pi_a": 0, "pi_b": 1, "pi_ab": 2}


def variance_curves(params: DesignParams, sweep: str, values, fixed: PopulationTruth,
                    n: int = 1, target: str | None = None) -> list[CurvePoint]:
    """Variance of one estimator under the simple, crossed and proposed designs
    as one truth coordinate is swept.

    ``sweep`` names the swept coordinate (``pi_a``, ``pi_b`` or ``pi_ab``); the
    other two come from ``fixed``. ``target`` picks the estimator whose variance
    is reported and defaults to the swept coordinate.
    """
    if sweep not in _COMPONENT:
        raise InvalidParams(f"sweep must be one of {sorted(_COMPONENT)}, got {sweep!r}")
    target = sweep if target is None else target
    if target not in _COMPONENT:
        raise InvalidParams(f"target must be one of {sorted(_COMPONENT)}, got {target!r}")
    k = _COMPONENT[target]
    out = []
    for x in values:
        coords = list(fixed.as_tuple())
        coords[_COMPONENT[sweep]] = float(x)
        truth = validate_truth(*coords)
        out.append(CurvePoint(
            float(x),
            var_simple(params, truth, n).as_tuple()[k],
            var_crossed(params, truth, n).as_tuple()[k],
            var_proposed(params, truth, n).as_tuple()[k],
        ))
    return out


def threshold_agreement(params: DesignParams, component: str, values,
                        other: tuple[float, float] = (0.0, 0.0)) -> dict:
    """Compare the sign of (simple variance - proposed variance) with the threshold test.

    For ``component`` ``"a"`` or ``"b"`` the swept value is that proportion. For
    ``"ab"`` the swept value is ``pi_ab`` and ``other`` gives ``(pi_a, pi_b)``.
    Points within ``1e-9`` of the threshold are skipped. Returns counts and the
    list of disagreeing points.
    """
    params.require_simple()
    p, lam = params.p, params.lam
    agree, skipped, mismatches = 0, 0, []
    for x in values:
        x = float(x)
        if component == "a":
            vs, ve = _simple_raw(p, lam, x, 0.0, 0.0)[0], _proposed_raw(p, lam, x, 0.0, 0.0)[0]
            th = (3 * p - 1) * (p - 1) / (2 * p - 1) ** 2
        elif component == "b":
            vs, ve = _simple_raw(p, lam, 0.0, x, 0.0)[1], _proposed_raw(p, lam, 0.0, x, 0.0)[1]
            th = (3 * lam - 1) * (lam - 1) / (2 * lam - 1) ** 2
        elif component == "ab":
            a, b = other
            vs, ve = _simple_raw(p, lam, a, b, x)[2], _proposed_raw(p, lam, a, b, x)[2]
            th = _threshold_ab(p, lam, a, b)
        else:
            raise InvalidParams(f"component must be 'a', 'b' or 'ab', got {component!r}")
        if abs(x - th) <= BOUNDARY_TOL:
            skipped += 1
            continue
        if (vs - ve > 0) == (x > th):
            agree += 1
        else:
            mismatches.append((x, th, vs - ve))
    return {"agree": agree, "skipped": skipped, "mismatches": mismatches}


def relative_efficiency_table(records) -> np.ndarray:
    """Stack records into an array with columns pi_a, pi_b, pi_ab, re_a, re_b, re_ab."""
    return np.array([[r.pi_a, r.pi_b, r.pi_ab, r.re_a, r.re_b, r.re_ab] for r in records],
                    dtype=np.float64).reshape(-1, 6)

