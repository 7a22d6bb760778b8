"""
Domain types and exact forward maps for two-attribute randomized response designs.

A respondent belongs to one of four truth cells (AB, A not B, B not A, neither)
and returns an answer pair (answer to A, answer to B). The forward maps send a
population truth ``(pi_a, pi_b, pi_ab)`` to the probabilities of the four answer
pairs, ordered ``(yes/yes, yes/no, no/yes, no/no)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ATOL = 1e-12


class RRTError(ValueError):
    """Base class for all errors raised by this package."""


class AdmissibilityError(RRTError):
    """Population proportions do not define a valid joint distribution."""


class InvalidParams(RRTError):
    """Device probabilities or counts are outside their domain."""


class DegenerateDesign(RRTError):
    """The requested design's estimator is undefined at these device probabilities."""


class UnsimulableModel(RRTError):
    """The model has no respondent-level mechanism to simulate."""


class ModelId(str, enum.Enum):
    MANGAT_A = "mangat-a"
    MANGAT_B = "mangat-b"
    SIMPLE = "simple"
    CROSSED = "crossed"
    PROPOSED = "proposed"

    @property
    def simulable(self) -> bool:
        return self is not ModelId.CROSSED


@dataclass(frozen=True)
class DesignParams:
    """Device probabilities.

    ``p`` is the chance that deck I states "I belong to A"; ``lam`` is the same
    for deck II and attribute B. The simple and crossed models call the second
    probability ``T``; it is exposed as :attr:`t`.
    """

    p: float
    lam: float

    def __post_init__(self):
        for name, v in (("p", self.p), ("lam", self.lam)):
            if not np.isfinite(v) or not 0.0 < v <= 1.0:
                raise InvalidParams(f"{name} must lie in (0, 1], got {v!r}")

    @property
    def t(self) -> float:
        return self.lam

    def require_simple(self) -> None:
        if self.p == 0.5 or self.lam == 0.5:
            raise DegenerateDesign(
                f"simple model requires p != 0.5 and lambda != 0.5 (p={self.p}, lambda={self.lam})"
            )

    def require_crossed(self) -> None:
        if abs(self.p + self.lam - 1.0) < ATOL:
            raise DegenerateDesign(
                f"crossed model requires p + lambda != 1 (p={self.p}, lambda={self.lam})"
            )


def admissibility_violation(pi_a: float, pi_b: float, pi_ab: float, tol: float = ATOL) -> str | None:
    """Return a description of the first violated constraint, or None."""
    for name, v in (("pi_a", pi_a), ("pi_b", pi_b), ("pi_ab", pi_ab)):
        if not np.isfinite(v) or v < -tol or v > 1 + tol:
            return f"{name}={v!r} is outside [0, 1]"
    if pi_ab > pi_a + tol:
        return f"pi_ab > pi_a ({pi_ab} > {pi_a})"
    if pi_ab > pi_b + tol:
        return f"pi_ab > pi_b ({pi_ab} > {pi_b})"
    rest = 1.0 - pi_a - pi_b + pi_ab
    if rest < -tol:
        return f"negative fourth cell 1 - pi_a - pi_b + pi_ab = {rest:.6g}"
    return None


@dataclass(frozen=True)
class PopulationTruth:
    pi_a: float
    pi_b: float
    pi_ab: float

    def __post_init__(self):
        msg = admissibility_violation(self.pi_a, self.pi_b, self.pi_ab)
        if msg is not None:
            raise AdmissibilityError(msg)

    @property
    def cells(self) -> tuple[float, float, float, float]:
        """Joint probabilities of (AB, A only, B only, neither)."""
        a, b, ab = self.pi_a, self.pi_b, self.pi_ab
        return (ab, a - ab, b - ab, 1.0 - a - b + ab)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pi_a, self.pi_b, self.pi_ab)


def validate_truth(pi_a: float, pi_b: float, pi_ab: float) -> PopulationTruth:
    """Build a :class:`PopulationTruth`, raising :class:`AdmissibilityError` on bad input.

    Non-strict inequalities are used, so ``pi_ab == min(pi_a, pi_b)`` is allowed.
    """
    return PopulationTruth(float(pi_a), float(pi_b), float(pi_ab))


@dataclass(frozen=True)
class ResponseProfile:
    """Probabilities of the answer pairs (yes/yes, yes/no, no/yes, no/no)."""

    t11: float
    t10: float
    t01: float
    t00: float

    def __post_init__(self):
        vals = self.as_array()
        if np.any(~np.isfinite(vals)) or np.any(vals < -ATOL) or np.any(vals > 1 + ATOL):
            raise InvalidParams(f"profile entries must lie in [0, 1], got {tuple(vals)}")
        if abs(vals.sum() - 1.0) > ATOL:
            raise InvalidParams(f"profile must sum to 1, got {vals.sum()!r}")

    @classmethod
    def from_array(cls, theta) -> "ResponseProfile":
        t = [float(x) for x in theta]
        if len(t) != 4:
            raise InvalidParams(f"profile needs four entries, got {len(t)}")
        return cls(*t)

    def as_array(self) -> np.ndarray:
        return np.array([self.t11, self.t10, self.t01, self.t00], dtype=np.float64)


@dataclass(frozen=True)
class CellCounts:
    n11: int
    n10: int
    n01: int
    n00: int

    def __post_init__(self):
        for name in ("n11", "n10", "n01", "n00"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise InvalidParams(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00

    @classmethod
    def from_array(cls, counts) -> "CellCounts":
        c = list(counts)
        if len(c) != 4:
            raise InvalidParams(f"counts need four entries, got {len(c)}")
        return cls(*c)

    def as_array(self) -> np.ndarray:
        return np.array([self.n11, self.n10, self.n01, self.n00], dtype=np.int64)

    def proportions(self) -> np.ndarray:
        if self.n < 1:
            raise InvalidParams("at least one respondent is required (n >= 1)")
        return self.as_array() / self.n


def mangat_alpha(p: float, pi: float) -> float:
    """Probability of a "yes" under the Mangat single-attribute protocol.

    Members answer yes directly; non-members answer a Warner deck that states
    membership with probability ``p``, so they say yes with probability ``1 - p``.
    """
    if not 0.0 < p <= 1.0:
        raise InvalidParams(f"p must lie in (0, 1], got {p!r}")
    if not 0.0 <= pi <= 1.0:
        raise InvalidParams(f"pi must lie in [0, 1], got {pi!r}")
    return pi + (1.0 - pi) * (1.0 - p)


def forward_proposed(params: DesignParams, truth: PopulationTruth) -> ResponseProfile:
    p, lam = params.p, params.lam
    a1 = p * lam
    a2 = p * (1 - lam)
    a3 = (1 - p) * lam
    a4 = (1 - p) * (1 - lam)
    a, b, ab = truth.as_tuple()
    t11 = a1 * ab + a2 * a + a3 * b + a4
    t10 = -a1 * ab + a1 * a - a3 * b + a3
    t01 = -a1 * ab - a2 * a + a1 * b + a2
    t00 = a1 * ab - a1 * a - a1 * b + a1
    return _profile(t11, t10, t01, t00)


def forward_simple(params: DesignParams, truth: PopulationTruth) -> ResponseProfile:
    """Answer-pair probabilities when both questions go through independent Warner decks.

    The ``yes/no``, ``no/yes`` and ``no/no`` rows use the signs that make the four
    probabilities sum to one; only the ``yes/yes`` row matches the usual printed form.
    """
    p, t = params.p, params.lam
    a, b, ab = truth.as_tuple()
    u, v = 2 * p - 1, 2 * t - 1
    t11 = u * v * ab + u * (1 - t) * a + (1 - p) * v * b + (1 - p) * (1 - t)
    t10 = -u * v * ab + u * t * a - (1 - p) * v * b + (1 - p) * t
    t01 = -u * v * ab - u * (1 - t) * a + p * v * b + p * (1 - t)
    t00 = u * v * ab - u * t * a - p * v * b + p * t
    return _profile(t11, t10, t01, t00)


def _profile(*theta: float) -> ResponseProfile:
    # clip rounding residue at the boundary so the profile validates
    t = [0.0 if abs(x) < ATOL else x for x in theta]
    return ResponseProfile(*t)


def forward(model: ModelId, params: DesignParams, truth: PopulationTruth) -> ResponseProfile:
    """Answer-pair probabilities for any simulable model.

    Mangat models ask a single question; the unasked attribute is tallied as "no",
    so MANGAT_A puts its yes-rate in ``t10`` and MANGAT_B in ``t01``.
    """
    model = ModelId(model)
    if model is ModelId.PROPOSED:
        return forward_proposed(params, truth)
    if model is ModelId.SIMPLE:
        return forward_simple(params, truth)
    if model is ModelId.MANGAT_A:
        alpha = mangat_alpha(params.p, truth.pi_a)
        return _profile(0.0, alpha, 0.0, 1.0 - alpha)
    if model is ModelId.MANGAT_B:
        alpha = mangat_alpha(params.lam, truth.pi_b)
        return _profile(0.0, 0.0, alpha, 1.0 - alpha)
    raise UnsimulableModel("crossed model: respondent-level mechanism not specified, cannot simulate")
