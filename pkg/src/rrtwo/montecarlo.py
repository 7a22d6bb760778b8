"""
Seeded respondent-level simulation of the Mangat, simple and proposed designs.

Random streams
--------------
Replication ``i`` of an experiment with seed ``s`` draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))``. Each replication is therefore
reproducible on its own, and results do not depend on how replications are
distributed across workers. Replications are processed in fixed-size blocks;
block moments are merged in block order, so summaries are bit-identical for
any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from rrtwo.analysis import VarianceTriple, variance
from rrtwo.core import (
    CellCounts,
    DesignParams,
    InvalidParams,
    ModelId,
    PopulationTruth,
    ResponseProfile,
    UnsimulableModel,
    forward,
)
from rrtwo.estimators import estimate

BLOCK_SIZE = 500
MAX_SEED = 2**64 - 1

# truth-cell indices
CELL_AB, CELL_A_ONLY, CELL_B_ONLY, CELL_NEITHER = 0, 1, 2, 3
_IN_A = np.array([True, True, False, False])
_IN_B = np.array([True, False, True, False])


def _require_simulable(model: ModelId) -> ModelId:
    model = ModelId(model)
    if not model.simulable:
        raise UnsimulableModel("crossed model: respondent-level mechanism not specified, cannot simulate")
    return model


def replication_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _mangat_answer(member, u, p):
    # non-members draw "I do not belong" with probability 1 - p and answer yes
    return member | (u < 1.0 - p)


def _warner_answer(member, u, p):
    return (u < p) == member


def simulate_responses(model: ModelId, params: DesignParams, cells: np.ndarray,
                       rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised answer pairs for respondents in truth cells ``cells`` (0..3).

    Two uniforms are drawn per respondent (deck I, then deck II) whatever the
    model, so the stream layout is the same across designs.
    """
    model = _require_simulable(model)
    cells = np.asarray(cells, dtype=np.intp)
    in_a, in_b = _IN_A[cells], _IN_B[cells]
    u = rng.random((2, cells.shape[0]))
    p, lam = params.p, params.lam
    no = np.zeros(cells.shape[0], dtype=bool)
    if model is ModelId.PROPOSED:
        return _mangat_answer(in_a, u[0], p), _mangat_answer(in_b, u[1], lam)
    if model is ModelId.SIMPLE:
        return _warner_answer(in_a, u[0], p), _warner_answer(in_b, u[1], lam)
    if model is ModelId.MANGAT_A:
        return _mangat_answer(in_a, u[0], p), no
    return no, _mangat_answer(in_b, u[1], lam)


def simulate_respondent(model: ModelId, params: DesignParams, cell: int,
                        rng: np.random.Generator) -> tuple[bool, bool]:
    """Answer pair (answer to A, answer to B) of one respondent; True means yes."""
    if cell not in (CELL_AB, CELL_A_ONLY, CELL_B_ONLY, CELL_NEITHER):
        raise InvalidParams(f"cell must be 0..3, got {cell!r}")
    a, b = simulate_responses(model, params, np.array([cell]), rng)
    return bool(a[0]), bool(b[0])


def tally(ans_a: np.ndarray, ans_b: np.ndarray) -> CellCounts:
    idx = 2 * (~ans_a).astype(np.intp) + (~ans_b).astype(np.intp)
    return CellCounts.from_array(np.bincount(idx, minlength=4).tolist())


@dataclass(frozen=True)
class SimulationConfig:
    model: ModelId
    params: DesignParams
    truth: PopulationTruth
    n: int
    replications: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "model", _require_simulable(self.model))
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParams(f"n must be a positive integer, got {self.n!r}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise InvalidParams(f"replications must be a positive integer, got {self.replications!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= MAX_SEED:
            raise InvalidParams(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


def run_replication(config: SimulationConfig, replication_index: int) -> CellCounts:
    """Sample ``n`` respondents with replacement, run the protocol, and tally answers."""
    rng = replication_rng(config.seed, replication_index)
    probs = np.clip(np.array(config.truth.cells), 0.0, None)
    cells = rng.choice(4, size=config.n, p=probs / probs.sum())
    return tally(*simulate_responses(config.model, config.params, cells, rng))


class RunningMoments:
    """Per-component count, mean and sum of squared deviations.

    ``push`` is Welford's update; ``update`` folds in a whole batch; ``merge``
    combines two accumulators (Chan et al.), which is what makes the block
    layout independent of worker count.
    """

    def __init__(self, dim: int):
        self.count = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros(dim)

    def push(self, x) -> None:
        x = np.asarray(x, dtype=np.float64)
        self.count += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self.m2 = self.m2 + delta * (x - self.mean)

    def update(self, batch) -> None:
        batch = np.asarray(batch, dtype=np.float64)
        if batch.shape[0] == 0:
            return
        other = RunningMoments(batch.shape[1])
        other.count = batch.shape[0]
        other.mean = batch.mean(axis=0)
        other.m2 = ((batch - other.mean) ** 2).sum(axis=0)
        self.merge(other)

    def merge(self, other: "RunningMoments") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean.copy(), other.m2.copy()
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean = self.mean + delta * (other.count / total)
        self.m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / total)
        self.count = total

    def variance(self) -> np.ndarray:
        """Sample variance (R - 1 denominator); zeros when fewer than two values."""
        if self.count < 2:
            return np.zeros_like(self.mean)
        return self.m2 / (self.count - 1)


@dataclass(frozen=True)
class SimulationSummary:
    config: SimulationConfig
    mean_estimates: tuple[float, float, float]
    empirical_variance: tuple[float, float, float]
    empirical_theta: tuple[float, float, float, float]
    standard_error_of_mean: tuple[float, float, float]
    theoretical_profile: ResponseProfile
    theoretical_variance: VarianceTriple

    def theoretical_standard_error(self) -> tuple[float, float, float]:
        r = self.config.replications
        return tuple(math.sqrt(v / r) for v in self.theoretical_variance.as_tuple())

    def variance_ratio(self) -> tuple[float, float, float]:
        return tuple(e / t if t else float("nan") for e, t in zip(self.empirical_variance, self.theoretical_variance.as_tuple()))

    def bias_z(self) -> tuple[float, float, float]:
        """(mean estimate - truth) in units of the theoretical standard error."""
        out = []
        for m, t, se in zip(self.mean_estimates, self.config.truth.as_tuple(), self.theoretical_standard_error()):
            if se > 0 or math.isnan(m):
                out.append((m - t) / se if se > 0 else float("nan"))
            else:
                out.append(0.0 if abs(m - t) < 1e-12 else math.copysign(math.inf, m - t))
        return tuple(out)


def _run_block(config: SimulationConfig, start: int, stop: int) -> RunningMoments:
    rows = np.empty((stop - start, 7))
    for j, i in enumerate(range(start, stop)):
        counts = run_replication(config, i)
        rows[j, :3] = estimate(config.model, counts, config.params).as_tuple()
        rows[j, 3:] = counts.proportions()
    acc = RunningMoments(7)
    acc.update(rows)
    return acc


def run_experiment(config: SimulationConfig, workers: int = 1,
                   block_size: int = BLOCK_SIZE) -> SimulationSummary:
    """Run all replications, estimate each, and summarise against the closed forms.

    ``workers`` only changes wall time; the result is identical for any value.
    Components an estimator does not produce (the other attribute under a Mangat
    model) come out as NaN.
    """
    if workers < 1:
        raise InvalidParams(f"workers must be >= 1, got {workers!r}")
    R = config.replications
    bounds = [(s, min(s + block_size, R)) for s in range(0, R, block_size)]
    if workers == 1:
        blocks = [_run_block(config, s, e) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda b: _run_block(config, *b), bounds))
    acc = RunningMoments(7)
    for b in blocks:
        acc.merge(b)
    var = acc.variance()
    return SimulationSummary(
        config=config,
        mean_estimates=tuple(float(x) for x in acc.mean[:3]),
        empirical_variance=tuple(float(x) for x in var[:3]),
        empirical_theta=tuple(float(x) for x in acc.mean[3:]),
        standard_error_of_mean=tuple(float(math.sqrt(v / R)) for v in var[:3]),
        theoretical_profile=forward(config.model, config.params, config.truth),
        theoretical_variance=variance(config.model, config.params, config.truth, config.n),
    )


@dataclass(frozen=True)
class MomentCheck:
    pair: tuple[str, str]
    empirical: float
    target: float
    standard_error: float

    @property
    def within(self) -> bool:
        return abs(abs(self.empirical) - abs(self.target)) <= 4.0 * self.standard_error + 1e-12


@dataclass(frozen=True)
class MomentLemmaReport:
    """Indicator variances and covariances of multinomial draws.

    ``target`` for a covariance is the positive product ``theta_i * theta_j / n``;
    ``empirical`` keeps its sign, which is negative for a multinomial.
    Agreement is judged on magnitudes.
    """

    checks: tuple[MomentCheck, ...]
    n: int
    replications: int

    @property
    def ok(self) -> bool:
        return all(c.within for c in self.checks)

    @property
    def covariance_signs(self) -> tuple[float, ...]:
        return tuple(float(np.sign(c.empirical)) for c in self.checks if c.pair[0] != c.pair[1])


_LABELS = ("x11", "x10", "x01", "x00")


def validate_moment_lemma(profile: ResponseProfile, n: int = 1, replications: int = 10**6,
                          seed: int = 0) -> MomentLemmaReport:
    """Check V(x_ij) = theta_ij (1 - theta_ij) / n and |C(x_ij, x_kl)| = theta_ij theta_kl / n.

    ``x_ij`` is the proportion of a size-``n`` multinomial draw falling in
    answer pair ``ij``; with ``n = 1`` it is the per-respondent indicator.
    Standard errors are the sample standard deviation of the centred products
    divided by ``sqrt(replications)``.
    """
    if n < 1 or replications < 2:
        raise InvalidParams("need n >= 1 and replications >= 2")
    theta = profile.as_array()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    x = rng.multinomial(n, theta / theta.sum(), size=replications) / n
    c = x - x.mean(axis=0)
    checks = []
    for i in range(4):
        for j in range(i, 4):
            prod = c[:, i] * c[:, j]
            emp = prod.sum() / (replications - 1)
            target = theta[i] * (1 - theta[i]) / n if i == j else theta[i] * theta[j] / n
            se = prod.std(ddof=1) / math.sqrt(replications)
            checks.append(MomentCheck((_LABELS[i], _LABELS[j]), float(emp), float(target), float(se)))
    return MomentLemmaReport(tuple(checks), n, replications)
