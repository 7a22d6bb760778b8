"""Estimation of two related sensitive proportions under randomized response designs."""

from rrtwo.analysis import (
    EfficiencyRecord,
    Mode,
    ThresholdReport,
    VarianceTriple,
    relative_efficiency,
    table_grid,
    thresholds,
    var_crossed,
    var_mangat,
    var_proposed,
    var_simple,
    variance_curves,
)
from rrtwo.core import (
    AdmissibilityError,
    CellCounts,
    DegenerateDesign,
    DesignParams,
    InvalidParams,
    ModelId,
    PopulationTruth,
    ResponseProfile,
    RRTError,
    UnsimulableModel,
    forward,
    forward_proposed,
    forward_simple,
    mangat_alpha,
    validate_truth,
)
from rrtwo.estimators import (
    EstimateTriple,
    estimate,
    estimate_crossed,
    estimate_mangat,
    estimate_proposed,
    estimate_simple,
)
from rrtwo.montecarlo import (
    SimulationConfig,
    SimulationSummary,
    run_experiment,
    run_replication,
    simulate_respondent,
    validate_moment_lemma,
)

__version__ = "0.1.0"
