"""
Checking the closed forms by simulation
=======================================

Simulate respondents one by one, estimate from each replication, and compare
the spread of the estimates with the variance formulas.
"""

from rrtwo import DesignParams, ModelId, ResponseProfile, SimulationConfig, run_experiment, validate_moment_lemma, validate_truth

params = DesignParams(0.6, 0.7)
truth = validate_truth(0.3, 0.2, 0.1)

for model in (ModelId.PROPOSED, ModelId.SIMPLE, ModelId.MANGAT_A):
    cfg = SimulationConfig(model, params, truth, n=1000, replications=5000, seed=42)
    s = run_experiment(cfg, workers=2)
    print(model.value)
    print("  mean estimates      ", s.mean_estimates)
    print("  bias / theoretical SE", s.bias_z())
    print("  empirical / formula variance", s.variance_ratio())

###############################################################################
# Answer-pair indicators of one respondent are multinomial: variances
# theta(1 - theta), covariances of magnitude theta_i * theta_j (negative sign).

rep = validate_moment_lemma(ResponseProfile(0.272, 0.308, 0.168, 0.252), n=1, replications=200_000, seed=1)
for c in rep.checks:
    print(c.pair, f"{c.empirical:+.5f}", f"{c.target:.5f}", "ok" if c.within else "off")
