"""Exit criteria. Each test prints one PASS/FAIL line (visible even without ``-s``)."""

import time
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np
import pytest

from rrtwo.analysis import Mode, table_grid, thresholds, var_proposed, var_simple
from rrtwo.cli import main
from rrtwo.core import DesignParams, ModelId, ResponseProfile, forward_proposed, forward_simple, validate_truth
from rrtwo.estimators import estimate_proposed, estimate_simple
from rrtwo.montecarlo import SimulationConfig, run_experiment, validate_moment_lemma

GOLDEN = Path(__file__).parent / "golden"
PR = DesignParams(0.6, 0.7)


@pytest.fixture
def report(capsys):
    def _report(num, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance {num}] {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return _report


def load_golden(name):
    lines = (GOLDEN / name).read_text().splitlines()
    assert lines[0] == "pi_a,pi_b,re_a,re_b,re_ab"
    return [line.split(",") for line in lines[1:]]


def half_up(x, digits):
    return str(Decimal(repr(x)).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP))


def compare(records, printed, tol, digits):
    worst, mismatches = 0.0, []
    assert len(records) == len(printed)
    for rec, row in zip(records, printed):
        assert (f"{rec.pi_a:.1f}", f"{rec.pi_b:.1f}") == (row[0], row[1])
        for got, want in zip(rec.as_tuple(), row[2:]):
            worst = max(worst, abs(got - float(want)))
            if abs(got - float(want)) > tol + 1e-12 or half_up(got, digits) != want:
                mismatches.append((rec.pi_a, rec.pi_b, rec.pi_ab, got, want))
    return worst, mismatches


def test_1_table1_reproduction(report):
    t0 = time.perf_counter()
    worst, bad, rows = 0.0, [], 0
    for level in ("0.05", "0.1", "0.2"):
        recs = table_grid(PR, [float(level)], Mode.PUBLISHED, ModelId.SIMPLE)
        printed = load_golden(f"simple_published_pab{level}.csv")
        w, m = compare(recs, printed, 0.005, 2)
        worst, bad, rows = max(worst, w), bad + m, len(printed)
    elapsed = time.perf_counter() - t0
    report(1, "Table 1 (simple baseline, published mode)", not bad and elapsed < 1.0,
           f"{rows} rows x 5 columns, max |diff| {worst:.4f}, {len(bad)} mismatches, {elapsed:.3f}s")


def test_2_tables_2_3_reproduction(report):
    t0 = time.perf_counter()
    worst, bad, total = 0.0, [], 0
    for level in ("0.05", "0.1", "0.2"):
        recs = table_grid(PR, [float(level)], Mode.PUBLISHED, ModelId.CROSSED)
        printed = load_golden(f"crossed_published_pab{level}.csv")
        w, m = compare(recs, printed, 0.05, 1)
        worst, bad, total = max(worst, w), bad + m, total + len(printed)
    elapsed = time.perf_counter() - t0
    report(2, "Tables 2-3 (crossed baseline, published mode)", not bad and elapsed < 1.0,
           f"{total} rows, max |diff| {worst:.4f}, {len(bad)} mismatches, {elapsed:.3f}s")


def test_3_published_formula_gap(report):
    # independent evaluation of the Mangat yes-rate and the two A/B variance forms
    def alpha(p, pi):
        return pi + (1 - pi) * (1 - p)

    worst = 0.0
    for baseline in (ModelId.SIMPLE, ModelId.CROSSED):
        pub = table_grid(PR, (0.05, 0.1, 0.2), Mode.PUBLISHED, baseline)
        form = table_grid(PR, (0.05, 0.1, 0.2), Mode.FORMULA, baseline)
        for rp, rf in zip(pub, form):
            worst = max(worst, abs(rp.re_a - rf.re_a / PR.p**2) / rp.re_a,
                        abs(rp.re_b - rf.re_b / PR.lam**2) / rp.re_b)
            if baseline is ModelId.SIMPLE:
                al = alpha(PR.p, rp.pi_a)
                v_sm = rp.pi_a * (1 - rp.pi_a) + PR.p * (1 - PR.p) / (2 * PR.p - 1) ** 2
                v_ea = (rp.pi_a * ((2 * PR.p - 1) - PR.p * rp.pi_a) + (1 - PR.p)) / PR.p
                worst = max(worst, abs(v_ea * PR.p**2 - al * (1 - al)) / (al * (1 - al)),
                            abs(rf.re_a - v_sm / v_ea) / rf.re_a)
    first = table_grid(PR, [0.05], Mode.FORMULA, ModelId.SIMPLE)[0]
    ok = worst < 1e-9 and round(first.re_a / 0.36, 2) == 24.52
    report(3, "published RE_A,B = formula RE_A,B / P^2, / lambda^2", ok, f"max rel err {worst:.2e}")


def test_4_composition_identity(report):
    rng = np.random.default_rng(20240601)
    worst, done = 0.0, 0
    while done < 1000:
        p, lam = rng.uniform(0.1, 0.9, size=2)
        if abs(p - 0.5) < 1e-6 or abs(lam - 0.5) < 1e-6:
            continue
        a, b = rng.uniform(0, 1, size=2)
        lo, hi = max(0.0, a + b - 1), min(a, b)
        truth = validate_truth(a, b, rng.uniform(lo, hi))
        pr = DesignParams(p, lam)
        for fwd, est in ((forward_proposed, estimate_proposed), (forward_simple, estimate_simple)):
            got = est(fwd(pr, truth), pr).as_tuple()
            worst = max(worst, max(abs(g - t) for g, t in zip(got, truth.as_tuple())))
        done += 1
    report(4, "estimator(forward(truth)) == truth, proposed and simple", worst < 1e-10,
           f"1000 draws, max abs err {worst:.2e}")


@pytest.mark.parametrize("model", [ModelId.PROPOSED, ModelId.SIMPLE])
def test_5_monte_carlo(report, model):
    cfg = SimulationConfig(model, PR, validate_truth(0.3, 0.2, 0.1), n=1000, replications=20000, seed=42)
    t0 = time.perf_counter()
    s = run_experiment(cfg, workers=1)
    elapsed = time.perf_counter() - t0
    z = s.bias_z()
    ratio = s.variance_ratio()
    ok = all(abs(x) < 3 for x in z) and all(abs(r - 1) < 0.05 for r in ratio) and elapsed < 30
    detail = ("bias z " + ", ".join(f"{x:+.2f}" for x in z) + "; var ratio "
              + ", ".join(f"{r:.4f}" for r in ratio) + f"; {elapsed:.1f}s")
    report(5, f"Monte Carlo unbiasedness and variance, {model.value}", ok, detail)


def test_6_threshold_sign_equivalence(report):
    grid = np.arange(1, 100) / 100
    checked, bad = 0, []
    for p in (0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9):
        for comp in ("a", "b"):
            pr = DesignParams(p, 0.7) if comp == "a" else DesignParams(0.6, p)
            for x in grid:
                truth = validate_truth(x, 0.0, 0.0) if comp == "a" else validate_truth(0.0, x, 0.0)
                rep = thresholds(pr, truth)
                th = rep.threshold_a if comp == "a" else rep.threshold_b
                if abs(x - th) <= 1e-9:
                    continue
                k = 0 if comp == "a" else 1
                diff = var_simple(pr, truth, 1).as_tuple()[k] - var_proposed(pr, truth, 1).as_tuple()[k]
                sat = rep.satisfied_a if comp == "a" else rep.satisfied_b
                checked += 1
                if (diff > 0) != sat:
                    bad.append((comp, p, x))
    report(6, "variance sign matches efficiency threshold for A and B", not bad,
           f"{checked} points, {len(bad)} disagreements")


def test_7_moment_lemma(report):
    theta = (0.272, 0.308, 0.168, 0.252)
    rep = validate_moment_lemma(ResponseProfile(*theta), n=1, replications=10**6, seed=7)
    # brute-force expectation over the four outcomes for one draw
    outcomes = np.eye(4)
    mean = (np.array(theta)[:, None] * outcomes).sum(axis=0)
    cov = sum(t * np.outer(o - mean, o - mean) for t, o in zip(theta, outcomes))
    idx = {"x11": 0, "x10": 1, "x01": 2, "x00": 3}
    targets_ok = all(abs(c.target - abs(cov[idx[c.pair[0]], idx[c.pair[1]]])) < 1e-15 for c in rep.checks)
    worst = max(abs(abs(c.empirical) - c.target) / c.standard_error for c in rep.checks)
    c1110 = {c.pair: c for c in rep.checks}[("x11", "x10")]
    ok = rep.ok and targets_ok and round(c1110.target, 4) == 0.0838
    report(7, "multinomial indicator variance/covariance magnitudes", ok,
           f"10 moments, worst {worst:.2f} SE, covariance signs {set(rep.covariance_signs)}")


def test_8_determinism(report, tmp_path, capsys):
    sim_args = ["simulate", "--n", "400", "--reps", "1200", "--seed", "123", "--format", "records"]
    outs = []
    for i, workers in enumerate(("1", "4", "1")):
        path = tmp_path / f"sim{i}.jsonl"
        assert main(sim_args + ["--workers", workers, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    tables = []
    for i in range(2):
        d = tmp_path / f"tables{i}"
        for baseline in ("simple", "crossed"):
            assert main(["tables", "--baseline", baseline, "--pi-ab", "0.05,0.1,0.2", "--out", str(d)]) == 0
        tables.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    capsys.readouterr()
    ok = outs[0] == outs[1] == outs[2] and tables[0] == tables[1] and len(tables[0]) == 6
    report(8, "byte-identical simulate/tables output across runs and worker counts", ok)
