"""
Command-line interface.

Subcommands: estimate, forward, simulate, tables, thresholds, curves.

Exit codes: 0 success, 2 input or validation error, 3 degenerate design or
unsimulable model, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from rrtwo import analysis, estimators
from rrtwo.analysis import Mode
from rrtwo.core import (
    CellCounts,
    DegenerateDesign,
    DesignParams,
    ModelId,
    RRTError,
    UnsimulableModel,
    forward,
    validate_truth,
)
from rrtwo.montecarlo import SimulationConfig, run_experiment

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_IO = 0, 2, 3, 4

DEFAULTS = {
    "p": 0.6,
    "lam": 0.7,
    "model": "proposed",
    "pi_a": 0.3,
    "pi_b": 0.2,
    "pi_ab": 0.1,
    "n": 1000,
    "reps": 20000,
    "seed": 0,
    "workers": 1,
    "baseline": "simple",
    "mode": "published",
    "levels": "0.05",
    "rows": "published",
    "format": "csv",
    "sweep": "pi_a",
    "start": 0.1,
    "stop": 0.8,
    "step": 0.1,
}

TABLE_DECIMALS = {ModelId.SIMPLE: 2, ModelId.CROSSED: 1}


class UsageError(Exception):
    pass


def fixed(x, digits: int = 12) -> str:
    """Fixed-point rendering with trailing zeros trimmed; never uses exponents."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if x is None or not math.isfinite(x):
        return "nan"
    s = f"{x:.{digits}f}".rstrip("0")
    if s.endswith("."):
        s += "0"
    return "0.0" if s == "-0.0" else s


def round_half_up(x: float, digits: int) -> str:
    return str(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP))


def _cell_text(v) -> str:
    return v if isinstance(v, str) else fixed(v)


def render(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        lines = [",".join(keys)] + [",".join(_cell_text(r[k]) for k in keys) for r in rows]
    elif fmt == "records":
        lines = [_record_line(r) for r in rows]
    else:
        cells = [keys] + [[_cell_text(r[k]) for k in keys] for r in rows]
        widths = [max(len(c[i]) for c in cells) for i in range(len(keys))]
        lines = ["  ".join(c[i].rjust(widths[i]) for i in range(len(keys))) for c in cells]
    return "\n".join(lines) + "\n"


def _record_line(row: dict) -> str:
    parts = []
    for k, v in row.items():
        if isinstance(v, str):
            val = json.dumps(v)
        elif isinstance(v, float) and not math.isfinite(v):
            val = "null"
        else:
            val = fixed(v)
        parts.append(f"{json.dumps(k)}: {val}")
    return "{" + ", ".join(parts) + "}"


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _params(opts) -> DesignParams:
    return DesignParams(float(opts["p"]), float(opts["lam"]))


def _truth(opts):
    return validate_truth(float(opts["pi_a"]), float(opts["pi_b"]), float(opts["pi_ab"]))


def parse_counts(text: str, source: str = "--counts") -> CellCounts:
    parts = [s.strip() for s in text.strip().split(",")]
    if len(parts) != 4:
        raise UsageError(f"{source}: expected four comma-separated counts n11,n10,n01,n00, got {len(parts)}")
    vals = []
    for name, s in zip(("n11", "n10", "n01", "n00"), parts):
        try:
            v = int(s)
        except ValueError:
            raise UsageError(f"{source}: {name} is not an integer: {s!r}") from None
        if v < 0:
            raise UsageError(f"{source}: {name} must be non-negative, got {v}")
        vals.append(v)
    counts = CellCounts(*vals)
    if counts.n < 1:
        raise UsageError(f"{source}: total count n must be at least 1")
    return counts


def read_counts_file(path: str) -> list[CellCounts]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "n11,n10,n01,n00":
        raise UsageError(f"{path}: first line must be the header n11,n10,n01,n00")
    if len(lines) < 2:
        raise UsageError(f"{path}: no data rows")
    return [parse_counts(ln, f"{path} line {i + 2}") for i, ln in enumerate(lines[1:])]


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def cmd_estimate(opts) -> list[dict]:
    if opts.get("counts") is None and opts.get("counts_file") is None:
        raise UsageError("estimate: give --counts or --counts-file")
    if opts.get("counts") is not None:
        all_counts = [parse_counts(opts["counts"])]
    else:
        all_counts = read_counts_file(opts["counts_file"])
    model = ModelId(opts["model"])
    params = _params(opts)
    rows = []
    for counts in all_counts:
        est = estimators.estimate(model, counts, params)
        row = {"model": model.value, "n": counts.n}
        if model in (ModelId.MANGAT_A, ModelId.MANGAT_B):
            raw = est.pi_a_hat if model is ModelId.MANGAT_A else est.pi_b_hat
            clamped = _clamp01(raw)
            p = params.p if model is ModelId.MANGAT_A else params.lam
            row.update(pi_hat=raw, pi_clamped=clamped, clamped=clamped != raw,
                       se=math.sqrt(analysis.var_mangat(p, counts.n, pi=clamped)))
        else:
            truth, changed = est.clamp()
            var = analysis.variance(model, params, truth, counts.n)
            row.update(
                pi_a_hat=est.pi_a_hat, pi_b_hat=est.pi_b_hat, pi_ab_hat=est.pi_ab_hat,
                pi_a_clamped=truth.pi_a, pi_b_clamped=truth.pi_b, pi_ab_clamped=truth.pi_ab,
                clamped=changed,
                se_a=math.sqrt(var.var_a), se_b=math.sqrt(var.var_b), se_ab=math.sqrt(var.var_ab),
            )
        rows.append(row)
    return rows


def cmd_forward(opts) -> list[dict]:
    model = ModelId(opts["model"])
    prof = forward(model, _params(opts), _truth(opts))
    return [{"model": model.value, "t11": prof.t11, "t10": prof.t10, "t01": prof.t01, "t00": prof.t00}]


def cmd_simulate(opts) -> list[dict]:
    model = ModelId(opts["model"])
    if not model.simulable:
        raise UnsimulableModel("crossed model: respondent-level mechanism not specified, cannot simulate")
    params, truth = _params(opts), _truth(opts)
    cfg = SimulationConfig(model, params, truth, int(opts["n"]), int(opts["reps"]), int(opts["seed"]))
    s = run_experiment(cfg, workers=int(opts["workers"]))
    row = {
        "model": model.value, "p": params.p, "lambda": params.lam,
        "pi_a": truth.pi_a, "pi_b": truth.pi_b, "pi_ab": truth.pi_ab,
        "n": cfg.n, "replications": cfg.replications, "seed": cfg.seed,
    }
    named = (
        ("mean", s.mean_estimates),
        ("emp_var", s.empirical_variance),
        ("theo_var", s.theoretical_variance.as_tuple()),
        ("var_ratio", s.variance_ratio()),
        ("se_mean", s.standard_error_of_mean),
        ("bias_z", s.bias_z()),
    )
    for prefix, vals in named:
        for comp, v in zip(("a", "b", "ab"), vals):
            row[f"{prefix}_{comp}"] = v
    for comp, e, t in zip(("11", "10", "01", "00"), s.empirical_theta, s.theoretical_profile.as_array()):
        row[f"theta_hat_{comp}"] = e
        row[f"theta_{comp}"] = float(t)
    return [row]


def _levels(opts) -> list[float]:
    raw = str(opts["levels"])
    try:
        levels = [float(s) for s in raw.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--pi-ab: cannot parse levels {raw!r}") from None
    if not levels or any(not 0.0 <= x <= 1.0 for x in levels):
        raise UsageError(f"--pi-ab: levels must be in [0, 1], got {raw!r}")
    return levels


def table_rows(records, baseline: ModelId, with_level: bool) -> list[dict]:
    d = TABLE_DECIMALS[baseline]
    rows = []
    for r in records:
        row = {"pi_a": f"{r.pi_a:.1f}", "pi_b": f"{r.pi_b:.1f}"}
        if with_level:
            row["pi_ab"] = fixed(r.pi_ab)
        row.update(re_a=round_half_up(r.re_a, d), re_b=round_half_up(r.re_b, d),
                   re_ab=round_half_up(r.re_ab, d))
        rows.append(row)
    return rows


_EXT = {"csv": "csv", "records": "jsonl", "table": "txt"}


def table_filename(baseline: ModelId, mode: Mode, level: float, fmt: str = "csv") -> str:
    return f"{baseline.value}_{mode.value}_pab{fixed(level)}.{_EXT[fmt]}"


def cmd_tables(opts):
    params = _params(opts)
    baseline, mode = ModelId(opts["baseline"]), Mode(opts["mode"])
    if baseline not in TABLE_DECIMALS:
        raise UsageError(f"--baseline must be simple or crossed, got {baseline.value!r}")
    levels = _levels(opts)
    out = opts.get("out")
    if out is None:
        recs = analysis.table_grid(params, levels, mode, baseline, rows=opts["rows"])
        return table_rows(recs, baseline, with_level=True)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    for level in levels:
        recs = analysis.table_grid(params, [level], mode, baseline, rows=opts["rows"])
        text = render(table_rows(recs, baseline, with_level=False), opts["format"])
        _write(text, str(outdir / table_filename(baseline, mode, level, opts["format"])))
    return None


def cmd_thresholds(opts) -> list[dict]:
    rep = analysis.thresholds(_params(opts), _truth(opts))
    return [dict(vars(rep))]


def cmd_curves(opts) -> list[dict]:
    start, stop, step = float(opts["start"]), float(opts["stop"]), float(opts["step"])
    if step <= 0:
        raise UsageError("--step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1 if stop >= start else 0
    values = [round(start + k * step, 12) for k in range(count)]
    fixed_truth = _truth(opts)
    pts = analysis.variance_curves(_params(opts), opts["sweep"], values, fixed_truth,
                                   n=int(opts["n"]), target=opts.get("target"))
    return [{"x": pt.x, "v_sm": pt.v_sm, "v_cm": pt.v_cm, "v_ea": pt.v_ea} for pt in pts]


COMMANDS = {
    "estimate": cmd_estimate,
    "forward": cmd_forward,
    "simulate": cmd_simulate,
    "tables": cmd_tables,
    "thresholds": cmd_thresholds,
    "curves": cmd_curves,
}

_MODELS = [m.value for m in ModelId]


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--p", type=float, help="deck I probability (default 0.6)")
    common.add_argument("--lambda", dest="lam", type=float, help="deck II probability, T for simple/crossed (default 0.7)")
    common.add_argument("--format", choices=["table", "csv", "records"], help="output format (default csv)")
    common.add_argument("--out", help="output file (tables: output directory)")
    common.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")

    truth = argparse.ArgumentParser(add_help=False, argument_default=S)
    truth.add_argument("--pi-a", type=float)
    truth.add_argument("--pi-b", type=float)
    truth.add_argument("--pi-ab", type=float)

    parser = argparse.ArgumentParser(prog="rrtwo", description="Two-attribute randomized response toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], argument_default=S, help="estimate proportions from counts")
    p.add_argument("--model", choices=_MODELS)
    p.add_argument("--counts", help="n11,n10,n01,n00")
    p.add_argument("--counts-file", help="CSV with header n11,n10,n01,n00")

    p = sub.add_parser("forward", parents=[common, truth], argument_default=S, help="answer-pair probabilities")
    p.add_argument("--model", choices=_MODELS)

    p = sub.add_parser("simulate", parents=[common, truth], argument_default=S, help="Monte Carlo validation run")
    p.add_argument("--model", choices=_MODELS)
    p.add_argument("--n", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("tables", parents=[common], argument_default=S, help="relative-efficiency tables")
    p.add_argument("--baseline", choices=["simple", "crossed"])
    p.add_argument("--mode", choices=["published", "formula"])
    p.add_argument("--pi-ab", dest="levels", help="comma-separated pi_ab levels (default 0.05)")
    p.add_argument("--rows", choices=["published", "admissible"])

    sub.add_parser("thresholds", parents=[common, truth], argument_default=S, help="efficiency thresholds")

    p = sub.add_parser("curves", parents=[common, truth], argument_default=S, help="variance curves for plotting")
    p.add_argument("--sweep", choices=["pi_a", "pi_b", "pi_ab"])
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--target", choices=["pi_a", "pi_b", "pi_ab"])
    p.add_argument("--n", type=int)
    return parser


_CONFIG_ALIASES = {"lambda": "lam", "pi-a": "pi_a", "pi-b": "pi_b", "pi-ab": "pi_ab", "counts-file": "counts_file"}


def resolve_options(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    flags = vars(args)
    if "config" in flags:
        with open(flags["config"], encoding="utf-8") as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as e:
                raise UsageError(f"--config: invalid JSON ({e})") from None
        if not isinstance(cfg, dict):
            raise UsageError("--config: top level must be an object")
        for k, v in cfg.items():
            opts[_CONFIG_ALIASES.get(k, k.replace("-", "_"))] = v
    opts.update(flags)
    return opts


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        rows = COMMANDS[args.command](opts)
        if rows is not None:
            _write(render(rows, opts["format"]), opts.get("out"))
    except (DegenerateDesign, UnsimulableModel) as e:
        print(f"rrtwo: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (UsageError, RRTError, ValueError) as e:
        print(f"rrtwo: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"rrtwo: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
