"""Command-line front end.

Exit codes:
    0  success (and, for diff/replay, an empty report)
    1  runtime or I/O failure
    2  usage error or invalid configuration
    3  trace shape mismatch (different N, M, K or T)
    4  traces differ
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .config import ScenarioConfig, dump_config, load_config, parse_config, parse_override
from .engine import initialize, run
from .errors import HumatError, InvalidConfig, IoFailure, SchemaMismatch, ValidationFailure
from .harness import (
    RunTrace,
    diff_traces,
    export_snapshot,
    load_tolerances,
    read_snapshot_file,
    read_trace,
    replay_check,
    trace_from,
    write_metrics_csv,
    write_trace,
    write_trace_csv,
)
from .harness.diff import DiffReport
from .network import write_edge_csv

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_SHAPE = 3
EXIT_DIFFERENT = 4

METRIC_COLUMNS = ("mean_dissonance", "n_social_dilemma", "n_nonsocial_dilemma", "n_signal", "n_inquire")


def _overrides(pairs: Sequence[str] | None) -> dict:
    return dict(parse_override(p) for p in pairs or ())


def _load(args) -> ScenarioConfig:
    return load_config(args.config, _overrides(getattr(args, "set", None)))


def execute(config: ScenarioConfig, out_dir: Path, long_csv: bool = False) -> dict:
    """Run ``config`` and write every artifact into ``out_dir``; returns final metrics."""
    trace = run(config)
    write_trace(trace, out_dir)
    try:
        write_metrics_csv(trace, out_dir / "metrics.csv")
        write_edge_csv(trace.final_state.network, out_dir / "edges.csv")
        dump_config(config, out_dir / "config.yaml")
        if long_csv:
            write_trace_csv(trace, out_dir / "trace.csv")
    except OSError as exc:
        raise IoFailure(f"cannot write artifacts to {out_dir}: {exc}") from exc
    export_snapshot(trace.final_state, config.digest(), out_dir / "snapshot_final.json")
    return trace.records[-1].metrics(config.n_alternatives)


def cmd_run(args) -> int:
    config = _load(args)
    out = Path(args.out)
    metrics = execute(config, out, long_csv=args.csv)
    counts = " ".join(f"{a.label}={c}" for a, c in zip(config.alternatives, metrics["choice_counts"]))
    print(
        f"ran N={config.population} T={config.ticks} seed={config.seed}: {counts} "
        f"mean_dissonance={metrics['mean_dissonance']:.6g} -> {out}"
    )
    return EXIT_OK


def _sweep_one(config_doc: dict, out_dir: str) -> dict:
    return execute(parse_config(config_doc), Path(out_dir))


def _sweep_values(axis: str, raw: str) -> list[int]:
    values = [v.strip() for v in raw.split(",") if v.strip()]
    if not values:
        raise InvalidConfig("--values", "at least one value is required")
    try:
        parsed = [int(v) for v in values]
    except ValueError:
        raise InvalidConfig("--values", f"{axis} values must be integers") from None
    if axis == "population" and any(v < 1 for v in parsed):
        raise InvalidConfig("--values", "population sizes must be >= 1")
    if axis == "seed" and any(v < 0 for v in parsed):
        raise InvalidConfig("--values", "seeds must be non-negative")
    return parsed


def cmd_sweep(args) -> int:
    base = _load(args)
    values = _sweep_values(args.axis, args.values)
    key = "seed" if args.axis == "seed" else "population.size"
    out = Path(args.out)
    jobs = []
    results: dict[int, tuple[str, dict | None]] = {}
    for v in values:
        try:
            doc = base.with_overrides({key: v}).to_dict()
        except InvalidConfig as exc:
            # A value the scenario cannot accept fails its own run, not the sweep setup.
            results[v] = (f"failed: invalid configuration: {exc}", None)
            doc = None
        jobs.append((v, doc, str(out / f"{args.axis}_{v}")))
    runnable = [(v, doc, d) for v, doc, d in jobs if doc is not None]

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {v: pool.submit(_sweep_one, doc, d) for v, doc, d in runnable}
            for v, fut in futures.items():
                try:
                    results[v] = ("ok", fut.result())
                except Exception as exc:  # any failed run fails the sweep
                    results[v] = (f"failed: {exc}", None)
    else:
        for v, doc, d in runnable:
            try:
                results[v] = ("ok", _sweep_one(doc, d))
            except Exception as exc:
                results[v] = (f"failed: {exc}", None)

    alt_cols = [f"alt_{a.label}_count" for a in base.alternatives]
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "aggregate.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([args.axis, "status", *alt_cols, *METRIC_COLUMNS])
        for v, _, _ in jobs:
            status, m = results[v]
            if m is None:
                w.writerow([v, status, *[""] * (len(alt_cols) + len(METRIC_COLUMNS))])
            else:
                w.writerow([v, status, *m["choice_counts"], repr(m["mean_dissonance"]),
                            *(m[c] for c in METRIC_COLUMNS[1:])])

    failed = {v: s for v, (s, _) in results.items() if s != "ok"}
    if failed:
        print(f"{'value':>10}  status", file=sys.stderr)
        for v, _, _ in jobs:
            print(f"{v:>10}  {results[v][0]}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"sweep over {args.axis}: {len(values)} runs -> {out / 'aggregate.csv'}")
    return EXIT_OK


def _config_from_trace(trace) -> ScenarioConfig:
    if trace.header.config is None:
        raise InvalidConfig("config", "trace header carries no config; pass --config")
    return parse_config(trace.header.config)


def cmd_snapshot(args) -> int:
    trace = read_trace(args.trace)
    config = _config_from_trace(trace)
    if not 0 <= args.tick <= trace.last_tick:
        raise InvalidConfig("--tick", f"must lie in [0, {trace.last_tick}]")
    replayed = trace_from(initialize(config), config, args.tick)
    # The regenerated prefix must match the recording. Its last record has no
    # events yet (the run stopped there), so borrow the recorded ones.
    last = replayed.records[-1].copy()
    last.events = list(trace.record_at(args.tick).events)
    prefix = RunTrace(trace.header, trace.records[: args.tick + 1])
    check = diff_traces(prefix, RunTrace(replayed.header, replayed.records[:-1] + [last]))
    if not check.is_empty:
        print(check.to_text(), file=sys.stderr)
        return EXIT_DIFFERENT
    out = Path(args.out) if args.out else Path(args.trace) / f"snapshot_t{args.tick}.json"
    export_snapshot(replayed.final_state, config.digest(), out)
    print(f"snapshot of tick {args.tick} -> {out}")
    return EXIT_OK


def _report(report: DiffReport, json_out: str | None) -> int:
    print(report.to_text())
    if json_out:
        try:
            Path(json_out).write_text(report.to_json())
        except OSError as exc:
            raise IoFailure(f"cannot write {json_out}: {exc}") from exc
    if report.shape_mismatch:
        return EXIT_SHAPE
    return EXIT_OK if report.is_empty else EXIT_DIFFERENT


def _tolerances(path: str | None):
    if path is None:
        return None
    try:
        return load_tolerances(path)
    except (OSError, ValueError) as exc:
        raise InvalidConfig("--tolerances", str(exc)) from None


def cmd_diff(args) -> int:
    tol = _tolerances(args.tolerances)
    left, right = read_trace(args.left), read_trace(args.right)
    return _report(diff_traces(left, right, tol), args.json_out)


def cmd_replay(args) -> int:
    tol = _tolerances(args.tolerances)
    golden = read_trace(args.golden)
    config = _load(args) if args.config else _config_from_trace(golden)
    state = read_snapshot_file(args.snapshot)
    return _report(replay_check(state, golden, config, tol), args.json_out)


def cmd_validate(args) -> int:
    config = _load(args)
    print(f"valid: N={config.population} M={config.n_motives} K={config.n_alternatives} "
          f"T={config.ticks} digest={config.digest()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="humat", description="HUMAT simulation and replication tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario and write its trace")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a dotted config key")
    p.add_argument("--csv", action="store_true", help="also write the long-format trace.csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run one scenario over several seeds or population sizes")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--axis", required=True, choices=("seed", "population"))
    p.add_argument("--values", required=True, help="comma-separated integers")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("snapshot", help="export the full state at one tick of a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--tick", required=True, type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("diff", help="compare two traces tick by tick")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--tolerances")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("replay", help="step a snapshot forward and compare with a golden trace")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--golden", required=True)
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--tolerances")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("validate-config", help="check a scenario file")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidConfig as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaMismatch, ValidationFailure, IoFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except HumatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
