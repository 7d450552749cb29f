"""Command-line entry point.

Subcommands::

    run              play every run of every scenario in a batch config
    score            compute capability scores from a run directory
    replay           print a trajectory as a transcript
    validate-config  check a batch config and/or a scoring config
    ingest           validate external counter logs and attach them to a run directory

Exit codes: 0 success, 2 usage error, 3 invalid configuration or input
file, 4 a match aborted at runtime, 5 scoring data incomplete.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

from .agents.client import resolve_api_key
from .agents.types import AgentKind
from .core.config import ScenarioConfig, load_batch
from .core.runner import execute_match, match_id_for
from .errors import (
    ConfigError,
    EnvInvariantError,
    HarnessError,
    IncompleteDataError,
    SchemaError,
)
from .metrics.counters import CounterRecord
from .scoring import load_capability_config, runs_from_records, score
from .tracker import (
    DEFAULT_STRIDE,
    batch_digest,
    export_counters,
    export_timeseries,
    file_digest,
    ingest_external,
    match_records,
    read_trajectory,
    render_replay,
    write_timeseries,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_ABORTED = 4
EXIT_INCOMPLETE = 5

MANIFEST = "manifest.json"
COUNTERS = "counters.jsonl"

log = logging.getLogger("stratharness")


# -- run -----------------------------------------------------------------

def preflight(configs: Sequence[ScenarioConfig]) -> None:
    """Fail before any match starts if a remote agent cannot be reached.

    Cassette-backed agents need their cassette file; live agents need
    their API key variable. Nothing touches the network here.
    """
    for config in configs:
        for seat, spec in config.resolved_bindings().items():
            if spec.kind is not AgentKind.REMOTE:
                continue
            where = f"{config.name}.agents.{seat}"
            if spec.cassette is not None:
                if not Path(spec.cassette).is_file():
                    raise ConfigError(f"{where}: cassette {spec.cassette} not found")
                continue
            assert spec.endpoint is not None
            try:
                resolve_api_key(spec.endpoint)
            except ConfigError as exc:
                raise ConfigError(f"{where}: endpoint {spec.endpoint.base_url}: {exc}") from None


def _play(config: ScenarioConfig, run: int, path: str) -> dict[str, Any]:
    """Worker: play one match and summarize it for the manifest."""
    match_id = match_id_for(config, run)
    try:
        result = execute_match(config, run, trajectory_path=path)
    except EnvInvariantError as exc:
        return {"match_id": match_id, "scenario": config.name, "run": run,
                "status": "aborted", "error": str(exc)}
    return {"match_id": match_id, "scenario": config.name, "run": run, "status": "ok",
            "result": result.to_dict()}


def _counter_records(config: ScenarioConfig, entry: dict[str, Any]) -> list[CounterRecord]:
    final = entry["result"]["final_counters"]
    return [
        CounterRecord(config.game_id, config.name, entry["run"], counters, seat=seat,
                      match_id=entry["match_id"])
        for seat, counters in sorted(final.items())
    ]


def cmd_run(args: argparse.Namespace) -> int:
    configs = load_batch(args.config, args.set, args.seed, args.runs)
    preflight(configs)
    out = Path(args.out)
    traj_dir = out / "trajectories"
    traj_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(c, run, str(traj_dir / f"{match_id_for(c, run)}.jsonl"))
            for c in configs for run in range(c.runs)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(_play, *zip(*jobs)))
    else:
        entries = [_play(*job) for job in jobs]

    by_name = {c.name: c for c in configs}
    records: list[CounterRecord] = []
    digests = []
    for (config, _, path), entry in zip(jobs, entries):
        entry["trajectory"] = f"trajectories/{Path(path).name}"
        entry["digest"] = file_digest(path)
        digests.append(entry["digest"])
        if entry["status"] == "ok":
            records.extend(_counter_records(by_name[entry["scenario"]], entry))
        else:
            log.error("match %s aborted: %s", entry["match_id"], entry["error"])
        if args.timeseries:
            entry["timeseries"] = _write_series(Path(path), out / "timeseries", args.timeseries, args.stride)
    export_counters(records, out / COUNTERS)

    # Keep external logs attached by an earlier ingest.
    previous = _read_manifest(out) if (out / MANIFEST).exists() else {}
    manifest = {
        "scenarios": [
            {**c.to_dict(), "evaluated_seat": c.scored_seat} for c in configs
        ],
        "matches": entries,
        "counters": COUNTERS,
        "external": list(previous.get("external", [])),
        "batch_digest": batch_digest(digests),
    }
    _write_manifest(out, manifest)
    aborted = sum(e["status"] != "ok" for e in entries)
    print(f"{len(entries)} matches, {aborted} aborted; batch digest {manifest['batch_digest']}")
    return EXIT_ABORTED if aborted else EXIT_OK


def _write_series(path: Path, series_dir: Path, metrics: Sequence[str], stride: int) -> list[str]:
    trajectory = read_trajectory(path)
    written = []
    for metric_id in metrics:
        points = export_timeseries(trajectory, metric_id, stride)
        target = series_dir / f"{path.stem}.{metric_id}.csv"
        write_timeseries(points, target)
        written.append(str(target))
    return written


def _write_manifest(out: Path, manifest: dict[str, Any]) -> None:
    tmp = out / (MANIFEST + ".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                   encoding="utf-8")
    tmp.replace(out / MANIFEST)


def _read_manifest(out: Path) -> dict[str, Any]:
    try:
        return json.loads((out / MANIFEST).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"{out / MANIFEST} not found; run 'stratharness run' first") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{out / MANIFEST}: {exc}") from None


# -- score ---------------------------------------------------------------

def load_run_records(out: Path) -> tuple[list[CounterRecord], dict[str, str]]:
    """Counter records of a run directory and the scored seat per scenario."""
    manifest = _read_manifest(out)
    records: list[CounterRecord] = []
    counters = out / manifest.get("counters", COUNTERS)
    if counters.exists():
        records.extend(ingest_external(counters))
    for rel in manifest.get("external", []):
        records.extend(match_records(ingest_external(out / rel)))
    seats = {s["name"]: s["evaluated_seat"] for s in manifest.get("scenarios", [])}
    return records, seats


def cmd_score(args: argparse.Namespace) -> int:
    config = load_capability_config(args.config)
    out = Path(args.out)
    records, seats = load_run_records(out)
    report = score(config, runs_from_records(records, seats))
    for warning in report.warnings:
        log.warning(warning)
    (out / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    table = report.format_table()
    (out / "report.txt").write_text(table + "\n", encoding="utf-8")
    print(table)
    return EXIT_OK


# -- replay --------------------------------------------------------------

def cmd_replay(args: argparse.Namespace) -> int:
    path = Path(args.trajectory)
    if not path.is_file():
        raise ConfigError(f"trajectory {path} not found")
    trajectory = read_trajectory(path)
    for line in render_replay(trajectory, omniscient=args.omniscient):
        print(line)
    if trajectory.error is not None:
        print(f"stopped at the last valid record: {trajectory.error}", file=sys.stderr)
    if args.timeseries:
        target_dir = Path(args.out) if args.out else path.parent
        for written in _write_series(path, target_dir, args.timeseries, args.stride):
            print(f"wrote {written}")
    return EXIT_OK if trajectory.error is None else EXIT_CONFIG


# -- validate-config -----------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    if not args.config and not args.scoring:
        raise _Usage("validate-config needs --config and/or --scoring")
    if args.config:
        configs = load_batch(args.config, args.set)
        preflight_problems = []
        try:
            preflight(configs)
        except ConfigError as exc:
            preflight_problems.append(str(exc))
        for problem in preflight_problems:
            print(f"warning: {problem}")
        total = sum(c.runs for c in configs)
        print(f"{args.config}: {len(configs)} scenario(s), {total} match(es); ok")
    if args.scoring:
        load_capability_config(args.scoring)
        print(f"{args.scoring}: ok")
    return EXIT_OK


# -- ingest --------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / MANIFEST
    manifest = _read_manifest(out) if manifest_path.exists() else {
        "scenarios": [], "matches": [], "counters": COUNTERS, "external": [],
        "batch_digest": batch_digest([]),
    }
    ext_dir = out / "external"
    ext_dir.mkdir(exist_ok=True)
    for source in args.files:
        records = ingest_external(source, args.game)
        target = ext_dir / Path(source).name
        if Path(source).resolve() != target.resolve():
            shutil.copyfile(source, target)
        rel = f"external/{target.name}"
        if rel not in manifest["external"]:
            manifest["external"].append(rel)
        keys = {(r.game_id, r.scenario) for r in records}
        print(f"{source}: {len(records)} record(s) across {len(keys)} scenario(s)")
    _write_manifest(out, manifest)
    return EXIT_OK


# -- plumbing ------------------------------------------------------------

class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _metric_list(text: str) -> list[str]:
    return [m.strip() for m in text.split(",") if m.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stratharness", description="Strategic game agent evaluation harness.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="play a batch of scenarios")
    run.add_argument("--config", required=True, help="batch config (YAML)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--jobs", type=int, default=1, help="parallel matches")
    run.add_argument("--seed", type=int, help="override every scenario seed")
    run.add_argument("--runs", type=int, help="override every scenario run count")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="config override; prefix with '<scenario>.' to target one scenario")
    run.add_argument("--timeseries", type=_metric_list, metavar="METRIC[,METRIC]",
                     help="also export these metrics over time for every match")
    run.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    run.set_defaults(func=cmd_run)

    sc = sub.add_parser("score", help="score a run directory")
    sc.add_argument("--out", required=True, help="run directory holding manifest.json")
    sc.add_argument("--config", help="scoring config (YAML); default is the packaged one")
    sc.set_defaults(func=cmd_score)

    rp = sub.add_parser("replay", help="print a trajectory")
    rp.add_argument("trajectory")
    rp.add_argument("--omniscient", action="store_true", help="show hidden information")
    rp.add_argument("--timeseries", type=_metric_list, metavar="METRIC[,METRIC]")
    rp.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    rp.add_argument("--out", help="directory for time-series files (default: next to the trajectory)")
    rp.set_defaults(func=cmd_replay)

    vc = sub.add_parser("validate-config", help="check configuration files")
    vc.add_argument("--config", help="batch config (YAML)")
    vc.add_argument("--scoring", help="scoring config (YAML)")
    vc.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    vc.set_defaults(func=cmd_validate)

    ing = sub.add_parser("ingest", help="attach external counter logs to a run directory")
    ing.add_argument("files", nargs="+")
    ing.add_argument("--out", required=True, help="run directory")
    ing.add_argument("--game", help="require every record to be for this game")
    ing.set_defaults(func=cmd_ingest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    for name in ("stride", "jobs"):
        if getattr(args, name, 1) is not None and getattr(args, name, 1) < 1:
            parser.error(f"--{name} must be >= 1")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except BrokenPipeError:
        # Output piped into a pager or head that exited early.
        sys.stderr.close()
        return EXIT_OK
    except IncompleteDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except (ConfigError, SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HarnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
