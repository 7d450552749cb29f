"""External counter logs: validation, ingestion and export.

Ingestion schema, one JSON object per line::

    {"game_id": "sc2", "scenario": "Macro", "run": 0,
     "seat": "player",              # optional, default ""
     "match_id": "...",             # optional
     "step_index": 120,             # optional; present for per-step records
     "labels": {"mode": "async"},   # optional scene labels
     "counters": {"collected_minerals": 1000, ...}}

Counter names must be known counters. Values must be finite and
non-negative. Blank lines and lines starting with ``#`` are skipped.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from ..errors import SchemaError
from ..metrics.counters import CounterRecord
from ..metrics.formulas import GAMES, KNOWN_COUNTERS
from .store import dumps

REQUIRED = ("game_id", "scenario", "run", "counters")
OPTIONAL = ("seat", "match_id", "step_index", "labels")


def _check_int(value: Any, name: str, line: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise SchemaError(f"must be a non-negative integer, got {value!r}", line=line, field=name)
    return value


def parse_counter_line(obj: Any, line: int, game_id: str | None = None) -> CounterRecord:
    if not isinstance(obj, dict):
        raise SchemaError("record must be a JSON object", line=line)
    for name in REQUIRED:
        if name not in obj:
            raise SchemaError("missing required field", line=line, field=name)
    extra = set(obj) - set(REQUIRED) - set(OPTIONAL)
    if extra:
        raise SchemaError(f"unknown field(s) {sorted(extra)}", line=line, field=sorted(extra)[0])
    gid = obj["game_id"]
    if gid not in GAMES:
        raise SchemaError(f"unknown game {gid!r}; expected one of {', '.join(GAMES)}", line=line, field="game_id")
    if game_id is not None and gid != game_id:
        raise SchemaError(f"record is for {gid!r}, expected {game_id!r}", line=line, field="game_id")
    if not isinstance(obj["scenario"], str) or not obj["scenario"]:
        raise SchemaError("must be a non-empty string", line=line, field="scenario")
    run = _check_int(obj["run"], "run", line)
    step = obj.get("step_index")
    if step is not None:
        step = _check_int(step, "step_index", line)
    seat = obj.get("seat", "")
    if not isinstance(seat, str):
        raise SchemaError("must be a string", line=line, field="seat")
    match_id = obj.get("match_id")
    if match_id is not None and not isinstance(match_id, str):
        raise SchemaError("must be a string", line=line, field="match_id")
    labels = obj.get("labels", {})
    if not isinstance(labels, dict):
        raise SchemaError("must be an object", line=line, field="labels")
    counters = obj["counters"]
    if not isinstance(counters, dict):
        raise SchemaError("must be an object", line=line, field="counters")
    for name, value in counters.items():
        where = f"counters.{name}"
        if name not in KNOWN_COUNTERS:
            raise SchemaError("unknown counter name", line=line, field=where)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"must be a number, got {value!r}", line=line, field=where)
        if math.isnan(value) or math.isinf(value):
            raise SchemaError("must be finite", line=line, field=where)
        if value < 0:
            raise SchemaError(f"must be non-negative, got {value!r}", line=line, field=where)
    return CounterRecord(
        game_id=gid,
        scenario=obj["scenario"],
        run=run,
        counters=counters,
        seat=seat,
        match_id=match_id,
        step_index=step,
        labels=labels,
    )


def parse_counter_lines(lines: Iterable[str], game_id: str | None = None) -> list[CounterRecord]:
    records = []
    for lineno, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON ({exc.msg})", line=lineno) from None
        records.append(parse_counter_line(obj, lineno, game_id))
    return records


def ingest_external(path: str | Path, game_id: str | None = None) -> list[CounterRecord]:
    """Validate and load a counter log; the first bad line aborts with its location."""
    with open(path, encoding="utf-8") as fh:
        return parse_counter_lines(fh, game_id)


def export_counters(records: Sequence[CounterRecord], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(dumps(record.to_dict()) + "\n")
    return path


def match_records(records: Iterable[CounterRecord]) -> list[CounterRecord]:
    """Collapse per-step records to the last step of each (game, scenario, run, seat)."""
    latest: dict[tuple, CounterRecord] = {}
    for r in records:
        prev = latest.get(r.key)
        if prev is None or (r.step_index or 0) >= (prev.step_index or 0):
            latest[r.key] = r
    return [latest[k] for k in sorted(latest)]
