"""Trajectory sinks, reader and digests."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Protocol

from ..errors import SchemaError
from .records import FORMAT_VERSION, StepRecord


def dumps(obj: Any) -> str:
    """Canonical JSON line: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


class TrajectorySink(Protocol):
    def write_header(self, header: dict[str, Any]) -> None: ...
    def record_step(self, record: StepRecord) -> None: ...
    def write_result(self, result: dict[str, Any]) -> None: ...
    def close(self) -> None: ...


class MemorySink:
    """Keeps records in memory; used by tests and in-process replays."""

    def __init__(self) -> None:
        self.header: dict[str, Any] | None = None
        self.steps: list[StepRecord] = []
        self.result: dict[str, Any] | None = None

    def write_header(self, header: dict[str, Any]) -> None:
        self.header = dict(header)

    def record_step(self, record: StepRecord) -> None:
        _check_order(self.steps, record)
        self.steps.append(record)

    def write_result(self, result: dict[str, Any]) -> None:
        self.result = dict(result)

    def close(self) -> None:
        pass

    def lines(self) -> list[str]:
        out = []
        if self.header is not None:
            out.append(dumps({"record": "header", **self.header}))
        out.extend(dumps(s.to_dict()) for s in self.steps)
        if self.result is not None:
            out.append(dumps({"record": "result", **self.result}))
        return out


def _check_order(steps: list[StepRecord], record: StepRecord) -> None:
    expected = steps[-1].step_index + 1 if steps else 0
    if record.step_index != expected:
        raise ValueError(f"step {record.step_index} recorded out of order (expected {expected})")


class TrajectoryWriter:
    """Append-only JSON Lines writer, one file per match.

    Each record is flushed and fsynced before ``record_step`` returns, so a
    crash leaves every acknowledged step on disk.
    """

    def __init__(self, path: str | Path, durable: bool = True):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        self._durable = durable
        self._last: int | None = None

    def _append(self, obj: dict[str, Any]) -> None:
        self._fh.write(dumps(obj) + "\n")
        self._fh.flush()
        if self._durable:
            os.fsync(self._fh.fileno())

    def write_header(self, header: dict[str, Any]) -> None:
        self._append({"record": "header", "version": FORMAT_VERSION, **header})

    def record_step(self, record: StepRecord) -> None:
        expected = 0 if self._last is None else self._last + 1
        if record.step_index != expected:
            raise ValueError(f"step {record.step_index} recorded out of order (expected {expected})")
        self._append(record.to_dict())
        self._last = record.step_index

    def write_result(self, result: dict[str, Any]) -> None:
        self._append({"record": "result", **result})

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> TrajectoryWriter:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class Trajectory:
    header: dict[str, Any] | None
    steps: list[StepRecord] = field(default_factory=list)
    result: dict[str, Any] | None = None
    error: SchemaError | None = None

    @property
    def complete(self) -> bool:
        return self.error is None and self.header is not None and self.result is not None

    @property
    def game_id(self) -> str | None:
        return (self.header or {}).get("game_id")


def parse_lines(lines: Iterable[str]) -> Trajectory:
    """Read records until the first corrupt one; the error names its line."""
    traj = Trajectory(header=None)
    for lineno, raw in enumerate(lines, 1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            traj.error = SchemaError(f"invalid JSON ({exc.msg})", line=lineno)
            return traj
        if not isinstance(obj, dict) or "record" not in obj:
            traj.error = SchemaError("not a trajectory record", line=lineno, field="record")
            return traj
        kind = obj.pop("record")
        try:
            if kind == "header":
                if traj.header is not None or traj.steps:
                    raise SchemaError("header must be the first record", line=lineno)
                traj.header = obj
            elif kind == "step":
                step = StepRecord.from_dict(obj, line=lineno)
                expected = traj.steps[-1].step_index + 1 if traj.steps else 0
                if step.step_index != expected:
                    raise SchemaError(f"step_index {step.step_index} breaks the sequence (expected {expected})",
                                      line=lineno, field="step_index")
                traj.steps.append(step)
            elif kind == "result":
                traj.result = obj
            else:
                raise SchemaError(f"unknown record kind {kind!r}", line=lineno, field="record")
        except (SchemaError, ValueError) as exc:
            traj.error = exc if isinstance(exc, SchemaError) else SchemaError(str(exc), line=lineno)
            return traj
    return traj


def read_trajectory(path: str | Path) -> Trajectory:
    with open(path, encoding="utf-8") as fh:
        return parse_lines(fh)


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def batch_digest(digests: Iterable[str]) -> str:
    h = hashlib.sha256()
    for d in digests:
        h.update(d.encode("ascii"))
        h.update(b"\n")
    return h.hexdigest()
