"""Per-tick run traces and their on-disk form.

A trace directory holds ``header.json`` (one canonical JSON document) and
``records.jsonl`` (one canonical JSON record per tick, ticks strictly
increasing with no gaps). The record for tick ``t`` holds every agent
parameter of the state at ``t`` together with the communication events the
agents fired while stepping from ``t`` to ``t + 1``; the last record
therefore has no events.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator

import numpy as np

from ..config import ScenarioConfig
from ..core import DilemmaStatus
from ..errors import IoFailure, SchemaMismatch
from ..network import CommunicationEvent, EventKind
from ..rng import RNG_ALGORITHM
from .canonical import canonical_json

TRACE_SCHEMA = "humat-trace/1"
METRICS_SCHEMA = "humat-metrics/1"
HEADER_FILE = "header.json"
RECORDS_FILE = "records.jsonl"

_DILEMMA_LABELS = [s.label for s in DilemmaStatus]


@dataclass
class TraceHeader:
    config_digest: str
    agent_ids: list[int]
    motives: list[dict]
    alternatives: list[str]
    activation_order: str
    rng_algorithm: str = RNG_ALGORITHM
    schema_version: str = TRACE_SCHEMA
    config: dict | None = None

    @property
    def dims(self) -> dict[str, int]:
        return {"N": len(self.agent_ids), "M": len(self.motives), "K": len(self.alternatives)}

    @classmethod
    def for_run(cls, config: ScenarioConfig, agent_ids: Iterable[int]) -> "TraceHeader":
        return cls(
            config_digest=config.digest(),
            agent_ids=[int(a) for a in agent_ids],
            motives=[{"name": m.name, "group": m.group.value} for m in config.motives],
            alternatives=[a.label for a in config.alternatives],
            activation_order=config.activation_order.value,
            config=config.to_dict(),
        )

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "metrics_schema": METRICS_SCHEMA,
            "config_digest": self.config_digest,
            "rng_algorithm": self.rng_algorithm,
            "agent_ids": self.agent_ids,
            "motives": self.motives,
            "alternatives": self.alternatives,
            "activation_order": self.activation_order,
        }
        if self.config is not None:
            d["config"] = self.config
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TraceHeader":
        if d.get("schema_version") != TRACE_SCHEMA:
            raise SchemaMismatch(f"unsupported trace schema {d.get('schema_version')!r}")
        try:
            return cls(
                config_digest=d["config_digest"],
                agent_ids=[int(a) for a in d["agent_ids"]],
                motives=list(d["motives"]),
                alternatives=[str(a) for a in d["alternatives"]],
                activation_order=d["activation_order"],
                rng_algorithm=d["rng_algorithm"],
                config=d.get("config"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatch(f"malformed trace header: {exc!r}") from None


@dataclass(eq=False)
class TraceRecord:
    """Agent parameters at one tick, column-wise in agent-id order."""

    tick: int
    choice: np.ndarray
    evaluation: np.ndarray
    dissonance: np.ndarray
    dilemma: np.ndarray
    social_satisfaction: np.ndarray
    events: list[CommunicationEvent] = field(default_factory=list)

    def metrics(self, n_alternatives: int) -> dict[str, Any]:
        rows = np.arange(self.choice.shape[0])
        chosen = self.dissonance[rows, self.choice].tolist()
        kinds = [e.kind for e in self.events]
        return {
            "choice_counts": np.bincount(self.choice, minlength=n_alternatives).tolist(),
            # fsum: correctly rounded, independent of summation order.
            "mean_dissonance": math.fsum(chosen) / len(chosen) if chosen else 0.0,
            "n_social_dilemma": int(np.count_nonzero(self.dilemma == DilemmaStatus.SOCIAL)),
            "n_nonsocial_dilemma": int(np.count_nonzero(self.dilemma == DilemmaStatus.NON_SOCIAL)),
            "n_signal": kinds.count(EventKind.SIGNAL),
            "n_inquire": kinds.count(EventKind.INQUIRE),
        }

    def to_dict(self, n_alternatives: int) -> dict:
        return {
            "tick": self.tick,
            "agents": {
                "choice": self.choice.tolist(),
                "evaluation": self.evaluation.tolist(),
                "dissonance": self.dissonance.tolist(),
                "dilemma": [_DILEMMA_LABELS[d] for d in self.dilemma.tolist()],
                "social_satisfaction": self.social_satisfaction.tolist(),
            },
            "events": [e.to_dict() for e in self.events],
            "metrics": self.metrics(n_alternatives),
        }

    @classmethod
    def from_dict(cls, d: dict, n: int, k: int) -> "TraceRecord":
        try:
            a = d["agents"]
            rec = cls(
                tick=int(d["tick"]),
                choice=np.asarray(a["choice"], dtype=np.int64).reshape(n),
                evaluation=np.asarray(a["evaluation"], dtype=float).reshape(n, k),
                dissonance=np.asarray(a["dissonance"], dtype=float).reshape(n, k),
                dilemma=np.asarray([DilemmaStatus.from_label(x) for x in a["dilemma"]], dtype=np.int8).reshape(n),
                social_satisfaction=np.asarray(a["social_satisfaction"], dtype=float).reshape(n),
                events=[CommunicationEvent.from_dict(e) for e in d.get("events", [])],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatch(f"malformed trace record: {exc!r}") from None
        return rec

    def copy(self) -> "TraceRecord":
        return TraceRecord(
            self.tick, self.choice.copy(), self.evaluation.copy(), self.dissonance.copy(),
            self.dilemma.copy(), self.social_satisfaction.copy(), list(self.events),
        )


@dataclass(eq=False)
class RunTrace:
    header: TraceHeader
    records: list[TraceRecord]
    final_state: Any = field(default=None, repr=False)

    @property
    def n_alternatives(self) -> int:
        return len(self.header.alternatives)

    @property
    def last_tick(self) -> int:
        return self.records[-1].tick

    def record_at(self, tick: int) -> TraceRecord:
        first = self.records[0].tick
        if not first <= tick <= self.last_tick:
            raise IndexError(f"tick {tick} outside [{first}, {self.last_tick}]")
        return self.records[tick - first]

    def suffix(self, tick: int) -> "RunTrace":
        first = self.records[0].tick
        return RunTrace(self.header, self.records[tick - first:])

    def lines(self) -> Iterator[bytes]:
        yield canonical_json(self.header.to_dict())
        k = self.n_alternatives
        for rec in self.records:
            yield canonical_json(rec.to_dict(k))

    def to_bytes(self) -> bytes:
        """Canonical byte form: header line followed by one line per record."""
        return b"".join(line + b"\n" for line in self.lines())


def observe(state, events: list[CommunicationEvent]) -> TraceRecord:
    """Snapshot the per-agent parameter block of ``state``."""
    return TraceRecord(
        tick=state.tick,
        choice=state.choice.copy(),
        evaluation=state.evaluations(),
        dissonance=state.dissonance.copy(),
        dilemma=state.dilemma.copy(),
        social_satisfaction=2.0 * state.like_minded() - 1.0,
        events=list(events),
    )


def trace_from(state, config: ScenarioConfig, until_tick: int, on_record: Callable | None = None) -> RunTrace:
    """Step ``state`` up to ``until_tick``, recording every tick on the way."""
    from ..engine import step

    header = TraceHeader.for_run(config, state.agent_ids.tolist())
    records = []
    while True:
        if state.tick < until_tick:
            nxt, events = step(state, config)
        else:
            nxt, events = None, []
        rec = observe(state, events)
        records.append(rec)
        if on_record is not None:
            on_record(rec)
        if nxt is None:
            return RunTrace(header, records, final_state=state)
        state = nxt


# -- files --------------------------------------------------------------------------


def write_trace(trace: RunTrace, directory: str | Path) -> Path:
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        lines = trace.lines()
        (d / HEADER_FILE).write_bytes(next(lines) + b"\n")
        with open(d / RECORDS_FILE, "wb") as fh:
            for line in lines:
                fh.write(line + b"\n")
    except OSError as exc:
        raise IoFailure(f"cannot write trace to {d}: {exc}") from exc
    return d


def read_trace(directory: str | Path) -> RunTrace:
    d = Path(directory)
    try:
        header_text = (d / HEADER_FILE).read_text(encoding="utf-8")
        record_lines = (d / RECORDS_FILE).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read trace from {d}: {exc}") from exc
    try:
        header = TraceHeader.from_dict(json.loads(header_text))
        dicts = [json.loads(line) for line in record_lines if line.strip()]
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"trace in {d} is not valid JSON: {exc}") from None
    dims = header.dims
    records = [TraceRecord.from_dict(r, dims["N"], dims["K"]) for r in dicts]
    if not records:
        raise SchemaMismatch(f"trace in {d} has no records")
    for prev, cur in zip(records, records[1:]):
        if cur.tick != prev.tick + 1:
            raise SchemaMismatch(f"trace records jump from tick {prev.tick} to {cur.tick}")
    return RunTrace(header, records)


def write_metrics_csv(trace: RunTrace, path: str | Path) -> None:
    labels = trace.header.alternatives
    header = ["tick", *(f"alt_{label}_count" for label in labels), "mean_dissonance",
              "n_social_dilemma", "n_nonsocial_dilemma", "n_signal", "n_inquire"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for rec in trace.records:
            m = rec.metrics(len(labels))
            w.writerow([rec.tick, *m["choice_counts"], repr(m["mean_dissonance"]), m["n_social_dilemma"],
                        m["n_nonsocial_dilemma"], m["n_signal"], m["n_inquire"]])


def write_trace_csv(trace: RunTrace, path: str | Path) -> None:
    """Long format ``tick,agent_id,field,value`` for external tooling."""
    ids = trace.header.agent_ids
    k = trace.n_alternatives
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tick", "agent_id", "field", "value"])
        for rec in trace.records:
            choice = rec.choice.tolist()
            ev = rec.evaluation.tolist()
            dis = rec.dissonance.tolist()
            dil = rec.dilemma.tolist()
            soc = rec.social_satisfaction.tolist()
            for i, agent_id in enumerate(ids):
                w.writerow([rec.tick, agent_id, "choice", choice[i]])
                for a in range(k):
                    w.writerow([rec.tick, agent_id, f"evaluation[{a}]", repr(ev[i][a])])
                for a in range(k):
                    w.writerow([rec.tick, agent_id, f"dissonance[{a}]", repr(dis[i][a])])
                w.writerow([rec.tick, agent_id, "dilemma", _DILEMMA_LABELS[dil[i]]])
                w.writerow([rec.tick, agent_id, "social_satisfaction", repr(soc[i])])
