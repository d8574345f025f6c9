"""Tolerance-aware comparison of two run traces."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..core import DilemmaStatus
from .trace import RunTrace, TraceRecord

REAL_FIELDS = ("evaluation", "dissonance", "social_satisfaction")
EXACT_FIELDS = ("choice", "dilemma", "event")
FIELD_ORDER = {name: i for i, name in enumerate(("choice", "evaluation", "dissonance", "dilemma", "social_satisfaction", "event"))}

SAME_ENGINE_TOLERANCE = 0.0
CROSS_IMPLEMENTATION_TOLERANCE = 1e-9


def tolerances(default: float = SAME_ENGINE_TOLERANCE, **per_field: float) -> dict[str, float]:
    tol = {f: default for f in REAL_FIELDS}
    for name, value in per_field.items():
        if name not in tol:
            raise ValueError(f"no real-valued trace field named {name!r}")
        tol[name] = float(value)
    return tol


def load_tolerances(path: str | Path) -> dict[str, float]:
    """Read a JSON or YAML mapping ``field -> absolute tolerance``; ``default`` sets the rest."""
    import yaml

    doc = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(doc, dict):
        raise ValueError(f"{path} must hold a mapping of field names to tolerances")
    doc = dict(doc)
    default = float(doc.pop("default", SAME_ENGINE_TOLERANCE))
    return tolerances(default, **{k: float(v) for k, v in doc.items()})


@dataclass(frozen=True)
class Discrepancy:
    tick: int
    agent_id: int | None
    field: str
    left: Any
    right: Any
    abs_diff: float | None = None

    def sort_key(self):
        base, _, comp = self.field.partition("[")
        return (self.tick, -1 if self.agent_id is None else self.agent_id, FIELD_ORDER.get(base, 99), comp)

    def to_dict(self) -> dict:
        return {
            "tick": self.tick, "agent_id": self.agent_id, "field": self.field,
            "left": self.left, "right": self.right, "abs_diff": self.abs_diff,
        }


@dataclass(frozen=True)
class StructuralDiff:
    dimension: str
    left: Any
    right: Any


@dataclass
class DiffReport:
    discrepancies: list[Discrepancy] = field(default_factory=list)
    structural: list[StructuralDiff] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.discrepancies and not self.structural

    @property
    def shape_mismatch(self) -> bool:
        return bool(self.structural)

    @property
    def first_divergence_tick(self) -> int | None:
        return self.discrepancies[0].tick if self.discrepancies else None

    def summary(self) -> dict[str, int]:
        counts = Counter(d.field.partition("[")[0] for d in self.discrepancies)
        return {"total": len(self.discrepancies), "structural": len(self.structural), **dict(sorted(counts.items()))}

    def to_dict(self) -> dict:
        return {
            "structural": [{"dimension": s.dimension, "left": s.left, "right": s.right} for s in self.structural],
            "discrepancies": [d.to_dict() for d in self.discrepancies],
            "summary": self.summary(),
            "first_divergence_tick": self.first_divergence_tick,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self, limit: int | None = 50) -> str:
        if self.is_empty:
            return "traces match: no discrepancies"
        lines = []
        for s in self.structural:
            lines.append(f"shape mismatch in {s.dimension}: left={s.left} right={s.right}")
        shown = self.discrepancies if limit is None else self.discrepancies[:limit]
        for d in shown:
            who = "global" if d.agent_id is None else f"agent {d.agent_id}"
            extra = "" if d.abs_diff is None else f" (|diff|={d.abs_diff:.3g})"
            lines.append(f"tick {d.tick} {who} {d.field}: left={d.left} right={d.right}{extra}")
        if len(shown) < len(self.discrepancies):
            lines.append(f"... {len(self.discrepancies) - len(shown)} more")
        summary = ", ".join(f"{k}={v}" for k, v in self.summary().items())
        lines.append(f"summary: {summary}; first divergence at tick {self.first_divergence_tick}")
        return "\n".join(lines)


def _structure(left: RunTrace, right: RunTrace) -> list[StructuralDiff]:
    out = []
    ld, rd = left.header.dims, right.header.dims
    for dim in ("N", "M", "K"):
        if ld[dim] != rd[dim]:
            out.append(StructuralDiff(dim, ld[dim], rd[dim]))
    if not out and left.header.agent_ids != right.header.agent_ids:
        out.append(StructuralDiff("agent_ids", left.header.agent_ids[:5], right.header.agent_ids[:5]))
    if len(left.records) != len(right.records):
        out.append(StructuralDiff("T", len(left.records), len(right.records)))
    elif left.records and left.records[0].tick != right.records[0].tick:
        out.append(StructuralDiff("first_tick", left.records[0].tick, right.records[0].tick))
    return out


def _describe_event(e) -> str:
    return f"{e.kind.value}->{e.target_id}@{e.subject}"


def _diff_record(tick: int, ids: list[int], lr: TraceRecord, rr: TraceRecord, tol: Mapping[str, float]) -> list[Discrepancy]:
    out = []
    for name in ("choice", "dilemma"):
        lv, rv = getattr(lr, name), getattr(rr, name)
        for i in np.flatnonzero(lv != rv).tolist():
            a, b = int(lv[i]), int(rv[i])
            if name == "dilemma":
                a, b = DilemmaStatus(a).label, DilemmaStatus(b).label
            out.append(Discrepancy(tick, ids[i], name, a, b))
    for name in REAL_FIELDS:
        lv, rv = getattr(lr, name), getattr(rr, name)
        delta = np.abs(lv - rv)
        bad = (delta > tol[name]) | (np.isnan(lv) != np.isnan(rv))
        for pos in np.argwhere(bad).tolist():
            i = pos[0]
            label = name if len(pos) == 1 else f"{name}[{pos[1]}]"
            t = tuple(pos)
            out.append(Discrepancy(tick, ids[i], label, float(lv[t]), float(rv[t]), float(delta[t])))
    lev = {e.source_id: _describe_event(e) for e in lr.events}
    rev = {e.source_id: _describe_event(e) for e in rr.events}
    for agent_id in sorted(set(lev) | set(rev)):
        a, b = lev.get(agent_id, "none"), rev.get(agent_id, "none")
        if a != b:
            out.append(Discrepancy(tick, agent_id, "event", a, b))
    return out


def diff_traces(left: RunTrace, right: RunTrace, tol: Mapping[str, float] | None = None) -> DiffReport:
    """Compare every agent parameter at every tick.

    Reals match when ``|left - right| <= tol[field]``; integers, dilemma
    labels and events must match exactly. A shape mismatch is reported as
    structural differences and no element-wise comparison is attempted.
    """
    tol = tolerances() if tol is None else {**tolerances(), **tol}
    structural = _structure(left, right)
    if structural:
        return DiffReport(structural=structural)
    ids = left.header.agent_ids
    found: list[Discrepancy] = []
    for lr, rr in zip(left.records, right.records):
        found.extend(_diff_record(lr.tick, ids, lr, rr, tol))
    found.sort(key=Discrepancy.sort_key)
    return DiffReport(discrepancies=found)
