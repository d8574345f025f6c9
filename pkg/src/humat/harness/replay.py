"""Re-run a model from an imported snapshot and compare with a golden trace."""

from __future__ import annotations

from ..config import ScenarioConfig
from ..errors import ShapeMismatch
from .diff import DiffReport, StructuralDiff, diff_traces
from .snapshot import import_snapshot
from .trace import RunTrace, trace_from


def replay_check(snapshot, golden: RunTrace, config: ScenarioConfig, tol=None) -> DiffReport:
    """Step ``snapshot`` (bytes or a ModelState) to the golden trace's final tick and diff.

    An empty report certifies that this engine reproduces the golden suffix.
    """
    state = import_snapshot(snapshot) if isinstance(snapshot, (bytes, str)) else snapshot
    first, last = golden.records[0].tick, golden.last_tick
    if not first <= state.tick <= last:
        raise ValueError(f"snapshot tick {state.tick} outside golden range [{first}, {last}]")
    dims = {"N": state.n_agents, "M": len(state.motives), "K": len(state.alternatives)}
    expected = {"N": config.population, "M": config.n_motives, "K": config.n_alternatives}
    structural = [StructuralDiff(k, dims[k], expected[k]) for k in dims if dims[k] != expected[k]]
    if structural:
        return DiffReport(structural=structural)
    replayed = trace_from(state, config, last)
    return diff_traces(golden.suffix(state.tick), replayed, tol)


def require_same_shape(report: DiffReport) -> DiffReport:
    if report.shape_mismatch:
        raise ShapeMismatch("; ".join(f"{s.dimension}: {s.left} != {s.right}" for s in report.structural))
    return report
