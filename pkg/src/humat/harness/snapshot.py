"""Full-state snapshots as canonical JSON.

Agents are sorted by id, alter representations by alter id and edges
lexicographically, so equal states always serialize to identical bytes.
Imported documents are untrusted: every type invariant is checked and a
violation raises :class:`ValidationFailure` naming the field path.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from ..core import Alternative, DilemmaStatus, Motive, MotiveGroup
from ..errors import InvalidSpec, IoFailure, SchemaMismatch, UnknownAgent, ValidationFailure
from ..network import SocialNetwork
from ..rng import RNG_ALGORITHM, RngState
from .canonical import canonical_json

SNAPSHOT_SCHEMA = "humat-snapshot/1"
SUPPORTED_SCHEMAS = (SNAPSHOT_SCHEMA,)


def snapshot_dict(state, config_digest: str = "") -> dict:
    net = state.network
    ids = net.agent_ids.tolist()
    imp = state.importance.tolist()
    sat = state.satisfaction.tolist()
    asp = state.aspiration.tolist()
    choice = state.choice.tolist()
    diss = state.dissonance.tolist()
    dil = state.dilemma.tolist()
    indices = net.indices.tolist()
    indptr = net.indptr.tolist()
    bchoice = state.believed_choice.tolist()
    bsat = state.believed_satisfaction.tolist()
    bimp = state.believed_importance.tolist()
    agents = []
    for i, agent_id in enumerate(ids):
        agents.append({
            "id": agent_id,
            "aspiration": asp[i],
            "current_choice": choice[i],
            "dilemma": DilemmaStatus(dil[i]).label,
            "dissonance": diss[i],
            "motive_states": [{"importance": w, "satisfaction": s} for w, s in zip(imp[i], sat[i])],
            "alter_representations": [
                {
                    "alter_id": ids[indices[s]],
                    "believed_choice": bchoice[s],
                    "believed_importances": bimp[s],
                    "believed_satisfactions": bsat[s],
                }
                for s in range(indptr[i], indptr[i + 1])
            ],
        })
    return {
        "schema_version": SNAPSHOT_SCHEMA,
        "config_digest": config_digest,
        "tick": state.tick,
        "rng_algorithm": state.rng.algorithm,
        "rng_state": state.rng.to_dict(),
        "motives": [{"id": m.motive_id, "name": m.name, "group": m.group.value} for m in state.motives],
        "alternatives": [{"id": a.alt_id, "label": a.label} for a in state.alternatives],
        "network": {"agent_ids": ids, "edges": net.edges.tolist()},
        "agents": agents,
    }


def export_snapshot(state, config_digest: str = "", destination: str | Path | None = None) -> bytes:
    """Serialize ``state``; also write the bytes to ``destination`` when given."""
    data = canonical_json(snapshot_dict(state, config_digest)) + b"\n"
    if destination is not None:
        try:
            Path(destination).write_bytes(data)
        except OSError as exc:
            raise IoFailure(f"cannot write snapshot to {destination}: {exc}") from exc
    return data


def read_snapshot_file(path: str | Path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read snapshot {path}: {exc}") from exc
    return import_snapshot(data)


def snapshot_meta(data: bytes) -> dict:
    """Header fields of a snapshot without building the state."""
    doc = _parse(data)
    return {k: doc.get(k) for k in ("schema_version", "config_digest", "tick", "rng_algorithm")}


# -- import ------------------------------------------------------------------------------


def _parse(data: bytes | str) -> dict:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaMismatch(f"snapshot is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaMismatch("snapshot must be a JSON object")
    version = doc.get("schema_version")
    if version not in SUPPORTED_SCHEMAS:
        raise SchemaMismatch(f"unsupported snapshot schema {version!r}")
    return doc


def _field(d: Any, key: str, path: str) -> Any:
    if not isinstance(d, dict):
        raise SchemaMismatch(f"{path} must be an object")
    if key not in d:
        raise SchemaMismatch(f"{path}.{key} is missing" if path else f"{key} is missing")
    return d[key]


def _list(v: Any, path: str, length: int | None = None) -> list:
    if not isinstance(v, list):
        raise ValidationFailure(path, "expected a list")
    if length is not None and len(v) != length:
        raise ValidationFailure(path, f"expected {length} entries, got {len(v)}")
    return v


def _real(v: Any, lo: float, hi: float, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationFailure(path, f"expected a finite number, got {v!r}")
    if not lo <= v <= hi:
        raise ValidationFailure(path, f"{v} outside [{lo}, {hi}]")
    return float(v)


def _int(v: Any, lo: int, hi: int | None, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationFailure(path, f"expected an integer, got {v!r}")
    if v < lo or (hi is not None and v > hi):
        raise ValidationFailure(path, f"{v} outside [{lo}, {hi}]")
    return v


def import_snapshot(data: bytes | str):
    """Parse and validate a snapshot into a ModelState ready to be stepped.

    Raises:
        SchemaMismatch: unparseable bytes, unknown schema or missing fields.
        ValidationFailure: a value breaks a type invariant.
    """
    from ..engine import ModelState

    doc = _parse(data)
    tick = _int(_field(doc, "tick", ""), 0, None, "tick")
    algorithm = _field(doc, "rng_algorithm", "")
    if algorithm != RNG_ALGORITHM:
        raise ValidationFailure("rng_algorithm", f"unsupported algorithm {algorithm!r}")
    seed = _int(_field(_field(doc, "rng_state", ""), "seed", "rng_state"), 0, 2**64 - 1, "rng_state.seed")

    motives = []
    for i, m in enumerate(_list(_field(doc, "motives", ""), "motives")):
        path = f"motives[{i}]"
        if _int(_field(m, "id", path), 0, None, f"{path}.id") != i:
            raise ValidationFailure(f"{path}.id", "motive ids must be 0..M-1 in order")
        try:
            group = MotiveGroup(_field(m, "group", path))
        except ValueError:
            raise ValidationFailure(f"{path}.group", f"unknown group {m['group']!r}") from None
        motives.append(Motive(i, str(_field(m, "name", path)), group))
    if not motives:
        raise ValidationFailure("motives", "at least one motive is required")
    if not any(m.group is MotiveGroup.SOCIAL for m in motives):
        raise ValidationFailure("motives", "no motive belongs to the social group")

    alternatives = []
    for i, a in enumerate(_list(_field(doc, "alternatives", ""), "alternatives")):
        path = f"alternatives[{i}]"
        if _int(_field(a, "id", path), 0, None, f"{path}.id") != i:
            raise ValidationFailure(f"{path}.id", "alternative ids must be 0..K-1 in order")
        alternatives.append(Alternative(i, str(_field(a, "label", path))))
    if len(alternatives) < 2:
        raise ValidationFailure("alternatives", "at least two alternatives are required")
    n_m, n_k = len(motives), len(alternatives)

    raw_net = _field(doc, "network", "")
    raw_ids = _list(_field(raw_net, "agent_ids", "network"), "network.agent_ids")
    ids = [_int(v, 0, None, f"network.agent_ids[{i}]") for i, v in enumerate(raw_ids)]
    edges = []
    for i, e in enumerate(_list(_field(raw_net, "edges", "network"), "network.edges")):
        e = _list(e, f"network.edges[{i}]", 2)
        edges.append((_int(e[0], 0, None, f"network.edges[{i}][0]"), _int(e[1], 0, None, f"network.edges[{i}][1]")))
    if not ids:
        raise ValidationFailure("network.agent_ids", "population is empty")
    try:
        net = SocialNetwork(ids, edges)
    except InvalidSpec as exc:
        raise ValidationFailure("network", str(exc)) from None
    except UnknownAgent as exc:
        raise ValidationFailure("network.edges", f"edge endpoint {exc.args[0]} is not an agent") from None

    raw_agents = _list(_field(doc, "agents", ""), "agents")
    n = net.n_agents
    if len(raw_agents) != n:
        raise ValidationFailure("agents", f"expected {n} agents, got {len(raw_agents)}")
    importance = np.zeros((n, n_m))
    satisfaction = np.zeros((n, n_m, n_k))
    aspiration = np.zeros(n)
    choice = np.zeros(n, dtype=np.int64)
    dissonance = np.zeros((n, n_k))
    dilemma = np.zeros(n, dtype=np.int8)
    bchoice = np.zeros(net.n_slots, dtype=np.int64)
    bsat = np.zeros((net.n_slots, n_m, n_k))
    bimp = np.zeros((net.n_slots, n_m))
    seen = set()
    ids_list = net.agent_ids.tolist()
    for k, a in enumerate(raw_agents):
        path = f"agents[{k}]"
        agent_id = _int(_field(a, "id", path), 0, None, f"{path}.id")
        try:
            i = net.position(agent_id)
        except UnknownAgent:
            raise ValidationFailure(f"{path}.id", f"agent {agent_id} is not in network.agent_ids") from None
        if i in seen:
            raise ValidationFailure(f"{path}.id", f"duplicate agent {agent_id}")
        seen.add(i)
        aspiration[i] = _real(_field(a, "aspiration", path), 0.0, 1.0, f"{path}.aspiration")
        choice[i] = _int(_field(a, "current_choice", path), 0, n_k - 1, f"{path}.current_choice")
        try:
            dilemma[i] = DilemmaStatus.from_label(_field(a, "dilemma", path))
        except ValueError as exc:
            raise ValidationFailure(f"{path}.dilemma", str(exc)) from None
        for j, v in enumerate(_list(_field(a, "dissonance", path), f"{path}.dissonance", n_k)):
            dissonance[i, j] = _real(v, 0.0, 1.0, f"{path}.dissonance[{j}]")
        states = _list(_field(a, "motive_states", path), f"{path}.motive_states", n_m)
        for m, ms in enumerate(states):
            mpath = f"{path}.motive_states[{m}]"
            importance[i, m] = _real(_field(ms, "importance", mpath), 0.0, 1.0, f"{mpath}.importance")
            for j, v in enumerate(_list(_field(ms, "satisfaction", mpath), f"{mpath}.satisfaction", n_k)):
                satisfaction[i, m, j] = _real(v, -1.0, 1.0, f"{mpath}.satisfaction[{j}]")
        if not importance[i].any():
            raise ValidationFailure(f"{path}.motive_states", "all importances are zero")

        reps = _list(_field(a, "alter_representations", path), f"{path}.alter_representations")
        expected = [ids_list[p] for p in net.indices[net.indptr[i]:net.indptr[i + 1]]]
        got = [
            _int(_field(r, "alter_id", f"{path}.alter_representations[{r_i}]"), 0, None,
                 f"{path}.alter_representations[{r_i}].alter_id")
            for r_i, r in enumerate(reps)
        ]
        if sorted(got) != expected:
            raise ValidationFailure(f"{path}.alter_representations", f"alters {got} do not match neighbors {expected}")
        base = int(net.indptr[i])
        for r_i, r in enumerate(reps):
            rpath = f"{path}.alter_representations[{r_i}]"
            s = base + expected.index(got[r_i])
            bchoice[s] = _int(_field(r, "believed_choice", rpath), 0, n_k - 1, f"{rpath}.believed_choice")
            for m, v in enumerate(_list(_field(r, "believed_importances", rpath), f"{rpath}.believed_importances", n_m)):
                bimp[s, m] = _real(v, 0.0, 1.0, f"{rpath}.believed_importances[{m}]")
            rows = _list(_field(r, "believed_satisfactions", rpath), f"{rpath}.believed_satisfactions", n_m)
            for m, row in enumerate(rows):
                for j, v in enumerate(_list(row, f"{rpath}.believed_satisfactions[{m}]", n_k)):
                    bsat[s, m, j] = _real(v, -1.0, 1.0, f"{rpath}.believed_satisfactions[{m}][{j}]")

    return ModelState(
        tick=tick,
        motives=tuple(motives),
        alternatives=tuple(alternatives),
        network=net,
        importance=importance,
        satisfaction=satisfaction,
        aspiration=aspiration,
        choice=choice,
        dissonance=dissonance,
        dilemma=dilemma,
        believed_choice=bchoice,
        believed_satisfaction=bsat,
        believed_importance=bimp,
        rng=RngState(seed, algorithm),
    )
