"""Scenario configuration: parsing, validation, overrides and digests.

Scenario files are YAML. A minimal document::

    seed: 42
    ticks: 50
    motives:
      - {name: experiential, group: experiential}
      - {name: social, group: social}
      - {name: values, group: value}
    alternatives: [A, B]
    population:
      size: 100
      init: {importance: [0.0, 1.0], satisfaction: [-1.0, 1.0], aspiration: [0.0, 1.0]}
    network: {kind: watts_strogatz, k: 10, beta: 0.1}
    influence: {similarity_weight: 0.5, aspiration_weight: 0.5, learning_rate: 0.5}

Instead of ``population.init`` an explicit ``population.agents`` table may
list ``importance`` (M values), ``satisfaction`` (M rows of K values),
``aspiration`` and optionally ``choice`` per agent.
"""

from __future__ import annotations

import copy
import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .communication import InfluenceParams
from .core import Alternative, Motive, MotiveGroup
from .errors import InvalidConfig, InvalidSpec
from .network import NETWORK_KINDS, NetworkSpec

MAX_SEED = 2**64 - 1


class ActivationOrder(str, enum.Enum):
    BY_ID_ASCENDING = "by_id_ascending"
    SHUFFLED_EACH_TICK = "shuffled_each_tick"


class BeliefInit(str, enum.Enum):
    PERFECT = "perfect"
    UNINFORMATIVE = "uninformative"


@dataclass(frozen=True)
class UniformInit:
    importance: tuple[float, float] = (0.0, 1.0)
    satisfaction: tuple[float, float] = (-1.0, 1.0)
    aspiration: tuple[float, float] = (0.0, 1.0)


@dataclass(frozen=True)
class AgentInit:
    importance: tuple[float, ...]
    satisfaction: tuple[tuple[float, ...], ...]
    aspiration: float
    choice: int | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    motives: tuple[Motive, ...]
    alternatives: tuple[Alternative, ...]
    population: int
    network: NetworkSpec
    influence: InfluenceParams = field(default_factory=InfluenceParams)
    init: UniformInit = field(default_factory=UniformInit)
    agents: tuple[AgentInit, ...] | None = None
    epsilon: float = 0.0
    ticks: int = 10
    seed: int = 0
    activation_order: ActivationOrder = ActivationOrder.BY_ID_ASCENDING
    belief_init: BeliefInit = BeliefInit.PERFECT

    @property
    def n_motives(self) -> int:
        return len(self.motives)

    @property
    def n_alternatives(self) -> int:
        return len(self.alternatives)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "seed": self.seed,
            "ticks": self.ticks,
            "epsilon": self.epsilon,
            "activation_order": self.activation_order.value,
            "belief_init": self.belief_init.value,
            "motives": [{"name": m.name, "group": m.group.value} for m in self.motives],
            "alternatives": [a.label for a in self.alternatives],
            "population": {"size": self.population},
            "network": {
                k: v
                for k, v in (("kind", self.network.kind), ("k", self.network.k), ("p", self.network.p), ("beta", self.network.beta))
                if v is not None
            },
            "influence": {
                "similarity_weight": self.influence.similarity_weight,
                "aspiration_weight": self.influence.aspiration_weight,
                "learning_rate": self.influence.learning_rate,
            },
        }
        if self.agents is None:
            d["population"]["init"] = {
                "importance": list(self.init.importance),
                "satisfaction": list(self.init.satisfaction),
                "aspiration": list(self.init.aspiration),
            }
        else:
            d["population"]["agents"] = [
                {
                    "importance": list(a.importance),
                    "satisfaction": [list(row) for row in a.satisfaction],
                    "aspiration": a.aspiration,
                    **({"choice": a.choice} if a.choice is not None else {}),
                }
                for a in self.agents
            ]
        return d

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form; insensitive to file layout and comments."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), allow_nan=False)
        return hashlib.sha256(text.encode()).hexdigest()

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ScenarioConfig":
        return parse_config(apply_overrides(self.to_dict(), overrides))


# -- parsing -------------------------------------------------------------------


def _get(d: Mapping, key: str, path: str, default: Any = ...) -> Any:
    if key in d:
        return d[key]
    if default is ...:
        raise InvalidConfig(f"{path}.{key}" if path else key, "required field is missing")
    return default


def _number(v: Any, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidConfig(path, f"expected a finite number, got {v!r}")
    return float(v)


def _integer(v: Any, path: str, lo: int | None = None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidConfig(path, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise InvalidConfig(path, f"must be >= {lo}, got {v}")
    return v


def _in_range(v: Any, lo: float, hi: float, path: str) -> float:
    x = _number(v, path)
    if not lo <= x <= hi:
        raise InvalidConfig(path, f"must lie in [{lo}, {hi}], got {x}")
    return x


def _range(v: Any, lo: float, hi: float, path: str) -> tuple[float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise InvalidConfig(path, "expected a [low, high] pair")
    a = _in_range(v[0], lo, hi, f"{path}[0]")
    b = _in_range(v[1], lo, hi, f"{path}[1]")
    if a > b:
        raise InvalidConfig(path, f"low {a} exceeds high {b}")
    return a, b


def _enum(cls, v: Any, path: str):
    try:
        return cls(v)
    except ValueError:
        choices = ", ".join(e.value for e in cls)
        raise InvalidConfig(path, f"expected one of {{{choices}}}, got {v!r}") from None


def _mapping(v: Any, path: str) -> Mapping:
    if not isinstance(v, Mapping):
        raise InvalidConfig(path, "expected a mapping")
    return v


def _check_keys(d: Mapping, allowed: set[str], path: str) -> None:
    for key in d:
        if key not in allowed:
            raise InvalidConfig(f"{path}.{key}" if path else str(key), "unknown field")


_TOP_KEYS = {
    "seed", "ticks", "epsilon", "activation_order", "belief_init", "motives",
    "alternatives", "population", "network", "networks", "influence",
}


def parse_config(doc: Any) -> ScenarioConfig:
    """Validate a plain document and build a ScenarioConfig.

    Raises:
        InvalidConfig: naming the offending field path.
    """
    doc = _mapping(doc, "")
    _check_keys(doc, _TOP_KEYS, "")

    raw_motives = _get(doc, "motives", "")
    if not isinstance(raw_motives, list) or not raw_motives:
        raise InvalidConfig("motives", "expected a non-empty list")
    motives = []
    for i, m in enumerate(raw_motives):
        m = _mapping(m, f"motives[{i}]")
        _check_keys(m, {"name", "group"}, f"motives[{i}]")
        name = str(_get(m, "name", f"motives[{i}]"))
        group = _enum(MotiveGroup, _get(m, "group", f"motives[{i}]"), f"motives[{i}].group")
        motives.append(Motive(i, name, group))
    if not any(m.group is MotiveGroup.SOCIAL for m in motives):
        raise InvalidConfig("motives", "at least one motive must belong to the social group")

    raw_alts = _get(doc, "alternatives", "")
    if not isinstance(raw_alts, list) or len(raw_alts) < 2:
        raise InvalidConfig("alternatives", "expected a list of at least 2 labels")
    alternatives = tuple(Alternative(i, str(a)) for i, a in enumerate(raw_alts))
    if len({a.label for a in alternatives}) != len(alternatives):
        raise InvalidConfig("alternatives", "labels must be unique")
    n_m, n_k = len(motives), len(alternatives)

    pop = _mapping(_get(doc, "population", ""), "population")
    _check_keys(pop, {"size", "init", "agents"}, "population")
    agents = None
    init = UniformInit()
    if "agents" in pop:
        if "init" in pop:
            raise InvalidConfig("population", "give either init or agents, not both")
        agents = tuple(_parse_agent(a, f"population.agents[{i}]", n_m, n_k) for i, a in enumerate(_list(pop["agents"], "population.agents")))
        size = _integer(pop.get("size", len(agents)), "population.size", lo=1)
        if size != len(agents):
            raise InvalidConfig("population.size", f"is {size} but {len(agents)} agents are listed")
    else:
        size = _integer(_get(pop, "size", "population"), "population.size", lo=1)
        raw_init = _mapping(pop.get("init", {}), "population.init")
        _check_keys(raw_init, {"importance", "satisfaction", "aspiration"}, "population.init")
        init = UniformInit(
            importance=_range(raw_init.get("importance", [0.0, 1.0]), 0.0, 1.0, "population.init.importance"),
            satisfaction=_range(raw_init.get("satisfaction", [-1.0, 1.0]), -1.0, 1.0, "population.init.satisfaction"),
            aspiration=_range(raw_init.get("aspiration", [0.0, 1.0]), 0.0, 1.0, "population.init.aspiration"),
        )
        if init.importance[1] == 0.0:
            raise InvalidConfig("population.init.importance", "upper bound must be positive")

    if "networks" in doc:
        nets = _list(doc["networks"], "networks")
        if len(nets) != 1 or "network" in doc:
            raise InvalidConfig("networks", "exactly one network is supported")
        raw_net = nets[0]
        net_path = "networks[0]"
    else:
        raw_net = _get(doc, "network", "")
        net_path = "network"
    raw_net = _mapping(raw_net, net_path)
    _check_keys(raw_net, {"kind", "k", "p", "beta"}, net_path)
    kind = _get(raw_net, "kind", net_path)
    if kind not in NETWORK_KINDS:
        raise InvalidConfig(f"{net_path}.kind", f"expected one of {{{', '.join(NETWORK_KINDS)}}}, got {kind!r}")
    spec = NetworkSpec(
        kind=kind,
        n=size,
        k=_integer(raw_net["k"], f"{net_path}.k") if "k" in raw_net else None,
        p=_number(raw_net["p"], f"{net_path}.p") if "p" in raw_net else None,
        beta=_number(raw_net["beta"], f"{net_path}.beta") if "beta" in raw_net else None,
    )
    try:
        spec.validate()
    except InvalidSpec as exc:
        raise InvalidConfig(net_path, str(exc)) from None

    raw_inf = _mapping(doc.get("influence", {}), "influence")
    _check_keys(raw_inf, {"similarity_weight", "aspiration_weight", "learning_rate"}, "influence")
    sw = _in_range(raw_inf.get("similarity_weight", 0.5), 0.0, 1.0, "influence.similarity_weight")
    aw = _in_range(raw_inf.get("aspiration_weight", 1.0 - sw), 0.0, 1.0, "influence.aspiration_weight")
    lr = _in_range(raw_inf.get("learning_rate", 0.5), 0.0, 1.0, "influence.learning_rate")
    try:
        influence = InfluenceParams(sw, aw, lr)
    except ValueError as exc:
        raise InvalidConfig("influence", str(exc)) from None

    epsilon = _number(doc.get("epsilon", 0.0), "epsilon")
    if epsilon < 0:
        raise InvalidConfig("epsilon", "must be >= 0")
    seed = _integer(doc.get("seed", 0), "seed", lo=0)
    if seed > MAX_SEED:
        raise InvalidConfig("seed", "must fit in 64 bits")

    return ScenarioConfig(
        motives=tuple(motives),
        alternatives=alternatives,
        population=size,
        network=spec,
        influence=influence,
        init=init,
        agents=agents,
        epsilon=epsilon,
        ticks=_integer(doc.get("ticks", 10), "ticks", lo=0),
        seed=seed,
        activation_order=_enum(ActivationOrder, doc.get("activation_order", "by_id_ascending"), "activation_order"),
        belief_init=_enum(BeliefInit, doc.get("belief_init", "perfect"), "belief_init"),
    )


def _list(v: Any, path: str) -> list:
    if not isinstance(v, list):
        raise InvalidConfig(path, "expected a list")
    return v


def _parse_agent(a: Any, path: str, n_m: int, n_k: int) -> AgentInit:
    a = _mapping(a, path)
    _check_keys(a, {"importance", "satisfaction", "aspiration", "choice"}, path)
    imp = _list(_get(a, "importance", path), f"{path}.importance")
    if len(imp) != n_m:
        raise InvalidConfig(f"{path}.importance", f"expected {n_m} values, got {len(imp)}")
    importance = tuple(_in_range(v, 0.0, 1.0, f"{path}.importance[{i}]") for i, v in enumerate(imp))
    if sum(importance) == 0.0:
        raise InvalidConfig(f"{path}.importance", "at least one importance must be positive")
    sat = _list(_get(a, "satisfaction", path), f"{path}.satisfaction")
    if len(sat) != n_m:
        raise InvalidConfig(f"{path}.satisfaction", f"expected {n_m} rows, got {len(sat)}")
    rows = []
    for i, row in enumerate(sat):
        row = _list(row, f"{path}.satisfaction[{i}]")
        if len(row) != n_k:
            raise InvalidConfig(f"{path}.satisfaction[{i}]", f"expected {n_k} values, got {len(row)}")
        rows.append(tuple(_in_range(v, -1.0, 1.0, f"{path}.satisfaction[{i}][{j}]") for j, v in enumerate(row)))
    choice = a.get("choice")
    if choice is not None:
        choice = _integer(choice, f"{path}.choice", lo=0)
        if choice >= n_k:
            raise InvalidConfig(f"{path}.choice", f"must be < {n_k}")
    return AgentInit(importance, tuple(rows), _in_range(_get(a, "aspiration", path), 0.0, 1.0, f"{path}.aspiration"), choice)


# -- files and overrides ---------------------------------------------------------


def parse_override(text: str) -> tuple[str, Any]:
    """Split ``a.b.c=value``; the value is read as a YAML scalar or flow collection."""
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise InvalidConfig(text, "override must look like key.path=value")
    return key.strip(), yaml.safe_load(raw) if raw.strip() else ""


def apply_overrides(doc: Mapping, overrides: Mapping[str, Any]) -> dict:
    out = copy.deepcopy(dict(doc))
    for dotted, value in overrides.items():
        parts = dotted.split(".")
        node = out
        for part in parts[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = node[part] = {}
            elif not isinstance(nxt, dict):
                raise InvalidConfig(dotted, f"{part} is not a mapping")
            node = nxt
        node[parts[-1]] = value
        if parts == ["population", "size"] and "agents" in out.get("population", {}):
            raise InvalidConfig(dotted, "cannot resize an explicit agent table")
    return out


def load_config(path: str | Path, overrides: Mapping[str, Any] | None = None) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidConfig("", f"cannot read {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InvalidConfig("", f"{path} is not valid YAML: {exc}") from None
    if overrides:
        doc = apply_overrides(_mapping(doc, ""), overrides)
    return parse_config(doc)


def dump_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(config.to_dict(), sort_keys=False))
