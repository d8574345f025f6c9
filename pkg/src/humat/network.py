"""Undirected social graph, ego-network queries and alter representations."""

from __future__ import annotations

import csv
import enum
import functools
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from .core import Humat
from .errors import InvalidSpec, UnknownAgent


@dataclass
class AlterRepresentation:
    """What an ego believes about one linked alter.

    ``believed_satisfactions`` is indexed ``[motive][alternative]``.
    """

    alter_id: int
    believed_choice: int
    believed_satisfactions: list[list[float]]
    believed_importances: list[float]


class EventKind(str, enum.Enum):
    SIGNAL = "signal"
    INQUIRE = "inquire"


@dataclass(frozen=True, slots=True)
class CommunicationEvent:
    tick: int
    source_id: int
    target_id: int
    kind: EventKind
    subject: int

    def to_dict(self) -> dict:
        return {
            "tick": self.tick,
            "source": self.source_id,
            "target": self.target_id,
            "kind": self.kind.value,
            "subject": self.subject,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "CommunicationEvent":
        return cls(int(d["tick"]), int(d["source"]), int(d["target"]), EventKind(d["kind"]), int(d["subject"]))


class SocialNetwork:
    """Immutable undirected graph over agent ids.

    Besides the canonical edge list (``i < j``, lexicographic) the network
    keeps a CSR adjacency over agent *positions* (index into the sorted
    ``agent_ids``). Every directed slot ``s`` in ``indices`` is one
    (ego, alter) pair; the engine aligns alter-representation arrays with
    these slots. ``reverse[s]`` is the slot of the opposite direction.
    """

    def __init__(self, agent_ids: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        ids = np.asarray(sorted(int(i) for i in agent_ids), dtype=np.int64)
        if ids.size and ids[0] < 0:
            raise InvalidSpec("agent ids must be non-negative")
        if ids.size > 1 and np.any(ids[1:] == ids[:-1]):
            raise InvalidSpec("agent ids must be unique")
        self.agent_ids = ids
        self._contiguous = bool(ids.size == 0 or (ids[0] == 0 and ids[-1] == ids.size - 1))

        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise InvalidSpec("self-loops are not allowed")
        pairs = np.sort(pairs, axis=1)
        if pairs.size:
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            if np.any(np.all(pairs[1:] == pairs[:-1], axis=1)):
                raise InvalidSpec("duplicate edges are not allowed")
        self.edges = pairs
        self.edges.setflags(write=False)

        n = ids.size
        pos = self.positions(pairs.ravel()).reshape(-1, 2) if pairs.size else pairs
        src = np.concatenate([pos[:, 0], pos[:, 1]])
        dst = np.concatenate([pos[:, 1], pos[:, 0]])
        order = np.lexsort((dst, src))
        self.owner = src[order]
        self.indices = dst[order]
        self.degree = np.bincount(self.owner, minlength=n).astype(np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.degree, out=self.indptr[1:])
        keys = self.owner * n + self.indices
        self.reverse = np.searchsorted(keys, self.indices * n + self.owner)
        for arr in (self.owner, self.indices, self.degree, self.indptr, self.reverse, self.agent_ids):
            arr.setflags(write=False)

    @functools.cached_property
    def slot_lists(self) -> tuple[list[int], list[int], list[int]]:
        """``(indices, reverse, agent_ids)`` as Python lists for scalar loops."""
        return self.indices.tolist(), self.reverse.tolist(), self.agent_ids.tolist()

    @property
    def n_agents(self) -> int:
        return int(self.agent_ids.size)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def n_slots(self) -> int:
        return int(self.indices.size)

    def positions(self, ids) -> np.ndarray:
        """Map agent ids to positions, raising UnknownAgent for strangers."""
        ids = np.asarray(ids, dtype=np.int64)
        if self._contiguous:
            bad = (ids < 0) | (ids >= self.agent_ids.size)
            if np.any(bad):
                raise UnknownAgent(int(ids[bad].ravel()[0]))
            return ids.copy()
        pos = np.searchsorted(self.agent_ids, ids)
        pos = np.minimum(pos, max(self.agent_ids.size - 1, 0))
        bad = self.agent_ids[pos] != ids if self.agent_ids.size else np.ones(ids.shape, bool)
        if np.any(bad):
            raise UnknownAgent(int(ids[bad].ravel()[0]))
        return pos

    def position(self, agent_id: int) -> int:
        return int(self.positions([agent_id])[0])

    def neighbor_slots(self, agent_id: int) -> range:
        p = self.position(agent_id)
        return range(int(self.indptr[p]), int(self.indptr[p + 1]))

    def slot(self, ego_id: int, alter_id: int) -> int | None:
        alter_pos = self.position(alter_id)
        slots = self.neighbor_slots(ego_id)
        k = int(np.searchsorted(self.indices[slots.start:slots.stop], alter_pos))
        if k < len(slots) and self.indices[slots.start + k] == alter_pos:
            return slots.start + k
        return None

    def has_edge(self, a: int, b: int) -> bool:
        return self.slot(a, b) is not None

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in self.edges]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialNetwork):
            return NotImplemented
        return np.array_equal(self.agent_ids, other.agent_ids) and np.array_equal(self.edges, other.edges)

    def __repr__(self) -> str:
        return f"SocialNetwork(n_agents={self.n_agents}, n_edges={self.n_edges})"


def neighbors(net: SocialNetwork, agent_id: int) -> list[int]:
    """Neighbors of ``agent_id`` in ascending id order."""
    slots = net.neighbor_slots(agent_id)
    return net.agent_ids[net.indices[slots.start:slots.stop]].tolist()


def sync_alter_choices(net: SocialNetwork, agents: Mapping[int, Humat]) -> dict[int, Humat]:
    """Perfect information: every ego learns the current choice of each alter.

    Only ``believed_choice`` is refreshed; believed satisfactions and
    importances change through communication alone. Returns new agents.
    """
    synced = {}
    for agent_id, agent in agents.items():
        nbrs = neighbors(net, agent_id)
        if sorted(agent.alter_representations) != nbrs:
            raise ValueError(f"alter representations of agent {agent_id} do not match its neighbors")
        reps = {
            j: replace(agent.alter_representations[j], believed_choice=agents[j].current_choice)
            for j in nbrs
        }
        synced[agent_id] = replace(agent, alter_representations=reps)
    return synced


def like_minded_fraction(net: SocialNetwork, ego: Humat) -> float:
    """Share of alters believed to hold the ego's current choice (1.0 if isolated)."""
    nbrs = neighbors(net, ego.agent_id)
    if not nbrs:
        return 1.0
    same = sum(1 for j in nbrs if ego.alter_representations[j].believed_choice == ego.current_choice)
    return same / len(nbrs)


@dataclass(frozen=True)
class NetworkSpec:
    """Generator recipe: ``complete``, ``ring``, ``erdos_renyi`` or ``watts_strogatz``.

    ``k`` is the lattice degree (even, < n) for ring and Watts-Strogatz;
    ``p`` the edge probability for Erdos-Renyi; ``beta`` the rewiring
    probability for Watts-Strogatz.
    """

    kind: str
    n: int
    k: int | None = None
    p: float | None = None
    beta: float | None = None

    def validate(self) -> None:
        if self.n < 1:
            raise InvalidSpec(f"n must be >= 1, got {self.n}")
        if self.kind == "complete":
            return
        if self.kind in ("ring", "watts_strogatz"):
            k = self.k
            if k is None or k < 0 or k % 2 or k >= self.n:
                raise InvalidSpec(f"{self.kind} needs an even degree k with 0 <= k < n, got k={k}, n={self.n}")
            if self.kind == "watts_strogatz" and (self.beta is None or not 0.0 <= self.beta <= 1.0):
                raise InvalidSpec(f"beta must lie in [0, 1], got {self.beta}")
            return
        if self.kind == "erdos_renyi":
            if self.p is None or not (math.isfinite(self.p) and 0.0 <= self.p <= 1.0):
                raise InvalidSpec(f"p must lie in [0, 1], got {self.p}")
            return
        raise InvalidSpec(f"unknown network kind {self.kind!r}")


NETWORK_KINDS = ("complete", "ring", "erdos_renyi", "watts_strogatz")


def generate_network(spec: NetworkSpec, seed: int) -> SocialNetwork:
    """Build the graph for ``spec`` on agent ids ``0..n-1``; fixed (spec, seed) gives a fixed graph."""
    spec.validate()
    n = spec.n
    if spec.kind == "complete":
        g = nx.complete_graph(n)
    elif spec.kind == "ring":
        g = nx.circulant_graph(n, range(1, spec.k // 2 + 1)) if spec.k else nx.empty_graph(n)
    elif spec.kind == "erdos_renyi":
        # For p so small that 1 - p rounds to 1 no edge can be drawn, and
        # networkx would divide by log(1 - p) == 0.
        g = nx.empty_graph(n) if 1.0 - spec.p == 1.0 else nx.fast_gnp_random_graph(n, spec.p, seed=seed)
    else:
        g = nx.watts_strogatz_graph(n, spec.k, spec.beta, seed=seed)
    return SocialNetwork(range(n), g.edges())


def write_edge_csv(net: SocialNetwork, path: str | Path) -> None:
    """One row per undirected edge, ``source_id < target_id``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source_id", "target_id"])
        writer.writerows(net.edge_list())


def read_edge_csv(path: str | Path, agent_ids: Iterable[int]) -> SocialNetwork:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return SocialNetwork(agent_ids, [(int(r["source_id"]), int(r["target_id"])) for r in rows])
