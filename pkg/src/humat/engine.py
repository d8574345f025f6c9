"""Discrete-time HUMAT simulation.

Agents are stored column-wise: row ``i`` of every per-agent array belongs
to the agent at position ``i`` of ``network.agent_ids`` (ascending ids).
Alter representations live in arrays aligned with the network's directed
slots, so "ego's belief about alter" is one row per (ego, alter) pair.

A tick runs these phases in order:

1. sync believed choices with actual choices;
2. recompute social satisfaction, dissonance and dilemma for everyone;
3. agents act one at a time in activation order (effects apply at once);
4. sync again;
5. recompute social satisfaction, evaluations and dissonance;
6. everybody chooses simultaneously from the phase-5 evaluations;
7. settle: sync, social satisfaction, dissonance and dilemma for the new
   choices, so the stored state is self-consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import kernels
from .communication import blend
from .config import ActivationOrder, BeliefInit, ScenarioConfig
from .core import Alternative, DilemmaStatus, Humat, Motive, MotiveGroup, MotiveState
from .network import AlterRepresentation, CommunicationEvent, EventKind, SocialNetwork, generate_network
from .rng import RngState, activation_order, init_stream, network_seed


@dataclass(eq=False)
class ModelState:
    tick: int
    motives: tuple[Motive, ...]
    alternatives: tuple[Alternative, ...]
    network: SocialNetwork
    importance: np.ndarray  # (N, M)
    satisfaction: np.ndarray  # (N, M, K)
    aspiration: np.ndarray  # (N,)
    choice: np.ndarray  # (N,) int64
    dissonance: np.ndarray  # (N, K)
    dilemma: np.ndarray  # (N,) int8, DilemmaStatus values
    believed_choice: np.ndarray  # (S,) per directed slot
    believed_satisfaction: np.ndarray  # (S, M, K)
    believed_importance: np.ndarray  # (S, M)
    rng: RngState

    @property
    def agent_ids(self) -> np.ndarray:
        return self.network.agent_ids

    @property
    def n_agents(self) -> int:
        return self.network.n_agents

    @property
    def social_ids(self) -> list[int]:
        return [m.motive_id for m in self.motives if m.group is MotiveGroup.SOCIAL]

    def copy(self) -> "ModelState":
        arrays = {
            name: getattr(self, name).copy()
            for name in (
                "importance", "satisfaction", "aspiration", "choice", "dissonance", "dilemma",
                "believed_choice", "believed_satisfaction", "believed_importance",
            )
        }
        return replace(self, **arrays)

    def agent(self, agent_id: int) -> Humat:
        """Materialize one agent as a :class:`Humat` value (a detached copy)."""
        net = self.network
        i = net.position(agent_id)
        reps = {}
        for s in range(int(net.indptr[i]), int(net.indptr[i + 1])):
            alter = int(net.agent_ids[net.indices[s]])
            reps[alter] = AlterRepresentation(
                alter_id=alter,
                believed_choice=int(self.believed_choice[s]),
                believed_satisfactions=self.believed_satisfaction[s].tolist(),
                believed_importances=self.believed_importance[s].tolist(),
            )
        return Humat(
            agent_id=int(agent_id),
            motives=self.motives,
            motive_states=[
                MotiveState(float(imp), sat)
                for imp, sat in zip(self.importance[i].tolist(), self.satisfaction[i].tolist())
            ],
            current_choice=int(self.choice[i]),
            dissonance=self.dissonance[i].tolist(),
            dilemma=DilemmaStatus(int(self.dilemma[i])),
            aspiration=float(self.aspiration[i]),
            alter_representations=reps,
        )

    def agents(self) -> dict[int, Humat]:
        return {int(a): self.agent(int(a)) for a in self.agent_ids}

    def evaluations(self) -> np.ndarray:
        return kernels.evaluations(self.importance, self.satisfaction)

    def like_minded(self) -> np.ndarray:
        net = self.network
        return kernels.like_minded_fractions(self.choice, self.believed_choice, net.owner, net.degree)

    @classmethod
    def from_agents(
        cls,
        agents: dict[int, Humat],
        network: SocialNetwork,
        alternatives: tuple[Alternative, ...],
        tick: int = 0,
        rng: RngState | None = None,
    ) -> "ModelState":
        """Assemble a state from per-agent values; inverse of :meth:`agents`."""
        ids = network.agent_ids.tolist()
        first = agents[ids[0]]
        n_m, n_k = len(first.motive_states), len(alternatives)
        slots = network.n_slots
        bchoice = np.zeros(slots, dtype=np.int64)
        bsat = np.zeros((slots, n_m, n_k))
        bimp = np.zeros((slots, n_m))
        for s in range(slots):
            ego = ids[network.owner[s]]
            rep = agents[ego].alter_representations[ids[network.indices[s]]]
            bchoice[s] = rep.believed_choice
            bsat[s] = rep.believed_satisfactions
            bimp[s] = rep.believed_importances
        ordered = [agents[a] for a in ids]
        return cls(
            tick=tick,
            motives=first.motives,
            alternatives=alternatives,
            network=network,
            importance=np.array([h.importances for h in ordered], dtype=float).reshape(len(ids), n_m),
            satisfaction=np.array([[ms.satisfaction for ms in h.motive_states] for h in ordered], dtype=float),
            aspiration=np.array([h.aspiration for h in ordered], dtype=float),
            choice=np.array([h.current_choice for h in ordered], dtype=np.int64),
            dissonance=np.array([h.dissonance for h in ordered], dtype=float),
            dilemma=np.array([int(h.dilemma) for h in ordered], dtype=np.int8),
            believed_choice=bchoice,
            believed_satisfaction=bsat,
            believed_importance=bimp,
            rng=rng or RngState(0),
        )


# -- phases ----------------------------------------------------------------------


def _sync(state: ModelState) -> None:
    state.believed_choice = state.choice[state.network.indices]


def _write_social(state: ModelState) -> None:
    values = kernels.social_values(state.like_minded())
    rows = np.arange(state.n_agents)
    for m in state.social_ids:
        state.satisfaction[rows, m, state.choice] = values


def _refresh_dissonance(state: ModelState) -> None:
    state.dissonance = kernels.dissonances(state.importance, state.satisfaction)


def _classify(state: ModelState, epsilon: float) -> None:
    state.dilemma = kernels.classify(
        state.dissonance, state.importance, state.satisfaction, state.choice, state.social_ids, epsilon
    )


def _settle(state: ModelState, epsilon: float) -> None:
    _sync(state)
    _write_social(state)
    _refresh_dissonance(state)
    _classify(state, epsilon)


def _targets(state: ModelState, config: ScenarioConfig):
    """Per agent: inquiry slot and step, signal slot and step (slot -1 if isolated)."""
    net = state.network
    params = config.influence
    sw, aw, lr = params.similarity_weight, params.aspiration_weight, params.learning_rate
    n = state.n_agents
    believed_sim = kernels.similarities(state.importance[net.owner], state.believed_importance)
    persuasive = kernels.mix(believed_sim, state.aspiration[net.indices], sw, aw)
    gullible = kernels.mix(believed_sim, state.aspiration[net.owner], sw, aw)
    inq_slot = kernels.segment_argmax(persuasive, net.owner, n)
    sig_slot = kernels.segment_argmax(gullible, net.owner, n)

    has = inq_slot >= 0
    inq_step = np.zeros(n)
    inq_step[has] = lr * persuasive[inq_slot[has]]
    sig_step = np.zeros(n)
    sel = sig_slot[has]
    egos = np.flatnonzero(has)
    # The effect of a signal uses true importances, seen from the alter's side.
    true_sim = kernels.similarities(state.importance[net.indices[sel]], state.importance[egos])
    sig_step[has] = lr * kernels.mix(true_sim, state.aspiration[egos], sw, aw)
    return inq_slot, inq_step, sig_slot, sig_step


def _act_phase(state: ModelState, config: ScenarioConfig) -> list[CommunicationEvent]:
    net = state.network
    n = state.n_agents
    if config.activation_order is ActivationOrder.SHUFFLED_EACH_TICK:
        order = activation_order(state.rng.seed, state.tick, n).tolist()
    else:
        order = range(n)
    dilemma = state.dilemma.tolist()
    if not any(dilemma):
        return []

    inq_slot, inq_step, sig_slot, sig_step = (a.tolist() for a in _targets(state, config))
    indices, reverse, ids = net.slot_lists
    choice = state.choice.tolist()
    sat = state.satisfaction.tolist()  # mutated in place, written back below
    n_m = len(state.motives)
    refreshed: dict[tuple[int, int], list[float]] = {}
    events = []
    tick = state.tick
    social = int(DilemmaStatus.SOCIAL)

    for i in order:
        kind = dilemma[i]
        if not kind or inq_slot[i] < 0:
            continue
        subject = choice[i]
        if kind == social:
            slot = sig_slot[i]
            j = indices[slot]
            mover, source, step = sat[j], sat[i], sig_step[i]
            belief_slot = reverse[slot]
            event_kind = EventKind.SIGNAL
        else:
            slot = inq_slot[i]
            j = indices[slot]
            mover, source, step = sat[i], sat[j], inq_step[i]
            belief_slot = slot
            event_kind = EventKind.INQUIRE
        for m in range(n_m):
            mover[m][subject] = blend(mover[m][subject], source[m][subject], step)
        refreshed[(belief_slot, subject)] = [source[m][subject] for m in range(n_m)]
        events.append(CommunicationEvent(tick, ids[i], ids[j], event_kind, subject))

    state.satisfaction = np.array(sat, dtype=float).reshape(state.satisfaction.shape)
    if refreshed:
        keys = np.array(list(refreshed), dtype=np.int64)
        state.believed_satisfaction[keys[:, 0], :, keys[:, 1]] = np.array(list(refreshed.values()))
    return events


# -- public API --------------------------------------------------------------------


def initialize(config: ScenarioConfig) -> ModelState:
    """Create agents, network and alter representations; tick 0."""
    n, n_m, n_k = config.population, config.n_motives, config.n_alternatives
    given_choice = None
    if config.agents is None:
        rng = init_stream(config.seed)
        importance = rng.uniform(*config.init.importance, size=(n, n_m))
        satisfaction = rng.uniform(*config.init.satisfaction, size=(n, n_m, n_k))
        aspiration = rng.uniform(*config.init.aspiration, size=n)
    else:
        importance = np.array([a.importance for a in config.agents], dtype=float).reshape(n, n_m)
        satisfaction = np.array([a.satisfaction for a in config.agents], dtype=float).reshape(n, n_m, n_k)
        aspiration = np.array([a.aspiration for a in config.agents], dtype=float)
        given_choice = [a.choice for a in config.agents]

    net = generate_network(config.network, network_seed(config.seed))
    choice = kernels.choose(kernels.evaluations(importance, satisfaction))
    if given_choice is not None:
        choice = np.array([c if c is not None else d for c, d in zip(given_choice, choice.tolist())], dtype=np.int64)

    if config.belief_init is BeliefInit.PERFECT:
        believed_sat = satisfaction[net.indices]
        believed_imp = importance[net.indices]
    else:
        believed_sat = np.zeros((net.n_slots, n_m, n_k))
        believed_imp = np.zeros((net.n_slots, n_m))

    state = ModelState(
        tick=0,
        motives=config.motives,
        alternatives=config.alternatives,
        network=net,
        importance=importance,
        satisfaction=satisfaction,
        aspiration=aspiration,
        choice=choice,
        dissonance=np.zeros((n, n_k)),
        dilemma=np.zeros(n, dtype=np.int8),
        believed_choice=choice[net.indices],
        believed_satisfaction=believed_sat,
        believed_importance=believed_imp,
        rng=RngState(config.seed),
    )
    _settle(state, config.epsilon)
    return state


def step(state: ModelState, config: ScenarioConfig) -> tuple[ModelState, list[CommunicationEvent]]:
    """Advance one tick. ``state`` is left untouched; a new state is returned."""
    s = state.copy()
    eps = config.epsilon
    _sync(s)
    _write_social(s)
    _refresh_dissonance(s)
    _classify(s, eps)
    events = _act_phase(s, config)
    _sync(s)
    _write_social(s)
    evals = s.evaluations()
    _refresh_dissonance(s)
    s.choice = kernels.choose(evals, s.choice)
    _settle(s, eps)
    s.tick += 1
    return s, events


def run(config: ScenarioConfig, on_record: Callable | None = None):
    """Initialize and step ``config.ticks`` times, returning the full RunTrace."""
    from .harness.trace import trace_from

    return trace_from(initialize(config), config, config.ticks, on_record=on_record)
