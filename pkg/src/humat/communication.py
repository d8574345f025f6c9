"""Persuasiveness, target selection and the signal/inquire acts.

Target selection uses only what the ego believes (its alter
representations). The *effect* of a signal is computed from the true
states of both agents. Acts change satisfaction values for the subject
alternative only; importances are stable traits.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import DilemmaStatus, Humat
from .errors import NoNeighbors, NotNeighbor
from .network import AlterRepresentation, CommunicationEvent, EventKind


@dataclass(frozen=True)
class InfluenceParams:
    similarity_weight: float = 0.5
    aspiration_weight: float = 0.5
    learning_rate: float = 0.5

    def __post_init__(self):
        for name in ("similarity_weight", "aspiration_weight", "learning_rate"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.similarity_weight + self.aspiration_weight - 1.0) > 1e-12:
            raise ValueError("similarity_weight + aspiration_weight must equal 1")


def clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def importance_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """``1 - L1(a, b) / M`` for two importance vectors of length M."""
    dist = 0.0
    for x, y in zip(a, b):
        dist += abs(x - y)
    return 1.0 - dist / len(a)


def similarity(ego: Humat, rep: AlterRepresentation) -> float:
    return importance_similarity(ego.importances, rep.believed_importances)


def mix(similarity_value: float, aspiration: float, params: InfluenceParams) -> float:
    # Clamped so rounding in the convex combination cannot leave [0, 1].
    return clamp01(params.similarity_weight * similarity_value + params.aspiration_weight * aspiration)


def persuasiveness(ego: Humat, rep: AlterRepresentation, alter_aspiration: float, params: InfluenceParams) -> float:
    """How persuasive the alter behind ``rep`` is to ``ego``."""
    return mix(similarity(ego, rep), alter_aspiration, params)


def gullibility(ego: Humat, rep: AlterRepresentation, params: InfluenceParams) -> float:
    """How susceptible the alter behind ``rep`` is to ``ego``, judged from ego's beliefs."""
    return mix(similarity(ego, rep), ego.aspiration, params)


def _argmax_alter(ego: Humat, score: Callable[[AlterRepresentation], float]) -> int:
    if not ego.alter_representations:
        raise NoNeighbors(f"agent {ego.agent_id} has no alters")
    best_id, best = None, -math.inf
    for alter_id in sorted(ego.alter_representations):
        s = score(ego.alter_representations[alter_id])
        if s > best:
            best_id, best = alter_id, s
    return best_id


def select_inquiry_target(ego: Humat, params: InfluenceParams, aspirations: dict[int, float]) -> int:
    """Most persuasive alter; ties go to the lowest id.

    ``aspirations`` maps alter ids to their aspiration.
    """
    return _argmax_alter(ego, lambda rep: persuasiveness(ego, rep, aspirations[rep.alter_id], params))


def select_signal_target(ego: Humat, params: InfluenceParams) -> int:
    """Most gullible alter; ties go to the lowest id."""
    return _argmax_alter(ego, lambda rep: gullibility(ego, rep, params))


def blend(prior: float, source: float, step: float) -> float:
    """Move ``prior`` toward ``source`` by ``step`` in [0, 1].

    The result is clamped to the closed interval between the two values so
    floating-point rounding can never overshoot either endpoint.
    """
    if step == 0.0:
        return prior
    if step == 1.0:
        return source
    v = (1.0 - step) * prior + step * source
    lo, hi = (prior, source) if prior <= source else (source, prior)
    return lo if v < lo else hi if v > hi else v


def _moved(agent: Humat, toward: Humat, subject: int, step: float) -> Humat:
    moved = copy.deepcopy(agent)
    for ms, src in zip(moved.motive_states, toward.motive_states):
        ms.satisfaction[subject] = blend(ms.satisfaction[subject], src.satisfaction[subject], step)
    return moved


def _refresh_belief(agent: Humat, about: Humat, subject: int) -> None:
    rep = agent.alter_representations[about.agent_id]
    for m, ms in enumerate(about.motive_states):
        rep.believed_satisfactions[m][subject] = ms.satisfaction[subject]


def inquire(
    ego: Humat, alter: Humat, rep: AlterRepresentation, subject: int, params: InfluenceParams, tick: int = 0
) -> tuple[Humat, CommunicationEvent]:
    """Ego asks ``alter`` for advice and moves its own satisfactions toward the alter's."""
    if alter.agent_id not in ego.alter_representations:
        raise NotNeighbor(f"{alter.agent_id} is not a neighbor of {ego.agent_id}")
    p = persuasiveness(ego, rep, alter.aspiration, params)
    updated = _moved(ego, alter, subject, params.learning_rate * p)
    _refresh_belief(updated, alter, subject)
    return updated, CommunicationEvent(tick, ego.agent_id, alter.agent_id, EventKind.INQUIRE, subject)


def signal(
    ego: Humat, alter: Humat, subject: int, params: InfluenceParams, tick: int = 0
) -> tuple[Humat, CommunicationEvent]:
    """Ego persuades ``alter``; returns the updated alter."""
    if alter.agent_id not in ego.alter_representations or ego.agent_id not in alter.alter_representations:
        raise NotNeighbor(f"{alter.agent_id} is not a neighbor of {ego.agent_id}")
    q = mix(importance_similarity(alter.importances, ego.importances), ego.aspiration, params)
    updated = _moved(alter, ego, subject, params.learning_rate * q)
    _refresh_belief(updated, ego, subject)
    return updated, CommunicationEvent(tick, ego.agent_id, alter.agent_id, EventKind.SIGNAL, subject)


@dataclass(frozen=True)
class Act:
    """Outcome of :func:`act`: ``kind`` is None for "do nothing"."""

    kind: EventKind | None
    target: int | None = None

    @property
    def is_nothing(self) -> bool:
        return self.kind is None


NOTHING = Act(None)


def act(ego: Humat, params: InfluenceParams, aspirations: dict[int, float]) -> Act:
    """Decide whether to signal, inquire or do nothing, and to whom."""
    if ego.dilemma is DilemmaStatus.NO_DILEMMA or not ego.alter_representations:
        return NOTHING
    if ego.dilemma is DilemmaStatus.SOCIAL:
        return Act(EventKind.SIGNAL, select_signal_target(ego, params))
    return Act(EventKind.INQUIRE, select_inquiry_target(ego, params, aspirations))
