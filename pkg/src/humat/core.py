"""Motive evaluation, dissonance and dilemma classification for a single agent.

Everything here is a pure function of its arguments. Sums over motives are
accumulated left to right in motive-id order starting from ``0.0``; the
array engine reproduces exactly this order so that both paths agree to the
last bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

from .errors import NoSocialMotive, ZeroImportance

if TYPE_CHECKING:
    from .network import AlterRepresentation


class MotiveGroup(str, enum.Enum):
    EXPERIENTIAL = "experiential"
    SOCIAL = "social"
    VALUE = "value"


class DilemmaStatus(enum.IntEnum):
    NO_DILEMMA = 0
    SOCIAL = 1
    NON_SOCIAL = 2

    @property
    def label(self) -> str:
        return _DILEMMA_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "DilemmaStatus":
        for status, name in _DILEMMA_LABELS.items():
            if name == label:
                return status
        raise ValueError(f"unknown dilemma label {label!r}")


_DILEMMA_LABELS = {
    DilemmaStatus.NO_DILEMMA: "none",
    DilemmaStatus.SOCIAL: "social",
    DilemmaStatus.NON_SOCIAL: "non_social",
}


@dataclass(frozen=True)
class Motive:
    motive_id: int
    name: str
    group: MotiveGroup


@dataclass(frozen=True)
class Alternative:
    alt_id: int
    label: str


@dataclass
class MotiveState:
    """Importance of one motive and how well each alternative satisfies it.

    Attributes:
        importance: Weight in [0, 1].
        satisfaction: One valence in [-1, 1] per alternative, indexed by alt_id.
    """

    importance: float
    satisfaction: list[float]


@dataclass
class Humat:
    """One agent as a plain value object.

    The engine stores agents column-wise in arrays; this class is the
    per-agent view used by the scalar API, the tests and snapshot tooling.
    """

    agent_id: int
    motives: tuple[Motive, ...]
    motive_states: list[MotiveState]
    current_choice: int
    dissonance: list[float]
    dilemma: DilemmaStatus = DilemmaStatus.NO_DILEMMA
    aspiration: float = 0.0
    alter_representations: dict[int, "AlterRepresentation"] = field(default_factory=dict)

    @property
    def n_alternatives(self) -> int:
        return len(self.motive_states[0].satisfaction)

    @property
    def importances(self) -> list[float]:
        return [ms.importance for ms in self.motive_states]

    def satisfactions_for(self, alt: int) -> list[float]:
        return [ms.satisfaction[alt] for ms in self.motive_states]


def weighted_mean(importances: Sequence[float], values: Sequence[float]) -> float:
    num = 0.0
    den = 0.0
    for w, v in zip(importances, values):
        num += w * v
        den += w
    if den == 0.0:
        raise ZeroImportance("sum of motive importances is zero")
    return num / den


def evaluation(agent: Humat, alt: int) -> float:
    """Importance-weighted mean satisfaction of ``alt``, in [-1, 1]."""
    return weighted_mean(agent.importances, agent.satisfactions_for(alt))


def evaluations(agent: Humat) -> list[float]:
    return [evaluation(agent, a) for a in range(agent.n_alternatives)]


def pros_cons(agent: Humat, alt: int) -> tuple[float, float]:
    """Total importance of motives ``alt`` satisfies (pros) and dissatisfies (cons).

    Motives with zero satisfaction are neutral and count toward neither.
    """
    pros = 0.0
    cons = 0.0
    for ms in agent.motive_states:
        s = ms.satisfaction[alt]
        if s > 0.0:
            pros += ms.importance
        elif s < 0.0:
            cons += ms.importance
    return pros, cons


def balance_ratio(pros: float, cons: float) -> float:
    total = pros + cons
    if total == 0.0:
        return 0.0
    return 2.0 * min(pros, cons) / total


def dissonance_strength(agent: Humat, alt: int) -> float:
    """``2 min(P, C) / (P + C)``: 0 without conflict, 1 when pros balance cons."""
    return balance_ratio(*pros_cons(agent, alt))


def dissonances(agent: Humat) -> list[float]:
    return [dissonance_strength(agent, a) for a in range(agent.n_alternatives)]


def pick_choice(values: Sequence[float], current: int | None = None) -> int:
    """Argmax of ``values``; keeps ``current`` on a tie, else the lowest index."""
    best = max(values)
    if current is not None and 0 <= current < len(values) and values[current] == best:
        return current
    return next(i for i, v in enumerate(values) if v == best)


def choose(agent: Humat) -> int:
    return pick_choice(evaluations(agent), agent.current_choice)


def social_satisfaction(like_minded_fraction: float) -> float:
    """Map the share of like-minded alters onto the [-1, 1] valence scale."""
    if not 0.0 <= like_minded_fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {like_minded_fraction}")
    return 2.0 * like_minded_fraction - 1.0


def social_motive_ids(motives: Sequence[Motive]) -> list[int]:
    return [m.motive_id for m in motives if m.group is MotiveGroup.SOCIAL]


def social_need_dissatisfied(agent: Humat, alt: int) -> bool:
    """True when the importance-weighted social satisfaction of ``alt`` is negative.

    The sign of the weighted sum decides, which equals the sign of the
    weighted mean and treats all-zero social importances as satisfied.
    """
    social = social_motive_ids(agent.motives)
    if not social:
        raise NoSocialMotive("scenario defines no social motive")
    total = 0.0
    for m in social:
        ms = agent.motive_states[m]
        total += ms.importance * ms.satisfaction[alt]
    return total < 0.0


def classify_dilemma(agent: Humat, epsilon: float = 0.0) -> DilemmaStatus:
    if not social_motive_ids(agent.motives):
        raise NoSocialMotive("scenario defines no social motive")
    if agent.dissonance[agent.current_choice] <= epsilon:
        return DilemmaStatus.NO_DILEMMA
    if social_need_dissatisfied(agent, agent.current_choice):
        return DilemmaStatus.SOCIAL
    return DilemmaStatus.NON_SOCIAL
