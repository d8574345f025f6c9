import random

import numpy as np

from humat import Humat, Motive, MotiveGroup, MotiveState, initialize, parse_config, step
from humat.core import DilemmaStatus
from humat.network import AlterRepresentation

THREE_MOTIVES = [
    {"name": "experiential", "group": "experiential"},
    {"name": "social", "group": "social"},
    {"name": "values", "group": "value"},
]


def base_doc(**overrides):
    doc = {
        "seed": 7,
        "ticks": 5,
        "epsilon": 0.0,
        "motives": [dict(m) for m in THREE_MOTIVES],
        "alternatives": ["A", "B"],
        "population": {"size": 6},
        "network": {"kind": "ring", "k": 2},
        "influence": {"similarity_weight": 0.5, "aspiration_weight": 0.5, "learning_rate": 0.5},
    }
    doc.update(overrides)
    return doc


def make_humat(importances, satisfactions, groups=None, choice=0, agent_id=0, aspiration=0.5,
               dissonance=None, dilemma=DilemmaStatus.NO_DILEMMA, alters=None):
    """Build a Humat from an importance vector and a motive x alternative matrix."""
    if groups is None:
        groups = [MotiveGroup.SOCIAL] + [MotiveGroup.EXPERIENTIAL] * (len(importances) - 1)
    motives = tuple(Motive(i, f"m{i}", MotiveGroup(g)) for i, g in enumerate(groups))
    k = len(satisfactions[0])
    return Humat(
        agent_id=agent_id,
        motives=motives,
        motive_states=[MotiveState(float(w), [float(x) for x in row]) for w, row in zip(importances, satisfactions)],
        current_choice=choice,
        dissonance=list(dissonance) if dissonance is not None else [0.0] * k,
        dilemma=dilemma,
        aspiration=aspiration,
        alter_representations=dict(alters or {}),
    )


def rep_of(alter: Humat, believed_choice=None) -> AlterRepresentation:
    return AlterRepresentation(
        alter_id=alter.agent_id,
        believed_choice=alter.current_choice if believed_choice is None else believed_choice,
        believed_satisfactions=[list(ms.satisfaction) for ms in alter.motive_states],
        believed_importances=list(alter.importances),
    )


def random_doc(rng: random.Random, max_n=5, max_t=10):
    """A small random scenario covering every option the engine exposes."""
    n = rng.randint(1, max_n)
    m = rng.randint(1, 4)
    groups = ["social"] + [rng.choice(["experiential", "social", "value"]) for _ in range(m - 1)]
    rng.shuffle(groups)
    k = rng.randint(2, 3)
    kinds = ["complete", "erdos_renyi", "ring", "watts_strogatz"]
    kind = rng.choice(kinds)
    if kind in ("ring", "watts_strogatz"):
        k_deg = rng.choice([d for d in range(0, n, 2)])
        net = {"kind": kind, "k": k_deg}
        if kind == "watts_strogatz":
            net["beta"] = rng.choice([0.0, 0.3, 1.0])
    elif kind == "erdos_renyi":
        net = {"kind": kind, "p": rng.choice([0.0, 0.4, 0.8, 1.0])}
    else:
        net = {"kind": kind}
    sw = rng.choice([0.0, 0.3, 0.5, 1.0])
    return {
        "seed": rng.randrange(2**32),
        "ticks": rng.randint(0, max_t),
        "epsilon": rng.choice([0.0, 0.0, 0.1, 0.3]),
        "activation_order": rng.choice(["by_id_ascending", "shuffled_each_tick"]),
        "belief_init": rng.choice(["perfect", "uninformative"]),
        "motives": [{"name": f"m{i}", "group": g} for i, g in enumerate(groups)],
        "alternatives": [chr(65 + i) for i in range(k)],
        "population": {
            "size": n,
            "init": {"importance": [rng.choice([0.0, 0.1]), 1.0], "satisfaction": [-1.0, 1.0], "aspiration": [0.0, 1.0]},
        },
        "network": net,
        "influence": {"similarity_weight": sw, "aspiration_weight": 1.0 - sw, "learning_rate": rng.choice([0.0, 0.4, 1.0])},
    }


def plain_state(state):
    """Engine state in the oracle's plain-list layout."""
    net = state.network
    ptr = net.indptr.tolist()
    bc = state.believed_choice.tolist()
    bs = state.believed_satisfaction.tolist()
    bi = state.believed_importance.tolist()
    return {
        "tick": state.tick,
        "choice": state.choice.tolist(),
        "sat": state.satisfaction.tolist(),
        "diss": state.dissonance.tolist(),
        "dilemma": state.dilemma.tolist(),
        "evaluation": state.evaluations().tolist(),
        "social": (2.0 * state.like_minded() - 1.0).tolist(),
        "believed_choice": [bc[ptr[i]:ptr[i + 1]] for i in range(state.n_agents)],
        "believed_sat": [bs[ptr[i]:ptr[i + 1]] for i in range(state.n_agents)],
        "believed_imp": [bi[ptr[i]:ptr[i + 1]] for i in range(state.n_agents)],
    }


def engine_trajectory(doc):
    config = parse_config(doc)
    state = initialize(config)
    states = [plain_state(state)]
    events = []
    for _ in range(config.ticks):
        state, evs = step(state, config)
        events.append([(e.tick, e.source_id, e.target_id, e.kind.value, e.subject) for e in evs])
        states.append(plain_state(state))
    events.append([])
    return states, events


def sign_consistent(state):
    sat = state.satisfaction
    return bool(np.all((sat >= 0).all(axis=1) | (sat <= 0).all(axis=1)))


def sign_consistent_scenarios(seed, count):
    """Random explicit scenarios whose initialized state has one sign per (agent, alternative)."""
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        n, m, k = rng.randint(1, 8), rng.randint(1, 4), rng.randint(2, 3)
        groups = ["social"] + [rng.choice(["experiential", "social", "value"]) for _ in range(m - 1)]
        agents = []
        for _ in range(n):
            signs = [rng.choice([-1.0, 1.0]) for _ in range(k)]
            agents.append({
                "importance": [rng.uniform(0.05, 1.0) for _ in range(m)],
                "satisfaction": [[signs[a] * rng.uniform(0.0, 1.0) for a in range(k)] for _ in range(m)],
                "aspiration": rng.random(),
            })
        doc = {
            "seed": rng.randrange(2**32), "ticks": 10,
            "activation_order": rng.choice(["by_id_ascending", "shuffled_each_tick"]),
            "motives": [{"name": f"m{j}", "group": g} for j, g in enumerate(groups)],
            "alternatives": [f"alt{j}" for j in range(k)],
            "population": {"agents": agents},
            "network": rng.choice([{"kind": "complete"}, {"kind": "erdos_renyi", "p": 0.5}]),
        }
        if sign_consistent(initialize(parse_config(doc))):
            found.append(doc)
    return found
