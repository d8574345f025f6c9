import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import base_doc, engine_trajectory, random_doc
from humat import kernels
from humat.communication import InfluenceParams, gullibility, persuasiveness
from humat.core import DilemmaStatus, choose, classify_dilemma, dissonances, evaluations
from humat.config import parse_config
from humat.errors import InvalidConfig
from humat.engine import ModelState, initialize, run, step
from humat.harness import diff_traces, export_snapshot
from humat.network import EventKind, neighbors
from humat.rng import activation_order
from oracle import trajectory


def dyad_doc(**overrides):
    """Agent 0 sits in a social dilemma; agent 1 is dissonance-free."""
    doc = base_doc(
        motives=[{"name": "belonging", "group": "social"}, {"name": "comfort", "group": "experiential"}],
        population={"agents": [
            {"importance": [1.0, 1.0], "satisfaction": [[0.0, 0.0], [0.9, -0.5]], "aspiration": 0.6, "choice": 0},
            {"importance": [1.0, 1.0], "satisfaction": [[0.0, 0.0], [0.2, -0.5]], "aspiration": 0.3, "choice": 1},
        ]},
        network={"kind": "complete"},
        ticks=3,
    )
    doc.update(overrides)
    return doc


class TestInitialize:
    def test_singleton(self):
        state = initialize(parse_config(base_doc(population={"size": 1}, network={"kind": "complete"})))
        assert state.network.n_edges == 0
        assert state.like_minded().tolist() == [1.0]
        social = state.social_ids[0]
        assert state.satisfaction[0, social, state.choice[0]] == 1.0

    def test_deterministic(self):
        cfg = parse_config(base_doc(population={"size": 20}, network={"kind": "watts_strogatz", "k": 4, "beta": 0.3}))
        assert export_snapshot(initialize(cfg)) == export_snapshot(initialize(cfg))

    def test_complete_representations(self):
        state = initialize(parse_config(base_doc(population={"size": 3}, network={"kind": "complete"})))
        for agent in state.agents().values():
            assert len(agent.alter_representations) == 2

    def test_initial_tick_and_consistency(self):
        state = initialize(parse_config(base_doc()))
        assert state.tick == 0
        for agent in state.agents().values():
            assert agent.dissonance == dissonances(agent)
            assert agent.dilemma is classify_dilemma(agent)

    def test_uninformative_beliefs(self):
        state = initialize(parse_config(base_doc(belief_init="uninformative")))
        assert not state.believed_satisfaction.any() and not state.believed_importance.any()
        assert np.array_equal(state.believed_choice, state.choice[state.network.indices])

    def test_agent_view_roundtrip(self):
        state = initialize(parse_config(base_doc()))
        again = ModelState.from_agents(state.agents(), state.network, state.alternatives, state.tick, state.rng)
        assert export_snapshot(again) == export_snapshot(state)


class TestStep:
    def test_does_not_mutate_input(self):
        cfg = parse_config(base_doc())
        state = initialize(cfg)
        before = export_snapshot(state)
        nxt, _ = step(state, cfg)
        assert export_snapshot(state) == before
        assert nxt.tick == state.tick + 1

    def test_dissonance_free_fixed_point(self):
        agents = [
            {"importance": [0.5, 0.5, 0.5], "satisfaction": [[0.5, -0.2], [0.3, -0.9], [0.1, -0.4]], "aspiration": 0.5}
            for _ in range(4)
        ]
        cfg = parse_config(base_doc(population={"agents": agents}, network={"kind": "complete"}))
        state = initialize(cfg)
        assert not state.dissonance[np.arange(4), state.choice].any()
        nxt, events = step(state, cfg)
        assert events == []
        assert np.array_equal(nxt.choice, state.choice)
        assert np.array_equal(nxt.satisfaction, state.satisfaction)

    def test_forced_dyad(self):
        cfg = parse_config(dyad_doc())
        state = initialize(cfg)
        assert state.dilemma.tolist() == [DilemmaStatus.SOCIAL, DilemmaStatus.NO_DILEMMA]
        _, events = step(state, cfg)
        assert [(e.source_id, e.target_id, e.kind) for e in events] == [(0, 1, EventKind.SIGNAL)]

    def test_ring_of_three_matches_oracle(self):
        doc = base_doc(population={"size": 3}, network={"kind": "ring", "k": 2}, ticks=2, seed=2024)
        assert engine_trajectory(doc) == trajectory(doc)


class TestRun:
    def test_zero_ticks(self):
        trace = run(parse_config(base_doc(ticks=0)))
        assert [r.tick for r in trace.records] == [0]
        assert trace.records[0].events == []

    def test_record_count_and_order(self):
        trace = run(parse_config(base_doc(ticks=7)))
        assert [r.tick for r in trace.records] == list(range(8))
        assert trace.final_state.tick == 7

    def test_identical_configs(self):
        cfg = parse_config(base_doc(activation_order="shuffled_each_tick"))
        assert run(cfg).to_bytes() == run(cfg).to_bytes()

    def test_seed_changes_shuffled_schedule(self):
        a = parse_config(base_doc(activation_order="shuffled_each_tick", seed=1))
        b = parse_config(base_doc(activation_order="shuffled_each_tick", seed=2))
        orders = lambda cfg: [activation_order(cfg.seed, t, cfg.population).tolist() for t in range(cfg.ticks)]
        assert orders(a) != orders(b)
        assert not diff_traces(run(a), run(b)).is_empty

    def test_by_id_is_rng_free_after_init(self):
        left = run(parse_config(dyad_doc(seed=1, ticks=5)))
        right = run(parse_config(dyad_doc(seed=99, ticks=5)))
        assert diff_traces(left, right).is_empty

    def test_on_record_callback(self):
        seen = []
        run(parse_config(base_doc(ticks=3)), on_record=lambda r: seen.append(r.tick))
        assert seen == [0, 1, 2, 3]


def random_state(seed):
    rng = random.Random(seed)
    doc = random_doc(rng, max_n=8)
    cfg = parse_config(doc)
    state = initialize(cfg)
    for _ in range(rng.randint(0, 3)):
        state, _ = step(state, cfg)
    return cfg, state


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_vector_kernels_match_scalar_core(seed):
    cfg, state = random_state(seed)
    evals = state.evaluations()
    diss = kernels.dissonances(state.importance, state.satisfaction)
    chosen = kernels.choose(evals, state.choice)
    net = state.network
    for i, agent in state.agents().items():
        assert evals[i].tolist() == evaluations(agent)
        assert diss[i].tolist() == dissonances(agent)
        assert int(chosen[i]) == choose(agent)
        assert DilemmaStatus(int(state.dilemma[i])) is classify_dilemma(agent, cfg.epsilon)
        for s in range(int(net.indptr[i]), int(net.indptr[i + 1])):
            j = int(net.indices[s])
            rep = agent.alter_representations[j]
            sim = kernels.similarities(state.importance[i:i + 1], state.believed_importance[s:s + 1])
            p = kernels.mix(sim, state.aspiration[j:j + 1], cfg.influence.similarity_weight, cfg.influence.aspiration_weight)
            g = kernels.mix(sim, state.aspiration[i:i + 1], cfg.influence.similarity_weight, cfg.influence.aspiration_weight)
            assert float(p[0]) == persuasiveness(agent, rep, float(state.aspiration[j]), cfg.influence)
            assert float(g[0]) == gullibility(agent, rep, cfg.influence)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tick_invariants(seed):
    rng = random.Random(seed)
    cfg = parse_config(random_doc(rng, max_n=8))
    state = initialize(cfg)
    edges = state.network.edge_list()
    for _ in range(cfg.ticks):
        nxt, events = step(state, cfg)
        assert len(events) <= cfg.population
        sources = [e.source_id for e in events]
        assert len(sources) == len(set(sources))
        for e in events:
            assert e.tick == state.tick
            assert e.target_id in neighbors(nxt.network, e.source_id)
            assert e.subject == state.choice[e.source_id]
        assert nxt.network.edge_list() == edges
        assert nxt.tick == state.tick + 1
        assert np.all((nxt.satisfaction >= -1) & (nxt.satisfaction <= 1))
        assert np.all((nxt.dissonance >= 0) & (nxt.dissonance <= 1))
        assert np.all((nxt.choice >= 0) & (nxt.choice < cfg.n_alternatives))
        assert np.array_equal(nxt.importance, state.importance)
        assert np.array_equal(nxt.aspiration, state.aspiration)
        state = nxt


def test_rejects_unknown_activation_order():
    with pytest.raises(InvalidConfig):
        parse_config(base_doc(activation_order="random"))


def test_influence_params_in_config():
    cfg = parse_config(base_doc())
    assert cfg.influence == InfluenceParams(0.5, 0.5, 0.5)


def test_fixed_point_when_initial_choices_are_stable():
    """Sign-consistent states whose choices already maximize evaluation never move."""
    from helpers import sign_consistent_scenarios

    stable = 0
    for doc in sign_consistent_scenarios(11, 120):
        cfg = parse_config(doc)
        state = initialize(cfg)
        if not np.array_equal(kernels.choose(state.evaluations(), state.choice), state.choice):
            continue
        stable += 1
        start = export_snapshot(state)
        for _ in range(cfg.ticks):
            state, events = step(state, cfg)
            assert events == []
        assert json.loads(export_snapshot(state))["agents"] == json.loads(start)["agents"]
    assert stable > 20
