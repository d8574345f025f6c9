"""Straight-line reference implementation of initialize + step.

Written against the documented model rules only. It shares no code with
the ``humat`` package: plain Python floats and lists, one agent at a time,
no vectorization. numpy and networkx are used solely for the documented
random draws and graph generators, so both implementations see the same
random inputs.
"""

import networkx as nx
import numpy as np


def _gen(seed, *key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _graph(net, n, seed):
    gseed = int(np.random.SeedSequence(seed, spawn_key=(1,)).generate_state(1)[0])
    kind = net["kind"]
    if kind == "complete":
        g = nx.complete_graph(n)
    elif kind == "ring":
        k = net["k"]
        g = nx.circulant_graph(n, range(1, k // 2 + 1)) if k else nx.empty_graph(n)
    elif kind == "erdos_renyi":
        g = nx.fast_gnp_random_graph(n, net["p"], seed=gseed)
    else:
        g = nx.watts_strogatz_graph(n, net["k"], net["beta"], seed=gseed)
    adj = {i: [] for i in range(n)}
    for a, b in g.edges():
        adj[a].append(b)
        adj[b].append(a)
    return {i: sorted(v) for i, v in adj.items()}


def _evaluate(agent, alt):
    num = 0.0
    den = 0.0
    for w, row in zip(agent["imp"], agent["sat"]):
        num += w * row[alt]
        den += w
    return num / den


def _dissonance(agent, alt):
    pros = 0.0
    cons = 0.0
    for w, row in zip(agent["imp"], agent["sat"]):
        if row[alt] > 0:
            pros += w
        elif row[alt] < 0:
            cons += w
    if pros + cons == 0:
        return 0.0
    return 2.0 * min(pros, cons) / (pros + cons)


def _pick(values, current):
    best = max(values)
    if current is not None and values[current] == best:
        return current
    return values.index(best)


def _sim(a, b):
    d = 0.0
    for x, y in zip(a, b):
        d += abs(x - y)
    return 1.0 - d / len(a)


def _unit(x):
    return min(1.0, max(0.0, x))


def _move(x, y, t):
    if t == 0.0:
        return x
    if t == 1.0:
        return y
    v = (1.0 - t) * x + t * y
    return min(max(v, min(x, y)), max(x, y))


class Oracle:
    def __init__(self, doc):
        self.doc = doc
        self.social = [i for i, m in enumerate(doc["motives"]) if m["group"] == "social"]
        self.M = len(doc["motives"])
        self.K = len(doc["alternatives"])
        pop = doc["population"]
        self.N = pop.get("size", len(pop.get("agents", [])))
        inf = doc.get("influence", {})
        self.sw = inf.get("similarity_weight", 0.5)
        self.aw = inf.get("aspiration_weight", 1.0 - self.sw)
        self.lr = inf.get("learning_rate", 0.5)
        self.eps = doc.get("epsilon", 0.0)
        self.seed = doc.get("seed", 0)
        self.shuffled = doc.get("activation_order", "by_id_ascending") == "shuffled_each_tick"
        self.tick = 0

        N, M, K = self.N, self.M, self.K
        if "agents" in pop:
            rows = pop["agents"]
            imp = [list(map(float, a["importance"])) for a in rows]
            sat = [[list(map(float, r)) for r in a["satisfaction"]] for a in rows]
            asp = [float(a["aspiration"]) for a in rows]
            given = [a.get("choice") for a in rows]
        else:
            init = pop.get("init", {})
            g = _gen(self.seed, 0)
            imp = g.uniform(*init.get("importance", [0.0, 1.0]), size=(N, M)).tolist()
            sat = g.uniform(*init.get("satisfaction", [-1.0, 1.0]), size=(N, M, K)).tolist()
            asp = g.uniform(*init.get("aspiration", [0.0, 1.0]), size=N).tolist()
            given = [None] * N
        self.adj = _graph(doc["network"], N, self.seed)
        self.agents = []
        for i in range(N):
            a = {"imp": imp[i], "sat": sat[i], "asp": asp[i]}
            evals = [_evaluate(a, k) for k in range(K)]
            a["choice"] = given[i] if given[i] is not None else _pick(evals, None)
            self.agents.append(a)
        perfect = doc.get("belief_init", "perfect") == "perfect"
        for i, a in enumerate(self.agents):
            a["reps"] = {}
            for j in self.adj[i]:
                b = self.agents[j]
                a["reps"][j] = {
                    "choice": b["choice"],
                    "sat": [list(r) for r in b["sat"]] if perfect else [[0.0] * K for _ in range(M)],
                    "imp": list(b["imp"]) if perfect else [0.0] * M,
                }
        self._settle()

    # -- pieces of a tick --

    def _sync(self):
        for a in self.agents:
            for j, rep in a["reps"].items():
                rep["choice"] = self.agents[j]["choice"]

    def _social(self):
        for i, a in enumerate(self.agents):
            nbrs = self.adj[i]
            if nbrs:
                same = 0
                for j in nbrs:
                    if a["reps"][j]["choice"] == a["choice"]:
                        same += 1
                frac = same / len(nbrs)
            else:
                frac = 1.0
            value = 2.0 * frac - 1.0
            a["social_value"] = value
            for m in self.social:
                a["sat"][m][a["choice"]] = value

    def _dissonances(self):
        for a in self.agents:
            a["diss"] = [_dissonance(a, k) for k in range(self.K)]

    def _classify(self):
        for a in self.agents:
            c = a["choice"]
            if a["diss"][c] <= self.eps:
                a["dilemma"] = 0
                continue
            total = 0.0
            for m in self.social:
                total += a["imp"][m] * a["sat"][m][c]
            a["dilemma"] = 1 if total < 0 else 2

    def _settle(self):
        self._sync()
        self._social()
        self._dissonances()
        self._classify()

    def step(self):
        self._sync()
        self._social()
        self._dissonances()
        self._classify()

        if self.shuffled:
            order = _gen(self.seed, 2, self.tick).permutation(self.N).tolist()
        else:
            order = list(range(self.N))
        events = []
        for i in order:
            ego = self.agents[i]
            if ego["dilemma"] == 0 or not self.adj[i]:
                continue
            s = ego["choice"]
            best, target = -1.0, None
            for j in self.adj[i]:
                sim = _sim(ego["imp"], ego["reps"][j]["imp"])
                if ego["dilemma"] == 1:
                    score = _unit(self.sw * sim + self.aw * ego["asp"])
                else:
                    score = _unit(self.sw * sim + self.aw * self.agents[j]["asp"])
                if score > best:
                    best, target = score, j
            alter = self.agents[target]
            if ego["dilemma"] == 1:
                q = _unit(self.sw * _sim(alter["imp"], ego["imp"]) + self.aw * ego["asp"])
                for m in range(self.M):
                    alter["sat"][m][s] = _move(alter["sat"][m][s], ego["sat"][m][s], self.lr * q)
                for m in range(self.M):
                    alter["reps"][i]["sat"][m][s] = ego["sat"][m][s]
                events.append((self.tick, i, target, "signal", s))
            else:
                for m in range(self.M):
                    ego["sat"][m][s] = _move(ego["sat"][m][s], alter["sat"][m][s], self.lr * best)
                for m in range(self.M):
                    ego["reps"][target]["sat"][m][s] = alter["sat"][m][s]
                events.append((self.tick, i, target, "inquire", s))

        self._sync()
        self._social()
        evals = [[_evaluate(a, k) for k in range(self.K)] for a in self.agents]
        self._dissonances()
        for a, ev in zip(self.agents, evals):
            a["choice"] = _pick(ev, a["choice"])
        self._settle()
        self.tick += 1
        return events

    def snapshot(self):
        """Plain nested copy of everything observable."""
        return {
            "tick": self.tick,
            "choice": [a["choice"] for a in self.agents],
            "sat": [[list(r) for r in a["sat"]] for a in self.agents],
            "diss": [list(a["diss"]) for a in self.agents],
            "dilemma": [a["dilemma"] for a in self.agents],
            "evaluation": [[_evaluate(a, k) for k in range(self.K)] for a in self.agents],
            "social": [a["social_value"] for a in self.agents],
            "believed_choice": [[a["reps"][j]["choice"] for j in self.adj[i]] for i, a in enumerate(self.agents)],
            "believed_sat": [[[list(r) for r in a["reps"][j]["sat"]] for j in self.adj[i]] for i, a in enumerate(self.agents)],
            "believed_imp": [[list(a["reps"][j]["imp"]) for j in self.adj[i]] for i, a in enumerate(self.agents)],
        }


def trajectory(doc):
    """States for ticks 0..T and the events fired from each tick."""
    o = Oracle(doc)
    states = [o.snapshot()]
    events = []
    for _ in range(doc.get("ticks", 10)):
        events.append(o.step())
        states.append(o.snapshot())
    events.append([])
    return states, events
