"""Per-agent protocol of the distributed bee-colony solver.

Each agent stores one column of the population (its own variable's value in
every candidate solution), one column of the elite set and its component of
the best-so-far solution.  The root additionally holds the authoritative
fitness values, the visited matrix and the selection probabilities.

Every phase is a generator; ``yield`` points are the places where the agent
waits for messages.
"""

from collections import Counter
from dataclasses import dataclass
import math

import numpy as np

from ..exceptions import ProtocolError
from ..model import QuadraticConstraint, quadratic_form
from ..runtime import MessageKind as K
from ..runtime import ProgramAgent
from . import operators as ops


@dataclass
class SolutionObject:
    x: float
    local_fitness: float
    fitness: float


class PopulationSlice:
    """One agent's column of a population: values plus fitness fields."""

    __slots__ = ("x", "local_fitness", "fitness")

    def __init__(self, x):
        self.x = np.array(x, dtype=float)
        self.local_fitness = np.full(len(self.x), np.nan)
        self.fitness = np.full(len(self.x), np.nan)

    def __len__(self):
        return len(self.x)

    def __getitem__(self, k):
        return SolutionObject(float(self.x[k]), float(self.local_fitness[k]), float(self.fitness[k]))

    def take(self, idx):
        out = PopulationSlice(self.x[idx])
        out.local_fitness = self.local_fitness[idx].copy()
        out.fitness = self.fitness[idx].copy()
        return out

    def copy_entry(self, dst, src, k):
        self.x[dst] = src.x[k]
        self.local_fitness[dst] = src.local_fitness[k]
        self.fitness[dst] = src.fitness[k]


class BeeAgent(ProgramAgent):
    serviced_kinds = frozenset({K.VALUE_REQUEST})

    def __init__(self, agent_id, inst, tree, config, rng):
        super().__init__(agent_id)
        self.n = inst.n
        self.S = config.S
        self.M = config.M
        self.config = config
        self.domain = inst.domains[agent_id]
        self.neighbors = tree.neighbors[agent_id]
        self.parent = tree.parent[agent_id]
        self.children = tree.children[agent_id]
        self.is_root = tree.root == agent_id
        self.rng = rng
        # (constraint, True if this agent is the constraint's first argument)
        self._incident = [
            (inst.constraint(agent_id, j), inst.constraint(agent_id, j).i == agent_id)
            for j in self.neighbors
        ]
        self._stacked = None
        if self._incident and all(isinstance(c, QuadraticConstraint) for c, _ in self._incident):
            coeffs = np.array([c.coeffs.as_tuple() for c, _ in self._incident])
            first = np.array([f for _, f in self._incident])[:, None]
            self._stacked = ([coeffs[:, k : k + 1] for k in range(6)], first)
        self.net = None
        self.iteration = 0
        self.epoch = 0
        self._rid = 0

        self.P = None
        self.E = None
        self.work = {}
        self.gbest_x = math.nan
        self.value = math.nan
        self.peak = Counter()

        # root-only state
        self.gbest_fitness = -math.inf
        self.visited = None
        self.fit = None
        self.prob = None
        self.employed_requests = 0
        self.onlooker_requests = 0
        self.evaluations = 0

    # -- bookkeeping -------------------------------------------------------

    def _track(self, label, size):
        if size > self.peak[label]:
            self.peak[label] = size

    def population(self, label):
        return self.P if label == "P" else self.work[label]

    def storage(self):
        """Peak object counts per slice (P, Q, E, R)."""
        return {"P": len(self.P), "Q": self.peak["Q"], "E": self.peak["E"], "R": self.peak["R"]}

    def root_extra_storage(self):
        if not self.is_root:
            return 0
        return self.visited.size + len(self.fit or ()) + len(self.prob or ())

    def send(self, to, kind, payload):
        self.net.send(self.id, to, kind, payload, self.iteration)

    def _down(self, kind, payload=None):
        """Root: send to children.  Others: wait for the parent's copy and relay it."""
        if not self.is_root:
            msg = (yield from self.receive(kind, 1))[0]
            if msg.sender != self.parent:
                raise ProtocolError(f"agent {self.id} got {kind} from {msg.sender}, not its parent")
            # relays keep the originator's iteration tag
            self.iteration = msg.iteration
            payload = msg.payload
        for c in self.children:
            self.send(c, kind, payload)
        return payload

    # -- INITIALIZATION ----------------------------------------------------

    def initialize(self):
        dom = self.domain
        self.P = PopulationSlice([ops.init_value(dom, self.rng.random()) for _ in range(self.S)])
        self.E = None
        self.work = {}
        self.gbest_x = math.nan
        if self.is_root:
            self.gbest_fitness = -math.inf
            self.visited = np.zeros((self.S, self.n), dtype=bool)

    # -- EVALUATE ----------------------------------------------------------

    def evaluate(self, label):
        W = self.population(label)
        ep = self.epoch
        self.epoch += 1
        shared = {"epoch": ep, "x": W.x.copy()}  # receivers only read it
        for j in self.neighbors:
            self.send(j, K.NEIGHBOR_VALUES, shared)
        msgs = yield from self.receive(K.NEIGHBOR_VALUES, len(self.neighbors))
        self._check_epoch(msgs, ep)
        others = {m.sender: m.payload["x"] for m in msgs}
        W.local_fitness = local = self._local_fitness(W.x, others)

        msgs = yield from self.receive(K.FITNESS_UP, len(self.children))
        self._check_epoch(msgs, ep)
        partial = {m.sender: m.payload["fitness"] for m in msgs}
        fitness = local
        for c in self.children:
            fitness = fitness + partial[c]
        if self.is_root:
            fitness = fitness / 2
            self.evaluations += 1
        else:
            self.send(self.parent, K.FITNESS_UP, {"epoch": ep, "fitness": fitness})
        W.fitness = fitness

    def _check_epoch(self, msgs, ep):
        # an agent cannot start evaluation e+1 before everyone finished e
        for m in msgs:
            if m.payload["epoch"] != ep:
                raise ProtocolError(
                    f"agent {self.id} expected epoch {ep}, got {m.payload['epoch']} from {m.sender}"
                )

    def _local_fitness(self, own, others):
        local = np.zeros(len(own))
        if self._stacked is not None:
            coeffs, first = self._stacked
            theirs = np.array([others[j] for j in self.neighbors])
            terms = quadratic_form(*coeffs, np.where(first, own, theirs), np.where(first, theirs, own))
            for row in terms:
                local = local + row
            return local
        for (c, first), j in zip(self._incident, self.neighbors):
            local = local + (c.utility(own, others[j]) if first else c.utility(others[j], own))
        return local

    # -- decisions broadcast by the root ------------------------------------

    def _announce_gbest(self, label, index):
        """Root: record a new best-so-far; everyone: adopt their component."""
        payload = yield from self._down(K.GBEST_DOWN, {"label": label, "index": index})
        W = self.population(payload["label"])
        self.gbest_x = float(W.x[payload["index"]])

    def _root_consider_gbest(self, W):
        b = ops.best_index(W.fitness)
        if b is not None and W.fitness[b] > self.gbest_fitness:
            self.gbest_fitness = float(W.fitness[b])
            return b
        return None

    def _replace_down(self, label, replace, gbest):
        payload = yield from self._down(
            K.SOLUTION_REPLACE_DOWN, {"label": label, "replace": replace, "gbest": gbest is not None}
        )
        src = self.population(payload["label"])
        for u, k in payload["replace"]:
            self.P.copy_entry(u, src, k)
        if payload["gbest"]:
            yield from self._announce_gbest(payload["label"], gbest)

    # -- BUILD -------------------------------------------------------------

    def build(self):
        yield from self.evaluate("P")
        gbest = None
        elite = None
        if self.is_root:
            gbest = self._root_consider_gbest(self.P)
            elite = ops.select_elite(self.P.fitness, self.M)
        payload = yield from self._down(K.ELITE_DOWN, {"elite": elite, "gbest": gbest is not None})
        self.E = self.P.take(payload["elite"])
        self._track("E", len(self.E))
        if payload["gbest"]:
            yield from self._announce_gbest("P", gbest)
        self.value = self.gbest_x

    # -- helpers shared by employed / onlooker ------------------------------

    def _dispatch(self, kind, jobs):
        """Root: send update requests (self-addressed ones stay local); returns own jobs."""
        own = []
        for j, payload in jobs:
            if j == self.id:
                own.append(payload)
            else:
                self.send(j, kind, payload)
        return own

    def _collect_values(self, pending):
        msgs = yield from self.receive(K.VALUE_SHARE, len(pending))
        return [(pending[m.payload["rid"]], m.payload) for m in msgs]

    def service(self, net, msg):
        if msg.kind != K.VALUE_REQUEST:
            return super().service(net, msg)
        p = msg.payload
        net.send(
            self.id,
            msg.sender,
            K.VALUE_SHARE,
            {"rid": p["rid"], "e": float(self.E.x[p["e"]]), "p": float(self.P.x[p["u"]])},
            msg.iteration,
        )

    def _ask(self, h, u, e):
        self._rid += 1
        self.send(h, K.VALUE_REQUEST, {"rid": self._rid, "u": u, "e": e})
        return self._rid

    # -- employed bees -------------------------------------------------------

    def employed(self):
        Q = self.P.take(slice(None))
        self.work["Q"] = Q
        self._track("Q", len(Q))
        if self.is_root:
            targets = [ops.draw_index(self.rng, self.n) for _ in range(self.S)]
            for u, j in enumerate(targets):
                self.visited[u, j] = True
            self.employed_requests += self.S
            own = self._dispatch(
                K.EMPLOYED_UPDATE_REQUEST, [(j, {"u": u}) for u, j in enumerate(targets)]
            )
            counts = dict(Counter(targets))
            yield from self._down(K.CONTROL, {"op": "expect", "counts": counts})
            mine = [p["u"] for p in own]
        else:
            payload = yield from self._down(K.CONTROL)
            k = payload["counts"].get(self.id, 0)
            msgs = yield from self.receive(K.EMPLOYED_UPDATE_REQUEST, k)
            mine = [m.payload["u"] for m in msgs]

        pending = {}
        for u in mine:
            l = ops.draw_index(self.rng, self.M)
            h = ops.draw_other_agent(self.rng, self.n, self.id)
            phi = ops.draw_phi(self.rng)
            cap_phi = ops.draw_cap_phi(self.rng)
            pending[self._ask(h, u, l)] = (u, l, phi, cap_phi)
        for (u, l, phi, cap_phi), vals in (yield from self._collect_values(pending)):
            Q.x[u] = ops.candidate_update(
                vals["e"], self.gbest_x, vals["p"], self.E.x[l], phi, cap_phi, self.domain
            )

        yield from self.evaluate("Q")
        replace, gbest = [], None
        if self.is_root:
            for u in range(self.S):
                if Q.fitness[u] > self.P.fitness[u]:
                    replace.append((u, u))
                    self.visited[u, :] = False
            gbest = self._root_consider_gbest(Q)
        yield from self._replace_down("Q", replace, gbest)
        del self.work["Q"]

    # -- onlooker bees -------------------------------------------------------

    def compute_selection_probabilities(self):
        if self.is_root:
            self.fit, self.prob = ops.selection_probabilities(self.P.fitness)

    def onlooker(self):
        for _ in range(self.S):
            yield from self._onlooker_round()

    def _onlooker_round(self):
        if self.is_root:
            u = ops.roulette_select(self.prob, self.rng.random())
            targets = [ops.draw_index(self.rng, self.n) for _ in range(self.M)]
            for j in targets:
                self.visited[u, j] = True
            self.onlooker_requests += self.M
            own = self._dispatch(
                K.ONLOOKER_UPDATE_REQUEST, [(j, {"u": u, "m": m}) for m, j in enumerate(targets)]
            )
            yield from self._down(K.SOLUTION_COPY_DOWN, {"u": u, "counts": dict(Counter(targets))})
            mine = [(p["u"], p["m"]) for p in own]
        else:
            payload = yield from self._down(K.SOLUTION_COPY_DOWN)
            u = payload["u"]
            k = payload["counts"].get(self.id, 0)
            msgs = yield from self.receive(K.ONLOOKER_UPDATE_REQUEST, k)
            mine = [(m.payload["u"], m.payload["m"]) for m in msgs]
            if any(v != u for v, _ in mine):
                raise ProtocolError(f"agent {self.id} got a request for a solution other than {u}")

        R = PopulationSlice(np.full(self.M, self.P.x[u]))
        self.work["R"] = R
        self._track("R", len(R))
        pending = {}
        for u, m in mine:
            h = ops.draw_other_agent(self.rng, self.n, self.id)
            l = ops.draw_index(self.rng, self.M)
            phi = ops.draw_phi(self.rng)
            cap_phi = ops.draw_cap_phi(self.rng)
            pending[self._ask(h, u, m)] = (m, l, phi, cap_phi)
        for (m, l, phi, cap_phi), vals in (yield from self._collect_values(pending)):
            R.x[m] = ops.candidate_update(
                vals["e"], self.gbest_x, vals["p"], self.E.x[l], phi, cap_phi, self.domain
            )

        yield from self.evaluate("R")
        replace, gbest = [], None
        if self.is_root:
            t = ops.best_index(R.fitness)
            if t is not None and R.fitness[t] > self.P.fitness[u]:
                replace.append((u, t))
                self.visited[u, :] = False
            gbest = self._root_consider_gbest(R)
        yield from self._replace_down("R", replace, gbest)
        del self.work["R"]

    # -- scout bees ----------------------------------------------------------

    def scout(self):
        reinit = None
        if self.is_root:
            reinit = [t for t in range(self.S) if self.visited[t].all()]
            for t in reinit:
                self.visited[t, :] = False
        payload = yield from self._down(K.SCOUT_REINIT_REQUEST, {"reinit": reinit})
        for t in payload["reinit"]:
            self.P.x[t] = ops.init_value(self.domain, self.rng.random())
            # stale until the next BUILD re-evaluates it
            self.P.local_fitness[t] = np.nan
            self.P.fitness[t] = np.nan

    # -- whole iterations ----------------------------------------------------

    def iterate(self):
        yield from self.build()
        yield from self.employed()
        self.compute_selection_probabilities()
        yield from self.onlooker()
        if self.config.scouting:
            yield from self.scout()
