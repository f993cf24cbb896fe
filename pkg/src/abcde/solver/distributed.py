"""Message-passing execution of the bee-colony solver on the simulated runtime."""

import time

import numpy as np

from ..exceptions import ContractViolation, ProtocolError
from ..pseudo_tree import build_bfs_pseudo_tree
from ..runtime import MailboxNetwork
from ..runtime import MessageKind as K
from .agent import BeeAgent
from .config import AnytimeTrace, SolverConfig, TraceRecord, agent_rng


class DistributedABCD:
    """One solver run: a pseudo-tree, a mailbox network and one agent per variable.

    The phase methods (:meth:`build_phase`, :meth:`employed_phase`, ...) each
    run one protocol phase on every agent until the network is quiet, which
    is convenient for inspecting intermediate state.  :meth:`run` drives the
    whole search as a single uninterrupted program per agent.

    Non-adjacent agents reach each other along the pseudo-tree; the hop count
    of such a message is its delivery latency in rounds.
    """

    def __init__(self, inst, config=None, tree=None, log_messages=False):
        config = config or SolverConfig()
        if inst.n < 2:
            raise ContractViolation("the solver needs at least two agents")
        self.inst = inst
        self.config = config
        self.tree = tree or build_bfs_pseudo_tree(inst, seed=config.seed, root_policy=config.root_policy)
        self.net = MailboxNetwork(range(inst.n), latency=self._latency, log_messages=log_messages)
        self.agents = {
            a: BeeAgent(a, inst, self.tree, config, agent_rng(config.seed, a)) for a in range(inst.n)
        }
        for agent in self.agents.values():
            agent.net = self.net
        self.root = self.agents[self.tree.root]
        self.iteration = 0
        self._initialized = False

    def _latency(self, a, b):
        if b in self.inst.neighbors[a]:
            return 1
        return self.tree.distance(a, b)

    # -- phase-at-a-time interface ------------------------------------------

    def _run_phase(self, phase):
        for agent in self.agents.values():
            agent.iteration = self.iteration
            agent.start(getattr(agent, phase)())
        self.net.run(self.agents)
        self._check_drained()

    def _check_drained(self):
        for agent in self.agents.values():
            left = agent.pending_messages()
            if left:
                raise ProtocolError(f"agent {agent.id} finished with {left} unconsumed messages")

    def initialize(self):
        for agent in self.agents.values():
            agent.initialize()
        self._initialized = True

    def evaluate(self, label="P"):
        for agent in self.agents.values():
            agent.iteration = self.iteration
            agent.start(agent.evaluate(label))
        self.net.run(self.agents)
        self._check_drained()
        return self.root.population(label).fitness.copy()

    def build_phase(self):
        self._run_phase("build")

    def employed_phase(self):
        self._run_phase("employed")

    def compute_selection_probabilities(self):
        self.root.compute_selection_probabilities()
        return self.root.fit, self.root.prob

    def onlooker_phase(self):
        self._run_phase("onlooker")

    def scout_phase(self):
        if self.config.scouting:
            self._run_phase("scout")

    # -- inspection ------------------------------------------------------------

    def population_matrix(self, label="P"):
        """Rows are solutions, columns agents (the distributed table reassembled)."""
        return np.column_stack([self.agents[a].population(label).x for a in range(self.inst.n)])

    def elite_matrix(self):
        return np.column_stack([self.agents[a].E.x for a in range(self.inst.n)])

    def gbest_assignment(self):
        return np.array([self.agents[a].gbest_x for a in range(self.inst.n)])

    @property
    def gbest_fitness(self):
        return self.root.gbest_fitness

    def storage_report(self):
        return {
            "per_agent": {a: ag.storage() for a, ag in self.agents.items()},
            "root_extra": self.root.root_extra_storage(),
        }

    # -- full run ----------------------------------------------------------------

    def _program(self, agent, records, clock):
        cfg = self.config
        it = 0
        while True:
            if cfg.max_iter is not None and it >= cfg.max_iter:
                stop = True
            else:
                stop = False
            if cfg.time_limit is not None:
                # the root owns the clock; everyone else learns the decision
                if agent.is_root:
                    stop = stop or (it > 0 and time.perf_counter() - clock[0] >= cfg.time_limit)
                    # a stop message is charged to the last iteration, a go to the next one
                    agent.iteration = it if stop else it + 1
                payload = yield from agent._down(K.CONTROL, {"op": "stop" if stop else "go"})
                stop = payload["op"] == "stop"
            if stop:
                return
            it += 1
            agent.iteration = it
            if agent.is_root:
                before = (agent.employed_requests, agent.onlooker_requests, agent.evaluations)
            yield from agent.iterate()
            if agent.is_root:
                records.append(
                    TraceRecord(
                        iteration=it,
                        elapsed_ms=(time.perf_counter() - clock[0]) * 1000.0,
                        gbest_utility=agent.gbest_fitness,
                        employed_requests=agent.employed_requests - before[0],
                        onlooker_requests=agent.onlooker_requests - before[1],
                        total_messages=0,
                        evaluations=agent.evaluations - before[2],
                    )
                )

    def run(self):
        """Execute the full search and return its anytime trace."""
        if not self._initialized:
            self.initialize()
        records = []
        clock = [time.perf_counter()]
        for agent in self.agents.values():
            agent.start(self._program(agent, records, clock))
        self.net.run(self.agents)
        self._check_drained()

        for r in records:
            r.total_messages = self.net.sent_by_iteration.get(r.iteration, 0)
        self.iteration = len(records)
        assignment = self.gbest_assignment()
        return AnytimeTrace(
            records=records,
            assignment=assignment,
            utility=self.root.gbest_fitness,
            config=self.config,
            stats={
                "messages": self.net.sent,
                "hops": self.net.hops,
                "rounds": self.net.round,
                "by_kind": {k.value: v for k, v in sorted(self.net.sent_by_kind.items())},
                "storage": self.storage_report(),
                "tree_root": self.tree.root,
            },
        )


def solve(inst, config=None, **kwargs):
    """Run the distributed solver once; keyword arguments build a SolverConfig."""
    if config is None:
        config = SolverConfig(**kwargs)
    elif kwargs:
        raise ContractViolation("pass either a SolverConfig or keyword arguments, not both")
    return DistributedABCD(inst, config).run()
