"""Random benchmark instances on Erdos-Renyi, Barabasi-Albert and Watts-Strogatz graphs."""

from dataclasses import asdict, dataclass

import networkx as nx
import numpy as np

from ..exceptions import ContractViolation
from ..model import CDCOPInstance, IntervalDomain, QuadraticConstraint

KIND_ALIASES = {
    "er": "erdos-renyi",
    "ba": "barabasi-albert",
    "ws": "watts-strogatz",
    "erdos-renyi": "erdos-renyi",
    "barabasi-albert": "barabasi-albert",
    "watts-strogatz": "watts-strogatz",
}


@dataclass(frozen=True)
class TopologyConfig:
    kind: str = "erdos-renyi"
    n: int = 50
    p: float = 0.3
    m_edges: int = 3
    k: int = 3
    rewire: float = 0.5
    seed: int = 0
    max_attempts: int = 100

    def __post_init__(self):
        if self.kind not in KIND_ALIASES:
            raise ContractViolation(f"unknown topology {self.kind!r}")
        object.__setattr__(self, "kind", KIND_ALIASES[self.kind])
        if self.n < 2:
            raise ContractViolation(f"need n >= 2 agents, got {self.n}")
        if self.kind == "erdos-renyi" and not 0 < self.p <= 1:
            raise ContractViolation(f"density p must be in (0, 1], got {self.p}")
        if self.kind == "barabasi-albert" and not 1 <= self.m_edges < self.n:
            raise ContractViolation(f"m_edges must be in [1, n), got {self.m_edges}")
        if self.kind == "watts-strogatz":
            if not 0 <= self.rewire <= 1:
                raise ContractViolation(f"rewire must be in [0, 1], got {self.rewire}")
            if ring_degree(self.k) >= self.n:
                raise ContractViolation(f"ring degree {ring_degree(self.k)} needs n > k")


@dataclass(frozen=True)
class CoefficientSpec:
    lo: float = -5.0
    hi: float = 5.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ContractViolation(f"need lo < hi, got [{self.lo}, {self.hi}]")


def ring_degree(k):
    """Even ring-lattice degree used for a requested ``k`` (odd values round up)."""
    k = max(int(k), 2)
    return k if k % 2 == 0 else k + 1


def _attempt_seed(seed, attempt):
    return int(np.random.SeedSequence([int(seed), int(attempt)]).generate_state(1)[0])


def _graph(topo, seed):
    if topo.kind == "erdos-renyi":
        return nx.erdos_renyi_graph(topo.n, topo.p, seed=seed)
    if topo.kind == "barabasi-albert":
        # complete seed graph so every node ends with degree >= m_edges
        start = nx.complete_graph(topo.m_edges + 1)
        return nx.barabasi_albert_graph(topo.n, topo.m_edges, seed=seed, initial_graph=start)
    return nx.watts_strogatz_graph(topo.n, ring_degree(topo.k), topo.rewire, seed=seed)


def make_graph(topo):
    """A connected graph for ``topo``; retries with derived seeds."""
    for attempt in range(topo.max_attempts):
        g = _graph(topo, _attempt_seed(topo.seed, attempt))
        if nx.is_connected(g):
            return g
    raise ContractViolation(
        f"no connected {topo.kind} graph with n={topo.n} after {topo.max_attempts} attempts"
    )


def generate_problem(topo, coeff=None, domain=None):
    """Quadratic-constraint instance: one constraint per edge, shared domain."""
    coeff = coeff or CoefficientSpec()
    domain = domain or IntervalDomain(-10.0, 10.0)
    if not isinstance(domain, IntervalDomain):
        domain = IntervalDomain(*domain)
    g = make_graph(topo)
    edges = sorted((min(a, b), max(a, b)) for a, b in g.edges())
    rng = np.random.default_rng([int(topo.seed), 1])
    values = rng.uniform(coeff.lo, coeff.hi, size=(len(edges), 6))
    constraints = [QuadraticConstraint(i, j, tuple(float(v) for v in row)) for (i, j), row in zip(edges, values)]
    return CDCOPInstance(topo.n, [domain] * topo.n, constraints)


def problem_metadata(topo, coeff=None, domain=None):
    coeff = coeff or CoefficientSpec()
    domain = domain or IntervalDomain(-10.0, 10.0)
    meta = {"topology": asdict(topo), "coefficients": asdict(coeff), "domain": [domain.lb, domain.ub]}
    if topo.kind == "watts-strogatz":
        meta["ring_degree_used"] = ring_degree(topo.k)
    return meta
