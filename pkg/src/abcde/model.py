"""Continuous DCOP problem representation and utility evaluation.

An instance has one real-valued variable per agent, an interval domain for
each variable and a list of binary utility functions.  Agent ids are the
integers ``0 .. n-1``; agent ``i`` owns variable ``i``.

Every utility function accepts scalars or equally shaped numpy arrays, so a
whole population column can be evaluated in one call.
"""

from dataclasses import dataclass
import math

import numpy as np

from .exceptions import ContractViolation

__all__ = [
    "IntervalDomain",
    "BinaryConstraint",
    "QuadraticCoefficients",
    "QuadraticConstraint",
    "FunctionConstraint",
    "CDCOPInstance",
    "evaluate_constraint",
    "global_utility",
    "local_utility",
]


@dataclass(frozen=True)
class IntervalDomain:
    lb: float
    ub: float

    def __post_init__(self):
        lb, ub = float(self.lb), float(self.ub)
        if not (math.isfinite(lb) and math.isfinite(ub)):
            raise ContractViolation(f"domain bounds must be finite, got [{lb}, {ub}]")
        if not lb < ub:
            raise ContractViolation(f"domain needs lb < ub, got [{lb}, {ub}]")
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)

    @property
    def width(self):
        return self.ub - self.lb

    def __contains__(self, x):
        return self.lb <= x <= self.ub


class BinaryConstraint:
    """Utility function over the variables of agents ``i`` and ``j``.

    Subclasses implement :meth:`utility`; arguments are always passed in the
    stored ``(i, j)`` order regardless of which endpoint evaluates it.
    """

    def __init__(self, i, j):
        i, j = int(i), int(j)
        if i == j:
            raise ContractViolation(f"constraint scope needs two agents, got ({i}, {i})")
        self.i = i
        self.j = j

    @property
    def scope(self):
        return (self.i, self.j)

    def other(self, agent):
        if agent == self.i:
            return self.j
        if agent == self.j:
            return self.i
        raise ContractViolation(f"agent {agent} not in scope {self.scope}")

    def utility(self, xi, xj):
        raise NotImplementedError

    def __call__(self, xi, xj):
        return self.utility(xi, xj)


@dataclass(frozen=True)
class QuadraticCoefficients:
    """Coefficients of ``a*x^2 + b*x + d*y^2 + e*y + f*x*y + g``."""

    a: float = 0.0
    b: float = 0.0
    d: float = 0.0
    e: float = 0.0
    f: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "d", "e", "f", "g"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ContractViolation(f"coefficient {name} is not finite: {v}")
            object.__setattr__(self, name, v)

    def as_tuple(self):
        return (self.a, self.b, self.d, self.e, self.f, self.g)


def quadratic_form(a, b, d, e, f, g, x, y):
    # Operation order is part of the reproducibility contract: the vectorised
    # evaluator in the oracle repeats it term for term.
    return a * x * x + b * x + d * y * y + e * y + f * x * y + g


class QuadraticConstraint(BinaryConstraint):
    def __init__(self, i, j, coeffs):
        super().__init__(i, j)
        if not isinstance(coeffs, QuadraticCoefficients):
            coeffs = QuadraticCoefficients(*coeffs)
        self.coeffs = coeffs

    def utility(self, xi, xj):
        return quadratic_form(*self.coeffs.as_tuple(), xi, xj)

    def __repr__(self):
        return f"QuadraticConstraint({self.i}, {self.j}, {self.coeffs.as_tuple()})"


class FunctionConstraint(BinaryConstraint):
    """Wraps an arbitrary callable ``func(xi, xj)``."""

    def __init__(self, i, j, func, name=None):
        super().__init__(i, j)
        self.func = func
        self.name = name or getattr(func, "__name__", "f")

    def utility(self, xi, xj):
        return self.func(xi, xj)

    def __repr__(self):
        return f"FunctionConstraint({self.i}, {self.j}, {self.name})"


class CDCOPInstance:
    """Agents, interval domains and binary constraints.

    Parameters
    ----------
    n : int
        Number of agents (and variables).
    domains : sequence of IntervalDomain or (lb, ub) pairs
    constraints : sequence of BinaryConstraint
    require_connected : bool, default True
        Reject instances whose constraint graph is disconnected.  Only
        unit tests should switch this off.
    """

    def __init__(self, n, domains, constraints, require_connected=True):
        n = int(n)
        if n < 1:
            raise ContractViolation(f"need at least one agent, got n={n}")
        domains = tuple(
            d if isinstance(d, IntervalDomain) else IntervalDomain(*d) for d in domains
        )
        if len(domains) != n:
            raise ContractViolation(f"expected {n} domains, got {len(domains)}")
        self.n = n
        self.domains = domains
        self.constraints = tuple(constraints)

        self._lookup = {}
        adjacency = [set() for _ in range(n)]
        for c in self.constraints:
            if not isinstance(c, BinaryConstraint):
                raise ContractViolation(f"not a BinaryConstraint: {c!r}")
            for a in c.scope:
                if not 0 <= a < n:
                    raise ContractViolation(f"constraint {c!r} references unknown agent {a}")
            key = (min(c.scope), max(c.scope))
            if key in self._lookup:
                raise ContractViolation(f"duplicate constraint on pair {key}")
            self._lookup[key] = c
            adjacency[c.i].add(c.j)
            adjacency[c.j].add(c.i)
        self.neighbors = tuple(tuple(sorted(s)) for s in adjacency)

        if require_connected:
            unreachable = self.unreachable_from(0)
            if unreachable:
                raise ContractViolation(
                    f"constraint graph is disconnected: agent {unreachable[0]} "
                    f"is unreachable from agent 0"
                )

    @property
    def m(self):
        return len(self.constraints)

    def constraint(self, i, j):
        """The constraint on ``{i, j}``; same object for either argument order."""
        try:
            return self._lookup[(min(i, j), max(i, j))]
        except KeyError:
            raise ContractViolation(f"no constraint between agents {i} and {j}") from None

    def degree(self, i):
        return len(self.neighbors[i])

    def unreachable_from(self, start):
        seen = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in self.neighbors[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return [a for a in range(self.n) if a not in seen]

    def edges(self):
        return [c.scope for c in self.constraints]

    def __repr__(self):
        return f"CDCOPInstance(n={self.n}, m={self.m})"


def evaluate_constraint(c, xi, xj, inst=None):
    """Evaluate ``c`` at ``(xi, xj)``.

    When ``inst`` is given both arguments are checked against the endpoint
    domains first.
    """
    if inst is not None:
        for agent, x in ((c.i, xi), (c.j, xj)):
            dom = inst.domains[agent]
            if not (dom.lb <= x <= dom.ub):
                raise ContractViolation(
                    f"value {x} for agent {agent} outside [{dom.lb}, {dom.ub}]"
                )
    value = c.utility(xi, xj)
    if not np.all(np.isfinite(value)):
        raise ContractViolation(f"{c!r} returned a non-finite utility at ({xi}, {xj})")
    return value


def _check_assignment(inst, x):
    # local import keeps validation helpers free of model import cycles
    from .utils.validation import check_assignment

    return check_assignment(inst, x)


def global_utility(inst, x):
    """Sum of all constraint utilities, in constraint-list order."""
    x = _check_assignment(inst, x)
    total = 0.0
    for c in inst.constraints:
        total += float(c.utility(x[c.i], x[c.j]))
    return total


def local_utility(inst, i, x):
    """Sum of the utilities of constraints incident to agent ``i``.

    Neighbours are visited in ascending id order.
    """
    if not 0 <= i < inst.n:
        raise ContractViolation(f"unknown agent id {i}")
    x = _check_assignment(inst, x)
    total = 0.0
    for j in inst.neighbors[i]:
        c = inst.constraint(i, j)
        total += float(c.utility(x[c.i], x[c.j]))
    return total
