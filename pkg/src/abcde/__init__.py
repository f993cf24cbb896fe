"""Bee-colony solver for continuous distributed constraint optimization.

Quick start::

    from abcde import ABCDE, make_four_agent
    est = ABCDE(S=20, M=4, max_iter=50).fit(make_four_agent())
    est.utility_, est.assignment_
"""

from .datasets import make_chain, make_four_agent, make_pair, make_quadratic_pair
from .engines import run_engine
from .estimator import ABCDE
from .exceptions import ContractViolation, ProtocolError, ReplicaDivergence, RoundAborted
from .io import load_problem, save_problem
from .model import (
    CDCOPInstance,
    FunctionConstraint,
    IntervalDomain,
    QuadraticCoefficients,
    QuadraticConstraint,
    global_utility,
    local_utility,
)
from .oracle import centralized_replica, compare_traces, grid_search
from .pseudo_tree import PseudoTree, broadcast_order, build_bfs_pseudo_tree
from .solver import AnytimeTrace, DistributedABCD, SolverConfig, solve

__version__ = "0.1.0"

__all__ = [
    "ABCDE",
    "AnytimeTrace",
    "CDCOPInstance",
    "ContractViolation",
    "DistributedABCD",
    "FunctionConstraint",
    "IntervalDomain",
    "ProtocolError",
    "PseudoTree",
    "QuadraticCoefficients",
    "QuadraticConstraint",
    "ReplicaDivergence",
    "RoundAborted",
    "SolverConfig",
    "broadcast_order",
    "build_bfs_pseudo_tree",
    "centralized_replica",
    "compare_traces",
    "global_utility",
    "grid_search",
    "load_problem",
    "local_utility",
    "make_chain",
    "make_four_agent",
    "make_pair",
    "make_quadratic_pair",
    "run_engine",
    "save_problem",
    "solve",
]
