import numpy as np
import pytest

from abcde import ContractViolation, ReplicaDivergence
from abcde.bench.generators import TopologyConfig, generate_problem
from abcde.datasets import FOUR_AGENT_FUNCTIONS, make_pair
from abcde.model import global_utility
from abcde.oracle import FitnessKernel, centralized_replica, compare_traces, grid_search
from abcde.pseudo_tree import build_bfs_pseudo_tree
from abcde.solver import DistributedABCD, SolverConfig


def test_grid_contains_analytic_maximiser():
    point, u = grid_search(make_pair(lambda x, y: -(x * x + y * y)), 201)
    assert u == 0.0 and list(point) == [0.0, 0.0]


def test_grid_tie_break_is_lexicographic():
    point, u = grid_search(make_pair(lambda x, y: x * y), 3)
    assert u == 100.0 and list(point) == [-10.0, -10.0]


def test_grid_f14_corner():
    # value frozen from the oracle's own enumeration
    point, u = grid_search(make_pair(FOUR_AGENT_FUNCTIONS["f14"]), 201)
    assert u == 1369.0 and list(point) == [-10.0, -10.0]


def test_grid_agrees_with_exhaustive_python_loop(four):
    axis = np.linspace(-10, 10, 5)
    brute = max(
        (global_utility(four, [a, b, c, d]), (a, b, c, d))
        for a in axis for b in axis for c in axis for d in axis
    )
    point, u = grid_search(four, 5, chunk=7)
    assert u == pytest.approx(brute[0], rel=1e-12)


def test_grid_cap_and_resolution_checks(four):
    with pytest.raises(ContractViolation, match="cap"):
        grid_search(four, 201)
    with pytest.raises(ContractViolation):
        grid_search(four, 1)


def test_kernel_matches_global_utility(four):
    inst = generate_problem(TopologyConfig("ba", n=12, m_edges=2, seed=4))
    for problem in (four, inst):
        kernel = FitnessKernel(problem, build_bfs_pseudo_tree(problem))
        X = np.random.default_rng(0).uniform(-10, 10, size=(6, problem.n))
        expected = [global_utility(problem, row) for row in X]
        assert kernel(X) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("variant", ["abcd-e", "abcd-c"])
@pytest.mark.parametrize("seed", [0, 1])
def test_replica_equals_distributed(four, variant, seed):
    for inst in (four, generate_problem(TopologyConfig("ws", n=9, k=2, rewire=0.3, seed=seed))):
        cfg = SolverConfig(S=6, M=3, max_iter=6, seed=seed, variant=variant)
        dist = DistributedABCD(inst, cfg).run()
        rep = centralized_replica(inst, cfg)
        compare_traces(dist, rep)
        assert np.array_equal(dist.assignment, rep.assignment)


def test_replica_counts_timed_mode_control_messages(four):
    cfg = SolverConfig(S=3, M=1, max_iter=2, time_limit=100.0)
    compare_traces(DistributedABCD(four, cfg).run(), centralized_replica(four, cfg))


def test_compare_traces_reports_first_divergence(er10):
    cfg = SolverConfig(S=4, M=2, max_iter=3)
    a, b = centralized_replica(er10, cfg), centralized_replica(er10, cfg)
    b.records[1].total_messages += 1
    with pytest.raises(ReplicaDivergence) as info:
        compare_traces(a, b)
    assert info.value.iteration == 2 and info.value.field == "total_messages"
    with pytest.raises(ReplicaDivergence):
        compare_traces(a, b.records[:2])
