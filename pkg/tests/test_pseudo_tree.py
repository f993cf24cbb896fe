import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcde import ContractViolation
from abcde.bench.generators import TopologyConfig, generate_problem
from abcde.datasets import make_chain
from abcde.model import CDCOPInstance
from abcde.pseudo_tree import PseudoTree, broadcast_order, build_bfs_pseudo_tree, choose_root


def test_chain_forces_tree():
    t = build_bfs_pseudo_tree(make_chain(3), root=0)
    assert [t.parent[a] for a in range(3)] == [None, 0, 1]
    assert [t.depth[a] for a in range(3)] == [0, 1, 2]
    assert broadcast_order(t) == [0, 1, 2]
    t.validate()


def test_four_agent_rooted_at_x1(four):
    t = build_bfs_pseudo_tree(four, root=0)
    assert t.children[0] == (1, 2, 3)
    assert all(t.depth[a] == 1 for a in (1, 2, 3))
    # x2-x3 is a constraint edge but not a tree edge
    assert 2 in t.neighbors[1] and t.parent[2] != 1 and t.parent[1] != 2
    assert broadcast_order(t) == [0, 1, 2, 3]


def test_default_root_is_max_degree(four):
    assert choose_root(four) == 0
    assert choose_root(make_chain(4)) == 1  # degree tie between 1 and 2
    assert choose_root(make_chain(4), "lowest-id") == 0
    with pytest.raises(ContractViolation):
        choose_root(four, "random")


def test_single_agent_tree():
    t = build_bfs_pseudo_tree(CDCOPInstance(1, [(-1, 1)], []))
    assert t.root == 0 and t.children[0] == () and t.height == 0
    t.validate()


def test_star_broadcast_order():
    t = PseudoTree(
        root=5,
        parent={5: None, 1: 5, 2: 5},
        children={5: (1, 2), 1: (), 2: ()},
        neighbors={5: (1, 2), 1: (5,), 2: (5,)},
        depth={5: 0, 1: 1, 2: 1},
        priority={5: 0, 2: 1, 1: 2},
    )
    t.validate()
    assert broadcast_order(t) == [5, 1, 2]


def test_validate_catches_broken_trees():
    t = build_bfs_pseudo_tree(make_chain(3), root=0)
    bad_depth = PseudoTree(t.root, t.parent, t.children, t.neighbors, {0: 0, 1: 1, 2: 3}, t.priority)
    with pytest.raises(ContractViolation):
        bad_depth.validate()
    bad_priority = PseudoTree(t.root, t.parent, t.children, t.neighbors, t.depth, {0: 2, 1: 1, 2: 0})
    with pytest.raises(ContractViolation):
        bad_priority.validate()


def test_dump_format():
    t = build_bfs_pseudo_tree(make_chain(3), root=0)
    assert t.dump() == "0 0 - 0\n1 1 0 1\n2 2 1 2\n"


def test_tree_distance():
    t = build_bfs_pseudo_tree(make_chain(5), root=2)
    assert t.path(0, 4) == [0, 1, 2, 3, 4]
    assert t.distance(0, 4) == 4 and t.distance(3, 3) == 0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 5000), n=st.integers(2, 25), kind=st.sampled_from(["er", "ba", "ws"]))
def test_bfs_tree_invariants(seed, n, kind):
    inst = generate_problem(TopologyConfig(kind, n=max(n, 5), p=0.4, m_edges=2, k=2, seed=seed))
    t = build_bfs_pseudo_tree(inst, seed=seed)
    t.validate()
    # BFS depth is the graph distance from the root
    for a in t.agents:
        for b in inst.neighbors[a]:
            assert abs(t.depth[a] - t.depth[b]) <= 1
    assert build_bfs_pseudo_tree(inst, seed=seed) == t
