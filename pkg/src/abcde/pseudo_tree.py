"""Breadth-first pseudo-tree over the constraint graph.

The tree is the routing and aggregation structure of the solver: values are
broadcast from the root towards the leaves, fitness sums flow back up.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation

ROOT_POLICIES = ("max-degree", "lowest-id")


@dataclass(frozen=True)
class PseudoTree:
    """Parent/children/depth/priority maps keyed by agent id.

    ``priority[a]`` is a rank, ``0`` being the highest priority.
    """

    root: int
    parent: dict
    children: dict
    neighbors: dict
    depth: dict
    priority: dict

    @property
    def agents(self):
        return sorted(self.parent)

    @property
    def height(self):
        return max(self.depth.values())

    def is_leaf(self, a):
        return not self.children[a]

    def path(self, a, b):
        """Agents on the tree path from ``a`` to ``b``, both ends included."""
        up_a, up_b = [a], [b]
        while self.depth[up_a[-1]] > self.depth[up_b[-1]]:
            up_a.append(self.parent[up_a[-1]])
        while self.depth[up_b[-1]] > self.depth[up_a[-1]]:
            up_b.append(self.parent[up_b[-1]])
        while up_a[-1] != up_b[-1]:
            up_a.append(self.parent[up_a[-1]])
            up_b.append(self.parent[up_b[-1]])
        return up_a + up_b[-2::-1]

    def distance(self, a, b):
        return len(self.path(a, b)) - 1

    def validate(self):
        """Raise ContractViolation if any structural invariant fails."""
        agents = self.agents
        if self.parent[self.root] is not None:
            raise ContractViolation("root must not have a parent")
        # union-find over parent edges: n-1 edges, no cycle
        uf = {a: a for a in agents}

        def find(a):
            while uf[a] != a:
                uf[a] = uf[uf[a]]
                a = uf[a]
            return a

        edges = 0
        for a in agents:
            p = self.parent[a]
            if a == self.root:
                continue
            if p is None:
                raise ContractViolation(f"agent {a} has no parent")
            if p not in self.neighbors[a]:
                raise ContractViolation(f"tree edge {p}-{a} is not a constraint edge")
            if self.depth[p] != self.depth[a] - 1:
                raise ContractViolation(f"depth of {a} is not parent depth + 1")
            if a not in self.children[p]:
                raise ContractViolation(f"{a} missing from children of {p}")
            ra, rp = find(a), find(p)
            if ra == rp:
                raise ContractViolation(f"parent edges form a cycle through {a}")
            uf[ra] = rp
            edges += 1
        if edges != len(agents) - 1:
            raise ContractViolation("parent edges do not span all agents")
        ranks = sorted(self.priority.values())
        if ranks != list(range(len(agents))):
            raise ContractViolation("priorities are not a strict total order")
        for a in agents:
            for b in agents:
                if self.depth[a] < self.depth[b] and self.priority[a] > self.priority[b]:
                    raise ContractViolation(f"agent {a} is shallower than {b} but ranks lower")

    def dump(self):
        """One line per agent: ``id depth parent priority`` (root parent is ``-``)."""
        lines = []
        for a in self.agents:
            p = self.parent[a]
            lines.append(f"{a} {self.depth[a]} {'-' if p is None else p} {self.priority[a]}")
        return "\n".join(lines) + "\n"


def choose_root(inst, policy="max-degree"):
    if policy == "lowest-id":
        return 0
    if policy == "max-degree":
        return max(range(inst.n), key=lambda a: (inst.degree(a), -a))
    raise ContractViolation(f"unknown root policy {policy!r}; use one of {ROOT_POLICIES}")


def build_bfs_pseudo_tree(inst, seed=0, root=None, root_policy="max-degree"):
    """BFS spanning tree of ``inst``'s constraint graph.

    Neighbours are expanded in ascending id order.  Agents at equal depth get
    their relative priority from a generator seeded with ``seed``.
    """
    if root is None:
        root = choose_root(inst, root_policy)
    if not 0 <= root < inst.n:
        raise ContractViolation(f"root {root} is not an agent id")

    parent = {root: None}
    depth = {root: 0}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for b in inst.neighbors[a]:
            if b not in parent:
                parent[b] = a
                depth[b] = depth[a] + 1
                queue.append(b)
    if len(parent) != inst.n:
        missing = next(a for a in range(inst.n) if a not in parent)
        raise ContractViolation(f"constraint graph is disconnected: agent {missing} unreachable from root {root}")

    children = {a: [] for a in parent}
    for a, p in parent.items():
        if p is not None:
            children[p].append(a)

    tie_keys = np.random.default_rng(seed).permutation(inst.n)
    order = sorted(range(inst.n), key=lambda a: (depth[a], tie_keys[a]))
    priority = {a: rank for rank, a in enumerate(order)}

    return PseudoTree(
        root=root,
        parent=dict(sorted(parent.items())),
        children={a: tuple(sorted(children[a])) for a in sorted(children)},
        neighbors={a: tuple(inst.neighbors[a]) for a in range(inst.n)},
        depth=dict(sorted(depth.items())),
        priority=priority,
    )


def broadcast_order(tree):
    """Agents by nondecreasing depth, ties by id; the root comes first."""
    return sorted(tree.parent, key=lambda a: (tree.depth[a], a))
