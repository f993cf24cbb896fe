"""Independent checks for the distributed solver.

``grid_search`` brute-forces the global utility on a uniform grid.
``centralized_replica`` re-implements the bee-colony search as one sequential
loop over a population matrix, without any message layer.  It consumes every
agent's random substream in the same order and sums fitness terms in the same
order as the distributed protocol, so its trace must equal the distributed
trace field for field.
"""

import math
import time

import numpy as np

from .exceptions import ContractViolation, ReplicaDivergence
from .model import QuadraticConstraint, quadratic_form
from .pseudo_tree import build_bfs_pseudo_tree
from .solver import operators as ops
from .solver.config import DETERMINISTIC_FIELDS, AnytimeTrace, SolverConfig, TraceRecord, agent_rng

DEFAULT_GRID_CAP = 10**7


def grid_search(inst, resolution, cap=DEFAULT_GRID_CAP, chunk=1 << 18):
    """Best point of a ``resolution``-per-axis grid (endpoints included).

    Returns ``(assignment, utility)``.  Ties go to the lexicographically
    smallest assignment.
    """
    if isinstance(resolution, bool) or int(resolution) != resolution or resolution < 2:
        raise ContractViolation(f"resolution must be an integer >= 2, got {resolution!r}")
    resolution = int(resolution)
    total = resolution**inst.n
    if total > cap:
        raise ContractViolation(
            f"grid has {total} points, above the cap of {cap}; "
            f"lower the resolution or use fewer agents"
        )
    axes = [np.linspace(d.lb, d.ub, resolution) for d in inst.domains]
    shape = (resolution,) * inst.n
    best_u, best_idx = -math.inf, None
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.unravel_index(flat, shape)
        cols = [axes[a][idx[a]] for a in range(inst.n)]
        util = np.zeros(len(flat))
        for c in inst.constraints:
            util = util + c.utility(cols[c.i], cols[c.j])
        k = int(np.argmax(util))
        if util[k] > best_u:
            best_u, best_idx = float(util[k]), flat[k]
    point = np.array([axes[a][i] for a, i in enumerate(np.unravel_index(best_idx, shape))])
    return point, best_u


class FitnessKernel:
    """Vectorised population fitness with the protocol's summation order.

    Per agent: neighbour terms in ascending neighbour id, then children's
    subtree sums in ascending child id; the root total is halved.
    """

    def __init__(self, inst, tree):
        self.inst = inst
        n, m = inst.n, inst.m
        self.first = np.array([c.i for c in inst.constraints], dtype=int)
        self.second = np.array([c.j for c in inst.constraints], dtype=int)
        self.quadratic = all(isinstance(c, QuadraticConstraint) for c in inst.constraints)
        if self.quadratic and m:
            coeffs = np.array([c.coeffs.as_tuple() for c in inst.constraints])
            self.coeffs = [coeffs[:, k : k + 1] for k in range(6)]

        edge_of = {}
        for e, c in enumerate(inst.constraints):
            edge_of[(c.i, c.j)] = e
            edge_of[(c.j, c.i)] = e
        maxdeg = max((len(nb) for nb in inst.neighbors), default=0)
        self.incident = np.full((n, maxdeg), m, dtype=int)  # m indexes a zero row
        for a, nb in enumerate(inst.neighbors):
            for k, b in enumerate(nb):
                self.incident[a, k] = edge_of[(a, b)]

        self.levels = []
        height = max(tree.depth.values())
        for d in range(height, -1, -1):
            members = np.array([a for a in range(n) if tree.depth[a] == d], dtype=int)
            width = max(len(tree.children[a]) for a in members)
            kids = np.full((len(members), width), n, dtype=int)  # n indexes a zero row
            for r, a in enumerate(members):
                for k, ch in enumerate(tree.children[a]):
                    kids[r, k] = ch
            self.levels.append((members, kids))
        self.root = tree.root

    def edge_utilities(self, X):
        """Utility of every constraint for every row of ``X``; shape (m, K)."""
        xi = np.ascontiguousarray(X[:, self.first].T)
        xj = np.ascontiguousarray(X[:, self.second].T)
        if self.quadratic:
            return quadratic_form(*self.coeffs, xi, xj)
        return np.array([c.utility(xi[e], xj[e]) for e, c in enumerate(self.inst.constraints)])

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        K = X.shape[0]
        n, m = self.inst.n, self.inst.m
        padded = np.zeros((m + 1, K))
        if m:
            padded[:m] = self.edge_utilities(X)
        # reducing over the leading axis adds whole slabs one after another,
        # which is the left-to-right order the agents use
        local = padded[self.incident.T].sum(axis=0) if self.incident.shape[1] else np.zeros((n, K))
        fit = np.zeros((n + 1, K))
        for members, kids in self.levels:
            if kids.shape[1]:
                fit[members] = np.concatenate([local[members][None], fit[kids.T]]).sum(axis=0)
            else:
                fit[members] = local[members]
        return fit[self.root] / 2


class _MessageTally:
    """Network message counts the distributed protocol would produce."""

    def __init__(self, inst, tree):
        self.n = inst.n
        self.root = tree.root
        self.evaluate = 2 * inst.m + (inst.n - 1)
        self.broadcast = inst.n - 1

    def requests(self, targets):
        return sum(1 for j in targets if j != self.root)


def centralized_replica(inst, config=None, tree=None):
    """Sequential lockstep execution of the search; returns an AnytimeTrace."""
    cfg = config or SolverConfig()
    if inst.n < 2:
        raise ContractViolation("the solver needs at least two agents")
    tree = tree or build_bfs_pseudo_tree(inst, seed=cfg.seed, root_policy=cfg.root_policy)
    n, S, M = inst.n, cfg.S, cfg.M
    doms = inst.domains
    rngs = [agent_rng(cfg.seed, a) for a in range(n)]
    root = tree.root
    rr = rngs[root]
    kernel = FitnessKernel(inst, tree)
    tally = _MessageTally(inst, tree)
    B = tally.broadcast

    X = np.empty((S, n))
    for a in range(n):
        for t in range(S):
            X[t, a] = ops.init_value(doms[a], rngs[a].random())
    gbest_f = -math.inf
    G = np.full(n, np.nan)
    visited = np.zeros((S, n), dtype=bool)

    records = []
    start = time.perf_counter()
    it = 0
    msgs = 0
    while True:
        stop = cfg.max_iter is not None and it >= cfg.max_iter
        if cfg.time_limit is not None:
            stop = stop or (it > 0 and time.perf_counter() - start >= cfg.time_limit)
            if stop:
                records[-1].total_messages += B
            else:
                msgs += B
        if stop:
            break
        it += 1
        evaluations = 0

        # BUILD
        fP = kernel(X)
        evaluations += 1
        msgs += tally.evaluate + B
        b = ops.best_index(fP)
        if fP[b] > gbest_f:
            gbest_f = float(fP[b])
            G = X[b].copy()
            msgs += B
        E = X[ops.select_elite(fP, M)].copy()

        # employed bees
        Q = X.copy()
        targets = [ops.draw_index(rr, n) for _ in range(S)]
        for u, j in enumerate(targets):
            visited[u, j] = True
        msgs += tally.requests(targets) + B
        # plain lists: scalar numpy indexing dominates the inner loops otherwise
        El, Gl, Xl = E.tolist(), G.tolist(), X.tolist()
        for u, j in enumerate(targets):
            rng = rngs[j]
            l = ops.draw_index(rng, M)
            h = ops.draw_other_agent(rng, n, j)
            phi = ops.draw_phi(rng)
            cap_phi = ops.draw_cap_phi(rng)
            Q[u, j] = ops.candidate_update(El[l][h], Gl[j], Xl[u][h], El[l][j], phi, cap_phi, doms[j])
        msgs += 2 * S
        fQ = kernel(Q)
        evaluations += 1
        msgs += tally.evaluate + B
        for u in range(S):
            if fQ[u] > fP[u]:
                X[u] = Q[u]
                fP[u] = fQ[u]
                visited[u, :] = False
        b = ops.best_index(fQ)
        if fQ[b] > gbest_f:
            gbest_f = float(fQ[b])
            G = Q[b].copy()
            Gl = G.tolist()
            msgs += B

        # onlooker bees
        _, prob = ops.selection_probabilities(fP)
        for _ in range(S):
            u = ops.roulette_select(prob, rr.random())
            targets = [ops.draw_index(rr, n) for _ in range(M)]
            visited[u, targets] = True
            msgs += B + tally.requests(targets)
            R = np.empty((M, n))
            R[:] = X[u]
            Xu = X[u].tolist()
            vals = []
            for m, j in enumerate(targets):
                rng = rngs[j]
                h = ops.draw_other_agent(rng, n, j)
                l = ops.draw_index(rng, M)
                phi = ops.draw_phi(rng)
                cap_phi = ops.draw_cap_phi(rng)
                vals.append(ops.candidate_update(El[m][h], Gl[j], Xu[h], El[l][j], phi, cap_phi, doms[j]))
            R[np.arange(M), targets] = vals
            msgs += 2 * M
            fR = kernel(R).tolist()
            evaluations += 1
            msgs += tally.evaluate + B
            t = ops.best_index(fR)
            if fR[t] > fP[u]:
                X[u] = R[t]
                fP[u] = fR[t]
                visited[u, :] = False
            if fR[t] > gbest_f:
                gbest_f = fR[t]
                G = R[t].copy()
                Gl = G.tolist()
                msgs += B

        # scout bees
        if cfg.scouting:
            reinit = [t for t in range(S) if visited[t].all()]
            for t in reinit:
                visited[t, :] = False
            for a in range(n):
                for t in reinit:
                    X[t, a] = ops.init_value(doms[a], rngs[a].random())
            fP[reinit] = np.nan
            msgs += B

        records.append(
            TraceRecord(
                iteration=it,
                elapsed_ms=(time.perf_counter() - start) * 1000.0,
                gbest_utility=gbest_f,
                employed_requests=S,
                onlooker_requests=S * M,
                total_messages=msgs,
                evaluations=evaluations,
            )
        )
        msgs = 0

    return AnytimeTrace(
        records=records,
        assignment=G.copy(),
        utility=gbest_f,
        config=cfg,
        stats={"engine": "replica", "tree_root": root},
    )


def compare_traces(left, right, fields=DETERMINISTIC_FIELDS):
    """Raise ReplicaDivergence at the first differing record field."""
    lr = left.records if hasattr(left, "records") else left
    rr = right.records if hasattr(right, "records") else right
    for a, b in zip(lr, rr):
        for name in fields:
            va, vb = getattr(a, name), getattr(b, name)
            if va != vb and not (isinstance(va, float) and math.isnan(va) and math.isnan(vb)):
                raise ReplicaDivergence(a.iteration, name, va, vb)
    if len(lr) != len(rr):
        k = min(len(lr), len(rr)) + 1
        raise ReplicaDivergence(k, "length", len(lr), len(rr))
