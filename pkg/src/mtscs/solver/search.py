"""Combinatorial solvers for the minimum t-spanning control set.

``solve_exact`` is a depth-first branch and bound over primitive
inclusion.  A node fixes some primitives in (``inn``) and some out; the
rest are free.  For every vertex ``j`` not yet t-reachable from ``inn``
alone, the candidate set ``D(j)`` holds the free primitives with an edge
``(u, v)`` such that ``fwd(u) + c_p + bwd(v, j) <= t c_j`` over the
permitted edges.  Any solution below the node must pick something from
each ``D(j)``, which drives forcing, pruning and branching:

* a vertex with ``|D(j)| = 1`` forces that primitive in;
* a free primitive in no ``D(j)`` can be dropped;
* pairwise-disjoint ``D(j)`` sets give a lower bound (set packing).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from ..lattice import Lattice
from ..spanner import T_MARGIN, ControlSet, restricted_distances, within

BRUTE_FORCE_LIMIT = 20


class SolverError(ValueError):
    pass


@dataclass
class SolveResult:
    control_set: ControlSet
    status: str  # optimal | feasible | infeasible | budget_exhausted
    lower_bound: int
    nodes_explored: int = 0
    wall_time: float = 0.0
    incumbents: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.control_set)


class _Problem:
    """Array view of a lattice for repeated shortest-path queries."""

    def __init__(self, lattice: Lattice, t: float):
        self.lattice = lattice
        self.t = t
        n = self.n = lattice.n
        c = lattice.costs
        roots = np.array(lattice.roots, dtype=np.int64)
        self.roots = roots
        e = lattice.edges
        e = e[~np.isin(e[:, 1], roots)]
        self.ei, self.ej, self.ep = (np.ascontiguousarray(col) for col in e.T)
        self.w = c[self.ep]
        self.prims = np.array(lattice.primitives, dtype=np.int64)
        self.P = len(self.prims)
        pidx = np.full(n, -1, dtype=np.int64)
        pidx[self.prims] = np.arange(self.P)
        self.eq = pidx[self.ep]
        is_target = np.ones(n, dtype=bool)
        is_target[roots] = False
        self.targets = np.flatnonzero(is_target)
        self.bound = t * c * (1.0 + T_MARGIN)
        pair = self.ei * n + self.ej
        self.dup = len(np.unique(pair)) != len(pair)
        # direct root -> p edges, used by the greedy heuristic
        self.direct = {int(p) for i, j, p in zip(self.ei, self.ej, self.ep)
                       if i == lattice.root_of(int(p)) and j == p}

    def graph(self, allowed: np.ndarray) -> sparse.csr_matrix:
        m = allowed[self.eq]
        i, j, w = self.ei[m], self.ej[m], self.w[m]
        if self.dup and len(i):
            order = np.lexsort((w, j, i))
            i, j, w = i[order], j[order], w[order]
            first = np.r_[True, (i[1:] != i[:-1]) | (j[1:] != j[:-1])]
            i, j, w = i[first], j[first], w[first]
        return sparse.csr_matrix((w, (i, j)), shape=(self.n, self.n))

    def dist(self, allowed: np.ndarray) -> np.ndarray:
        if not allowed.any():
            d = np.full(self.n, np.inf)
            d[self.roots] = 0.0
            return d
        return dijkstra(self.graph(allowed), indices=self.roots, min_only=True)

    def uncovered(self, allowed: np.ndarray) -> np.ndarray:
        d = self.dist(allowed)
        t = self.targets
        return t[d[t] > self.bound[t]]

    def candidates(self, d_fwd: np.ndarray, allowed: np.ndarray, free: np.ndarray, U: np.ndarray) -> np.ndarray:
        """Boolean matrix (P, |U|): free primitive on a t-feasible path to U[k]."""
        D = np.zeros((self.P, len(U)), dtype=bool)
        fe = free[self.eq] & np.isfinite(d_fwd[self.ei])
        if not fe.any():
            return D
        pre = d_fwd[self.ei[fe]] + self.w[fe]
        bU = self.bound[U]
        keep = pre <= bU.max()
        if not keep.any():
            return D
        q = self.eq[fe][keep]
        tail = self.ej[fe][keep]
        back = dijkstra(self.graph(allowed).T.tocsr(), indices=U)  # back[k, v] = dist(v -> U[k])
        ok = (pre[keep][:, None] + back[:, tail].T) <= bU[None, :]
        starts = np.flatnonzero(np.r_[True, q[1:] != q[:-1]])
        D[q[starts]] = np.logical_or.reduceat(ok, starts, axis=0)
        return D

    def control(self, mask: np.ndarray) -> ControlSet:
        return ControlSet(frozenset(int(p) for p in self.prims[mask]), self.t)


def _bitmasks(D: np.ndarray) -> list[int]:
    if D.shape[1] == 0:
        return []
    packed = np.packbits(D, axis=0)
    return [int.from_bytes(packed[:, k].tobytes(), "big") for k in range(D.shape[1])]


def _packing(masks: list[int], orders: Iterable[Iterable[int]]) -> int:
    best = 0
    for order in orders:
        used = 0
        count = 0
        for k in order:
            if not masks[k] & used:
                used |= masks[k]
                count += 1
        best = max(best, count)
    return best


# -- greedy ------------------------------------------------------------

def greedy_control_set(lattice: Lattice, t: float) -> ControlSet:
    """Scan vertices by increasing cost; add ``j`` whenever it is not t-reachable.

    When the lattice lacks a direct root edge to ``j`` the primitives of
    a shortest unrestricted path to ``j`` are added instead.
    """
    if t < 1.0:
        raise SolverError("t must be at least 1")
    prob = _Problem(lattice, t)
    chosen = np.zeros(prob.P, dtype=bool)
    pos = {int(p): k for k, p in enumerate(prob.prims)}
    order = sorted(prob.targets.tolist(), key=lambda v: (lattice.costs[v], v))
    d = prob.dist(chosen)
    full_parent = None
    for j in order:
        if d[j] <= prob.bound[j]:
            continue
        if j in prob.direct:
            chosen[pos[j]] = True
        else:
            if full_parent is None:
                full_parent = _parents(prob)
            for p in _path_prims(full_parent, j):
                chosen[pos[p]] = True
        d = prob.dist(chosen)
    return prob.control(chosen)


def _parents(prob: _Problem) -> dict[int, tuple[int, int]]:
    from ..spanner import extract_arborescence

    return extract_arborescence(prob.lattice, prob.prims.tolist()).parent


def _path_prims(parent, v) -> list[int]:
    out = []
    while v in parent:
        u, p = parent[v]
        out.append(p)
        v = u
    return out


# -- brute force -------------------------------------------------------

def brute_force(lattice: Lattice, t: float) -> SolveResult:
    """Smallest t-spanning subset by enumeration (lexicographically least).

    Spanning is decided with the heap-based distances of :mod:`spanner`,
    independent of the branch-and-bound machinery.
    """
    prims = lattice.primitives
    if len(prims) > BRUTE_FORCE_LIMIT:
        raise SolverError(f"brute force is limited to {BRUTE_FORCE_LIMIT} primitives, got {len(prims)}")
    t0 = time.perf_counter()
    costs = lattice.costs
    targets = [v for v in range(lattice.n) if not lattice.is_root(v)]
    # a subset must contain, per vertex, at least one primitive ending an edge into it
    last = {j: 0 for j in targets}
    bit = {p: 1 << k for k, p in enumerate(prims)}
    for i, j, p in lattice.edges.tolist():
        if j in last:
            last[j] |= bit[p]
    needs = list(last.values())
    checked = 0
    for size in range(len(prims) + 1):
        for combo in itertools.combinations(prims, size):
            m = 0
            for p in combo:
                m |= bit[p]
            if any(not (m & need) for need in needs):
                continue
            checked += 1
            d = restricted_distances(lattice, combo)
            if all(within(d[v], t, costs[v]) for v in targets):
                cs = ControlSet(frozenset(combo), t)
                return SolveResult(cs, "optimal", size, checked, time.perf_counter() - t0, [size])
    return SolveResult(ControlSet(frozenset(), t), "infeasible", 0, checked, time.perf_counter() - t0)


# -- branch and bound --------------------------------------------------

_INFEASIBLE, _SOLUTION, _BRANCH = 0, 1, 2


def _evaluate(prob: _Problem, inn: np.ndarray, free: np.ndarray):
    """Propagate a node in place; return (kind, U, D)."""
    targets = prob.targets
    while True:
        allowed = inn | free
        d_all = prob.dist(allowed)
        if np.any(d_all[targets] > prob.bound[targets]):
            return _INFEASIBLE, None, None
        U = prob.uncovered(inn)
        if len(U) == 0:
            return _SOLUTION, U, None
        D = prob.candidates(d_all, allowed, free, U)
        sizes = D.sum(axis=0)
        if np.any(sizes == 0):
            return _INFEASIBLE, None, None
        free &= D.any(axis=1)
        single = sizes == 1
        if single.any():
            forced = np.flatnonzero(D[:, single].any(axis=1))
            inn[forced] = True
            free[forced] = False
            continue
        return _BRANCH, U, D


def solve_exact(
    lattice: Lattice,
    t: float,
    *,
    node_limit: Optional[int] = None,
    time_limit: Optional[float] = None,
    initial: Optional[ControlSet] = None,
) -> SolveResult:
    """Minimum t-spanning control set by branch and bound.

    Returns ``optimal`` when the search completes, otherwise ``feasible``
    with the best set found and the proven lower bound.
    """
    if t < 1.0:
        raise SolverError("t must be at least 1")
    t0 = time.perf_counter()
    prob = _Problem(lattice, t)
    costs = lattice.costs

    inn = np.zeros(prob.P, dtype=bool)
    free = np.ones(prob.P, dtype=bool)
    if not np.all(prob.dist(free)[prob.targets] <= prob.bound[prob.targets]):
        return SolveResult(ControlSet(frozenset(), t), "infeasible", 0, 1, time.perf_counter() - t0)

    if initial is None:
        initial = greedy_control_set(lattice, t)
    pos = {int(p): k for k, p in enumerate(prob.prims)}
    best = np.zeros(prob.P, dtype=bool)
    best[[pos[p] for p in initial.primitive_ids]] = True
    best_size = int(best.sum())
    history = [best_size]

    stack = [(inn, free, 0)]
    nodes = 0
    exhausted = False
    while stack:
        if (node_limit is not None and nodes >= node_limit) or (
            time_limit is not None and time.perf_counter() - t0 > time_limit
        ):
            exhausted = True
            break
        inn, free, parent_lb = stack.pop()
        if parent_lb >= best_size:
            continue
        nodes += 1
        kind, U, D = _evaluate(prob, inn, free)
        n_in = int(inn.sum())
        if kind == _INFEASIBLE or n_in >= best_size:
            continue
        if kind == _SOLUTION:
            best, best_size = inn.copy(), n_in
            history.append(best_size)
            continue
        sizes = D.sum(axis=0)
        masks = _bitmasks(D)
        by_size = sorted(range(len(U)), key=lambda k: (sizes[k], costs[U[k]], U[k]))
        by_cost = sorted(range(len(U)), key=lambda k: (costs[U[k]], U[k]))
        lb = n_in + _packing(masks, (by_size, by_cost))
        if lb >= best_size:
            continue
        k = by_size[0]
        cand = np.flatnonzero(D[:, k])
        cover = D[cand].sum(axis=1)
        order = [int(cand[m]) for m in sorted(range(len(cand)), key=lambda m: (-cover[m], cand[m]))]
        # push in reverse so the first child is explored first
        children = []
        excluded = free.copy()
        for p in order:
            ci, cf = inn.copy(), excluded.copy()
            ci[p] = True
            cf[p] = False
            children.append((ci, cf, lb))
            excluded[p] = False
        stack.extend(reversed(children))

    wall = time.perf_counter() - t0
    cs = prob.control(best)
    if exhausted:
        lower = min([best_size] + [entry[2] for entry in stack])
        status = "optimal" if lower >= best_size else "feasible"
        return SolveResult(cs, status, int(lower), nodes, wall, history)
    return SolveResult(cs, "optimal", best_size, nodes, wall, history)
