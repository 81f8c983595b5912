"""Edge-disjoint spanning tree packing and tree-connectivity structure.

pack_trees runs matroid-union style augmentation passes; both exits are
self-certifying (the m trees are validated, a failed state yields a vertex
partition P with e_G(P) < m(|P|-1), checked before returning).  m_components
contracts non-singleton m-tree-connected induced subgraphs to a fixed point,
discovering candidates by a densest-subset max-flow with an exhaustive scan
below _EXHAUSTIVE_CAP vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .graph import (
    Multigraph,
    SpanningSubgraph,
    VertexPartition,
    _DSU,
    _require_nonnull,
    contract_partition,
    crossing_edges,
    induced_subgraph,
)

_EXHAUSTIVE_CAP = 12


@dataclass(frozen=True)
class TreePacking:
    host: Multigraph
    m: int
    trees: tuple[frozenset[int], ...]

    def subgraphs(self) -> list[SpanningSubgraph]:
        return [SpanningSubgraph(self.host, t) for t in self.trees]

    def union_subgraph(self) -> SpanningSubgraph:
        ids: set[int] = set()
        for t in self.trees:
            ids |= t
        return SpanningSubgraph(self.host, frozenset(ids))

    def to_jsonable(self):
        return {"status": "packing", "trees": [sorted(t) for t in self.trees]}


@dataclass(frozen=True)
class DeficientPartition:
    """Witness that no m-tree packing exists: e_G(P) < m(|P|-1)."""

    host: Multigraph
    m: int
    partition: VertexPartition
    crossing: int

    def __post_init__(self):
        if len(self.partition) < 2:
            raise ValueError("deficient partition needs >= 2 parts")
        if self.crossing >= self.m * (len(self.partition) - 1):
            raise ValueError("partition is not deficient")

    def to_jsonable(self):
        return {
            "status": "deficient",
            "parts": [sorted(p) for p in self.partition.parts],
            "crossing": self.crossing,
            "bound": self.m * (len(self.partition) - 1),
        }


@dataclass(frozen=True)
class ComponentDecomposition:
    """Partition into maximal m-tree-connected components plus Omega_m."""

    host: Multigraph
    m: int
    partition: VertexPartition
    omega_m: Fraction

    def component_index(self) -> list[int]:
        return self.partition.part_index(self.host.n)


class _ForestState:
    """m edge-disjoint forests of a host graph, with incremental adjacency."""

    def __init__(self, g: Multigraph, m: int):
        self.g = g
        self.m = m
        self.forest_of: dict[int, int] = {}
        self.adj: list[dict[int, list[tuple[int, int]]]] = [
            {v: [] for v in range(g.n)} for _ in range(m)
        ]

    def add(self, eid: int, i: int) -> None:
        u, v = self.g.edges[eid]
        self.adj[i][u].append((v, eid))
        self.adj[i][v].append((u, eid))
        self.forest_of[eid] = i

    def remove(self, eid: int, i: int) -> None:
        u, v = self.g.edges[eid]
        self.adj[i][u].remove((v, eid))
        self.adj[i][v].remove((u, eid))
        del self.forest_of[eid]

    def path(self, i: int, s: int, t: int) -> list[int] | None:
        """Edge ids of the forest-i path from s to t, or None."""
        if s == t:
            return []
        prev: dict[int, tuple[int, int]] = {s: (-1, -1)}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y, eid in self.adj[i][x]:
                if y in prev:
                    continue
                prev[y] = (x, eid)
                if y == t:
                    path = []
                    cur = t
                    while cur != s:
                        px, pe = prev[cur]
                        path.append(pe)
                        cur = px
                    path.reverse()
                    return path
                queue.append(y)
        return None

    def placed(self) -> int:
        return len(self.forest_of)


def _augment(state: _ForestState, e0: int) -> bool:
    """Try to place e0 via a swap chain; True on success."""
    g, m = state.g, state.m
    label: dict[int, tuple[int, int] | None] = {e0: None}
    queue = deque([e0])
    while queue:
        x = queue.popleft()
        xu, xv = g.edges[x]
        home = state.forest_of.get(x)
        for i in range(m):
            if i == home:
                continue
            path = state.path(i, xu, xv)
            if path is None:
                # x fits in forest i; unwind the chain of displacements
                cur, dest = x, i
                while True:
                    lab = label[cur]
                    if lab is None:
                        state.add(cur, dest)
                        break
                    parent, j = lab
                    state.remove(cur, j)
                    state.add(cur, dest)
                    cur, dest = parent, j
                return True
            for y in path:
                if y not in label:
                    label[y] = (x, i)
                    queue.append(y)
    return False


def _deficient_from_state(g: Multigraph, m: int, state: _ForestState
                          ) -> DeficientPartition:
    """Closure of the unplaced edges under forest fundamental cycles; its
    vertex components give a partition with e_G(P) < m(|P|-1)."""
    unplaced = [e for e in range(g.num_edges) if e not in state.forest_of]
    closed = set(unplaced)
    queue = deque(sorted(unplaced))
    while queue:
        x = queue.popleft()
        xu, xv = g.edges[x]
        for i in range(m):
            if state.forest_of.get(x) == i:
                continue
            path = state.path(i, xu, xv)
            assert path is not None, "stuck state must close every edge"
            for y in path:
                if y not in closed:
                    closed.add(y)
                    queue.append(y)
    dsu = _DSU(g.n)
    for eid in closed:
        u, v = g.edges[eid]
        dsu.union(u, v)
    parts: dict[int, set[int]] = {}
    for v in range(g.n):
        parts.setdefault(dsu.find(v), set()).add(v)
    P = VertexPartition.of(parts.values())
    crossing = crossing_edges(g, P)
    return DeficientPartition(g, m, P, crossing)


def pack_trees(g: Multigraph, m: int) -> TreePacking | DeficientPartition:
    """m edge-disjoint spanning trees of G, or a deficient partition."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _require_nonnull(g)
    if g.n == 1:
        return TreePacking(g, m, tuple(frozenset() for _ in range(m)))
    state = _ForestState(g, m)
    target = m * (g.n - 1)
    pending = list(range(g.num_edges))
    progress = True
    while progress and state.placed() < target:
        progress = False
        still = []
        for e in pending:
            if state.placed() >= target:
                break
            if _augment(state, e):
                progress = True
            else:
                still.append(e)
        pending = still
    if state.placed() == target:
        trees = [frozenset(e for e, i in state.forest_of.items() if i == k)
                 for k in range(m)]
        for t in trees:
            sub = SpanningSubgraph(g, t)
            assert len(t) == g.n - 1 and sub.is_forest(), "packing invalid"
        return TreePacking(g, m, tuple(trees))
    return _deficient_from_state(g, m, state)


def is_m_tree_connected(g: Multigraph, m: int) -> bool:
    return isinstance(pack_trees(g, m), TreePacking)


# --- densest-subset discovery for m_components ------------------------------


def _forced_dense_subset(g: Multigraph, m: int, u: int) -> set[int]:
    """Maximal maximizer of e(X) - m|X| over X containing u (project
    selection min-cut; the maximal min-cut source side)."""
    E = g.num_edges
    num = 2 + E + g.n
    s, t = 0, 1
    enode = lambda e: 2 + e
    vnode = lambda v: 2 + E + v
    inf = E + m * g.n + 1
    rows, cols, caps = [], [], []

    def arc(a, b, c):
        rows.append(a)
        cols.append(b)
        caps.append(c)

    for e, (a, b) in enumerate(g.edges):
        arc(s, enode(e), 1)
        arc(enode(e), vnode(a), inf)
        arc(enode(e), vnode(b), inf)
    for v in range(g.n):
        if v != u:
            arc(vnode(v), t, m)
    mat = csr_matrix(
        (np.array(caps, dtype=np.int32), (rows, cols)), shape=(num, num)
    )
    res = maximum_flow(mat, s, t)
    flow = res.flow
    # residual arcs: forward where cap > flow, backward where flow > 0
    radj: list[list[int]] = [[] for _ in range(num)]  # reversed residual
    mat_coo = mat.tocoo()
    for a, b, c in zip(mat_coo.row, mat_coo.col, mat_coo.data):
        f = flow[a, b]
        if f < c:
            radj[b].append(a)
        if f > 0:
            radj[a].append(b)
    can_reach_t = [False] * num
    can_reach_t[t] = True
    queue = deque([t])
    while queue:
        x = queue.popleft()
        for y in radj[x]:
            if not can_reach_t[y]:
                can_reach_t[y] = True
                queue.append(y)
    X = {v for v in range(g.n) if not can_reach_t[vnode(v)]}
    X.add(u)
    return X


def _subset_value(g: Multigraph, m: int, X: set[int]) -> int:
    """e(X) - m(|X| - 1)."""
    inside = sum(1 for a, b in g.edges if a in X and b in X)
    return inside - m * (len(X) - 1)


def _shrink_to_tree_connected(g: Multigraph, m: int, X: set[int]) -> set[int]:
    """Shrink a set with e(X) >= m(|X|-1), |X| >= 2, to an m-tree-connected
    one via repeated deficient partitions."""
    while True:
        sub, old_v, _ = induced_subgraph(g, X)
        res = pack_trees(sub, m)
        if isinstance(res, TreePacking):
            return X
        candidates = []
        for part in res.partition.parts:
            if len(part) < 2:
                continue
            W = {old_v[i] for i in part}
            val = _subset_value(g, m, W)
            if val >= 1:
                candidates.append((-val, min(W), sorted(W)))
        assert candidates, "deficient split of a dense set keeps a dense part"
        X = set(min(candidates)[2])


def _find_nontrivial_tree_connected(g: Multigraph, m: int) -> set[int] | None:
    """Some induced m-tree-connected subgraph on >= 2 vertices, or None."""
    if g.n < 2:
        return None
    if g.n <= _EXHAUSTIVE_CAP:
        from itertools import combinations

        ends = g.edges
        for k in range(g.n, 1, -1):
            for combo in combinations(range(g.n), k):
                mask = set(combo)
                inside = sum(1 for a, b in ends if a in mask and b in mask)
                if inside < m * (k - 1):
                    continue
                sub, _, _ = induced_subgraph(g, mask)
                if isinstance(pack_trees(sub, m), TreePacking):
                    return mask
        return None
    for u in range(g.n):
        X = _forced_dense_subset(g, m, u)
        if len(X) >= 2:
            assert _subset_value(g, m, X) >= 0
            return _shrink_to_tree_connected(g, m, X)
    return None


def m_components(g: Multigraph, m: int) -> ComponentDecomposition:
    """The unique partition into maximal induced m-tree-connected subgraphs,
    found by contracting non-singleton m-tree-connected sets to a fixed
    point, plus Omega_m as an exact rational."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _require_nonnull(g)
    groups: list[frozenset[int]] = [frozenset({v}) for v in range(g.n)]
    cur = g
    while True:
        X = _find_nontrivial_tree_connected(cur, m)
        if X is None:
            break
        parts = [X] + [{v} for v in range(cur.n) if v not in X]
        P = VertexPartition.of(parts)
        merged: list[frozenset[int]] = []
        for part in P.parts:
            acc: set[int] = set()
            for v in part:
                acc |= groups[v]
            merged.append(frozenset(acc))
        cur, _ = contract_partition(cur, P)
        groups = merged
    P = VertexPartition.of(groups)
    crossing = crossing_edges(g, P)
    return ComponentDecomposition(g, m, P, len(P) - Fraction(crossing, m))


def omega_m(g: Multigraph, m: int) -> Fraction:
    """Omega_m(G); the null graph scores 0 by convention."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if g.n == 0:
        return Fraction(0)
    return m_components(g, m).omega_m


def m_critical_reduce(F: SpanningSubgraph, m: int) -> SpanningSubgraph:
    """Remove edges inside each m-tree-connected component of F until every
    component is minimally m-tree-connected; edges between components stay."""
    host = F.host
    fg = F.as_multigraph()
    fids = F.edge_id_list()  # fg edge id -> host edge id
    decomp = m_components(fg, m)
    comp = decomp.component_index()
    kept: set[int] = set()
    for feid, (u, v) in enumerate(fg.edges):
        if comp[u] != comp[v]:
            kept.add(fids[feid])
    for part in decomp.partition.parts:
        if len(part) < 2:
            continue
        sub, _, old_e = induced_subgraph(fg, part)
        res = pack_trees(sub, m)
        assert isinstance(res, TreePacking), "component must be m-tree-connected"
        for tree in res.trees:
            for se in tree:
                kept.add(fids[old_e[se]])
    return SpanningSubgraph(host, frozenset(kept))


def exchange_edge(
    H: SpanningSubgraph, m: int, M: Iterable[int], new_edge: int
) -> int:
    """An edge e of M such that H - e + new_edge is still m-tree-connected.

    Requires H m-tree-connected and new_edge joining different
    m-tree-connected components of H minus M; the two precondition failures
    raise distinct errors.
    """
    M = sorted(set(int(e) for e in M))
    if not M:
        raise ValueError("M must be nonempty")
    for e in M:
        if e not in H.edge_ids:
            raise ValueError(f"M edge {e} not in H")
    if new_edge in H.edge_ids:
        raise ValueError("new edge already in H")
    if not is_m_tree_connected(H.as_multigraph(), m):
        raise ValueError("H is not m-tree-connected")
    stripped = H.difference(M)
    comp = _component_index_of_subgraph(stripped, m)
    u, v = H.host.edges[new_edge]
    if comp[u] == comp[v]:
        raise ValueError(
            "new edge does not join different m-tree-connected components of H minus M"
        )
    for e in M:
        cand = H.difference([e]).union([new_edge])
        if is_m_tree_connected(cand.as_multigraph(), m):
            return e
    raise AssertionError("exchange guaranteed by tree-connectivity theory")


def _component_index_of_subgraph(sub: SpanningSubgraph, m: int) -> list[int]:
    """m-tree-connected component index of a spanning subgraph, on host ids."""
    return m_components(sub.as_multigraph(), m).component_index()
