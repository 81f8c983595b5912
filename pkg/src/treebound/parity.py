"""Spanning forests with prescribed degree parities and caps.

The existence criterion is classical (count odd components against the cap
sum); the construction here is local search: seed the unique parity subforest
of a spanning tree, then clear cap violations by toggling fundamental cycles,
which preserves every degree parity and never increases any degree beyond
its current value at the toggle endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Multigraph, SpanningSubgraph, _DSU, components
from .excess import Certificate, Inconclusive, make_certificate

EXHAUSTIVE_COMPONENT_CAP = 12
PARITY_NODE_BUDGET = 400_000


@dataclass(frozen=True)
class ParitySpec:
    """Caps f with parity semantics: with odd_set Q, degrees must be odd
    exactly on Q (f then must be positive); with Q None, every degree must
    match f's parity (f may be zero)."""

    f: tuple[int, ...]
    odd_set: frozenset[int] | None = None

    @staticmethod
    def of(f: Sequence[int], Q: Iterable[int] | None = None) -> "ParitySpec":
        return ParitySpec(tuple(int(x) for x in f),
                          None if Q is None else frozenset(int(v) for v in Q))

    def effective_caps(self) -> list[int]:
        """The parity-matched caps f' (f or f-1 per vertex)."""
        if self.odd_set is None:
            if any(x < 0 for x in self.f):
                raise ValueError("caps must be nonnegative")
            return list(self.f)
        if len(self.odd_set) % 2 == 1:
            raise ValueError("odd-degree set must have even size")
        if any(x < 1 for x in self.f):
            raise ValueError("caps must be positive in the odd-set form")
        out = []
        for v, cap in enumerate(self.f):
            want_odd = v in self.odd_set
            out.append(cap if cap % 2 == (1 if want_odd else 0) else cap - 1)
        return out


def odd_f_count(g: Multigraph, f: Sequence[int], S: Iterable[int] = ()) -> int:
    """Number of components of G minus S holding an odd number of vertices
    with f odd."""
    S = frozenset(S)
    count = 0
    for comp in components(g, without_vertices=S):
        if sum(1 for v in comp if f[v] % 2 == 1) % 2 == 1:
            count += 1
    return count


def tree_parity_subforest(T: SpanningSubgraph, Q: Iterable[int]) -> SpanningSubgraph:
    """The unique edge subset of the forest T whose odd-degree set is exactly
    Q, computed leaf-to-root.  Requires |Q ∩ component| even throughout."""
    Q = frozenset(Q)
    if len(Q) % 2 == 1:
        raise ValueError("odd-degree set must have even size")
    host = T.host
    if not T.is_forest():
        raise ValueError("T must be a forest")
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(host.n)}
    for eid in T.edge_id_list():
        u, v = host.edges[eid]
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    chosen: set[int] = set()
    seen = [False] * host.n
    for root in range(host.n):
        if seen[root]:
            continue
        order = []
        parent_edge: dict[int, tuple[int, int]] = {}
        stack = [root]
        seen[root] = True
        while stack:
            x = stack.pop()
            order.append(x)
            for y, eid in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    parent_edge[y] = (x, eid)
                    stack.append(y)
        need = {v: (v in Q) for v in order}
        deg = {v: 0 for v in order}
        for x in reversed(order):
            if x == root:
                if (deg[x] % 2 == 1) != need[x]:
                    raise ValueError(
                        "odd-degree set has odd intersection with a component"
                    )
                continue
            if (deg[x] % 2 == 1) != need[x]:
                px, eid = parent_edge[x]
                chosen.add(eid)
                deg[x] += 1
                deg[px] += 1
    return SpanningSubgraph.of(host, chosen)


def _forest_path(host: Multigraph, edge_set: set[int], s: int, t: int) -> list[int] | None:
    adj: dict[int, list[tuple[int, int]]] = {}
    for eid in edge_set:
        u, v = host.edges[eid]
        adj.setdefault(u, []).append((v, eid))
        adj.setdefault(v, []).append((u, eid))
    prev: dict[int, tuple[int, int]] = {s: (-1, -1)}
    stack = [s]
    while stack:
        x = stack.pop()
        if x == t:
            break
        for y, eid in sorted(adj.get(x, ())):
            if y not in prev:
                prev[y] = (x, eid)
                stack.append(y)
    if t not in prev:
        return None
    path = []
    cur = t
    while cur != s:
        px, pe = prev[cur]
        path.append(pe)
        cur = px
    path.reverse()
    return path


def _parity_descent(g: Multigraph, comp: list[int], caps: Sequence[int],
                    F: set[int]) -> bool:
    """Clear cap violations by toggling fundamental cycles: replacing the
    forest path of a chord by the chord drops two from every interior vertex
    and leaves all parities fixed.  True when no violation remains."""
    comp_set = set(comp)
    chords = [
        eid for eid, (u, v) in enumerate(g.edges)
        if u in comp_set and v in comp_set
    ]
    while True:
        deg = {v: 0 for v in comp}
        for eid in F:
            u, v = g.edges[eid]
            if u in comp_set:
                deg[u] += 1
                deg[v] += 1
        over = sorted(v for v in comp if deg[v] > caps[v])
        if not over:
            return True
        improved = False
        for target in over:
            for eid in chords:
                if eid in F:
                    continue
                u, v = g.edges[eid]
                path = _forest_path(g, F, u, v)
                if path is None:
                    continue
                interior = set()
                for pe in path:
                    interior.update(g.edges[pe])
                interior.discard(u)
                interior.discard(v)
                if target not in interior:
                    continue
                for pe in path:
                    F.discard(pe)
                F.add(eid)
                improved = True
                break
            if improved:
                break
        if not improved:
            return False


class _ParityBudget(Exception):
    pass


def _parity_exhaustive(g: Multigraph, comp: list[int], caps: Sequence[int],
                       budget: int) -> set[int] | None | str:
    """Complete backtracking for one component: an acyclic edge set with
    degree d(v) <= caps[v] and d(v) = caps[v] (mod 2) for v in comp."""
    comp_set = set(comp)
    edges = [
        eid for eid, (u, v) in enumerate(g.edges)
        if u in comp_set and v in comp_set
    ]
    last_index: dict[int, int] = {v: -1 for v in comp}
    for i, eid in enumerate(edges):
        u, v = g.edges[eid]
        last_index[u] = i
        last_index[v] = i
    remaining = {v: sum(1 for e in edges if v in g.edges[e]) for v in comp}
    vid = {v: i for i, v in enumerate(comp)}
    deg = {v: 0 for v in comp}
    chosen: list[int] = []
    state = {"nodes": budget}

    def vertex_ok(v: int, closed: bool) -> bool:
        d, cap, rem = deg[v], caps[v], remaining[v]
        if d > cap:
            return False
        if closed:
            return d % 2 == cap % 2
        if d % 2 == cap % 2:
            return True
        return rem >= 1 and d + 1 <= cap

    def backtrack(i: int, dsu: _DSU) -> set[int] | None:
        state["nodes"] -= 1
        if state["nodes"] < 0:
            raise _ParityBudget
        if i == len(edges):
            return set(chosen)
        eid = edges[i]
        u, v = g.edges[eid]
        # include
        if dsu.find(vid[u]) != dsu.find(vid[v]) and deg[u] < caps[u] and deg[v] < caps[v]:
            snap = (dsu.parent[:], dsu.rank[:])
            dsu.union(vid[u], vid[v])
            deg[u] += 1
            deg[v] += 1
            remaining[u] -= 1
            remaining[v] -= 1
            chosen.append(eid)
            if all(vertex_ok(w, last_index[w] == i) for w in (u, v)):
                res = backtrack(i + 1, dsu)
                if res is not None:
                    return res
            chosen.pop()
            deg[u] -= 1
            deg[v] -= 1
            remaining[u] += 1
            remaining[v] += 1
            dsu.parent, dsu.rank = snap
        # exclude
        remaining[u] -= 1
        remaining[v] -= 1
        ok = all(vertex_ok(w, last_index[w] == i) for w in (u, v))
        res = backtrack(i + 1, dsu) if ok else None
        remaining[u] += 1
        remaining[v] += 1
        return res

    try:
        return backtrack(0, _DSU(len(comp)))
    except _ParityBudget:
        return "unknown"


def parity_forest(
    g: Multigraph, spec: ParitySpec
) -> SpanningSubgraph | Certificate | Inconclusive:
    """Spanning forest meeting spec's caps and exact parities, or a
    certificate set S with odd_f(G - S) > sum of caps over S."""
    caps = spec.effective_caps()
    if len(caps) != g.n:
        raise ValueError("cap function must cover V(G)")
    comps = components(g)
    forest: set[int] = set()
    for comp in comps:
        comp = sorted(comp)
        odd = [v for v in comp if caps[v] % 2 == 1]
        if len(odd) % 2 == 1:
            return make_certificate(g, "parity", {"f": caps}, ())
        tree = _bfs_tree(g, comp)
        seed = tree_parity_subforest(
            SpanningSubgraph.of(g, tree), frozenset(odd)
        )
        local = set(seed.edge_ids)
        if _parity_descent(g, comp, caps, local):
            forest |= local
            continue
        if len(comp) > EXHAUSTIVE_COMPONENT_CAP:
            return Inconclusive(
                f"parity search stalled on a component of {len(comp)} vertices"
            )
        res = _parity_exhaustive(g, comp, caps, PARITY_NODE_BUDGET)
        if res == "unknown":
            return Inconclusive("parity backtracking budget exhausted")
        if res is None:
            cert = _parity_certificate(g, caps, comp)
            return cert
        forest |= res
    out = SpanningSubgraph.of(g, forest)
    _validate_parity_forest(g, out, caps)
    return out


def _bfs_tree(g: Multigraph, comp: list[int]) -> set[int]:
    root = comp[0]
    seen = {root}
    tree: set[int] = set()
    queue = [root]
    while queue:
        x = queue.pop(0)
        for y, eid in sorted(g.adj[x]):
            if y not in seen:
                seen.add(y)
                tree.add(eid)
                queue.append(y)
    return tree


def _parity_certificate(g: Multigraph, caps: Sequence[int], comp: list[int]
                        ) -> Certificate:
    """Exhaustive scan over S within the infeasible component."""
    from itertools import combinations

    for size in range(len(comp) + 1):
        for S in combinations(comp, size):
            lhs = odd_f_count(g, caps, S)
            rhs = sum(caps[v] for v in S)
            if lhs > rhs:
                return make_certificate(g, "parity", {"f": list(caps)}, S)
    raise AssertionError("infeasible parity component must violate the criterion")


def _validate_parity_forest(g: Multigraph, F: SpanningSubgraph, caps: Sequence[int]
                            ) -> None:
    assert F.is_forest(), "parity output must be acyclic"
    deg = F.degrees()
    for v in range(g.n):
        assert deg[v] <= caps[v], f"cap violated at {v}"
        assert deg[v] % 2 == caps[v] % 2, f"parity violated at {v}"


def bounded_parity_forest(
    g: Multigraph, k: int, kind: str, Q: Iterable[int]
) -> SpanningSubgraph | Certificate | Inconclusive:
    """Spanning forest with odd degrees exactly on Q and caps
    ceil(d/k)+1 (k-edge-connected) or ceil(d/k) (k-tree-connected)."""
    if kind == "k-edge-connected":
        bump = 1
    elif kind == "k-tree-connected":
        bump = 0
    else:
        raise ValueError(f"unknown connectivity kind {kind!r}")
    f = [-(-g.degree(v) // k) + bump for v in range(g.n)]
    return parity_forest(g, ParitySpec.of(f, Q))
