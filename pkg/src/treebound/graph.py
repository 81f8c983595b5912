"""Loopless multigraph with stable integer ids, plus the derived graphs and
counting functions the rest of the toolkit is written against.

Vertices are 0..n-1, edge ids are 0..m-1 in construction order.  Parallel
edges are distinct edge ids; loops are rejected.  All derived graphs return
explicit id maps so callers can reason by identity across G, F, T, H.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence


class Multigraph:
    """Immutable loopless multigraph."""

    __slots__ = ("n", "edges", "__dict__")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be >= 0")
        edges = tuple((int(u), int(v)) for u, v in edges)
        for eid, (u, v) in enumerate(edges):
            if u == v:
                raise ValueError(f"edge {eid} is a loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {eid}=({u},{v}) outside vertex range")
        self.n = n
        self.edges = edges

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """adj[v] = tuple of (neighbour, edge id)."""
        lists: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, (u, v) in enumerate(self.edges):
            lists[u].append((v, eid))
            lists[v].append((u, eid))
        return tuple(tuple(l) for l in lists)

    @cached_property
    def _degrees(self) -> tuple[int, ...]:
        d = [0] * self.n
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return tuple(d)

    def degree(self, v: int) -> int:
        return self._degrees[v]

    def degrees(self) -> tuple[int, ...]:
        return self._degrees

    def max_degree(self) -> int:
        return max(self._degrees, default=0)

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self.edges[eid]

    def incident(self, v: int) -> tuple[int, ...]:
        return tuple(eid for _, eid in self.adj[v])

    @cached_property
    def is_simple(self) -> bool:
        seen = set()
        for u, v in self.edges:
            key = (u, v) if u < v else (v, u)
            if key in seen:
                return False
            seen.add(key)
        return True

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Multigraph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, m={self.num_edges})"


NULL_GRAPH = Multigraph(0, ())


def _require_nonnull(g: Multigraph) -> None:
    if g.n == 0:
        raise ValueError("operation rejects the null graph")


def _check_vertex_set(g: Multigraph, S: Iterable[int]) -> frozenset[int]:
    S = frozenset(int(v) for v in S)
    for v in S:
        if not (0 <= v < g.n):
            raise ValueError(f"unknown vertex id {v}")
    return S


class _DSU:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def components(
    g: Multigraph,
    *,
    without_vertices: frozenset[int] | set[int] = frozenset(),
    edge_ids: Iterable[int] | None = None,
) -> list[set[int]]:
    """Connected components, optionally of a vertex-deleted or edge-restricted
    view.  Deleted vertices do not appear in any component."""
    removed = set(without_vertices)
    dsu = _DSU(g.n)
    eids = range(g.num_edges) if edge_ids is None else edge_ids
    for eid in eids:
        u, v = g.edges[eid]
        if u in removed or v in removed:
            continue
        dsu.union(u, v)
    comps: dict[int, set[int]] = {}
    for v in range(g.n):
        if v in removed:
            continue
        comps.setdefault(dsu.find(v), set()).add(v)
    return sorted(comps.values(), key=min)


def omega(g: Multigraph, S: Iterable[int] = ()) -> int:
    """Number of components of G minus the vertex set S."""
    return len(components(g, without_vertices=_check_vertex_set(g, S)))


def remove_vertices(g: Multigraph, S: Iterable[int]) -> tuple[Multigraph, list[int]]:
    """G with the vertices of S (and incident edges) removed.

    Returns (graph, old_ids) where old_ids[new_vertex] is the original id.
    """
    _require_nonnull(g)
    S = _check_vertex_set(g, S)
    old_ids = [v for v in range(g.n) if v not in S]
    new_of = {v: i for i, v in enumerate(old_ids)}
    edges = [
        (new_of[u], new_of[v]) for u, v in g.edges if u not in S and v not in S
    ]
    return Multigraph(len(old_ids), edges), old_ids


@dataclass(frozen=True)
class SpanningSubgraph:
    """An edge-id subset of a host graph, viewed as a spanning subgraph."""

    host: Multigraph
    edge_ids: frozenset[int]

    def __post_init__(self):
        for eid in self.edge_ids:
            if not (0 <= eid < self.host.num_edges):
                raise ValueError(f"edge id {eid} not in host")

    @staticmethod
    def of(host: Multigraph, edge_ids: Iterable[int] = ()) -> "SpanningSubgraph":
        return SpanningSubgraph(host, frozenset(int(e) for e in edge_ids))

    @staticmethod
    def trivial(host: Multigraph) -> "SpanningSubgraph":
        return SpanningSubgraph(host, frozenset())

    def degree(self, v: int) -> int:
        return self.degrees()[v]

    def degrees(self) -> tuple[int, ...]:
        d = [0] * self.host.n
        for eid in self.edge_ids:
            u, v = self.host.edges[eid]
            d[u] += 1
            d[v] += 1
        return tuple(d)

    def components(self) -> list[set[int]]:
        return components(self.host, edge_ids=self.edge_ids)

    def component_index(self) -> list[int]:
        """comp[v] = index of v's component in self.components() order."""
        idx = [0] * self.host.n
        for i, comp in enumerate(self.components()):
            for v in comp:
                idx[v] = i
        return idx

    def is_forest(self) -> bool:
        dsu = _DSU(self.host.n)
        for eid in sorted(self.edge_ids):
            u, v = self.host.edges[eid]
            if not dsu.union(u, v):
                return False
        return True

    def is_spanning_tree(self) -> bool:
        return self.is_forest() and len(self.edge_ids) == self.host.n - 1

    def union(self, other_ids: Iterable[int]) -> "SpanningSubgraph":
        return SpanningSubgraph(self.host, self.edge_ids | frozenset(other_ids))

    def difference(self, other_ids: Iterable[int]) -> "SpanningSubgraph":
        return SpanningSubgraph(self.host, self.edge_ids - frozenset(other_ids))

    def as_multigraph(self) -> Multigraph:
        """Standalone multigraph on the host vertex set; edge order follows
        sorted edge ids (a parallel id map is returned by edge_id_list)."""
        return Multigraph(self.host.n, [self.host.edges[e] for e in self.edge_id_list()])

    def edge_id_list(self) -> list[int]:
        return sorted(self.edge_ids)

    def __contains__(self, eid: int) -> bool:
        return eid in self.edge_ids

    def __len__(self) -> int:
        return len(self.edge_ids)


def remove_incident_except_forest(
    g: Multigraph, S: Iterable[int], F: SpanningSubgraph
) -> tuple[Multigraph, list[int]]:
    """G\\[S,F]: drop every edge incident to S that is not an edge of F.

    Vertex set is unchanged.  Returns (graph, edge_map) with edge_map[new_eid]
    = host edge id.
    """
    _require_nonnull(g)
    S = _check_vertex_set(g, S)
    if F.host is not g and F.host != g:
        raise ValueError("F is not a subgraph of G")
    keep = surviving_edges(g, S, F)
    return Multigraph(g.n, [g.edges[e] for e in keep]), keep


def surviving_edges(
    g: Multigraph, S: frozenset[int], F: SpanningSubgraph | None
) -> list[int]:
    """Edge ids of G\\[S,F]: e survives iff e in F or e has no end in S."""
    fids = F.edge_ids if F is not None else frozenset()
    out = []
    for eid, (u, v) in enumerate(g.edges):
        if eid in fids or (u not in S and v not in S):
            out.append(eid)
    return out


def omega_incident_removed(
    g: Multigraph, S: Iterable[int], F: SpanningSubgraph | None
) -> int:
    """omega(G\\[S,F]); no vertices are deleted."""
    S = _check_vertex_set(g, S)
    return len(components(g, edge_ids=surviving_edges(g, S, F)))


def count_internal_edges(g: Multigraph, S: Iterable[int]) -> int:
    """e_G(S): edges with both ends in S."""
    S = _check_vertex_set(g, S)
    return sum(1 for u, v in g.edges if u in S and v in S)


def count_forest_crossing(
    g: Multigraph, S: Iterable[int], F: SpanningSubgraph
) -> int:
    """e_G(S,F): edges with both ends in S joining different components of F."""
    S = _check_vertex_set(g, S)
    comp = F.component_index()
    return sum(
        1 for u, v in g.edges if u in S and v in S and comp[u] != comp[v]
    )


def crossing_degree(g: Multigraph, v: int, F: SpanningSubgraph) -> int:
    """d_G(v,F): edges at v whose ends lie in different components of F."""
    if not (0 <= v < g.n):
        raise ValueError(f"unknown vertex id {v}")
    comp = F.component_index()
    return sum(1 for w, _ in g.adj[v] if comp[w] != comp[v])


@dataclass(frozen=True)
class VertexPartition:
    """Disjoint nonempty vertex sets covering a stated ground set."""

    parts: tuple[frozenset[int], ...]
    ground: frozenset[int]

    @staticmethod
    def of(parts: Iterable[Iterable[int]], ground: Iterable[int] | None = None
           ) -> "VertexPartition":
        pts = tuple(frozenset(int(v) for v in p) for p in parts)
        pts = tuple(sorted(pts, key=min))
        seen: set[int] = set()
        for p in pts:
            if not p:
                raise ValueError("empty part")
            if seen & p:
                raise ValueError("parts are not disjoint")
            seen |= p
        gnd = frozenset(seen) if ground is None else frozenset(ground)
        if seen != gnd:
            raise ValueError("parts do not cover the ground set")
        return VertexPartition(pts, gnd)

    @staticmethod
    def singletons(g: Multigraph) -> "VertexPartition":
        return VertexPartition.of([{v} for v in range(g.n)])

    def part_index(self, n: int) -> list[int]:
        idx = [-1] * n
        for i, p in enumerate(self.parts):
            for v in p:
                idx[v] = i
        return idx

    def __len__(self) -> int:
        return len(self.parts)


def crossing_edges(g: Multigraph, P: VertexPartition) -> int:
    """e_G(P): edges whose ends lie in different parts."""
    idx = P.part_index(g.n)
    return sum(1 for u, v in g.edges if idx[u] != idx[v])


def contract_partition(
    g: Multigraph, P: VertexPartition
) -> tuple[Multigraph, list[int]]:
    """G/P: one vertex per part, crossing edges kept as parallel edges.

    Returns (graph, edge_map) with edge_map[new_eid] = host edge id.  Part
    order (hence new vertex ids) follows VertexPartition.of ordering.
    """
    _require_nonnull(g)
    if P.ground != frozenset(range(g.n)):
        raise ValueError("partition must cover V(G)")
    idx = P.part_index(g.n)
    edges = []
    edge_map = []
    for eid, (u, v) in enumerate(g.edges):
        if idx[u] != idx[v]:
            edges.append((idx[u], idx[v]))
            edge_map.append(eid)
    return Multigraph(len(P.parts), edges), edge_map


def induced_subgraph(
    g: Multigraph, X: Iterable[int]
) -> tuple[Multigraph, list[int], list[int]]:
    """G[X] with dense relabeling.

    Returns (graph, old_vertex_ids, old_edge_ids): old_vertex_ids[new_v] and
    old_edge_ids[new_eid] map back to the host.
    """
    X = _check_vertex_set(g, X)
    old_v = sorted(X)
    new_of = {v: i for i, v in enumerate(old_v)}
    edges = []
    old_e = []
    for eid, (u, v) in enumerate(g.edges):
        if u in X and v in X:
            edges.append((new_of[u], new_of[v]))
            old_e.append(eid)
    return Multigraph(len(old_v), edges), old_v, old_e


# --- serialization ---------------------------------------------------------


def to_json(g: Multigraph) -> str:
    """Canonical JSON: {"n": int, "edges": [[u,v],...]}, compact separators,
    edge order defines edge ids."""
    payload = {"n": g.n, "edges": [[u, v] for u, v in g.edges]}
    return json.dumps(payload, separators=(",", ":"))


def from_json(text: str) -> Multigraph:
    data = json.loads(text)
    return Multigraph(int(data["n"]), [(int(u), int(v)) for u, v in data["edges"]])


def to_dot(g: Multigraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        lines.append(f"  {v};")
    for eid, (u, v) in enumerate(g.edges):
        lines.append(f"  {u} -- {v} [label={eid}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_fraction(x: Fraction | int | None) -> str:
    if x is None:
        return "inf"
    return str(Fraction(x))


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


# --- convenient constructions (used across the package and tests) ----------


def complete_graph(n: int) -> Multigraph:
    return Multigraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Multigraph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Multigraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Multigraph:
    return Multigraph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Multigraph:
    return Multigraph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def doubled(g: Multigraph) -> Multigraph:
    """Every edge duplicated; copy of edge e gets id num_edges + e."""
    return Multigraph(g.n, list(g.edges) + list(g.edges))


def complete_bipartite(a: int, b: int) -> Multigraph:
    return Multigraph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def circulant(n: int, offsets: Sequence[int]) -> Multigraph:
    seen = set()
    for off in offsets:
        off %= n
        if off == 0:
            raise ValueError("offset 0 would create loops")
        for i in range(n):
            j = (i + off) % n
            seen.add((min(i, j), max(i, j)))
    return Multigraph(n, sorted(seen))
