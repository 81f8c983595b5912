"""Spanning closed walks and trails: Eulerian circuits, the walk pipeline
(bounded tree + parity forest + circuit), trails through 2-tree-connected
subgraphs, and the independent-set trail surgery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import Multigraph, SpanningSubgraph, components, induced_subgraph
from .excess import (
    Certificate,
    DegreeSpec,
    Inconclusive,
    bounded_m_subgraph,
    bounded_spanning_tree,
    make_certificate,
    min_excess_m_subgraph,
)
from .packing import DeficientPartition, TreePacking, pack_trees
from .parity import ParitySpec, parity_forest, tree_parity_subforest


@dataclass(frozen=True)
class ClosedWalk:
    """Cyclic vertex sequence; consecutive entries (cyclically) are adjacent
    in the host; a vertex's visit count is its number of occurrences."""

    host: Multigraph
    vertices: tuple[int, ...]

    def visits(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v in self.vertices:
            out[v] = out.get(v, 0) + 1
        return out

    def to_jsonable(self):
        return {"status": "solution", "walk": list(self.vertices)}


@dataclass(frozen=True)
class ClosedTrail:
    """Cyclic edge-id sequence with pairwise distinct edges; vertex_seq[i] is
    the tail of edge_seq[i], so vertex_seq[i+1] is its head (cyclically)."""

    host: Multigraph
    edge_seq: tuple[int, ...]
    vertex_seq: tuple[int, ...]

    def edge_support(self) -> frozenset[int]:
        return frozenset(self.edge_seq)

    def visits(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v in self.vertex_seq:
            out[v] = out.get(v, 0) + 1
        return out

    def as_walk(self) -> ClosedWalk:
        return ClosedWalk(self.host, self.vertex_seq)

    def to_jsonable(self):
        return {"status": "solution", "trail": list(self.edge_seq)}


def eulerian_circuit(g: Multigraph) -> ClosedTrail:
    """Hierholzer's circuit through every edge of a connected even-degree
    multigraph; deterministic (lowest edge id first)."""
    if g.n == 0:
        raise ValueError("null graph has no circuit")
    if any(d % 2 == 1 for d in g.degrees()):
        raise ValueError("all degrees must be even")
    if len(components(g)) != 1:
        raise ValueError("graph must be connected")
    if g.num_edges == 0:
        return ClosedTrail(g, (), (0,) if g.n == 1 else ())
    adj = {v: sorted(g.adj[v], key=lambda p: p[1]) for v in range(g.n)}
    ptr = {v: 0 for v in range(g.n)}
    used = [False] * g.num_edges
    start = min(v for v in range(g.n) if g.degree(v) > 0)
    stack: list[tuple[int, int]] = [(start, -1)]  # (vertex, incoming edge)
    verts: list[int] = []
    eids: list[int] = []
    while stack:
        v, ein = stack[-1]
        advanced = False
        while ptr[v] < len(adj[v]):
            w, eid = adj[v][ptr[v]]
            ptr[v] += 1
            if used[eid]:
                continue
            used[eid] = True
            stack.append((w, eid))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if stack:
                verts.append(v)
                eids.append(ein)
    verts.reverse()
    eids.reverse()
    # rotate so the recorded tail sequence starts at the start vertex
    assert len(eids) == g.num_edges
    return ClosedTrail(g, tuple(eids), tuple(verts))


def spanning_eulerian_of_2tc(g: Multigraph) -> ClosedTrail:
    """Spanning connected even-degree subgraph of a 2-tree-connected graph,
    returned as its circuit: pack two trees, fix the first tree's degree
    parities with the unique parity subforest of the second."""
    res = pack_trees(g, 2)
    if isinstance(res, DeficientPartition):
        raise ValueError("graph is not 2-tree-connected")
    T1 = SpanningSubgraph(g, res.trees[0])
    T2 = SpanningSubgraph(g, res.trees[1])
    odd = [v for v in range(g.n) if T1.degree(v) % 2 == 1]
    fix = tree_parity_subforest(T2, odd)
    support = sorted(T1.edge_ids | fix.edge_ids)
    sub, old_v, old_e = induced_subgraph(g, range(g.n))
    circuit_host = Multigraph(g.n, [g.edges[e] for e in support])
    circ = eulerian_circuit(circuit_host)
    return ClosedTrail(
        g,
        tuple(support[e] for e in circ.edge_seq),
        circ.vertex_seq,
    )


def validate_walk(
    g: Multigraph,
    walk: ClosedWalk,
    f: Sequence[int] | None = None,
    matching: Iterable[int] | None = None,
) -> dict:
    """Spanning + adjacency + visit-cap + matching-coverage report."""
    problems: list[str] = []
    seq = walk.vertices
    if g.n == 0:
        problems.append("null host")
    if not seq and g.n > 0:
        problems.append("empty walk")
    adj_pairs = {frozenset(e) for e in g.edges}
    t = len(seq)
    for i in range(t):
        a, b = seq[i], seq[(i + 1) % t]
        if t > 1 and frozenset((a, b)) not in adj_pairs:
            problems.append(f"step {i}: {a}-{b} is not an edge")
    if set(seq) != set(range(g.n)):
        problems.append("not spanning")
    if f is not None:
        vis = walk.visits()
        for v in range(g.n):
            if vis.get(v, 0) > f[v]:
                problems.append(f"vertex {v} visited {vis[v]} > {f[v]} times")
    if matching is not None:
        steps = {frozenset((seq[i], seq[(i + 1) % t])) for i in range(t)}
        for eid in matching:
            if frozenset(g.edges[eid]) not in steps:
                problems.append(f"matching edge {eid} not traversed")
    return {"ok": not problems, "violations": problems}


def validate_trail(
    g: Multigraph,
    trail: ClosedTrail,
    f: Sequence[int] | None = None,
    X: Iterable[int] | None = None,
) -> dict:
    """Edge-distinctness + adjacency-chain + spanning + visit-cap report."""
    problems: list[str] = []
    seq = trail.edge_seq
    vseq = trail.vertex_seq
    if len(set(seq)) != len(seq):
        problems.append("repeated edge id")
    if len(seq) != len(vseq):
        problems.append("edge and vertex sequences disagree in length")
    t = len(seq)
    for i in range(t):
        a, b = vseq[i], vseq[(i + 1) % t]
        if frozenset((a, b)) != frozenset(g.edges[seq[i]]):
            problems.append(f"step {i}: edge {seq[i]} does not join {a}-{b}")
    covered = set(vseq)
    if g.n == 1:
        covered = {0}
    if covered != set(range(g.n)):
        problems.append("not spanning")
    if f is not None:
        vis = trail.visits()
        scope = range(g.n) if X is None else X
        for v in scope:
            if vis.get(v, 0) > f[v]:
                problems.append(f"vertex {v} visited {vis.get(v, 0)} > {f[v]} times")
    return {"ok": not problems, "violations": problems}


def _as_f(g: Multigraph, f) -> list[int]:
    if isinstance(f, int):
        return [f] * g.n
    return [int(f[v]) for v in range(g.n)]


def f_walk(
    g: Multigraph,
    f: Sequence[int] | int,
    matching: Iterable[int] = (),
) -> ClosedWalk | Certificate | Inconclusive:
    """Spanning closed walk visiting each v at most f(v) times and passing
    through every edge of the given matching, or a certificate set for the
    walk hypothesis.  Pipeline: (f+1)-bounded spanning tree containing the
    matching, a parity forest matching the tree's degree parities, then the
    Eulerian circuit of their union."""
    f = _as_f(g, f)
    if any(x < 1 for x in f):
        raise ValueError("f must be positive")
    matching = sorted(set(matching))
    touched: set[int] = set()
    for eid in matching:
        u, v = g.edges[eid]
        if u in touched or v in touched:
            raise ValueError("matching edges must be disjoint")
        touched.update((u, v))
    walk_params = {"f": f}
    if g.n == 0:
        raise ValueError("null graph")
    if len(components(g)) != 1:
        return make_certificate(g, "walk", walk_params, ())
    if g.n == 1:
        return ClosedWalk(g, (0,))
    spec = DegreeSpec(
        {v: Fraction(f[v] + 1) for v in range(g.n)},
        Fraction(0),
        1,
        frozenset(matching) if matching else None,
    )
    tree = bounded_spanning_tree(g, spec)
    if isinstance(tree, Inconclusive):
        return tree
    if isinstance(tree, Certificate):
        return make_certificate(g, "walk", walk_params, tree.S)
    tdeg = tree.degrees()
    fprime = [f[v] if f[v] % 2 == tdeg[v] % 2 else f[v] - 1 for v in range(g.n)]
    fix = parity_forest(g, ParitySpec.of(fprime))
    if isinstance(fix, Inconclusive):
        return fix
    if isinstance(fix, Certificate):
        return make_certificate(g, "walk", walk_params, fix.S)
    # union as a multigraph: parity-forest edges duplicate traversals
    tree_ids = tree.edge_id_list()
    fix_ids = fix.edge_id_list()
    union = Multigraph(
        g.n, [g.edges[e] for e in tree_ids] + [g.edges[e] for e in fix_ids]
    )
    circ = eulerian_circuit(union)
    walk = ClosedWalk(g, circ.vertex_seq)
    report = validate_walk(g, walk, f, matching)
    assert report["ok"], report["violations"]
    return walk


def f_trail(
    g: Multigraph,
    f: Sequence[int] | int,
    lam: Fraction = Fraction(0),
) -> ClosedTrail | Certificate | DeficientPartition | Inconclusive:
    """Spanning closed trail visiting each v at most f(v) times, built from a
    2-tree-connected spanning subgraph with degrees at most 2f+1, or a
    certificate for the trail hypothesis (or the deficient partition when G
    is not 2-tree-connected)."""
    f = _as_f(g, f)
    lam = Fraction(lam)
    if any(x < 1 for x in f):
        raise ValueError("f must be positive")
    if not (0 <= lam <= Fraction(1, 2)):
        raise ValueError("lam must lie in [0, 1/2]")
    spec = DegreeSpec(
        {v: Fraction(f[v]) + Fraction(1, 2) + 2 * lam for v in range(g.n)},
        lam,
        2,
    )
    sub = bounded_m_subgraph(g, spec)
    if isinstance(sub, (DeficientPartition, Inconclusive)):
        return sub
    if isinstance(sub, Certificate):
        return make_certificate(g, "trail", {"f": f, "lam": lam}, sub.S)
    host2 = Multigraph(g.n, [g.edges[e] for e in sub.edge_id_list()])
    ids = sub.edge_id_list()
    circ = spanning_eulerian_of_2tc(host2)
    trail = ClosedTrail(
        g, tuple(ids[e] for e in circ.edge_seq), circ.vertex_seq
    )
    report = validate_trail(g, trail, f)
    assert report["ok"], report["violations"]
    return trail


def f_trail_on_independent_set(
    g: Multigraph,
    X: Iterable[int],
    f: Sequence[int] | int,
    fallback_trail: ClosedTrail | None = None,
) -> ClosedTrail | Certificate | DeficientPartition | Inconclusive:
    """Spanning closed trail meeting each v in the independent set X at most
    f(v) times.  When the component-measure hypothesis fails at the engine's
    set S, a caller-supplied trail meeting each v in S at most f(v) times is
    spliced through the surgery (tree replacement inside each component plus
    a parity repair forest); without one the certificate set is returned."""
    X = sorted(set(X))
    f = _as_f(g, f)
    for eid, (u, v) in enumerate(g.edges):
        if u in X and v in X:
            raise ValueError("X must be independent")
    h = [2 * f[v] + 1 if v in X else g.degree(v) + 1 for v in range(g.n)]
    res = min_excess_m_subgraph(g, 2, h)
    if isinstance(res, (DeficientPartition, Inconclusive)):
        return res
    H, te, S = res
    if te == 0:
        host2 = Multigraph(g.n, [g.edges[e] for e in H.edge_id_list()])
        ids = H.edge_id_list()
        circ = spanning_eulerian_of_2tc(host2)
        trail = ClosedTrail(g, tuple(ids[e] for e in circ.edge_seq), circ.vertex_seq)
        report = validate_trail(g, trail, f, X)
        assert report["ok"], report["violations"]
        return trail
    cert = make_certificate(g, "trail-independent", {"f": f}, S)
    if fallback_trail is None:
        return cert
    vis = fallback_trail.visits()
    if any(vis.get(v, 0) > f[v] for v in S):
        return cert
    trail = _trail_surgery(g, H, frozenset(S), fallback_trail)
    report = validate_trail(g, trail, f, X)
    assert report["ok"], report["violations"]
    return trail


def _trail_surgery(
    g: Multigraph, H: SpanningSubgraph, S: frozenset[int], L: ClosedTrail
) -> ClosedTrail:
    """Replace the fallback trail's edges inside each 2-tree-connected
    component of H minus S by the first packed tree, then repair parities
    with a subforest of the second."""
    from .graph import _DSU

    rest = [v for v in range(g.n) if v not in S]
    subH = [e for e in H.edge_id_list()]
    Hsub, old_v, old_e = induced_subgraph(g, rest)
    keep = [i for i, he in enumerate(old_e) if he in H.edge_ids]
    from .packing import m_components

    decomp = m_components(Multigraph(Hsub.n, [Hsub.edges[i] for i in keep]), 2)
    parts = [frozenset(old_v[i] for i in part) for part in decomp.partition.parts]
    # pack two trees of H with both restrictions connected on every part:
    # per-part packings plus a packing of the contracted graph
    t1: set[int] = set()
    t2: set[int] = set()
    part_of = {}
    for i, part in enumerate(parts):
        part_of.update({v: i for v in part})
        sub, o_v, o_e = induced_subgraph(g, part)
        ids = [j for j, he in enumerate(o_e) if he in H.edge_ids]
        local = Multigraph(sub.n, [sub.edges[j] for j in ids])
        res = pack_trees(local, 2)
        assert isinstance(res, TreePacking), "component must be 2-tree-connected"
        t1.update(o_e[ids[j]] for j in res.trees[0])
        t2.update(o_e[ids[j]] for j in res.trees[1])
    for v in sorted(S):
        part_of[v] = len(part_of) + 0
        part_of[v] = max(part_of.values(), default=-1) + 1
    # contracted multigraph over parts and S-singletons, edges from H
    num_nodes = len(parts) + len(S)
    node_of = {}
    for i, part in enumerate(parts):
        for v in part:
            node_of[v] = i
    for j, v in enumerate(sorted(S)):
        node_of[v] = len(parts) + j
    cedges = []
    cmap = []
    for he in H.edge_id_list():
        a, b = g.edges[he]
        if node_of[a] != node_of[b]:
            cedges.append((node_of[a], node_of[b]))
            cmap.append(he)
    cres = pack_trees(Multigraph(num_nodes, cedges), 2)
    assert isinstance(cres, TreePacking), "contraction of a 2-tree-connected graph"
    t1.update(cmap[j] for j in cres.trees[0])
    t2.update(cmap[j] for j in cres.trees[1])
    # replace L inside each part by tree 1, then fix parities from tree 2
    L_edges = set(L.edge_support())
    L1 = set(L_edges)
    for part in parts:
        L1 = {e for e in L1 if not (g.edges[e][0] in part and g.edges[e][1] in part)}
        L1 |= {e for e in t1 if g.edges[e][0] in part and g.edges[e][1] in part}
    deg = [0] * g.n
    for e in L1:
        a, b = g.edges[e]
        deg[a] += 1
        deg[b] += 1
    Q = [v for v in range(g.n) if deg[v] % 2 == 1]
    assert not (set(Q) & S), "surgery must keep S-degrees even"
    fix: set[int] = set()
    for part in parts:
        Qpart = [v for v in Q if v in part]
        assert len(Qpart) % 2 == 0
        ids = sorted(e for e in t2 if g.edges[e][0] in part and g.edges[e][1] in part)
        repaired = tree_parity_subforest(SpanningSubgraph.of(g, ids), Qpart)
        fix |= repaired.edge_ids
    support = sorted(L1 | fix)
    host = Multigraph(g.n, [g.edges[e] for e in support])
    circ = eulerian_circuit(host)
    return ClosedTrail(g, tuple(support[e] for e in circ.edge_seq), circ.vertex_seq)


def high_connectivity_walk_or_trail(
    g: Multigraph, k: int
) -> tuple[str, ClosedWalk | ClosedTrail] | Certificate | Inconclusive:
    """The k-edge-connected recipe: a trail visiting each v at most
    ceil((d(v)+k/2-4)/k)+1 times when k >= 4, else a walk visiting each v at
    most ceil((d(v)-1)/k)+1 times; the k = 3 route's ceiling bound is
    re-verified numerically per vertex."""
    if k < 1:
        raise ValueError("k must be positive")
    if k >= 4:
        f = [_ceil_int(g.degree(v) * 2 + k - 8, 2 * k) + 1 for v in range(g.n)]
        res = f_trail(g, f, Fraction(2, k))
        if isinstance(res, ClosedTrail):
            return ("trail", res)
        return res if not isinstance(res, DeficientPartition) else Inconclusive(
            "graph is not 2-tree-connected"
        )
    f = [_ceil_int(g.degree(v) - 1, k) + 1 for v in range(g.n)]
    if k == 1:
        res = pack_trees(g, 1)
        if isinstance(res, DeficientPartition):
            return Inconclusive("graph is disconnected")
        T = sorted(res.trees[0])
        host = Multigraph(g.n, [g.edges[e] for e in T] + [g.edges[e] for e in T])
        circ = eulerian_circuit(host)
        walk = ClosedWalk(g, circ.vertex_seq)
        assert validate_walk(g, walk, f)["ok"]
        return ("walk", walk)
    if k == 2:
        doubled = Multigraph(g.n, list(g.edges) + list(g.edges))
        res = f_trail(doubled, f, Fraction(1, 2))
        if not isinstance(res, ClosedTrail):
            return res if not isinstance(res, DeficientPartition) else Inconclusive(
                "doubled graph is not 2-tree-connected"
            )
        walk = ClosedWalk(g, res.vertex_seq)
        assert validate_walk(g, walk, f)["ok"]
        return ("walk", walk)
    # k = 3: add a parity forest, then run the 4-edge-connected trail recipe
    from .parity import bounded_parity_forest

    Q = [v for v in range(g.n) if g.degree(v) % 2 == 1]
    forest = bounded_parity_forest(g, 3, "k-edge-connected", Q)
    if isinstance(forest, (Certificate, Inconclusive)):
        return forest if isinstance(forest, Inconclusive) else Inconclusive(
            "parity hypothesis failed; graph is not 3-edge-connected"
        )
    fids = forest.edge_id_list()
    eulerized = Multigraph(g.n, list(g.edges) + [g.edges[e] for e in fids])
    assert all(d % 2 == 0 for d in eulerized.degrees())
    f4 = [_ceil_int(eulerized.degree(v) - 2, 4) + 1 for v in range(g.n)]
    res = f_trail(eulerized, f4, Fraction(1, 2))
    if not isinstance(res, ClosedTrail):
        return res if not isinstance(res, DeficientPartition) else Inconclusive(
            "eulerized graph is not 2-tree-connected"
        )
    walk = ClosedWalk(g, res.vertex_seq)
    vis = walk.visits()
    for v in range(g.n):
        # the claimed bound, checked rather than trusted
        assert vis.get(v, 0) <= f[v], (v, vis.get(v, 0), f[v])
    return ("walk", walk)


def _ceil_int(num: int, den: int) -> int:
    return -((-num) // den)
