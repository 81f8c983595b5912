"""Exact evaluation of the inequality families the construction theorems
hypothesize.  Each family maps (graph, params, S) to (lhs, rhs, strictness);
the hypothesis is "lhs < rhs" when strict, "lhs <= rhs" otherwise, and a
certificate asserts its negation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .graph import (
    Multigraph,
    SpanningSubgraph,
    components,
    count_internal_edges,
    count_forest_crossing,
    induced_subgraph,
    omega_incident_removed,
    surviving_edges,
)
from .packing import m_components, omega_m


def omega_without(g: Multigraph, S: Iterable[int]) -> int:
    S = frozenset(S)
    return len(components(g, without_vertices=S))


def omega_m_without(g: Multigraph, m: int, S: Iterable[int]) -> Fraction:
    S = frozenset(S)
    rest = [v for v in range(g.n) if v not in S]
    if not rest:
        return Fraction(0)
    sub, _, _ = induced_subgraph(g, rest)
    return omega_m(sub, m)


def omega_m_incident_removed(
    g: Multigraph, m: int, S: Iterable[int], F: SpanningSubgraph | None
) -> Fraction:
    """Omega_m of G\\[S,F] (no vertices deleted)."""
    S = frozenset(S)
    keep = surviving_edges(g, S, F)
    return omega_m(Multigraph(g.n, [g.edges[e] for e in keep]), m)


def forest_crossing_nonforest_edges(
    g: Multigraph, m: int, S: Iterable[int], F: SpanningSubgraph
) -> int:
    """Edges outside F with both ends in S joining different m-tree-connected
    components of G\\[S,F]."""
    S = frozenset(S)
    keep = surviving_edges(g, S, F)
    comp = m_components(Multigraph(g.n, [g.edges[e] for e in keep]), m).component_index()
    count = 0
    for eid, (u, v) in enumerate(g.edges):
        if eid in F.edge_ids:
            continue
        if u in S and v in S and comp[u] != comp[v]:
            count += 1
    return count


FAMILIES = (
    "tree",
    "tree-nonstrict",
    "tree-forest",
    "tree-exact",
    "subgraph",
    "subgraph-forest",
    "walk",
    "trail",
    "trail-independent",
    "tough-extension",
    "one-extension",
    "factor-24",
    "parity",
    "toughness-style",
)


def hypothesis_sides(
    g: Multigraph,
    family: str,
    params: dict,
    S: Iterable[int],
) -> tuple[Fraction, Fraction, bool]:
    """(lhs, rhs, strict) for the family's inequality at the set S."""
    S = sorted(frozenset(S))
    Sset = frozenset(S)
    lam = Fraction(params.get("lam", 0))
    m = int(params.get("m", 1))
    eta = params.get("eta")
    f = params.get("f")
    F: SpanningSubgraph | None = params.get("forest")

    def eta_sum(shift: Fraction) -> Fraction:
        return sum((Fraction(eta[v]) - shift for v in S), Fraction(0))

    if family == "tree":
        lhs = Fraction(omega_without(g, Sset))
        rhs = 1 + eta_sum(Fraction(2)) + 2 - lam * (count_internal_edges(g, Sset) + 1)
        return lhs, rhs, True
    if family == "tree-nonstrict":
        lhs = Fraction(omega_without(g, Sset))
        rhs = eta_sum(Fraction(2)) + 2 - lam * (count_internal_edges(g, Sset) + 1)
        return lhs, rhs, False
    if family == "tree-forest":
        lhs = Fraction(omega_incident_removed(g, Sset, F))
        rhs = 1 + eta_sum(Fraction(2)) + 2 - lam * (count_forest_crossing(g, Sset, F) + 1)
        return lhs, rhs, True
    if family == "tree-exact":
        h = params["h"]
        lhs = Fraction(omega_incident_removed(g, Sset, F))
        rhs = sum((Fraction(h[v]) for v in S), Fraction(1))
        return lhs, rhs, False
    if family == "subgraph":
        lhs = omega_m_without(g, m, Sset)
        rhs = (
            Fraction(1, m)
            + eta_sum(Fraction(2))
            + 2
            - lam * (count_internal_edges(g, Sset) + m)
        )
        return lhs, rhs, True
    if family == "subgraph-forest":
        lhs = omega_m_incident_removed(g, m, Sset, F)
        rhs = (
            Fraction(1, m)
            + eta_sum(Fraction(2))
            + 2
            - lam * (forest_crossing_nonforest_edges(g, m, Sset, F) + m)
        )
        return lhs, rhs, True
    if family == "walk":
        lhs = Fraction(omega_without(g, Sset))
        rhs = sum((Fraction(f[v]) - 1 for v in S), Fraction(1))
        return lhs, rhs, False
    if family == "trail":
        lhs = omega_m_without(g, 2, Sset)
        rhs = (
            sum((Fraction(f[v]) + 2 * lam - Fraction(3, 2) for v in S), Fraction(0))
            + Fraction(5, 2)
            - lam * (count_internal_edges(g, Sset) + 2)
        )
        return lhs, rhs, True
    if family == "trail-independent":
        lhs = omega_m_without(g, 2, Sset)
        rhs = sum((Fraction(f[v]) - Fraction(1, 2) for v in S), Fraction(1))
        return lhs, rhs, False
    if family == "tough-extension":
        c = Fraction(params["c"])
        lhs = omega_m_without(g, m, Sset)
        rhs = (
            Fraction(1, m)
            + sum(
                (c / (2 * c - 2) * Fraction(eta[v]) - 1 / (c - 1) for v in S),
                Fraction(0),
            )
            + c / (c - 1)
        )
        return lhs, rhs, True
    if family == "one-extension":
        c = Fraction(params["c"])
        lhs = Fraction(omega_without(g, Sset))
        rhs = Fraction(c - 2 * m, 2 * m * (c - 1)) * len(S) + 1
        return lhs, rhs, False
    if family == "factor-24":
        lhs = Fraction(omega_without(g, Sset))
        rhs = Fraction(2, 7) * len(S) + Fraction(9, 7)
        return lhs, rhs, False
    if family == "parity":
        from .parity import odd_f_count

        lhs = Fraction(odd_f_count(g, f, Sset))
        rhs = sum((Fraction(f[v]) for v in S), Fraction(0))
        return lhs, rhs, False
    if family == "toughness-style":
        nn = Fraction(params["n"])
        lhs = omega_m_without(g, m, Sset)
        rhs = nn / m * len(S) + 2
        return lhs, rhs, False
    raise ValueError(f"unknown hypothesis family {family!r}")


def holds_at(g: Multigraph, family: str, params: dict, S: Iterable[int]) -> bool:
    lhs, rhs, strict = hypothesis_sides(g, family, params, S)
    return lhs < rhs if strict else lhs <= rhs
