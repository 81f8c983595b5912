"""Constructive toolkit for degree-bounded spanning trees, m-tree-connected
spanning subgraphs, parity forests, and spanning closed walks and trails,
paired with exact brute-force oracles at desk scale."""

from .graph import (
    Multigraph,
    NULL_GRAPH,
    SpanningSubgraph,
    VertexPartition,
    components,
    contract_partition,
    count_forest_crossing,
    count_internal_edges,
    crossing_degree,
    crossing_edges,
    from_json,
    induced_subgraph,
    omega,
    omega_incident_removed,
    remove_incident_except_forest,
    remove_vertices,
    to_dot,
    to_json,
)
from .packing import (
    ComponentDecomposition,
    DeficientPartition,
    TreePacking,
    exchange_edge,
    is_m_tree_connected,
    m_components,
    m_critical_reduce,
    omega_m,
    pack_trees,
)

__all__ = [name for name in dir() if not name.startswith("_")]
