"""
1-DLA realization: figure graph, vertex split and reachability to ground.

A figure is 1-DLA realizable iff every cell reaches the ground in G_a.
After splitting each cell v into v1 -> v2 the graph has a single sink,
and the check becomes "every v1 reaches g".
"""

import logging

import networkx as nx

from models import (
    AggrelabError,
    Cell,
    DropSequence,
    Figure,
    FigureGraph1D,
    SplitGraph,
    GROUND,
)

logger = logging.getLogger(__name__)


# === Custom Exceptions ===

class NotRealizable(AggrelabError):
    """Raised when asked to construct a realization that does not exist."""
    pass


def build_figure_graph(fig: Figure) -> FigureGraph1D:
    """
    G_a of a figure.

    E1: v -> right neighbor, E2: v -> left neighbor, E3: (i, j) -> (i+1, j),
    E4: bottom-row cell -> g. Edge attribute ``family`` holds the tag.
    """
    n = fig.n_size
    cells = fig.occupied
    graph = nx.DiGraph()
    graph.add_node(GROUND)
    graph.add_nodes_from(cells)
    for r, c in cells:
        v = Cell(r, c)
        if (r, c + 1) in cells:
            graph.add_edge(v, Cell(r, c + 1), family="E1")
        if (r, c - 1) in cells:
            graph.add_edge(v, Cell(r, c - 1), family="E2")
        if (r + 1, c) in cells:
            graph.add_edge(v, Cell(r + 1, c), family="E3")
        if r == n:
            graph.add_edge(v, GROUND, family="E4")
    return FigureGraph1D(graph)


def split_to_mspd(ga: FigureGraph1D) -> SplitGraph:
    """
    Split every cell v into (v, 1) -> (v, 2).

    E1 (v, u) -> ((v, 1), (u, 1)); E2 -> ((v, 2), (u, 2));
    E3 -> ((v, 2), (u, 1)); E4 -> ((v, 2), g).
    """
    graph = nx.DiGraph()
    graph.add_node(GROUND)
    for v in ga.graph.nodes:
        if v != GROUND:
            graph.add_edge((v, 1), (v, 2))
    for v, u, family in ga.graph.edges(data="family"):
        if family == "E1":
            graph.add_edge((v, 1), (u, 1))
        elif family == "E2":
            graph.add_edge((v, 2), (u, 2))
        elif family == "E3":
            graph.add_edge((v, 2), (u, 1))
        else:
            graph.add_edge((v, 2), GROUND)
    return SplitGraph(graph)


def reachable_all(sg: SplitGraph) -> bool:
    """True iff every (v, 1) reaches g: one search from g on reversed arcs."""
    reached = nx.ancestors(sg.graph, GROUND)
    return all(node in reached for node in sg.graph.nodes if node != GROUND and node[1] == 1)


def realizable_1d(fig: Figure) -> bool:
    ok = reachable_all(split_to_mspd(build_figure_graph(fig)))
    logger.debug(f"1-DLA realizability of {len(fig)} cells: {ok}")
    return ok


def construct_sequence_1d(fig: Figure) -> DropSequence:
    """
    Drop sequence producing ``fig`` exactly under straight-down 1-DLA.

    BFS from g over reversed G_a arcs gives every cell its distance to the
    ground. Cells are emitted bottom row first; within a row, by distance,
    then left to right. A cell's BFS parent is either directly below it or
    beside it one step closer to g, so it is always dropped earlier, and no
    column ever rises above a cell still waiting in a neighboring column.

    Raises:
        NotRealizable: If some cell cannot reach the ground
    """
    ga = build_figure_graph(fig).graph
    dist = nx.single_source_shortest_path_length(ga.reverse(copy=False), GROUND)

    missing = [c for c in fig.occupied if c not in dist]
    if missing:
        raise NotRealizable(f"{len(missing)} cells cannot reach the ground, e.g. {tuple(min(missing))}")

    cells = sorted(fig.occupied, key=lambda c: (-c.row, dist[c], c.col))
    return DropSequence(tuple(c.col for c in cells))
