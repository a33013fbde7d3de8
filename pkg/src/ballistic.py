"""
Ballistic Deposition on arbitrary substrate graphs.

Covers direct simulation over column tops, the weighted dependency DAG of
a drop sequence and its longest-path rows, the certificate checks,
Bead-Sort on the 1-DLA lattice, and the two reductions from exact-length
reachability.
"""

import logging
from typing import Hashable, Iterable, Union

import networkx as nx

from models import (
    AggrelabError,
    BdSite,
    DirectionSet,
    DropSequence,
    LayeredDagInstance,
    ParticleRecord,
    SubstrateGraph,
    WeightedDepDAG,
    GROUND,
)
from simulator import run_script, straight_down_script

logger = logging.getLogger(__name__)


# === Custom Exceptions ===

class UnknownVertex(AggrelabError):
    """Raised when a drop or site names a vertex the graph does not have."""
    pass


class NonPositiveValue(AggrelabError):
    """Raised when Bead-Sort receives a value below 1."""
    pass


class MalformedLayering(AggrelabError):
    """Raised when an instance is not layered the way the reduction needs."""
    pass


Chain = list[tuple[ParticleRecord, int]]


def _check_drops(g: SubstrateGraph, s: DropSequence) -> None:
    for i, v in enumerate(s.drops, start=1):
        if not 1 <= v <= g.n_vertices:
            raise UnknownVertex(f"Drop {i} targets vertex {v}, graph has {g.n_vertices}")


# === Simulation ===

def bd_simulate(g: SubstrateGraph, s: DropSequence) -> dict[int, int]:
    """
    Rows of every particle, indexed by drop position (1-based).

    A particle dropped on v lands at max(t(v) + 1, t(u) for u ~ v),
    where t holds the current top of every vertex.

    Raises:
        UnknownVertex: If a drop names a missing vertex
    """
    _check_drops(g, s)
    tops = [0] * (g.n_vertices + 1)
    rows: dict[int, int] = {}
    for pos, v in enumerate(s.drops, start=1):
        row = tops[v] + 1
        for u in g.neighbors(v):
            if tops[u] > row:
                row = tops[u]
        tops[v] = row
        rows[pos] = row
    return rows


def bd_simulate_reference(g: SubstrateGraph, s: DropSequence) -> dict[int, int]:
    """
    Same rows as bd_simulate, computed from the particle sets directly.

    For each particle q: no earlier particle on V(q) or a neighbor puts it
    on row 1; otherwise it sits one row above the highest earlier particle
    on V(q), or level with the highest one on a neighbor, whichever is
    higher.
    """
    _check_drops(g, s)
    rows: dict[int, int] = {}
    for q, v in enumerate(s.drops, start=1):
        same = [rows[p] for p in range(1, q) if s.drops[p - 1] == v]
        lateral = [rows[p] for p in range(1, q) if g.adjacent(s.drops[p - 1], v)]
        if not same and not lateral:
            rows[q] = 1
        else:
            rows[q] = max([r + 1 for r in same] + lateral)
    return rows


def bd_occupancy(g: SubstrateGraph, s: DropSequence) -> frozenset[BdSite]:
    """Set of occupied (height, vertex) sites after the drops."""
    rows = bd_simulate(g, s)
    return frozenset(BdSite(rows[pos], v) for pos, v in enumerate(s.drops, start=1))


def throws_commute(g: SubstrateGraph, state: DropSequence, u: int, v: int) -> bool:
    """True when dropping u then v after ``state`` gives the same sites as v then u."""
    first = bd_occupancy(g, DropSequence(state.drops + (u, v)))
    second = bd_occupancy(g, DropSequence(state.drops + (v, u)))
    return first == second


# === Dependency DAG ===

def particle_records(s: DropSequence) -> list[ParticleRecord]:
    counts: dict[int, int] = {}
    records = []
    for pos, v in enumerate(s.drops, start=1):
        counts[v] = counts.get(v, 0) + 1
        records.append(ParticleRecord(v, counts[v], pos))
    return records


def build_dependency_dag(g: SubstrateGraph, s: DropSequence) -> WeightedDepDAG:
    """
    Weighted DAG G_S of a drop sequence.

    Edges: g -> q (1) when q has no earlier particle on V(q) or a neighbor;
    p -> q (1) for earlier p on V(q); p -> q (0) for earlier p on a
    neighbor of V(q). Nothing else.
    """
    _check_drops(g, s)
    particles = particle_records(s)
    graph = nx.DiGraph()
    graph.add_node(GROUND)
    graph.add_nodes_from(particles)

    for q in particles:
        below = particles[:q.pos - 1]
        support = False
        for p in below:
            if p.vertex == q.vertex:
                graph.add_edge(p, q, weight=1)
                support = True
            elif g.adjacent(p.vertex, q.vertex):
                graph.add_edge(p, q, weight=0)
                support = True
        if not support:
            graph.add_edge(GROUND, q, weight=1)

    logger.debug(f"Dependency DAG: {len(particles)} particles, {graph.number_of_edges()} edges")
    return WeightedDepDAG(particles=particles, graph=graph)


def _longest_paths(dag: WeightedDepDAG) -> dict[Hashable, tuple[int, Hashable]]:
    """Map node -> (maximum path weight from g, best predecessor)."""
    dist: dict[Hashable, tuple[int, Hashable]] = {}
    for v in nx.topological_sort(dag.graph):
        if v == GROUND:
            dist[v] = (0, v)
            continue
        us = [(dist[u][0] + data["weight"], u) for u, data in dag.graph.pred[v].items()]
        dist[v] = max(us, key=lambda x: x[0])
    return dist


def longest_path_rows(dag: WeightedDepDAG) -> dict[ParticleRecord, int]:
    """Maximum-weight g -> p path for every particle; equals its row."""
    dist = _longest_paths(dag)
    return {p: dist[p][0] for p in dag.particles}


def bd_predict(g: SubstrateGraph, s: DropSequence, site: BdSite) -> bool:
    """Is site (h, v) occupied once the sequence has been dropped?"""
    if not 1 <= site.vertex <= g.n_vertices:
        raise UnknownVertex(f"Site vertex {site.vertex} not in graph")
    rows = longest_path_rows(build_dependency_dag(g, s))
    return any(p.vertex == site.vertex and row == site.height for p, row in rows.items())


# === Certificates ===

def is_valid_particle(s: DropSequence, p: ParticleRecord) -> bool:
    if not 1 <= p.pos <= len(s.drops):
        return False
    if s.drops[p.pos - 1] != p.vertex:
        return False
    return sum(1 for v in s.drops[:p.pos] if v == p.vertex) == p.num


def weight(
    g: SubstrateGraph,
    s: DropSequence,
    p: Union[ParticleRecord, str],
    q: ParticleRecord,
    w: int,
) -> bool:
    """Accept iff W(p, q) = w. ``p`` may be GROUND."""
    if p == GROUND:
        if w != 1:
            return False
        for v in s.drops[:q.pos - 1]:
            if v == q.vertex or g.adjacent(v, q.vertex):
                return False
        return True

    if p.pos >= q.pos:
        return False
    if w == 1:
        return p.vertex == q.vertex
    if w == 0:
        return p.vertex != q.vertex and g.adjacent(p.vertex, q.vertex)
    return False


def verify_certificate(g: SubstrateGraph, s: DropSequence, site: BdSite, chain: Chain) -> bool:
    """
    Replay a guessed chain g -> p_1 -> ... -> p_m.

    The first entry carries the ground edge weight, which must be 1. Each
    particle must be valid and each edge must have the stated weight. The
    chain proves the site when the weights add up to its height and p_m
    sits on its vertex.
    """
    if not chain:
        return False

    first, w0 = chain[0]
    if not is_valid_particle(s, first) or not weight(g, s, GROUND, first, w0):
        return False
    total = 1

    prev = first
    for particle, w in chain[1:]:
        if not is_valid_particle(s, particle) or not weight(g, s, prev, particle, w):
            return False
        total += w
        prev = particle

    return total == site.height and prev.vertex == site.vertex


def extract_certificate(dag: WeightedDepDAG, particle: ParticleRecord) -> Chain:
    """A maximum-weight chain ending at ``particle``, as (particle, edge weight) pairs."""
    dist = _longest_paths(dag)
    chain: Chain = []
    v = particle
    while v != GROUND:
        u = dist[v][1]
        chain.append((v, dag.weight(u, v)))
        v = u
    chain.reverse()
    return chain


# === Bead-Sort ===

def bead_sort(values: Iterable[int]) -> list[int]:
    """
    Sort decreasingly by dropping beads in 1-DLA.

    Value a drops one bead on each of the rods 2, 4, ..., 2a (even columns,
    so rods never touch). Rod k ends with one bead per value >= k, and the
    number of beads at height h is the h-th largest value.

    Raises:
        NonPositiveValue: On values < 1
    """
    values = list(values)
    if not values:
        return []
    for v in values:
        if v < 1:
            raise NonPositiveValue(f"Bead-Sort needs positive values, got {v}")

    m = max(values)
    n_size = max(2 * m, len(values) + 1)
    columns = [2 * j for a in values for j in range(1, a + 1)]
    fig = run_script(straight_down_script(n_size, columns), DirectionSet(1))

    counts = []
    for h in range(1, len(values) + 1):
        row = n_size + 1 - h
        counts.append(sum(1 for c in range(2, 2 * m + 1, 2) if (row, c) in fig.occupied))
    logger.debug(f"Bead-Sort on {len(values)} values, lattice {n_size}")
    return counts


# === Reductions ===

def exact_path_exists(g: nx.DiGraph, s, t, k: int) -> bool:
    """Is there a directed walk of exactly k edges from s to t?"""
    frontier = {s}
    for _ in range(k):
        frontier = {v for u in frontier for v in g.successors(u)}
        if not frontier:
            return False
    return t in frontier


def reduce_exact_to_layered(g: nx.DiGraph, s, t, k: int) -> LayeredDagInstance:
    """
    Layer k+1 copies of g: (u, i) -> (v, i+1) for every edge u -> v.

    The source is (s, 0) and the target (t, k).
    """
    if k > g.number_of_nodes():
        raise ValueError(f"k={k} exceeds vertex count {g.number_of_nodes()}")
    layered = nx.DiGraph()
    layer = {}
    for i in range(k + 1):
        for v in g.nodes:
            layered.add_node((v, i))
            layer[(v, i)] = i
    for i in range(k):
        for u, v in g.edges:
            layered.add_edge((u, i), (v, i + 1))
    return LayeredDagInstance(layered, (s, 0), (t, k), k, layer)


def layered_reachable(inst: LayeredDagInstance) -> bool:
    """Exact-length reachability on a layered instance, by DFS."""
    if inst.layer.get(inst.target) != inst.layer.get(inst.source, 0) + inst.length:
        return False
    return nx.has_path(inst.graph, inst.source, inst.target)


def reduce_ldereach_to_bd(inst: LayeredDagInstance) -> tuple[SubstrateGraph, DropSequence, BdSite]:
    """
    Build a BD-Prediction instance that holds iff the layered instance does.

    The substrate is the instance with directions dropped, vertices
    numbered 1..n in (layer, insertion) order. Two particles go on s, then
    two on every vertex of layers i+1 .. i+k, layer by layer. A vertex at
    distance j from s reaches height j+2, while any other chain reaches at
    most j+1, so the site is (k+2, t).

    Raises:
        MalformedLayering: When a node lacks a layer or an edge skips one
    """
    graph = inst.graph
    for v in graph.nodes:
        if v not in inst.layer:
            raise MalformedLayering(f"Node {v!r} has no layer")
    for u, v in graph.edges:
        if inst.layer[v] != inst.layer[u] + 1:
            raise MalformedLayering(f"Edge {u!r} -> {v!r} does not join consecutive layers")
    if inst.source not in inst.layer or inst.target not in inst.layer:
        raise MalformedLayering("Source and target must belong to the instance")

    ids = vertex_ids(inst)
    order = sorted(ids, key=ids.get)
    substrate = SubstrateGraph(len(order), frozenset((ids[u], ids[v]) for u, v in graph.edges))

    base = inst.layer[inst.source]
    drops = [ids[inst.source]] * 2
    for j in range(base + 1, base + inst.length + 1):
        for v in order:
            if inst.layer[v] == j:
                drops.extend((ids[v], ids[v]))

    site = BdSite(inst.length + 2, ids[inst.target])
    return substrate, DropSequence(tuple(drops)), site


def vertex_ids(inst: LayeredDagInstance) -> dict[object, int]:
    """The vertex numbering reduce_ldereach_to_bd uses."""
    order = sorted(inst.graph.nodes, key=lambda v: inst.layer[v])
    return {v: i for i, v in enumerate(order, start=1)}

