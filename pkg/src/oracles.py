"""
Brute-force oracles and the equivalence suites built on them.

Each suite generates instances (seeded, or exhaustive over a small
window), runs a fast decider next to an independent check, and counts
disagreements. Instances are independent, so they fan out over joblib
workers; with one worker everything runs inline.
"""

import itertools
import logging
import random
import time
from typing import Callable, Iterable, Optional

import networkx as nx
from joblib import Parallel, delayed

import config
from ballistic import (
    bd_occupancy,
    bd_predict,
    bd_simulate,
    bd_simulate_reference,
    build_dependency_dag,
    exact_path_exists,
    extract_certificate,
    layered_reachable,
    longest_path_rows,
    reduce_exact_to_layered,
    reduce_ldereach_to_bd,
    throws_commute,
    verify_certificate,
)
from circuits import all_assignments, check_compiled, random_layered_circuit, small_circuits
from models import (
    BdSite,
    Cell,
    Direction,
    DirectionSet,
    DropSequence,
    Figure,
    LayeredDagInstance,
    OracleKind,
    OracleReport,
    ParticleRecord,
    SubstrateGraph,
    Trajectory,
)
from realize1 import construct_sequence_1d, realizable_1d
from realize2 import (
    brute_force_realizable,
    construct_realization_2d,
    is_canonical,
    realizable_2d,
    verify_realization,
)
from simulator import Lattice, random_script, run_script, straight_down_script

logger = logging.getLogger(__name__)

MAX_EXAMPLES = 5


# === 1-DLA brute force ===

def brute_force_realizable_1d(fig: Figure) -> bool:
    """
    Search over straight-down drop orders.

    A column only ever grows at its top, so the state is the height of the
    highest placed cell per column, and the placed cells are exactly the
    figure's cells up to those heights. A drop that lands outside the
    figure, or above a figure cell still missing in its column, is a dead
    end. Landing cells come from the simulator.
    """
    n = fig.n_size
    heights = {c: sorted(fig.height(cell) for cell in fig.occupied if cell.col == c) for c in range(1, n + 1)}
    goal = tuple(hs[-1] if hs else 0 for c, hs in sorted(heights.items()))
    drop = (Direction.DOWN,) * n
    seen: set[tuple[int, ...]] = set()

    def placed(tops: tuple[int, ...]) -> list[Cell]:
        return [Cell(n + 1 - h, c) for c, top in enumerate(tops, start=1) for h in heights[c] if h <= top]

    def search(tops: tuple[int, ...]) -> bool:
        if tops == goal:
            return True
        if tops in seen:
            return False
        seen.add(tops)
        lattice = Lattice(n, placed(tops))
        for c in range(1, n + 1):
            if tops[c - 1] == goal[c - 1]:
                continue
            outcome = lattice.walk(Trajectory(c, drop))
            if not outcome.stuck:
                continue
            h = fig.height(outcome.cell)
            following = [x for x in heights[c] if x > tops[c - 1]]
            if following[0] != h:
                continue
            nxt = tops[:c - 1] + (h,) + tops[c:]
            if search(nxt):
                return True
        return False

    return search(tuple(0 for _ in range(n)))


# === Instance generators ===

def window_figures(rows: int, cols: int, max_cells: Optional[int] = None) -> Iterable[Figure]:
    """Every figure inside a rows x cols window resting on the ground."""
    n = max(rows, cols)
    window = [Cell(r, c) for r in range(n - rows + 1, n + 1) for c in range(1, cols + 1)]
    limit = len(window) if max_cells is None else max_cells
    for size in range(limit + 1):
        for cells in itertools.combinations(window, size):
            yield Figure(n, frozenset(cells))


def random_figure(n: int, rng: random.Random, density: float = 0.4, max_cells: Optional[int] = None) -> Figure:
    cells = [Cell(r, c) for r in range(1, n + 1) for c in range(1, n + 1) if rng.random() < density]
    if max_cells is not None and len(cells) > max_cells:
        cells = rng.sample(cells, max_cells)
    return Figure(n, frozenset(cells))


def random_substrate(n: int, p: float, rng: random.Random) -> SubstrateGraph:
    edges = frozenset((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < p)
    return SubstrateGraph(n, edges)


def random_drops(g: SubstrateGraph, length: int, rng: random.Random) -> DropSequence:
    return DropSequence(tuple(rng.randint(1, g.n_vertices) for _ in range(length)))


def random_digraph(n: int, p: float, rng: random.Random) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p)
    return graph


def random_layered_instance(layers: int, width: int, p: float, rng: random.Random) -> LayeredDagInstance:
    """Source in layer 0, target in the last layer, edges only between consecutive layers."""
    graph = nx.DiGraph()
    layer = {}
    for i in range(layers):
        for j in range(width):
            graph.add_node((i, j))
            layer[(i, j)] = i
    for i in range(layers - 1):
        for a in range(width):
            for b in range(width):
                if rng.random() < p:
                    graph.add_edge((i, a), (i + 1, b))
    source = (0, rng.randrange(width))
    target = (layers - 1, rng.randrange(width))
    return LayeredDagInstance(graph, source, target, layers - 1, layer)


# === Single-instance checks ===
# Each returns None when the instance agrees, otherwise a short description.

def check_realize1(fig: Figure) -> Optional[str]:
    expected = brute_force_realizable_1d(fig)
    got = realizable_1d(fig)
    if got != expected:
        return f"realizable_1d={got}, oracle={expected} on {sorted(fig.occupied)}"
    if got:
        seq = construct_sequence_1d(fig)
        replay = run_script(straight_down_script(fig.n_size, seq.drops), DirectionSet(1))
        if replay != fig:
            return f"drop sequence {seq.drops} does not rebuild {sorted(fig.occupied)}"
    return None


def check_realize2(fig: Figure) -> Optional[str]:
    expected = brute_force_realizable(fig)
    got = realizable_2d(fig)
    if got != expected:
        return f"realizable_2d={got}, oracle={expected} on {sorted(fig.occupied)}"
    if got:
        order = construct_realization_2d(fig)
        if not verify_realization(fig, order) or not is_canonical(order.order):
            return f"constructed order {order.order} rejected"
    return None


def check_bdrows(g: SubstrateGraph, s: DropSequence) -> Optional[str]:
    rows = bd_simulate(g, s)
    if bd_simulate_reference(g, s) != rows:
        return f"row rules disagree on {s.drops}"
    longest = {p.pos: row for p, row in longest_path_rows(build_dependency_dag(g, s)).items()}
    if longest != rows:
        return f"longest paths disagree with simulation on {s.drops}"
    return None


def check_path_against_lattice(n: int, s: DropSequence) -> Optional[str]:
    """BD on a path graph is straight-down 1-DLA."""
    g = SubstrateGraph.path(n)
    lattice_size = max(n, len(s) + 1)
    fig = run_script(straight_down_script(lattice_size, s.drops), DirectionSet(1))
    sites = frozenset(BdSite(fig.height(cell), cell.col) for cell in fig.occupied)
    if sites != bd_occupancy(g, s):
        return f"1-DLA and BD differ on path [{n}] with {s.drops}"
    return None


def check_reduction(g: nx.DiGraph, s, t, k: int) -> Optional[str]:
    expected = exact_path_exists(g, s, t, k)
    inst = reduce_exact_to_layered(g, s, t, k)
    if layered_reachable(inst) != expected:
        return f"layered instance disagrees for k={k}, s={s}, t={t}"
    if bd_predict(*reduce_ldereach_to_bd(inst)) != expected:
        return f"BD instance disagrees for k={k}, s={s}, t={t}"
    return None


def check_layered(inst: LayeredDagInstance) -> Optional[str]:
    expected = layered_reachable(inst)
    if bd_predict(*reduce_ldereach_to_bd(inst)) != expected:
        return f"BD instance disagrees with layered search (k={inst.length})"
    return None


def check_commute(g: SubstrateGraph, state: DropSequence, u: int, v: int) -> Optional[str]:
    if not throws_commute(g, state, u, v):
        return f"drops {u} and {v} do not commute after {state.drops}"
    return None


def _mutations(chain):
    for i, (p, w) in enumerate(chain):
        for changed in (
            (ParticleRecord(p.vertex + 1, p.num, p.pos), w),
            (ParticleRecord(p.vertex, p.num + 1, p.pos), w),
            (ParticleRecord(p.vertex, p.num, p.pos + 1), w),
            (p, 1 - w),
        ):
            yield chain[:i] + [changed] + chain[i + 1:]


def check_certificates(g: SubstrateGraph, s: DropSequence) -> Optional[str]:
    dag = build_dependency_dag(g, s)
    rows = longest_path_rows(dag)
    for p in dag.particles:
        site = BdSite(rows[p], p.vertex)
        chain = extract_certificate(dag, p)
        if not verify_certificate(g, s, site, chain):
            return f"maximal chain for {p} rejected"
        for mutated in _mutations(chain):
            if verify_certificate(g, s, site, mutated):
                return f"mutated chain for {p} accepted"
    return None


def check_circuit(circuit, asg) -> Optional[str]:
    for k in (2, 3):
        if not check_compiled(circuit, asg, k):
            return f"compiled circuit wrong under k={k} for {asg}"
    return None


def check_closure(n: int, m: int, k: int, seed: int) -> Optional[str]:
    dirs = DirectionSet(k)
    fig = run_script(random_script(n, m, config.get_move_budget(n, k, 3 * n), dirs, seed), dirs)
    ok = realizable_1d(fig) if k == 1 else realizable_2d(fig)
    if not ok:
        return f"grown figure rejected (k={k}, seed={seed})"
    return None


# === Suites ===

def _random_cases(kind: OracleKind, budget: int, seed: int) -> Iterable[tuple[Callable, tuple]]:
    for i in range(budget):
        rng = random.Random(seed * 1_000_003 + i)
        if kind is OracleKind.REALIZE1:
            yield check_realize1, (random_figure(5, rng, rng.uniform(0.2, 0.7)),)
        elif kind is OracleKind.REALIZE2:
            yield check_realize2, (random_figure(5, rng, rng.uniform(0.1, 0.5), config.BRUTE_FORCE_LIMIT),)
        elif kind is OracleKind.BDROWS:
            g = random_substrate(rng.randint(1, 12), rng.uniform(0.0, 0.5), rng)
            s = random_drops(g, rng.randint(0, 40), rng)
            yield check_bdrows, (g, s)
            yield check_path_against_lattice, (g.n_vertices, s)
        elif kind is OracleKind.REDUCTIONS:
            n = rng.randint(1, 6)
            g = random_digraph(n, rng.uniform(0.1, 0.5), rng)
            yield check_reduction, (g, rng.randrange(n), rng.randrange(n), rng.randint(0, n))
            yield check_layered, (random_layered_instance(rng.randint(1, 5), rng.randint(1, 4), 0.4, rng),)
        elif kind is OracleKind.COMMUTE:
            g = random_substrate(rng.randint(2, 10), rng.uniform(0.1, 0.5), rng)
            pairs = [(u, v) for u in range(1, g.n_vertices + 1) for v in range(1, g.n_vertices + 1)
                     if u == v or not g.adjacent(u, v)]
            u, v = rng.choice(pairs)
            yield check_commute, (g, random_drops(g, rng.randint(0, 30), rng), u, v)
        elif kind is OracleKind.CERTIFICATES:
            g = random_substrate(rng.randint(1, 8), rng.uniform(0.1, 0.5), rng)
            yield check_certificates, (g, random_drops(g, rng.randint(1, 15), rng))
        elif kind is OracleKind.CIRCUITS:
            circuit = random_layered_circuit(rng.randint(1, 20), rng.randint(1, 4), rng.randrange(1 << 30))
            asg = {name: rng.random() < 0.5 for name in circuit.inputs}
            yield check_circuit, (circuit, asg)
        elif kind is OracleKind.CLOSURE:
            yield check_closure, (rng.randint(4, 8), rng.randint(1, 12), rng.choice((1, 2)), rng.randrange(1 << 30))


EXHAUSTIVE_KINDS = (OracleKind.REALIZE1, OracleKind.REALIZE2, OracleKind.CIRCUITS)


def _exhaustive_cases(kind: OracleKind) -> Iterable[tuple[Callable, tuple]]:
    if kind is OracleKind.REALIZE1:
        for fig in window_figures(3, 4):
            yield check_realize1, (fig,)
    elif kind is OracleKind.REALIZE2:
        for fig in window_figures(4, 4, max_cells=6):
            yield check_realize2, (fig,)
    elif kind is OracleKind.CIRCUITS:
        for circuit in small_circuits(4):
            for asg in all_assignments(circuit):
                yield check_circuit, (circuit, asg)


def oracle_check(
    kind: str,
    budget: int = 100,
    seed: Optional[int] = None,
    exhaustive: bool = False,
    jobs: Optional[int] = None,
) -> OracleReport:
    """
    Run one equivalence suite.

    Args:
        kind: One of the OracleKind values
        budget: Number of random instances (ignored when exhaustive)
        seed: Base seed, config.ORACLE_SEED by default
        exhaustive: Enumerate every instance of a small window instead
        jobs: joblib worker count, config.ORACLE_JOBS by default

    Returns:
        OracleReport with the number of checks and mismatches
    """
    suite = OracleKind(kind)
    seed = config.ORACLE_SEED if seed is None else seed
    jobs = config.ORACLE_JOBS if jobs is None else jobs
    if exhaustive and suite not in EXHAUSTIVE_KINDS:
        raise ValueError(f"No exhaustive suite for '{suite.value}'")
    cases = _exhaustive_cases(suite) if exhaustive else _random_cases(suite, budget, seed)

    started = time.perf_counter()
    results = Parallel(n_jobs=jobs)(delayed(check)(*args) for check, args in cases)
    failures = [r for r in results if r is not None]
    report = OracleReport(
        kind=suite.value,
        checked=len(results),
        mismatches=len(failures),
        seconds=round(time.perf_counter() - started, 3),
        examples=failures[:MAX_EXAMPLES],
    )

    if failures:
        logger.warning(f"Oracle '{suite.value}': {len(failures)} mismatches out of {len(results)}")
    else:
        logger.info(f"Oracle '{suite.value}': {len(results)} checks passed in {report.seconds}s")
    return report
