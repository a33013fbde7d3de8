"""
2-DLA realization (Down and Right moves).

All questions are posed on the figure padded with an empty border of
config.PAD_MARGIN cells on top and on both sides, so that every cell can
be approached from (row-2, col-2) once its up-left quadrant is empty.

The dependency graph holds edges (u, v) meaning u is fixed before v in
every canonical realization (one where each particle's shadow, the
cells strictly below-right of it, is fixed before it). The figure is
realizable iff that graph is acyclic.
"""

import logging
from functools import reduce
from typing import Iterator, Optional

import networkx as nx

import config
from core import neighbors4, pad_figure
from models import (
    AggrelabError,
    Cell,
    DependencyGraph2D,
    Figure,
    Realization,
)

logger = logging.getLogger(__name__)


# === Custom Exceptions ===

class NotRealizable(AggrelabError):
    """Raised when a realization is requested for a figure that has none."""
    pass


class NotAPermutation(AggrelabError):
    """Raised when an order does not list every cell of the figure once."""
    pass


class TooLarge(AggrelabError):
    """Raised when the brute-force oracle is given too many particles."""
    pass


# === Quadrants and approach corridors ===

def shadow(u: Cell, cells) -> set[Cell]:
    """Cells of ``cells`` strictly below and right of u."""
    return {w for w in cells if w[0] > u[0] and w[1] > u[1]}


def q_literal(u: Cell) -> tuple[frozenset[Cell], ...]:
    """The four blocking sets around u = (i, j), before intersection."""
    i, j = u
    return (
        frozenset({Cell(i - 3, j), Cell(i - 2, j), Cell(i - 1, j), Cell(i - 2, j + 1), Cell(i - 1, j + 1)}),
        frozenset({Cell(i - 2, j), Cell(i - 1, j), Cell(i - 1, j + 1), Cell(i, j - 1)}),
        frozenset({Cell(i, j - 3), Cell(i, j - 2), Cell(i, j - 1), Cell(i + 1, j - 2), Cell(i + 1, j - 1)}),
        frozenset({Cell(i, j - 2), Cell(i, j - 1), Cell(i + 1, j - 1), Cell(i - 1, j)}),
    )


# interior cells of the four corridors from (i-2, j-2), as offsets from u
_CORRIDORS = (
    ((-2, -1), (-2, 0), (-1, 0)),
    ((-2, -1), (-1, -1), (-1, 0)),
    ((-1, -2), (0, -2), (0, -1)),
    ((-1, -2), (-1, -1), (0, -1)),
)


def q_blocking_derived(u: Cell) -> tuple[frozenset[Cell], ...]:
    """
    Blocking sets rebuilt from the corridors themselves.

    Corridor interior plus the 4-neighbors of the interior, minus the
    start (i-2, j-2), the target u and every cell strictly up-left of u.
    """
    i, j = u
    start = Cell(i - 2, j - 2)
    result = []
    for corridor in _CORRIDORS:
        interior = [Cell(i + di, j + dj) for di, dj in corridor]
        cells = set(interior)
        for x in interior:
            cells.update(neighbors4(x))
        cells -= {start, Cell(i, j)}
        cells = {c for c in cells if not (c[0] < i and c[1] < j)}
        result.append(frozenset(cells))
    return tuple(result)


def q_blocking(u: Cell, fig: Figure) -> tuple[frozenset[Cell], ...]:
    """Blocking sets of u intersected with F and the ground."""
    return tuple(
        frozenset(c for c in q if c in fig.occupied or fig.is_ground(c))
        for q in q_literal(u)
    )


# === Dependency graph ===

def build_dependency_graph(fig: Figure) -> DependencyGraph2D:
    """
    Dependency graph of an already padded figure.

    Starts from the shadow edges (w, u) for w in S(u) and applies two
    rules until nothing changes (at most n^2 rounds). Ground cells are
    implicit ancestors of every particle and never appear in the result.

    Rule 1, for v not on the bottom row and with no neighbor already known
    to precede it: let R be its neighbors not known to follow it. R empty
    means v can never attach (self-loop). Otherwise, if some u in R has
    every other member of R among its followers, u must precede v.

    Rule 2: a corridor Q_k(v) is closed when it holds a ground cell or a
    cell known to precede v. No open corridor gives a self-loop; otherwise
    every cell lying in all open corridors must follow v.
    """
    n = fig.n_size
    cells = sorted(fig.occupied)
    occupied = fig.occupied

    nbrs = {v: {x for x in neighbors4(v) if x in occupied} for v in cells}
    qsets = {}
    qground = {}
    for v in cells:
        literal = q_literal(v)
        qsets[v] = [q & occupied for q in literal]
        qground[v] = [any(c[0] == n + 1 and 1 <= c[1] <= n for c in q) for q in literal]

    edges: set[tuple[Cell, Cell]] = set()
    for u in cells:
        for w in shadow(u, cells):
            edges.add((w, u))

    graph = nx.DiGraph()
    graph.add_nodes_from(cells)
    graph.add_edges_from(edges)

    max_rounds = max(1, len(cells) ** 2)
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        # closures exclude v itself; v is never its own neighbor or corridor cell
        desc = {v: nx.descendants(graph, v) for v in cells}
        anc = {v: nx.ancestors(graph, v) for v in cells}

        new: set[tuple[Cell, Cell]] = set()
        for v in cells:
            if v[0] != n and not (nbrs[v] & anc[v]):
                candidates = nbrs[v] - desc[v]
                if not candidates:
                    new.add((v, v))
                for u in candidates:
                    if not (candidates - desc[u] - {u}):
                        new.add((u, v))

            open_k = [k for k in range(4) if not qground[v][k] and not (qsets[v][k] & anc[v])]
            if not open_k:
                new.add((v, v))
            else:
                for u in reduce(set.intersection, (set(qsets[v][k]) for k in open_k)):
                    new.add((v, u))

        if new <= edges:
            break
        edges |= new
        graph.add_edges_from(new)

    logger.debug(f"Dependency graph: {len(cells)} particles, {len(edges)} edges, {rounds} rounds")
    return DependencyGraph2D(graph=graph, rounds=rounds)


def is_acyclic(dg: DependencyGraph2D) -> bool:
    """Self-loops count as cycles."""
    return nx.is_directed_acyclic_graph(dg.graph)


def realizable_2d(fig: Figure) -> bool:
    padded = pad_figure(fig, config.PAD_MARGIN)
    return is_acyclic(build_dependency_graph(padded))


# === Construction ===

def _corridor_free(u: Cell, fig: Figure) -> bool:
    """C(u) is non-empty: some corridor holds no particle and no ground cell."""
    return any(not q for q in q_blocking(u, fig))


def find_removable(fig: Figure, dg: DependencyGraph2D) -> Optional[Cell]:
    """
    A particle that can be fixed last.

    It needs a free corridor, no successors in ``dg``, and the rest of the
    figure must keep an acyclic dependency graph. Candidates are scanned
    leftmost column first, then lowest first.
    """
    candidates = [v for v in dg.graph.nodes if dg.graph.out_degree(v) == 0]
    candidates.sort(key=lambda c: (c[1], -c[0]))
    for i, u in enumerate(candidates):
        if not _corridor_free(u, fig):
            continue
        rest = fig.without_cell(u)
        if is_acyclic(build_dependency_graph(rest)):
            if i > 0:
                logger.debug(f"Removable particle {tuple(u)} found after {i} rejected candidates")
            return u
    return None


def construct_realization_2d(fig: Figure) -> Realization:
    """
    Canonical realization, built by peeling removable particles.

    Each removed particle is fixed after everything still present, so the
    peel order reversed is the placement order.

    Raises:
        NotRealizable: If the figure has a cyclic dependency graph
    """
    margin = config.PAD_MARGIN
    current = pad_figure(fig, margin)
    if not is_acyclic(build_dependency_graph(current)):
        raise NotRealizable(f"Figure with {len(fig)} particles has a cyclic dependency graph")

    peeled: list[Cell] = []
    while current.occupied:
        u = find_removable(current, build_dependency_graph(current))
        if u is None:
            logger.warning(f"No removable particle among {len(current)} remaining")
            raise NotRealizable(f"No removable particle among {len(current)} remaining particles")
        peeled.append(u)
        current = current.without_cell(u)

    order = tuple(Cell(r - 2 * margin, c - margin) for r, c in reversed(peeled))
    return Realization(order)


def is_canonical(order) -> bool:
    """Every particle comes after all particles of its shadow."""
    placed: set[Cell] = set()
    cells = set(order)
    for u in order:
        if shadow(u, cells) - placed:
            return False
        placed.add(u)
    return True


# === Placement semantics ===

class _Approach:
    """
    Row bitmasks of a lattice state, for the available-path test.

    Bit c of a row mask stands for column c. A path cell must be empty,
    not adjacent to a fixed cell, and above the bottom row; paths enter at
    any cell of row 1 and move Down or Right.
    """

    def __init__(self, n_size: int):
        self.n = n_size
        self.full = (1 << (n_size + 1)) - 2
        self.occ = [0] * (n_size + 2)

    def add(self, cell: Cell) -> None:
        self.occ[cell[0]] |= 1 << cell[1]

    def remove(self, cell: Cell) -> None:
        self.occ[cell[0]] &= ~(1 << cell[1])

    def reach(self) -> list[int]:
        n, occ, full = self.n, self.occ, self.full
        reach = [0] * (n + 1)
        above = full
        for r in range(1, n):
            row = occ[r]
            blocked = row | (row << 1) | (row >> 1) | occ[r - 1] | occ[r + 1]
            free = full & ~blocked
            x = free & above
            while True:
                grown = x | ((x << 1) & free)
                if grown == x:
                    break
                x = grown
            reach[r] = x
            above = x
        return reach

    def attached(self, cell: Cell) -> bool:
        r, c = cell
        if r == self.n:
            return True
        occ = self.occ
        return bool((occ[r - 1] >> c) & 1 or (occ[r + 1] >> c) & 1
                    or (occ[r] >> (c - 1)) & 1 or (occ[r] >> (c + 1)) & 1)

    def placeable(self, cell: Cell, reach: list[int]) -> bool:
        r, c = cell
        if (self.occ[r] >> c) & 1 or not self.attached(cell):
            return False
        if r == 1:
            return True
        return bool((reach[r - 1] >> c) & 1 or (reach[r] >> (c - 1)) & 1)


def verify_realization(fig: Figure, r: Realization) -> bool:
    """
    Replay an order and check every placement.

    Each cell must touch an earlier cell or sit on the bottom row, and an
    available path of Down/Right moves must lead to it.

    Raises:
        NotAPermutation: If the order is not a permutation of the figure
    """
    if len(r.order) != len(fig.occupied) or set(r.order) != fig.occupied:
        raise NotAPermutation(f"Order of {len(r.order)} cells does not match figure of {len(fig)}")

    margin = config.PAD_MARGIN
    state = _Approach(fig.n_size + 2 * margin)
    for step, (row, col) in enumerate(r.order, start=1):
        cell = Cell(row + 2 * margin, col + margin)
        if not state.placeable(cell, state.reach()):
            logger.debug(f"Step {step}: cell {(row, col)} cannot be placed")
            return False
        state.add(cell)
    return True


def brute_force_realizable(fig: Figure, limit: Optional[int] = None) -> bool:
    """
    Exhaustive search over placement orders, memoized on fixed sets.

    Raises:
        TooLarge: If the figure has more particles than ``limit``
    """
    limit = config.BRUTE_FORCE_LIMIT if limit is None else limit
    if len(fig) > limit:
        raise TooLarge(f"{len(fig)} particles exceed the brute-force limit of {limit}")

    margin = config.PAD_MARGIN
    cells = [Cell(r + 2 * margin, c + margin) for r, c in sorted(fig.occupied)]
    state = _Approach(fig.n_size + 2 * margin)
    complete = (1 << len(cells)) - 1
    dead: set[int] = set()

    def search(mask: int) -> bool:
        if mask == complete:
            return True
        if mask in dead:
            return False
        reach = state.reach()
        for i, cell in enumerate(cells):
            if mask >> i & 1 or not state.placeable(cell, reach):
                continue
            state.add(cell)
            found = search(mask | 1 << i)
            state.remove(cell)
            if found:
                return True
        dead.add(mask)
        return False

    return search(0)


def realizing_orders(fig: Figure, canonical_only: bool = False) -> Iterator[Realization]:
    """Every valid placement order (small figures only)."""
    margin = config.PAD_MARGIN
    cells = sorted(fig.occupied)
    state = _Approach(fig.n_size + 2 * margin)
    order: list[Cell] = []
    remaining = set(cells)

    def extend() -> Iterator[Realization]:
        if not remaining:
            yield Realization(tuple(order))
            return
        reach = state.reach()
        for cell in sorted(remaining):
            if canonical_only and shadow(cell, remaining):
                continue
            padded = Cell(cell[0] + 2 * margin, cell[1] + margin)
            if not state.placeable(padded, reach):
                continue
            state.add(padded)
            order.append(cell)
            remaining.discard(cell)
            yield from extend()
            remaining.add(cell)
            order.pop()
            state.remove(padded)

    yield from extend()
