"""
Data models for aggrelab.

Lattice cells, figures, throws, ballistic-deposition particles, the
dependency graphs of the realization deciders and NOR circuits.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional, Union

import networkx as nx


# === Custom Exceptions ===

class AggrelabError(Exception):
    """Base exception for every error raised by this package."""
    pass


class InvalidFigureError(AggrelabError):
    """Raised when a figure holds cells outside its lattice."""
    pass


# Node used for the ground in every dependency construction
GROUND = "g"


class Cell(NamedTuple):
    """Lattice site. Row 1 is the top, row N+1 the ground."""
    row: int
    col: int


class Direction(Enum):
    """Directions of motion, in the order that defines k-DLA."""
    DOWN = "D"
    RIGHT = "R"
    LEFT = "L"
    UP = "U"

    @property
    def step(self) -> tuple[int, int]:
        return _STEPS[self]


_STEPS = {
    Direction.DOWN: (1, 0),
    Direction.RIGHT: (0, 1),
    Direction.LEFT: (0, -1),
    Direction.UP: (-1, 0),
}

DIRECTION_ORDER = (Direction.DOWN, Direction.RIGHT, Direction.LEFT, Direction.UP)


@dataclass(frozen=True)
class DirectionSet:
    """The first k directions of (Down, Right, Left, Up)."""
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= 4:
            raise ValueError(f"k must be in 1..4, got {self.k}")

    @property
    def allowed(self) -> frozenset[Direction]:
        return frozenset(DIRECTION_ORDER[:self.k])


@dataclass(frozen=True)
class Figure:
    """
    Occupancy of an N x N lattice sitting on a fully occupied ground row.

    The ground (row N+1) is implicit and never stored in ``occupied``.
    """
    n_size: int
    occupied: frozenset[Cell] = frozenset()

    def __post_init__(self):
        if self.n_size < 1:
            raise InvalidFigureError(f"Lattice size must be >= 1, got {self.n_size}")
        cells = frozenset(Cell(*c) for c in self.occupied)
        for c in cells:
            if not (1 <= c.row <= self.n_size and 1 <= c.col <= self.n_size):
                raise InvalidFigureError(f"Cell {tuple(c)} outside {self.n_size}x{self.n_size} lattice")
        object.__setattr__(self, "occupied", cells)

    @classmethod
    def empty(cls, n_size: int) -> "Figure":
        return cls(n_size, frozenset())

    def __len__(self) -> int:
        return len(self.occupied)

    def __contains__(self, cell) -> bool:
        return cell in self.occupied

    def is_ground(self, cell: Cell) -> bool:
        return cell[0] == self.n_size + 1 and 1 <= cell[1] <= self.n_size

    def is_occupied(self, cell: Cell) -> bool:
        """True for stored cells and for ground cells."""
        return cell in self.occupied or self.is_ground(cell)

    def with_cell(self, cell: Cell) -> "Figure":
        return Figure(self.n_size, self.occupied | {Cell(*cell)})

    def without_cell(self, cell: Cell) -> "Figure":
        return Figure(self.n_size, self.occupied - {Cell(*cell)})

    def height(self, cell: Cell) -> int:
        return self.n_size + 1 - cell[0]

    def sorted_cells(self) -> list[Cell]:
        return sorted(self.occupied)


# === Throws ===

@dataclass(frozen=True)
class Trajectory:
    """A particle walk: entry column on the top row plus a move list."""
    start_col: int
    moves: tuple[Direction, ...] = ()

    def __len__(self) -> int:
        return len(self.moves)


@dataclass(frozen=True)
class ThrowScript:
    """N, L and the ordered trajectories (M of them)."""
    n_size: int
    max_len: int
    trajectories: tuple[Trajectory, ...] = ()

    @property
    def m(self) -> int:
        return len(self.trajectories)


class DiscardReason(Enum):
    LEFT_LATTICE = "LeftLattice"
    MOVES_EXHAUSTED = "MovesExhausted"
    ENTRY_BLOCKED = "EntryBlocked"


@dataclass(frozen=True)
class Outcome:
    """Either Stuck(cell) or Discarded(reason)."""
    cell: Optional[Cell] = None
    reason: Optional[DiscardReason] = None

    @property
    def stuck(self) -> bool:
        return self.cell is not None

    @classmethod
    def stuck_at(cls, cell: Cell) -> "Outcome":
        return cls(cell=Cell(*cell))

    @classmethod
    def discarded(cls, reason: DiscardReason) -> "Outcome":
        return cls(reason=reason)


# === Ballistic Deposition ===

@dataclass(frozen=True)
class SubstrateGraph:
    """Undirected substrate on vertices 1..n_vertices."""
    n_vertices: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"Self-loop on vertex {u}")
            for x in (u, v):
                if not 1 <= x <= self.n_vertices:
                    raise ValueError(f"Edge ({u}, {v}) references unknown vertex {x}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.n_vertices + 1)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    @classmethod
    def path(cls, n: int) -> "SubstrateGraph":
        """Path graph [n]: the 1-DLA columns."""
        return cls(n, frozenset((i, i + 1) for i in range(1, n)))


@dataclass(frozen=True)
class DropSequence:
    drops: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.drops)


@dataclass(frozen=True, order=True)
class ParticleRecord:
    """The triple (V(p), num(p), pos(p))."""
    vertex: int
    num: int
    pos: int


@dataclass(frozen=True)
class BdSite:
    height: int
    vertex: int


@dataclass
class WeightedDepDAG:
    """
    Dependency DAG of a drop sequence.

    Nodes are GROUND and ParticleRecords; each edge carries ``weight`` 0 or 1.
    Edges of weight minus infinity are absent.
    """
    particles: list[ParticleRecord]
    graph: nx.DiGraph

    def weight(self, p, q) -> Optional[int]:
        data = self.graph.get_edge_data(p, q)
        return None if data is None else data["weight"]


@dataclass
class LayeredDagInstance:
    graph: nx.DiGraph
    source: object
    target: object
    length: int
    layer: dict[object, int] = field(default_factory=dict)


# === Realization ===

@dataclass
class FigureGraph1D:
    """G_a: occupied cells plus GROUND, edges tagged with ``family`` E1..E4."""
    graph: nx.DiGraph


@dataclass
class SplitGraph:
    """Vertex-split G_a: nodes (cell, 1), (cell, 2) and GROUND."""
    graph: nx.DiGraph


@dataclass
class DependencyGraph2D:
    """Edges (u, v): u is fixed before v in every canonical realization."""
    graph: nx.DiGraph
    rounds: int = 0

    @property
    def edges(self) -> set[tuple[Cell, Cell]]:
        return set(self.graph.edges())

    def successors(self, cell: Cell) -> set[Cell]:
        return set(self.graph.successors(cell))


@dataclass(frozen=True)
class Realization:
    order: tuple[Cell, ...]

    def __len__(self) -> int:
        return len(self.order)


# === Circuits ===

class GateKind(Enum):
    INPUT = "input"
    NOR = "nor"
    OR = "or"


@dataclass(frozen=True)
class Gate:
    name: str
    kind: GateKind
    inputs: tuple[str, ...] = ()


@dataclass
class NorCircuit:
    gates: list[Gate]
    outputs: list[str]
    layers: dict[str, int] = field(default_factory=dict)

    def gate(self, name: str) -> Gate:
        for g in self.gates:
            if g.name == name:
                return g
        raise KeyError(name)

    @property
    def inputs(self) -> list[str]:
        return [g.name for g in self.gates if g.kind is GateKind.INPUT]

    @property
    def depth(self) -> int:
        return max(self.layers.values(), default=0)


Assignment = dict[str, bool]


@dataclass
class CompiledCircuit:
    """Script plus probe cells; ``lanes`` maps signals to columns, ``crossings`` OR gates to the lane they cross."""
    script: ThrowScript
    probes: dict[str, Cell]
    lanes: dict[str, int] = field(default_factory=dict)
    crossings: dict[str, int] = field(default_factory=dict)


AnyNode = Union[Cell, str]


# === Oracle Reports ===

class OracleKind(Enum):
    REALIZE1 = "realize1"
    REALIZE2 = "realize2"
    BDROWS = "bdrows"
    REDUCTIONS = "reductions"
    CIRCUITS = "circuits"
    COMMUTE = "commute"
    CERTIFICATES = "certificates"
    CLOSURE = "closure"


@dataclass
class OracleReport:
    """Outcome of one equivalence suite; ``examples`` holds the first mismatches."""
    kind: str
    checked: int = 0
    mismatches: int = 0
    seconds: float = 0.0
    examples: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0
