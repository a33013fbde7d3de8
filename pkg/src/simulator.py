"""
Deterministic k-direction DLA driven by explicit trajectories.

A particle enters at (1, start_col). At every visited cell, the start
included, it freezes if a 4-neighbor is occupied or is the ground;
otherwise it takes its next move. Leaving the lattice or running out of
moves discards it.
"""

import logging
import random
from typing import Iterable, Optional

import numpy as np

from models import (
    AggrelabError,
    Cell,
    Direction,
    DirectionSet,
    DiscardReason,
    Figure,
    Outcome,
    ThrowScript,
    Trajectory,
    DIRECTION_ORDER,
)

logger = logging.getLogger(__name__)


# === Custom Exceptions ===

class MoveNotAllowed(AggrelabError):
    """Raised when a trajectory uses a direction outside the DirectionSet."""
    pass


class TrajectoryTooLong(AggrelabError):
    """Raised when a trajectory has more moves than its script's bound L."""
    pass


class Lattice:
    """
    Mutable occupancy state backed by numpy arrays.

    ``occupied`` and ``sticky`` are (N+2) x (N+2) with a one-cell frame,
    so lattice cell (r, c) lives at index [r, c] and the ground row is
    index N+1. A cell is sticky when one of its 4-neighbors is occupied.
    """

    def __init__(self, n_size: int, cells: Iterable[Cell] = ()):
        self.n_size = n_size
        self.occupied = np.zeros((n_size + 2, n_size + 2), dtype=bool)
        self.sticky = np.zeros((n_size + 2, n_size + 2), dtype=bool)
        self.occupied[n_size + 1, 1:n_size + 1] = True
        self.sticky[n_size, 1:n_size + 1] = True
        for cell in cells:
            self.add(cell)

    @classmethod
    def from_figure(cls, fig: Figure) -> "Lattice":
        return cls(fig.n_size, fig.occupied)

    def add(self, cell: Cell) -> None:
        r, c = cell
        self.occupied[r, c] = True
        self.sticky[r - 1, c] = True
        self.sticky[r + 1, c] = True
        self.sticky[r, c - 1] = True
        self.sticky[r, c + 1] = True

    def cells(self) -> frozenset[Cell]:
        rows, cols = np.nonzero(self.occupied[1:self.n_size + 1, 1:self.n_size + 1])
        return frozenset(Cell(int(r) + 1, int(c) + 1) for r, c in zip(rows, cols))

    def to_figure(self) -> Figure:
        return Figure(self.n_size, self.cells())

    def walk(self, traj: Trajectory) -> Outcome:
        """Simulate one particle without changing the state."""
        n = self.n_size
        r, c = 1, traj.start_col
        if not 1 <= c <= n:
            return Outcome.discarded(DiscardReason.LEFT_LATTICE)
        if self.occupied[r, c]:
            return Outcome.discarded(DiscardReason.ENTRY_BLOCKED)
        if self.sticky[r, c]:
            return Outcome.stuck_at(Cell(r, c))

        moves = traj.moves
        i = 0
        while i < len(moves):
            d = moves[i]
            j = i
            while j < len(moves) and moves[j] is d:
                j += 1
            run = j - i
            dr, dc = d.step

            # cells visited by this run of identical moves, clipped to the lattice
            if dr:
                end = r + dr * run
                lo, hi = (r + 1, min(end, n)) if dr > 0 else (max(end, 1), r - 1)
                line = self.sticky[lo:hi + 1, c] if hi >= lo else self.sticky[0:0, c]
                inside = hi - lo + 1 if hi >= lo else 0
                if dr < 0:
                    line = line[::-1]
            else:
                end = c + dc * run
                lo, hi = (c + 1, min(end, n)) if dc > 0 else (max(end, 1), c - 1)
                line = self.sticky[r, lo:hi + 1] if hi >= lo else self.sticky[r, 0:0]
                inside = hi - lo + 1 if hi >= lo else 0
                if dc < 0:
                    line = line[::-1]

            if inside and line.any():
                k = int(np.argmax(line)) + 1
                return Outcome.stuck_at(Cell(r + dr * k, c + dc * k))
            if inside < run:
                return Outcome.discarded(DiscardReason.LEFT_LATTICE)
            r, c = r + dr * run, c + dc * run
            i = j

        return Outcome.discarded(DiscardReason.MOVES_EXHAUSTED)

    def throw(self, traj: Trajectory) -> Outcome:
        outcome = self.walk(traj)
        if outcome.stuck:
            self.add(outcome.cell)
        return outcome


def _check_moves(traj: Trajectory, dirs: DirectionSet) -> None:
    allowed = dirs.allowed
    for move in traj.moves:
        if move not in allowed:
            raise MoveNotAllowed(
                f"Move {move.value} not allowed with k={dirs.k} (start column {traj.start_col})"
            )


def run_trajectory(fig: Figure, traj: Trajectory, dirs: DirectionSet) -> Outcome:
    """
    Throw one particle into a figure without modifying it.

    Raises:
        MoveNotAllowed: If a move lies outside dirs
    """
    _check_moves(traj, dirs)
    return Lattice.from_figure(fig).walk(traj)


def run_script(script: ThrowScript, dirs: DirectionSet, lattice: Optional[Lattice] = None) -> Figure:
    """
    Throw every trajectory of a script, in order, into an empty lattice.

    Args:
        script: The throws
        dirs: Allowed directions
        lattice: Optional pre-built state to throw into instead

    Returns:
        The final Figure

    Raises:
        MoveNotAllowed: If a move lies outside dirs
        TrajectoryTooLong: If a trajectory exceeds script.max_len
    """
    state = lattice if lattice is not None else Lattice(script.n_size)
    discarded = 0
    for traj in script.trajectories:
        _check_moves(traj, dirs)
        if len(traj.moves) > script.max_len:
            raise TrajectoryTooLong(
                f"Trajectory from column {traj.start_col} has {len(traj.moves)} moves, L={script.max_len}"
            )
        if not state.throw(traj).stuck:
            discarded += 1
    logger.debug(f"Ran {script.m} throws (k={dirs.k}), {discarded} discarded")
    return state.to_figure()


def predict(script: ThrowScript, dirs: DirectionSet, site: Cell) -> bool:
    """k-DLA-Prediction: is ``site`` occupied after the script has run?"""
    if not 1 <= site[0] <= script.n_size:
        raise ValueError(f"Site row {site[0]} outside 1..{script.n_size}")
    return Cell(*site) in run_script(script, dirs).occupied


def straight_down_script(n_size: int, columns: Iterable[int]) -> ThrowScript:
    """1-DLA encoding of a drop sequence: one D x N walk per column."""
    moves = (Direction.DOWN,) * n_size
    trajectories = tuple(Trajectory(col, moves) for col in columns)
    return ThrowScript(n_size, n_size, trajectories)


def random_script(n_size: int, m: int, l: int, dirs: DirectionSet, seed: int) -> ThrowScript:
    """
    Seeded pseudo-random script: uniform start columns, uniform moves.

    The same arguments always yield the same script.
    """
    rng = random.Random(seed)
    choices = DIRECTION_ORDER[:dirs.k]
    trajectories = tuple(
        Trajectory(rng.randint(1, n_size), tuple(rng.choice(choices) for _ in range(l)))
        for _ in range(m)
    )
    return ThrowScript(n_size, l, trajectories)


def grow_cluster(n_size: int, m: int, dirs: DirectionSet, seed: int, max_len: int) -> Figure:
    """
    Grow a cluster of up to ``m`` particles from random walks.

    Discarded walks are retried with a fresh walk, at most 20*m attempts
    overall. Used for qualitative pictures of k-DLA clusters.
    """
    rng = random.Random(seed)
    choices = DIRECTION_ORDER[:dirs.k]
    state = Lattice(n_size)
    placed = 0
    attempts = 0
    while placed < m and attempts < 20 * m:
        attempts += 1
        traj = Trajectory(rng.randint(1, n_size), tuple(rng.choice(choices) for _ in range(max_len)))
        if state.throw(traj).stuck:
            placed += 1
    logger.info(f"Grew {placed} particles in {attempts} walks (N={n_size}, k={dirs.k})")
    return state.to_figure()
