import pytest

from models import Cell, Direction, DirectionSet, DiscardReason, Figure, ThrowScript, Trajectory
from simulator import (
    Lattice,
    MoveNotAllowed,
    TrajectoryTooLong,
    grow_cluster,
    predict,
    random_script,
    run_script,
    run_trajectory,
    straight_down_script,
)

D, R, L, U = Direction.DOWN, Direction.RIGHT, Direction.LEFT, Direction.UP

WORKED_S = (2, 7, 7, 2, 6, 3, 4, 4, 4, 5, 6, 3, 2, 6, 2)
WORKED_HEIGHTS = {2: {1, 2, 4, 5}, 3: {2, 4}, 4: {2, 3, 4}, 5: {4}, 6: {2, 4, 5}, 7: {1, 2}}


def heights_by_column(fig):
    result = {}
    for cell in fig.occupied:
        result.setdefault(cell.col, set()).add(fig.height(cell))
    return result


def test_first_particle_rests_on_ground():
    out = run_trajectory(Figure.empty(5), Trajectory(3, (D,) * 5), DirectionSet(1))
    assert out.stuck
    assert out.cell == Cell(5, 3)


def test_particle_sticks_beside_column():
    fig = Figure(5, frozenset({Cell(5, 3), Cell(4, 3)}))
    out = run_trajectory(fig, Trajectory(2, (D,) * 5), DirectionSet(1))
    assert out.cell == Cell(4, 2)


def test_leaving_lattice_discards():
    out = run_trajectory(Figure.empty(5), Trajectory(5, (R,)), DirectionSet(2))
    assert not out.stuck
    assert out.reason is DiscardReason.LEFT_LATTICE


def test_start_column_outside_lattice_discards():
    out = run_trajectory(Figure.empty(5), Trajectory(6, (D,)), DirectionSet(1))
    assert out.reason is DiscardReason.LEFT_LATTICE


def test_running_out_of_moves_discards():
    out = run_trajectory(Figure.empty(5), Trajectory(2, (D, D)), DirectionSet(1))
    assert out.reason is DiscardReason.MOVES_EXHAUSTED


def test_occupied_entry_discards():
    fig = Figure(1, frozenset({Cell(1, 1)}))
    out = run_trajectory(fig, Trajectory(1, ()), DirectionSet(1))
    assert out.reason is DiscardReason.ENTRY_BLOCKED


def test_sticky_entry_sticks_immediately():
    out = run_trajectory(Figure.empty(1), Trajectory(1, ()), DirectionSet(1))
    assert out.cell == Cell(1, 1)


def test_lateral_walk_sticks_at_first_sticky_cell():
    fig = Figure(4, frozenset({Cell(4, 4), Cell(3, 4)}))
    # row 3: walks right until (3, 3), which touches (3, 4)
    out = run_trajectory(fig, Trajectory(1, (D, D, R, R, R)), DirectionSet(2))
    assert out.cell == Cell(3, 3)


def test_up_and_left_moves():
    fig = Figure(4, frozenset({Cell(4, 1)}))
    out = run_trajectory(fig, Trajectory(3, (D, D, U, L, L, D)), DirectionSet(4))
    assert out.cell == Cell(3, 1)


def test_disallowed_move_raises():
    with pytest.raises(MoveNotAllowed):
        run_trajectory(Figure.empty(3), Trajectory(1, (R,)), DirectionSet(1))


def test_script_rejects_trajectory_longer_than_bound():
    script = ThrowScript(3, 2, (Trajectory(1, (D, D)), Trajectory(2, (D, D, D))))
    with pytest.raises(TrajectoryTooLong):
        run_script(script, DirectionSet(1))


def test_run_trajectory_leaves_figure_unchanged():
    fig = Figure.empty(3)
    run_trajectory(fig, Trajectory(1, (D, D, D)), DirectionSet(1))
    assert fig.occupied == frozenset()


def test_empty_script_gives_empty_figure():
    fig = run_script(ThrowScript(4, 4, ()), DirectionSet(2))
    assert fig == Figure.empty(4)


def test_worked_example():
    fig = run_script(straight_down_script(7, WORKED_S), DirectionSet(1))
    assert len(fig) == 15
    assert heights_by_column(fig) == WORKED_HEIGHTS
    expected = {Cell(8 - h, c) for c, hs in WORKED_HEIGHTS.items() for h in hs}
    assert fig.occupied == expected


def test_two_drops_stack():
    fig = run_script(straight_down_script(4, (3, 3)), DirectionSet(1))
    assert fig.occupied == {Cell(4, 3), Cell(3, 3)}


def test_predict_worked_example():
    script = straight_down_script(7, WORKED_S)
    assert predict(script, DirectionSet(1), Cell(3, 2))
    assert not predict(script, DirectionSet(1), Cell(5, 2))


def test_predict_on_empty_script():
    assert not predict(ThrowScript(3, 3, ()), DirectionSet(2), Cell(1, 1))


def test_random_script_empty_and_deterministic():
    assert random_script(5, 0, 10, DirectionSet(4), 42).m == 0
    first = random_script(8, 20, 12, DirectionSet(3), 7)
    second = random_script(8, 20, 12, DirectionSet(3), 7)
    assert first == second
    assert all(set(t.moves) <= DirectionSet(3).allowed for t in first.trajectories)


def test_large_random_run_stays_in_lattice():
    fig = run_script(random_script(100, 2000, 100, DirectionSet(1), 7), DirectionSet(1))
    assert all(1 <= r <= 100 and 1 <= c <= 100 for r, c in fig.occupied)


def test_lattice_matches_figure_round_trip():
    fig = Figure(5, frozenset({Cell(5, 1), Cell(4, 1), Cell(5, 3)}))
    assert Lattice.from_figure(fig).to_figure() == fig


def test_grow_cluster_is_seeded():
    first = grow_cluster(12, 15, DirectionSet(2), seed=3, max_len=60)
    second = grow_cluster(12, 15, DirectionSet(2), seed=3, max_len=60)
    assert first == second
    assert 0 < len(first) <= 15
