import pytest

import config
import realize2
from core import pad_figure
from models import Cell, DirectionSet, Figure, Realization
from oracles import window_figures
from realize2 import (
    NotAPermutation,
    NotRealizable,
    TooLarge,
    brute_force_realizable,
    build_dependency_graph,
    construct_realization_2d,
    find_removable,
    is_acyclic,
    is_canonical,
    q_blocking,
    q_blocking_derived,
    q_literal,
    realizable_2d,
    realizing_orders,
    shadow,
    verify_realization,
)
from simulator import random_script, run_script

BOTTOM, TOP = Cell(3, 2), Cell(2, 2)
STACK = Figure(3, frozenset({BOTTOM, TOP}))


def padded(cell):
    m = config.PAD_MARGIN
    return Cell(cell.row + 2 * m, cell.col + m)


def test_shadow():
    cells = {Cell(3, 3), Cell(2, 3), Cell(3, 1), Cell(1, 1)}
    assert shadow(Cell(2, 2), cells) == {Cell(3, 3)}
    assert shadow(Cell(3, 3), cells) == set()


def test_blocking_sets_match_corridors():
    for u in (Cell(5, 5), Cell(9, 4), Cell(6, 12)):
        assert q_blocking_derived(u) == q_literal(u)


def test_blocking_sets_are_intersected_with_figure():
    fig = Figure(8, frozenset({Cell(5, 5), Cell(4, 5), Cell(5, 4)}))
    q1, q2, q3, q4 = q_blocking(Cell(5, 5), fig)
    assert q1 == {Cell(4, 5)}
    assert q2 == {Cell(4, 5), Cell(5, 4)}
    assert q3 == {Cell(5, 4)}
    assert q4 == {Cell(5, 4), Cell(4, 5)}


def test_bottom_row_side_corridors_hit_the_ground():
    fig = Figure(8, frozenset({Cell(8, 5)}))
    q1, q2, q3, q4 = q_blocking(Cell(8, 5), fig)
    assert not q1 and not q2
    assert Cell(9, 3) in q3 and Cell(9, 4) in q3
    assert q4 == {Cell(9, 4)}


def test_floating_cell_is_not_realizable():
    fig = Figure(3, frozenset({Cell(1, 2)}))
    assert not realizable_2d(fig)
    assert not brute_force_realizable(fig)
    dg = build_dependency_graph(pad_figure(fig, config.PAD_MARGIN))
    assert (padded(Cell(1, 2)), padded(Cell(1, 2))) in dg.edges
    with pytest.raises(NotRealizable):
        construct_realization_2d(fig)


def test_empty_figure():
    assert realizable_2d(Figure.empty(4))
    assert construct_realization_2d(Figure.empty(4)).order == ()


def test_vertical_stack_dependency():
    dg = build_dependency_graph(pad_figure(STACK, config.PAD_MARGIN))
    assert (padded(BOTTOM), padded(TOP)) in dg.edges
    assert (padded(TOP), padded(BOTTOM)) not in dg.edges
    assert is_acyclic(dg)
    assert find_removable(pad_figure(STACK, config.PAD_MARGIN), dg) == padded(TOP)


def test_find_removable_falls_back_to_next_candidate(monkeypatch):
    left, right = padded(Cell(3, 1)), padded(Cell(3, 3))
    fig = pad_figure(Figure(3, frozenset({Cell(3, 1), Cell(3, 3)})), config.PAD_MARGIN)
    dg = build_dependency_graph(fig)
    assert find_removable(fig, dg) == left

    def rest_cyclic_without_left(rest):
        result = build_dependency_graph(rest)
        if left not in rest.occupied:
            v = next(iter(rest.occupied))
            result.graph.add_edge(v, v)
        return result

    monkeypatch.setattr(realize2, "build_dependency_graph", rest_cyclic_without_left)
    assert find_removable(fig, dg) == right


def test_vertical_stack_realization():
    order = construct_realization_2d(STACK)
    assert order.order == (BOTTOM, TOP)
    assert verify_realization(STACK, order)
    assert not verify_realization(STACK, Realization((TOP, BOTTOM)))


def test_bottom_bar():
    fig = Figure(3, frozenset({Cell(3, 1), Cell(3, 2), Cell(3, 3)}))
    assert realizable_2d(fig)
    order = construct_realization_2d(fig)
    assert verify_realization(fig, order)
    assert is_canonical(order.order)


def test_verify_rejects_wrong_cells():
    with pytest.raises(NotAPermutation):
        verify_realization(STACK, Realization((BOTTOM,)))
    with pytest.raises(NotAPermutation):
        verify_realization(STACK, Realization((BOTTOM, Cell(1, 1))))


def test_is_canonical():
    assert is_canonical((Cell(3, 3), Cell(2, 2)))
    assert not is_canonical((Cell(2, 2), Cell(3, 3)))


def test_brute_force_limit():
    fig = Figure(3, frozenset({Cell(3, 1), Cell(3, 2), Cell(3, 3)}))
    with pytest.raises(TooLarge):
        brute_force_realizable(fig, limit=2)


def test_realizing_orders_of_stack():
    assert [r.order for r in realizing_orders(STACK)] == [(BOTTOM, TOP)]


def test_dependency_edges_hold_in_every_canonical_order():
    for fig in window_figures(3, 3, max_cells=4):
        dg = build_dependency_graph(pad_figure(fig, config.PAD_MARGIN))
        orders = list(realizing_orders(fig, canonical_only=True))
        if not is_acyclic(dg):
            assert not orders, sorted(fig.occupied)
            continue
        for r in orders:
            position = {padded(c): i for i, c in enumerate(r.order)}
            for u, v in dg.edges:
                assert position[u] < position[v], (sorted(fig.occupied), u, v)


def test_matches_brute_force_on_small_window():
    for fig in window_figures(3, 3, max_cells=4):
        expected = brute_force_realizable(fig)
        assert realizable_2d(fig) == expected, sorted(fig.occupied)
        if expected:
            order = construct_realization_2d(fig)
            assert verify_realization(fig, order)
            assert is_canonical(order.order)


def test_grown_clusters_are_realizable():
    dirs = DirectionSet(2)
    for seed in range(10):
        fig = run_script(random_script(6, 8, 18, dirs, seed), dirs)
        assert realizable_2d(fig)
        assert verify_realization(fig, construct_realization_2d(fig))


@pytest.mark.slow
def test_matches_brute_force_on_larger_window():
    for fig in window_figures(4, 4, max_cells=6):
        expected = brute_force_realizable(fig)
        assert realizable_2d(fig) == expected, sorted(fig.occupied)
        if expected:
            assert verify_realization(fig, construct_realization_2d(fig))
