import random

import networkx as nx
import pytest

from ballistic import (
    MalformedLayering,
    NonPositiveValue,
    UnknownVertex,
    bd_occupancy,
    bd_predict,
    bd_simulate,
    bd_simulate_reference,
    bead_sort,
    build_dependency_dag,
    exact_path_exists,
    extract_certificate,
    is_valid_particle,
    layered_reachable,
    longest_path_rows,
    particle_records,
    reduce_exact_to_layered,
    reduce_ldereach_to_bd,
    throws_commute,
    verify_certificate,
    weight,
)
from models import BdSite, DropSequence, LayeredDagInstance, ParticleRecord, SubstrateGraph, GROUND

WORKED = DropSequence((2, 7, 7, 2, 6, 3, 4, 4, 4, 5, 6, 3, 2, 6, 2))
WORKED_ROWS = (1, 1, 2, 2, 2, 2, 2, 3, 4, 4, 4, 4, 4, 5, 5)
PATH7 = SubstrateGraph.path(7)


def test_worked_rows():
    rows = bd_simulate(PATH7, WORKED)
    assert tuple(rows[i] for i in range(1, 16)) == WORKED_ROWS


def test_reference_rows_agree_on_worked_example():
    assert bd_simulate_reference(PATH7, WORKED) == bd_simulate(PATH7, WORKED)


def test_single_drop_is_row_one():
    g = SubstrateGraph(3, frozenset({(1, 2), (2, 3)}))
    assert bd_simulate(g, DropSequence((2,))) == {1: 1}


def test_star_center_sticks_laterally():
    star = SubstrateGraph(4, frozenset({(1, 2), (1, 3), (1, 4)}))
    assert bd_simulate(star, DropSequence((2, 3, 1))) == {1: 1, 2: 1, 3: 1}


def test_unknown_vertex():
    with pytest.raises(UnknownVertex):
        bd_simulate(PATH7, DropSequence((8,)))
    with pytest.raises(UnknownVertex):
        bd_predict(PATH7, WORKED, BdSite(1, 9))


def test_particle_records():
    assert particle_records(DropSequence((2,))) == [ParticleRecord(2, 1, 1)]
    assert particle_records(DropSequence((2, 7, 7))) == [
        ParticleRecord(2, 1, 1), ParticleRecord(7, 1, 2), ParticleRecord(7, 2, 3),
    ]
    assert [p.num for p in particle_records(DropSequence((4, 4, 4)))] == [1, 2, 3]


def test_dag_single_drop():
    dag = build_dependency_dag(PATH7, DropSequence((2,)))
    p1 = ParticleRecord(2, 1, 1)
    assert set(dag.graph.edges) == {(GROUND, p1)}
    assert dag.weight(GROUND, p1) == 1


def test_dag_stacking():
    dag = build_dependency_dag(PATH7, DropSequence((2, 2)))
    p1, p2 = ParticleRecord(2, 1, 1), ParticleRecord(2, 2, 2)
    assert set(dag.graph.edges) == {(GROUND, p1), (p1, p2)}
    assert dag.weight(p1, p2) == 1


def test_dag_lateral_edge_has_weight_zero():
    dag = build_dependency_dag(PATH7, DropSequence((2, 3)))
    assert dag.weight(ParticleRecord(2, 1, 1), ParticleRecord(3, 1, 2)) == 0
    assert dag.weight(GROUND, ParticleRecord(3, 1, 2)) is None


def test_longest_paths_equal_worked_rows():
    rows = longest_path_rows(build_dependency_dag(PATH7, WORKED))
    assert tuple(rows[p] for p in sorted(rows, key=lambda p: p.pos)) == WORKED_ROWS


def test_longest_paths_match_simulation_on_random_graphs():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(1, 10)
        edges = frozenset((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < 0.3)
        g = SubstrateGraph(n, edges)
        s = DropSequence(tuple(rng.randint(1, n) for _ in range(rng.randint(0, 30))))
        rows = longest_path_rows(build_dependency_dag(g, s))
        assert {p.pos: r for p, r in rows.items()} == bd_simulate(g, s)


@pytest.mark.parametrize("site, expected", [
    (BdSite(5, 6), True),
    (BdSite(5, 2), True),
    (BdSite(3, 2), False),
    (BdSite(1, 1), False),
])
def test_bd_predict_worked(site, expected):
    assert bd_predict(PATH7, WORKED, site) is expected


def test_bd_predict_empty_sequence():
    assert not bd_predict(PATH7, DropSequence(()), BdSite(1, 1))


def test_valid_particle():
    s = DropSequence((2, 7, 7))
    assert is_valid_particle(s, ParticleRecord(7, 2, 3))
    assert not is_valid_particle(s, ParticleRecord(7, 1, 3))
    assert not is_valid_particle(s, ParticleRecord(2, 1, 3))
    assert not is_valid_particle(s, ParticleRecord(7, 3, 4))


def test_weight_checks():
    assert weight(PATH7, DropSequence((2, 2)), ParticleRecord(2, 1, 1), ParticleRecord(2, 2, 2), 1)
    s = DropSequence((2, 3))
    assert weight(PATH7, s, ParticleRecord(2, 1, 1), ParticleRecord(3, 1, 2), 0)
    assert not weight(PATH7, s, ParticleRecord(2, 1, 1), ParticleRecord(3, 1, 2), 1)
    assert not weight(PATH7, s, GROUND, ParticleRecord(3, 1, 2), 1)
    assert weight(PATH7, s, GROUND, ParticleRecord(2, 1, 1), 1)


def test_certificate_single_drop():
    s = DropSequence((2,))
    assert verify_certificate(PATH7, s, BdSite(1, 2), [(ParticleRecord(2, 1, 1), 1)])
    assert not verify_certificate(PATH7, s, BdSite(1, 2), [])


def test_extracted_certificate_verifies_and_flip_fails():
    dag = build_dependency_dag(PATH7, WORKED)
    top_of_two = ParticleRecord(2, 4, 15)
    chain = extract_certificate(dag, top_of_two)
    assert chain[-1][0] == top_of_two
    assert verify_certificate(PATH7, WORKED, BdSite(5, 2), chain)

    particle, w = chain[-1]
    flipped = chain[:-1] + [(particle, 1 - w)]
    assert not verify_certificate(PATH7, WORKED, BdSite(5, 2), flipped)


def test_certificate_for_wrong_site_fails():
    dag = build_dependency_dag(PATH7, WORKED)
    chain = extract_certificate(dag, ParticleRecord(2, 4, 15))
    assert not verify_certificate(PATH7, WORKED, BdSite(4, 2), chain)
    assert not verify_certificate(PATH7, WORKED, BdSite(5, 3), chain)


def test_bead_sort_examples():
    assert bead_sort([7, 4, 1, 10]) == [10, 7, 4, 1]
    assert bead_sort([1]) == [1]
    assert bead_sort([]) == []


def test_bead_sort_matches_sorted():
    rng = random.Random(5)
    for _ in range(50):
        values = [rng.randint(1, 12) for _ in range(rng.randint(1, 10))]
        assert bead_sort(values) == sorted(values, reverse=True)


def test_bead_sort_rejects_non_positive():
    with pytest.raises(NonPositiveValue):
        bead_sort([3, 0])


def test_commuting_non_adjacent_throws():
    state = DropSequence((2, 3, 3))
    assert throws_commute(PATH7, state, 2, 5)
    assert throws_commute(PATH7, state, 4, 4)


def test_adjacent_throws_can_fail_to_commute():
    # dropped first, 1 stays on row 1; dropped after the second 2 it rises to row 2
    state = DropSequence((2,))
    assert not throws_commute(PATH7, state, 1, 2)


def test_bd_occupancy_worked():
    sites = bd_occupancy(PATH7, WORKED)
    assert len(sites) == 15
    assert BdSite(3, 4) in sites


def test_exact_path_exists():
    g = nx.DiGraph([(0, 1), (1, 2), (2, 0)])
    assert exact_path_exists(g, 0, 0, 3)
    assert exact_path_exists(g, 0, 2, 2)
    assert not exact_path_exists(g, 0, 2, 3)
    assert exact_path_exists(g, 1, 1, 0)


def test_reduce_single_edge():
    g = nx.DiGraph([("s", "t")])
    inst = reduce_exact_to_layered(g, "s", "t", 1)
    assert inst.source == ("s", 0)
    assert inst.target == ("t", 1)
    assert set(inst.layer.values()) == {0, 1}
    assert layered_reachable(inst)


def test_reduce_without_path():
    g = nx.DiGraph()
    g.add_nodes_from(["s", "t", "u"])
    g.add_edge("t", "s")
    for k in range(4):
        assert not layered_reachable(reduce_exact_to_layered(g, "s", "t", k))


def test_reduce_triangle_matches_walks():
    g = nx.DiGraph([(0, 1), (1, 2), (2, 0)])
    for s in range(3):
        for t in range(3):
            for k in range(4):
                inst = reduce_exact_to_layered(g, s, t, k)
                assert layered_reachable(inst) == exact_path_exists(g, s, t, k)


def test_reduce_rejects_long_k():
    with pytest.raises(ValueError):
        reduce_exact_to_layered(nx.DiGraph([(0, 1)]), 0, 1, 3)


def _two_layer(adjacent):
    g = nx.DiGraph()
    g.add_nodes_from(["s", "t"])
    if adjacent:
        g.add_edge("s", "t")
    return LayeredDagInstance(g, "s", "t", 1, {"s": 0, "t": 1})


def test_bd_reduction_two_layer_path():
    substrate, seq, site = reduce_ldereach_to_bd(_two_layer(True))
    assert seq.drops == (1, 1, 2, 2)
    assert site == BdSite(3, 2)
    assert substrate.adjacent(1, 2)
    assert bd_predict(substrate, seq, site)


def test_bd_reduction_two_layer_no_edge():
    assert not bd_predict(*reduce_ldereach_to_bd(_two_layer(False)))


def test_bd_reduction_zero_length():
    g = nx.DiGraph()
    g.add_node("s")
    substrate, seq, site = reduce_ldereach_to_bd(LayeredDagInstance(g, "s", "s", 0, {"s": 0}))
    assert seq.drops == (1, 1)
    assert site == BdSite(2, 1)
    assert bd_predict(substrate, seq, site)


def test_bd_reduction_follows_layered_search():
    rng = random.Random(3)
    for _ in range(60):
        g = nx.DiGraph()
        n = rng.randint(1, 5)
        g.add_nodes_from(range(n))
        g.add_edges_from((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.35)
        s, t, k = rng.randrange(n), rng.randrange(n), rng.randint(0, n)
        inst = reduce_exact_to_layered(g, s, t, k)
        assert bd_predict(*reduce_ldereach_to_bd(inst)) == exact_path_exists(g, s, t, k)


def test_bd_reduction_rejects_skipping_edge():
    g = nx.DiGraph([("a", "c")])
    inst = LayeredDagInstance(g, "a", "c", 2, {"a": 0, "c": 2})
    with pytest.raises(MalformedLayering):
        reduce_ldereach_to_bd(inst)
