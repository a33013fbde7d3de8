import pytest

import storage
from circuits import parse_circuit
from core import render_figure
from models import (
    BdSite,
    Cell,
    Direction,
    DropSequence,
    Figure,
    OracleReport,
    Realization,
    SubstrateGraph,
    ThrowScript,
    Trajectory,
)
from storage import StorageError

FIG = Figure(4, frozenset({Cell(4, 1), Cell(4, 2), Cell(3, 2), Cell(2, 3)}))


def test_figure_text_with_ground_line(tmp_path):
    path = tmp_path / "fig.txt"
    path.write_bytes(render_figure(FIG))
    assert storage.load_figure(path) == FIG


def test_figure_text_without_ground_line(tmp_path):
    path = tmp_path / "fig.txt"
    path.write_text("...\n.#.\n##.\n")
    assert storage.load_figure(path).occupied == {Cell(2, 2), Cell(3, 1), Cell(3, 2)}


def test_figure_text_with_explicit_size(tmp_path):
    path = tmp_path / "fig.txt"
    path.write_text("#\n")
    fig = storage.load_figure(path, n_size=3)
    assert fig.n_size == 3
    assert fig.occupied == {Cell(1, 1)}


def test_figure_pbm(tmp_path):
    path = tmp_path / "fig.pbm"
    storage.save_figure(path, FIG)
    assert path.read_text().startswith("P1\n4 5\n")
    assert storage.load_figure(path) == FIG


def test_pbm_without_ground_row():
    fig = storage.parse_pbm("P1\n2 2\n0 0\n1 0\n")
    assert fig.occupied == {Cell(2, 1)}


@pytest.mark.parametrize("text", ["P2\n1 1\n0\n", "P1\n2 2\n0 0 1\n", "P1\n2 4\n" + "0 " * 8])
def test_pbm_errors(text):
    with pytest.raises(StorageError):
        storage.parse_pbm(text)


def test_figure_png(tmp_path):
    path = tmp_path / "fig.png"
    storage.save_figure(path, FIG)
    assert storage.load_figure(path) == FIG


def test_missing_file(tmp_path):
    with pytest.raises(StorageError):
        storage.load_figure(tmp_path / "nope.txt")


def test_script_file(tmp_path):
    script = ThrowScript(5, 4, (
        Trajectory(2, (Direction.DOWN, Direction.RIGHT)),
        Trajectory(5, ()),
    ))
    path = tmp_path / "run.script"
    storage.save_script(path, script)
    assert path.read_text() == "5 2 4\n2 DR\n5 -\n"
    assert storage.load_script(path) == script


@pytest.mark.parametrize("text", [
    "",
    "5 2\n1 D\n",
    "5 2 4\n1 D\n",
    "5 1 4\n1 DX\n",
    "5 1 1\n1 DD\n",
])
def test_script_errors(text):
    with pytest.raises(StorageError):
        storage.parse_script(text)


def test_graph_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# path on four vertices\n4 3\n1 2\n2 3\n3 4\n")
    assert storage.load_graph(path) == SubstrateGraph.path(4)

    storage.save_graph(tmp_path / "copy.txt", SubstrateGraph.path(4))
    assert storage.load_graph(tmp_path / "copy.txt") == SubstrateGraph.path(4)


def test_graph_with_wrong_edge_count(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("3 2\n1 2\n")
    with pytest.raises(StorageError):
        storage.load_graph(path)


def test_digraph_file(tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("3 2\n1 2\n2 1\n")
    g = storage.load_digraph(path)
    assert set(g.nodes) == {1, 2, 3}
    assert set(g.edges) == {(1, 2), (2, 1)}

    path.write_text("2 1\n1 3\n")
    with pytest.raises(StorageError):
        storage.load_digraph(path)


def test_sequence_and_site(tmp_path):
    storage.save_sequence(tmp_path / "s.txt", DropSequence((2, 7, 7)))
    assert storage.load_sequence(tmp_path / "s.txt") == DropSequence((2, 7, 7))

    storage.save_site(tmp_path / "site.txt", BdSite(5, 2))
    assert storage.load_site(tmp_path / "site.txt") == (5, 2)
    storage.save_site(tmp_path / "cell.txt", Cell(3, 4))
    assert storage.load_site(tmp_path / "cell.txt") == (3, 4)


@pytest.mark.parametrize("text, expected", [("5 2", (5, 2)), ("5,2", (5, 2)), (" 3 , 4 ", (3, 4))])
def test_parse_pair(text, expected):
    assert storage.parse_pair(text) == expected


@pytest.mark.parametrize("text", ["5", "a b", "1 2 3"])
def test_parse_pair_errors(text):
    with pytest.raises(StorageError):
        storage.parse_pair(text)


def test_circuit_and_assignment(tmp_path):
    c = parse_circuit("input a\ninput b\nnor g a b\noutput g\n")
    storage.save_circuit(tmp_path / "c.txt", c)
    assert storage.load_circuit(tmp_path / "c.txt").gates == c.gates

    storage.save_assignment(tmp_path / "a.txt", {"a": True, "b": False})
    assert storage.load_assignment(tmp_path / "a.txt") == {"a": True, "b": False}


def test_order_file(tmp_path):
    order = Realization((Cell(3, 2), Cell(2, 2)))
    storage.save_order(tmp_path / "o.txt", order)
    assert (tmp_path / "o.txt").read_text() == "3 2\n2 2\n"
    assert storage.load_order(tmp_path / "o.txt") == order


def test_report_file(tmp_path):
    report = OracleReport(kind="bdrows", checked=10, mismatches=1, seconds=0.5, examples=["row rules disagree"])
    storage.save_report(tmp_path / "r.yaml", report)
    data = storage.load_report(tmp_path / "r.yaml")
    assert data == {
        "kind": "bdrows",
        "checked": 10,
        "mismatches": 1,
        "seconds": 0.5,
        "examples": ["row rules disagree"],
    }


def test_report_must_be_mapping(tmp_path):
    (tmp_path / "r.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(StorageError):
        storage.load_report(tmp_path / "r.yaml")

