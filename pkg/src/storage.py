"""
File-backed storage for aggrelab artifacts.

Figures, throw scripts, substrate graphs, drop sequences, sites, circuits,
assignments, realization orders and oracle reports all live in small text
files so runs can be replayed from the command line.
"""

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Union

import networkx as nx
import yaml
from PIL import Image

from circuits import format_assignment, format_circuit, parse_assignment, parse_circuit
from core import RenderFormat, parse_figure, render_figure, render_image
from models import (
    AggrelabError,
    Assignment,
    BdSite,
    Cell,
    Direction,
    DropSequence,
    Figure,
    NorCircuit,
    Realization,
    SubstrateGraph,
    ThrowScript,
    Trajectory,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# === Custom Exceptions ===

class StorageError(AggrelabError):
    """Raised when a file cannot be read, written or parsed."""
    pass


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e


def write_text(path: PathLike, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e
    logger.debug(f"Wrote {path}")


def _ints(line: str, path: PathLike, lineno: int) -> list[int]:
    try:
        return [int(x) for x in line.split()]
    except ValueError as e:
        raise StorageError(f"{path}:{lineno}: expected integers, got '{line.strip()}'") from e


def _lines(text: str) -> list[str]:
    return [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


# === Figures ===

def parse_pbm(text: str) -> Figure:
    """
    Read a plain "P1" bitmap written by render_figure.

    Width is N; the height may be N (no ground row) or N+1.
    """
    tokens = [t for line in text.splitlines() for t in line.split("#", 1)[0].split()]
    if not tokens or tokens[0] != "P1":
        raise StorageError("PBM data must start with 'P1'")
    try:
        width, height = int(tokens[1]), int(tokens[2])
    except (IndexError, ValueError) as e:
        raise StorageError("PBM header lacks width and height") from e
    bits = "".join(tokens[3:])
    if len(bits) != width * height or set(bits) - {"0", "1"}:
        raise StorageError(f"PBM body should hold {width * height} bits")
    if height not in (width, width + 1):
        raise StorageError(f"PBM of {width}x{height} is not an N x N lattice")

    occupied = {
        Cell(r + 1, c + 1)
        for r in range(width)
        for c in range(width)
        if bits[r * width + c] == "1"
    }
    return Figure(width, frozenset(occupied))


def load_figure(path: PathLike, n_size: int = 0) -> Figure:
    """
    Load a figure from '.'/'#' text, a ".pbm" or a ".png" file.

    Args:
        path: File to read
        n_size: Lattice size for text files; 0 takes the width of the
            widest line. A trailing all-'#' ground line is dropped.

    Returns:
        The Figure
    """
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        return load_png(path)
    text = _read(path)
    if suffix == ".pbm":
        return parse_pbm(text)

    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    n = n_size or max((len(line) for line in lines), default=1)
    if len(lines) == n + 1 and set(lines[-1]) == {"#"}:
        lines.pop()
    return parse_figure("\n".join(lines), n)


def save_figure(path: PathLike, fig: Figure, scale: int = 1) -> None:
    """Write a figure; the suffix picks the format (.pbm, .png or text)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        try:
            render_image(fig, scale).save(path)
        except OSError as e:
            raise StorageError(f"Cannot write {path}: {e}") from e
        return
    fmt = RenderFormat.PBM if suffix == ".pbm" else RenderFormat.ASCII
    write_text(path, render_figure(fig, fmt).decode("ascii"))


def load_png(path: PathLike) -> Figure:
    """Read back a scale-1 image written by save_figure."""
    try:
        with Image.open(path) as img:
            img = img.convert("1")
            width, height = img.size
            pixels = img.load()
            occupied = {
                Cell(r + 1, c + 1)
                for r in range(min(height, width))
                for c in range(width)
                if pixels[c, r] == 0
            }
    except OSError as e:
        raise StorageError(f"Cannot read image {path}: {e}") from e
    return Figure(width, frozenset(occupied))


# === Throw scripts ===

def format_script(script: ThrowScript) -> str:
    lines = [f"{script.n_size} {script.m} {script.max_len}"]
    for traj in script.trajectories:
        moves = "".join(d.value for d in traj.moves) or "-"
        lines.append(f"{traj.start_col} {moves}")
    return "\n".join(lines) + "\n"


def parse_script(text: str) -> ThrowScript:
    """
    Header "N M L", then M lines "<start_col> <moves>" where moves is a
    string over D/R/L/U, or "-" for an empty walk.
    """
    lines = _lines(text)
    if not lines:
        raise StorageError("Empty script")
    header = _ints(lines[0], "script", 1)
    if len(header) != 3:
        raise StorageError(f"Script header must be 'N M L', got '{lines[0]}'")
    n_size, m, max_len = header
    if len(lines) - 1 != m:
        raise StorageError(f"Script declares {m} throws but holds {len(lines) - 1}")

    trajectories = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise StorageError(f"script:{lineno}: expected '<col> <moves>'")
        col = _ints(parts[0], "script", lineno)[0]
        try:
            moves = () if parts[1] == "-" else tuple(Direction(ch) for ch in parts[1])
        except ValueError as e:
            raise StorageError(f"script:{lineno}: bad move in '{parts[1]}'") from e
        if len(moves) > max_len:
            raise StorageError(f"script:{lineno}: {len(moves)} moves exceed L={max_len}")
        trajectories.append(Trajectory(col, moves))
    return ThrowScript(n_size, max_len, tuple(trajectories))


def load_script(path: PathLike) -> ThrowScript:
    return parse_script(_read(path))


def save_script(path: PathLike, script: ThrowScript) -> None:
    write_text(path, format_script(script))


# === Substrate graphs, sequences and sites ===

def load_graph(path: PathLike) -> SubstrateGraph:
    """Header "n m", then m lines "u v"."""
    lines = _lines(_read(path))
    if not lines:
        raise StorageError(f"{path}: empty graph file")
    header = _ints(lines[0], path, 1)
    if len(header) != 2:
        raise StorageError(f"{path}: header must be 'n m'")
    n, m = header
    edges = [tuple(_ints(line, path, i)) for i, line in enumerate(lines[1:], start=2)]
    if len(edges) != m or any(len(e) != 2 for e in edges):
        raise StorageError(f"{path}: expected {m} edge lines 'u v'")
    try:
        return SubstrateGraph(n, frozenset(edges))
    except ValueError as e:
        raise StorageError(f"{path}: {e}") from e


def save_graph(path: PathLike, g: SubstrateGraph) -> None:
    lines = [f"{g.n_vertices} {len(g.edges)}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    write_text(path, "\n".join(lines) + "\n")


def load_digraph(path: PathLike) -> nx.DiGraph:
    """Same layout as a substrate graph, read as directed edges u -> v on vertices 1..n."""
    lines = _lines(_read(path))
    if not lines:
        raise StorageError(f"{path}: empty graph file")
    header = _ints(lines[0], path, 1)
    if len(header) != 2:
        raise StorageError(f"{path}: header must be 'n m'")
    n, m = header
    graph = nx.DiGraph()
    graph.add_nodes_from(range(1, n + 1))
    for lineno, line in enumerate(lines[1:], start=2):
        edge = _ints(line, path, lineno)
        if len(edge) != 2 or not all(1 <= v <= n for v in edge):
            raise StorageError(f"{path}:{lineno}: expected an edge 'u v' on vertices 1..{n}")
        graph.add_edge(*edge)
    if len(lines) - 1 != m:
        raise StorageError(f"{path}: expected {m} edge lines")
    return graph


def load_sequence(path: PathLike) -> DropSequence:
    text = " ".join(_lines(_read(path)))
    return DropSequence(tuple(_ints(text, path, 1)))


def save_sequence(path: PathLike, s: DropSequence) -> None:
    write_text(path, " ".join(str(v) for v in s.drops) + "\n")


def parse_pair(text: str) -> tuple[int, int]:
    """Two integers separated by a space or a comma."""
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise StorageError(f"Expected two integers, got '{text}'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as e:
        raise StorageError(f"Expected two integers, got '{text}'") from e


def load_site(path: PathLike) -> tuple[int, int]:
    lines = _lines(_read(path))
    if len(lines) != 1:
        raise StorageError(f"{path}: a site file holds one line")
    return parse_pair(lines[0])


def save_site(path: PathLike, site: Union[Cell, BdSite]) -> None:
    first, second = (site.height, site.vertex) if isinstance(site, BdSite) else site
    write_text(path, f"{first} {second}\n")


# === Circuits, assignments and orders ===

def load_circuit(path: PathLike) -> NorCircuit:
    return parse_circuit(_read(path))


def save_circuit(path: PathLike, c: NorCircuit) -> None:
    write_text(path, format_circuit(c))


def load_assignment(path: PathLike) -> Assignment:
    return parse_assignment(_read(path))


def save_assignment(path: PathLike, asg: Assignment) -> None:
    write_text(path, format_assignment(asg) + "\n")


def load_order(path: PathLike) -> Realization:
    lines = _lines(_read(path))
    return Realization(tuple(Cell(*parse_pair(line)) for line in lines))


def save_order(path: PathLike, r: Realization) -> None:
    write_text(path, "".join(f"{row} {col}\n" for row, col in r.order))


# === Reports ===

def save_report(path: PathLike, report: Any) -> None:
    """Dump a dataclass report (or a plain mapping) as YAML."""
    data = asdict(report) if hasattr(report, "__dataclass_fields__") else dict(report)
    write_text(path, yaml.safe_dump(data, sort_keys=False))


def load_report(path: PathLike) -> dict[str, Any]:
    try:
        data = yaml.safe_load(_read(path))
    except yaml.YAMLError as e:
        raise StorageError(f"{path}: invalid YAML: {e}") from e
    if not isinstance(data, dict):
        raise StorageError(f"{path}: report must be a mapping")
    return data
