"""
Figure parsing, rendering and coordinate helpers shared by every module.

Row 1 is the top of the lattice; the ground is the virtual row N+1.
Heights count up from the ground: height = N + 1 - row.
"""

import logging
from enum import Enum

from PIL import Image

from models import AggrelabError, Cell, Figure

logger = logging.getLogger(__name__)


# === Custom Exceptions ===

class FigureFormatError(AggrelabError):
    """Base exception for malformed figure text."""
    pass


class IllegalCharacter(FigureFormatError):
    pass


class LineTooLong(FigureFormatError):
    pass


class TooManyRows(FigureFormatError):
    pass


class RenderFormat(Enum):
    ASCII = "ascii"
    PBM = "pbm"


def height_of(cell: Cell, n_size: int) -> int:
    return n_size + 1 - cell[0]


def row_of(height: int, n_size: int) -> int:
    return n_size + 1 - height


def neighbors4(cell: Cell) -> tuple[Cell, Cell, Cell, Cell]:
    r, c = cell
    return (Cell(r - 1, c), Cell(r + 1, c), Cell(r, c - 1), Cell(r, c + 1))


def parse_figure(text: str, n_size: int) -> Figure:
    """
    Parse a '.'/'#' picture into a Figure.

    Line 1 is row 1. Missing rows and short lines read as empty cells.

    Raises:
        IllegalCharacter: On anything other than '.' or '#'
        LineTooLong: When a line is wider than n_size
        TooManyRows: When there are more than n_size lines
    """
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if len(lines) > n_size:
        raise TooManyRows(f"{len(lines)} rows for a lattice of size {n_size}")

    occupied = set()
    for r, line in enumerate(lines, start=1):
        if len(line) > n_size:
            raise LineTooLong(f"Row {r} has {len(line)} columns, lattice size is {n_size}")
        for c, ch in enumerate(line, start=1):
            if ch == "#":
                occupied.add(Cell(r, c))
            elif ch != ".":
                raise IllegalCharacter(f"Unexpected {ch!r} at row {r}, column {c}")
    return Figure(n_size, frozenset(occupied))


def render_figure(fig: Figure, fmt: RenderFormat = RenderFormat.ASCII) -> bytes:
    """
    Render a figure with its ground row.

    Ascii gives N lines of '.'/'#' followed by a ground line of '#'.
    Pbm gives a plain "P1" bitmap, N columns by N+1 rows, 1 = occupied.
    """
    n = fig.n_size
    rows = [
        [Cell(r, c) in fig.occupied for c in range(1, n + 1)]
        for r in range(1, n + 1)
    ]
    rows.append([True] * n)

    if fmt is RenderFormat.ASCII:
        body = "".join("".join("#" if x else "." for x in row) + "\n" for row in rows)
        return body.encode("ascii")

    lines = ["P1", f"{n} {n + 1}"]
    lines.extend(" ".join("1" if x else "0" for x in row) for row in rows)
    return ("\n".join(lines) + "\n").encode("ascii")


def render_image(fig: Figure, scale: int = 1) -> Image.Image:
    """Black-on-white bitmap of the figure and its ground row."""
    n = fig.n_size
    img = Image.new("1", (n, n + 1), color=1)
    pixels = img.load()
    for r, c in fig.occupied:
        pixels[c - 1, r - 1] = 0
    for c in range(n):
        pixels[c, n] = 0
    if scale > 1:
        img = img.resize((n * scale, (n + 1) * scale), Image.NEAREST)
    return img


def pad_figure(fig: Figure, margin: int) -> Figure:
    """
    Surround a figure with an empty border on top and on both sides.

    The new lattice has size N + 2*margin. Cells shift right by margin
    and down by 2*margin, so the bottom row stays on the ground.
    """
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    shifted = frozenset(Cell(r + 2 * margin, c + margin) for r, c in fig.occupied)
    return Figure(fig.n_size + 2 * margin, shifted)
