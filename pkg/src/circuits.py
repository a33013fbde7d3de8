"""
NOR circuits: parsing, evaluation and compilation to 2-DLA throws.

Layout of a compiled circuit
----------------------------
Every signal owns a vertical lane: a column x whose particle stack, grown
upward from the ground, is the wire. Column x+2 collects discarded
particles, x+1, x+3 and x+5 stay empty unless an OR crosses the lane, and
x+4 is the lane's side power column, grown only for crossings. The next
lane starts at x+6.

A growth throw for height t goes straight down column x to height t. If
the wire reaches t-1 it sticks there, otherwise it steps right twice and
falls onto the discard pile, which stays below t.

A probe reads lane x at height h into a power lane p to the right. It
comes down column x-1 to height h and walks right. When the wire of x
reaches h-1 the probe sticks on top of it; when it does not, the probe
crosses to p and sticks on the power wire instead. So (p, h) ends up
occupied exactly when x is false, which is NOT(x). NOR chains two probes
on the same power lane.

OR keeps its input's lane. With the wire grown to H, two blockers are
dropped at x+3 and x+2 on height H+1, resting on the side power column.
A first scout comes down x to H+1 and steps right: it stops on the wire
at (H+1, x) when x is true and next to the blocker at (H+1, x+1) when it
is false. A second scout follows straight down and lands on (H+2, x) or
(H+1, x), and a last throw down x-1 seals the left side. The value is
then read at (H+2, x) and the wire carries on from there.
"""

import logging
import random
from collections import defaultdict
from typing import Iterable

import networkx as nx

import config
from core import row_of
from models import (
    AggrelabError,
    Assignment,
    Cell,
    CompiledCircuit,
    Direction,
    DirectionSet,
    Gate,
    GateKind,
    NorCircuit,
    ThrowScript,
    Trajectory,
)
from simulator import run_script

logger = logging.getLogger(__name__)

D = Direction.DOWN
R = Direction.RIGHT

FIRST_LANE = 3


# === Custom Exceptions ===

class CircuitError(AggrelabError):
    """Base exception for malformed circuits and assignments."""
    pass


class UnknownGateRef(CircuitError):
    """Raised when a gate or output names a gate that does not exist."""
    pass


class CycleDetected(CircuitError):
    """Raised when gate references form a cycle."""
    pass


class NotLayered(CircuitError):
    """Raised when the two inputs of a NOR gate sit on different layers."""
    pass


class LayoutOverflow(AggrelabError):
    """Raised when the compiled layout needs a lattice above the size limit."""
    pass


# === Text formats ===

def parse_circuit(text: str) -> NorCircuit:
    """
    Parse the line format ``input NAME`` / ``nor NAME A B`` / ``or NAME A``
    / ``output NAME``. Blank lines and ``#`` comments are skipped.

    Raises:
        CircuitError: On malformed lines or duplicate names
        UnknownGateRef: On a reference to an undefined gate
        CycleDetected: If references form a cycle
        NotLayered: If a NOR gate's inputs are on different layers
    """
    gates: list[Gate] = []
    outputs: list[str] = []
    names: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword, args = parts[0].lower(), parts[1:]
        expected = {"input": 1, "nor": 3, "or": 2, "output": 1}
        if keyword not in expected:
            raise CircuitError(f"Line {lineno}: unknown keyword '{parts[0]}'")
        if len(args) != expected[keyword]:
            raise CircuitError(f"Line {lineno}: '{keyword}' takes {expected[keyword]} names, got {len(args)}")

        if keyword == "output":
            outputs.append(args[0])
            continue
        name = args[0]
        if name in names:
            raise CircuitError(f"Line {lineno}: gate '{name}' defined twice")
        names.add(name)
        gates.append(Gate(name, GateKind(keyword), tuple(args[1:])))

    circuit = NorCircuit(gates=gates, outputs=outputs)
    circuit.layers = compute_layers(circuit)
    logger.debug(f"Parsed circuit: {len(gates)} gates, depth {circuit.depth}")
    return circuit


def compute_layers(c: NorCircuit) -> dict[str, int]:
    """
    Layer of every gate: inputs are layer 1, any other gate sits one layer
    above its inputs.
    """
    known = {g.name for g in c.gates}
    graph = nx.DiGraph()
    graph.add_nodes_from(known)
    for g in c.gates:
        for src in g.inputs:
            if src not in known:
                raise UnknownGateRef(f"Gate '{g.name}' reads undefined gate '{src}'")
            graph.add_edge(src, g.name)
    for name in c.outputs:
        if name not in known:
            raise UnknownGateRef(f"Output '{name}' is not a gate")

    try:
        order = list(nx.topological_sort(graph))
    except nx.NetworkXUnfeasible as e:
        cycle = [u for u, _ in nx.find_cycle(graph)]
        raise CycleDetected(f"Gates {' -> '.join(cycle)} form a cycle") from e

    layers: dict[str, int] = {}
    for name in order:
        g = c.gate(name)
        if g.kind is GateKind.INPUT:
            layers[name] = 1
            continue
        levels = {layers[src] for src in g.inputs}
        if len(levels) > 1:
            raise NotLayered(f"Gate '{name}' mixes inputs from layers {sorted(levels)}")
        layers[name] = levels.pop() + 1
    return layers


def format_circuit(c: NorCircuit) -> str:
    lines = []
    for g in c.gates:
        lines.append(" ".join([g.kind.value, g.name, *g.inputs]))
    lines.extend(f"output {name}" for name in c.outputs)
    return "\n".join(lines) + "\n"


def parse_assignment(text: str) -> Assignment:
    """Parse ``a=1,b=0`` into a mapping."""
    asg: Assignment = {}
    for item in text.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or value.strip() not in ("0", "1"):
            raise CircuitError(f"Bad assignment item '{item}', expected NAME=0 or NAME=1")
        asg[name.strip()] = value.strip() == "1"
    return asg


def format_assignment(asg: Assignment) -> str:
    return ",".join(f"{name}={int(value)}" for name, value in asg.items())


# === Evaluation ===

def evaluate(c: NorCircuit, asg: Assignment) -> dict[str, bool]:
    """Value of every gate; NOR(a, b) = not (a or b), OR(a) = a."""
    missing = [name for name in c.inputs if name not in asg]
    if missing:
        raise CircuitError(f"Assignment misses inputs {missing}")

    values: dict[str, bool] = {}
    for g in sorted(c.gates, key=lambda g: c.layers[g.name]):
        if g.kind is GateKind.INPUT:
            values[g.name] = bool(asg[g.name])
        elif g.kind is GateKind.NOR:
            values[g.name] = not (values[g.inputs[0]] or values[g.inputs[1]])
        else:
            values[g.name] = values[g.inputs[0]]
    return values


# === Compilation ===

class _LayoutPlan:
    """
    Abstract throws, recorded before the lattice size is known.

    Each step is ("starter", column), ("grow", column, height),
    ("probe", lane, height, power_lane) or ("drop", column, height, rights).
    """

    def __init__(self, spacing: int):
        self.spacing = spacing
        self.steps: list[tuple] = []
        self.lanes: list[int] = []
        self.next_height: dict[int, int] = {}
        self.probes: dict[str, tuple[int, int]] = {}
        self.signal_lane: dict[str, int] = {}
        self.crossings: dict[str, int] = {}
        self.cursor = 3
        self.top = 1

    def new_lane(self) -> int:
        lane = FIRST_LANE + self.spacing * len(self.lanes)
        self.lanes.append(lane)
        return lane

    def starter(self, lane: int) -> None:
        self.steps.append(("starter", lane))
        self.next_height[lane] = 2

    def grow(self, lane: int, height: int) -> None:
        for t in range(self.next_height[lane], height + 1):
            self.steps.append(("grow", lane, t))
        self.next_height[lane] = max(self.next_height[lane], height + 1)
        self.top = max(self.top, height)

    def probe(self, lane: int, height: int, power: int) -> None:
        self.steps.append(("probe", lane, height, power))
        self.next_height[lane] = height + 1
        self.next_height[power] = height + 1
        self.top = max(self.top, height)

    def power_lane(self, height: int) -> int:
        p = self.new_lane()
        self.starter(p)
        self.grow(p, height)
        return p

    def invert(self, lane: int) -> tuple[int, int]:
        """NOT gadget; returns (output lane, probe height)."""
        h = self.cursor
        p = self.power_lane(h - 1)
        self.grow(lane, h - 1)
        self.probe(lane, h, p)
        self.cursor = h + 2
        return p, h

    def nor(self, a: int, b: int) -> tuple[int, int]:
        h = self.cursor
        self.grow(a, h - 1)
        p = self.power_lane(h - 1)
        self.probe(a, h, p)
        # carries (p, h) up one cell when the first probe landed on p
        self.grow(p, h + 1)
        self.grow(b, h + 1)
        self.probe(b, h + 2, p)
        self.cursor = h + 4
        return p, h + 2

    def side_power(self, lane: int, height: int) -> None:
        """Grow the side power column of ``lane`` to ``height``."""
        side = lane + 4
        if side not in self.next_height:
            self.starter(side)
        self.grow(side, height)

    def drop(self, col: int, height: int, rights: int = 0) -> None:
        self.steps.append(("drop", col, height, rights))

    def cross(self, lane: int) -> int:
        """OR gadget on ``lane``; returns the probe height, the lane is kept."""
        h = self.cursor
        self.grow(lane, h - 1)
        # the left neighbor's side column must reach the cells thrown down lane-1
        if lane > FIRST_LANE:
            self.side_power(lane - self.spacing, h)
        self.side_power(lane, h)
        self.drop(lane + 3, h)
        self.drop(lane + 2, h)
        self.drop(lane, h, rights=1)
        self.drop(lane, h)
        self.drop(lane - 1, h)
        self.next_height[lane] = h + 2
        self.top = max(self.top, h + 1)
        self.cursor = h + 3
        return h + 1

    @property
    def width(self) -> int:
        return max(self.lanes, default=FIRST_LANE) + 4


def _discard_tail(n_size: int) -> tuple[Direction, ...]:
    return (R, R) + (D,) * n_size


def _materialize(step: tuple, n_size: int) -> Trajectory:
    kind = step[0]
    if kind == "starter":
        return Trajectory(step[1], (D,) * (n_size - 1))
    if kind == "grow":
        _, lane, t = step
        descent = (D,) * (row_of(t, n_size) - 1)
        return Trajectory(lane, descent + _discard_tail(n_size))
    if kind == "drop":
        _, col, h, rights = step
        return Trajectory(col, (D,) * (row_of(h, n_size) - 1) + (R,) * rights)
    _, lane, h, power = step
    descent = (D,) * (row_of(h, n_size) - 1)
    return Trajectory(lane - 1, descent + (R,) * (power - lane + 1) + _discard_tail(n_size))


def compile_to_2dla(c: NorCircuit, asg: Assignment) -> CompiledCircuit:
    """
    Throw script whose final figure holds the circuit's values.

    After the script runs, ``probes[g]`` is occupied iff gate g evaluates
    to true. Input probes sit at height 1 of the input lanes. Every
    trajectory uses Down and Right moves only.

    Raises:
        CircuitError: If the assignment misses an input or lanes are too close
        LayoutOverflow: If the lattice would exceed config.MAX_LATTICE_SIZE
    """
    if config.LANE_SPACING < 6:
        raise CircuitError(f"Lane spacing {config.LANE_SPACING} leaves no room for discard columns")
    missing = [name for name in c.inputs if name not in asg]
    if missing:
        raise CircuitError(f"Assignment misses inputs {missing}")

    plan = _LayoutPlan(config.LANE_SPACING)
    for name in c.inputs:
        lane = plan.new_lane()
        plan.signal_lane[name] = lane
        plan.next_height[lane] = 2
        plan.probes[name] = (lane, 1)
        if asg[name]:
            plan.starter(lane)

    for g in sorted(c.gates, key=lambda g: c.layers[g.name]):
        if g.kind is GateKind.INPUT:
            continue
        lanes = [plan.signal_lane[src] for src in g.inputs]
        if g.kind is GateKind.OR:
            lane = lanes[0]
            h = plan.cross(lane)
            plan.crossings[g.name] = lane
        elif lanes[0] != lanes[1]:
            lane, h = plan.nor(*lanes)
        else:
            # both inputs read the same wire
            lane, h = plan.invert(lanes[0])
        plan.signal_lane[g.name] = lane
        plan.probes[g.name] = (lane, h)

    layers = max(c.depth, 1)
    minimum = config.get_lattice_size(layers, len(c.inputs))
    n_size = config.get_lattice_size(layers, len(c.inputs), plan.width, plan.top)
    if n_size > config.MAX_LATTICE_SIZE:
        raise LayoutOverflow(f"Circuit needs a {n_size}x{n_size} lattice, limit is {config.MAX_LATTICE_SIZE}")
    if n_size > minimum:
        logger.debug(f"Layout expanded from {minimum} to {n_size}")

    trajectories = tuple(_materialize(step, n_size) for step in plan.steps)
    max_len = max((len(t) for t in trajectories), default=0)
    probes = {name: Cell(row_of(h, n_size), lane) for name, (lane, h) in plan.probes.items()}
    logger.info(f"Compiled {len(c.gates)} gates into {len(trajectories)} throws on N={n_size}")
    return CompiledCircuit(
        script=ThrowScript(n_size, max_len, trajectories),
        probes=probes,
        lanes=dict(plan.signal_lane),
        crossings=dict(plan.crossings),
    )


def check_compiled(c: NorCircuit, asg: Assignment, k: int = 2) -> bool:
    """Compile, run under k directions and compare every probe to evaluate."""
    compiled = compile_to_2dla(c, asg)
    return probes_match(c, asg, compiled, k)


def probes_match(c: NorCircuit, asg: Assignment, compiled: CompiledCircuit, k: int = 2) -> bool:
    fig = run_script(compiled.script, DirectionSet(k))
    values = evaluate(c, asg)
    wrong = [name for name, cell in compiled.probes.items() if (cell in fig.occupied) != values[name]]
    if wrong:
        logger.debug(f"Probe mismatch on {wrong}")
    return not wrong


def residue_columns(compiled: CompiledCircuit) -> dict[str, list[int]]:
    """Gap, discard and crossing columns next to every lane in use."""
    crossing: set[int] = set()
    for lane in set(compiled.crossings.values()):
        crossing |= {lane - 1, lane + 1, lane + 3, lane + 4}
        if lane > FIRST_LANE:
            crossing.add(lane - config.LANE_SPACING + 4)

    columns = defaultdict(list)
    for lane in sorted(set(compiled.lanes.values())):
        columns["gap"].extend(col for col in (lane + 1, lane + 3, lane + 4, lane + 5) if col not in crossing)
        columns["discard"].append(lane + 2)
    columns["crossing"] = sorted(crossing)
    return dict(columns)


# === Instance generation ===

def random_layered_circuit(n_gates: int, n_inputs: int, seed: int) -> NorCircuit:
    """
    Seeded random layered circuit with ``n_inputs`` inputs and
    ``n_gates`` further gates, about one in five an OR.

    Every gate reads gates of a single layer. Outputs are the gates
    nothing else reads.
    """
    if n_inputs < 1:
        raise CircuitError("A circuit needs at least one input")
    rng = random.Random(seed)
    gates = [Gate(f"x{i}", GateKind.INPUT) for i in range(n_inputs)]
    by_layer: dict[int, list[str]] = {1: [g.name for g in gates]}
    layer_of = {g.name: 1 for g in gates}

    for i in range(n_gates):
        level = rng.choice(sorted(by_layer))
        pool = by_layer[level]
        name = f"g{i}"
        if rng.random() < 0.2:
            gate = Gate(name, GateKind.OR, (rng.choice(pool),))
        else:
            gate = Gate(name, GateKind.NOR, (rng.choice(pool), rng.choice(pool)))
        gates.append(gate)
        layer_of[name] = level + 1
        by_layer.setdefault(level + 1, []).append(name)

    used = {src for g in gates for src in g.inputs}
    outputs = [g.name for g in gates if g.name not in used and g.kind is not GateKind.INPUT]
    circuit = NorCircuit(gates=gates, outputs=outputs)
    circuit.layers = compute_layers(circuit)
    return circuit


def all_assignments(c: NorCircuit) -> Iterable[Assignment]:
    names = c.inputs
    for bits in range(1 << len(names)):
        yield {name: bool(bits >> i & 1) for i, name in enumerate(names)}


def small_circuits(max_gates: int) -> Iterable[NorCircuit]:
    """
    Every layered circuit with at most ``max_gates`` gates, inputs included,
    built by appending one gate at a time.
    """
    def extend(gates: list[Gate], layers: dict[str, int]):
        if any(g.kind is not GateKind.INPUT for g in gates):
            circuit = NorCircuit(gates=list(gates), outputs=[gates[-1].name], layers=dict(layers))
            yield circuit
        if len(gates) == max_gates:
            return
        name = f"n{len(gates)}"
        if all(g.kind is GateKind.INPUT for g in gates):
            gates.append(Gate(name, GateKind.INPUT))
            layers[name] = 1
            yield from extend(gates, layers)
            gates.pop()
            del layers[name]
        names = [g.name for g in gates]
        for i, a in enumerate(names):
            options = [Gate(name, GateKind.OR, (a,))]
            options += [Gate(name, GateKind.NOR, (a, b)) for b in names[i:] if layers[b] == layers[a]]
            for gate in options:
                gates.append(gate)
                layers[name] = layers[a] + 1
                yield from extend(gates, layers)
                gates.pop()
                del layers[name]

    yield from extend([Gate("n0", GateKind.INPUT)], {"n0": 1})
