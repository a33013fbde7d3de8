"""
Command-line entry point for aggrelab.

Run as ``python src/cli.py <command> ...``. Verdicts print YES or NO and
exit 0 or 1; usage errors exit 2 and bad input exits 3.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

import config
from ballistic import bd_predict, bead_sort, reduce_exact_to_layered, reduce_ldereach_to_bd
from circuits import check_compiled, compile_to_2dla, parse_assignment
from core import RenderFormat, render_figure
from models import AggrelabError, BdSite, Cell, DirectionSet, Figure, OracleKind
from oracles import brute_force_realizable_1d, oracle_check
from realize1 import construct_sequence_1d, realizable_1d
from realize2 import brute_force_realizable, construct_realization_2d, realizable_2d
from simulator import grow_cluster, predict, random_script, run_script
import storage

logger = logging.getLogger(__name__)

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_INPUT = 3


def _verdict(ok: bool) -> int:
    print("YES" if ok else "NO")
    return EXIT_YES if ok else EXIT_NO


def _site_cell(text: str, n_size: int, row_convention: bool) -> Cell:
    first, col = storage.parse_pair(text)
    return Cell(first, col) if row_convention else Cell(n_size + 1 - first, col)


def _emit_figure(fig: Figure, fmt: str, out: Optional[str], scale: int = 1) -> None:
    if out:
        storage.save_figure(out, fig, scale)
        logger.info(f"Figure written to {out}")
        return
    if fmt == "png":
        raise AggrelabError("png output needs --out")
    sys.stdout.write(render_figure(fig, RenderFormat(fmt)).decode("ascii"))


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        storage.write_text(out, text)
    else:
        sys.stdout.write(text)


# === Command Handlers ===

def cmd_simulate(args) -> int:
    dirs = DirectionSet(args.k)
    if args.script:
        fig = run_script(storage.load_script(args.script), dirs)
    elif args.grow:
        budget = config.get_move_budget(args.n, args.k, args.max_len)
        fig = grow_cluster(args.n, args.grow, dirs, args.seed, budget)
    else:
        script = random_script(args.n, args.m, config.get_move_budget(args.n, args.k, args.max_len), dirs, args.seed)
        fig = run_script(script, dirs)
    _emit_figure(fig, args.format, args.out)
    return EXIT_YES


def cmd_predict(args) -> int:
    script = storage.load_script(args.script)
    site = _site_cell(args.site, script.n_size, args.row_convention)
    return _verdict(predict(script, DirectionSet(args.k), site))


def cmd_bd_predict(args) -> int:
    g = storage.load_graph(args.graph)
    s = storage.load_sequence(args.sequence)
    height, vertex = storage.parse_pair(args.site)
    return _verdict(bd_predict(g, s, BdSite(height, vertex)))


def cmd_bead_sort(args) -> int:
    print(" ".join(str(v) for v in bead_sort(args.values)))
    return EXIT_YES


def cmd_realize(args) -> int:
    fig = storage.load_figure(args.figure, args.n)
    if args.k == 1:
        ok = realizable_1d(fig)
        oracle = brute_force_realizable_1d
    else:
        ok = realizable_2d(fig)
        oracle = brute_force_realizable

    if args.oracle:
        expected = oracle(fig)
        if expected != ok:
            logger.warning(f"Decider says {ok}, brute force says {expected}")
        else:
            logger.info("Brute force agrees")

    if ok and args.emit_order:
        if args.k == 1:
            text = " ".join(str(c) for c in construct_sequence_1d(fig).drops) + "\n"
        else:
            text = "".join(f"{r} {c}\n" for r, c in construct_realization_2d(fig).order)
        _emit_text(text, args.out)
    return _verdict(ok)


def cmd_compile_circuit(args) -> int:
    circuit = storage.load_circuit(args.circuit)
    asg = parse_assignment(args.assign)
    if args.check:
        return _verdict(check_compiled(circuit, asg, args.k))

    compiled = compile_to_2dla(circuit, asg)
    if args.emit_script:
        _emit_text(storage.format_script(compiled.script), args.out)
    else:
        n = compiled.script.n_size
        lines = [f"{name} {n + 1 - cell.row} {cell.col}" for name, cell in compiled.probes.items()]
        _emit_text("\n".join(lines) + "\n", args.out)
    return EXIT_YES


def cmd_reduce(args) -> int:
    g = storage.load_digraph(args.digraph)
    inst = reduce_exact_to_layered(g, args.source, args.target, args.length)
    substrate, seq, site = reduce_ldereach_to_bd(inst)
    if args.out_prefix:
        storage.save_graph(f"{args.out_prefix}.graph", substrate)
        storage.save_sequence(f"{args.out_prefix}.seq", seq)
        storage.save_site(f"{args.out_prefix}.site", site)
        logger.info(f"BD instance written to {args.out_prefix}.*")
    return _verdict(bd_predict(substrate, seq, site))


def cmd_oracle_check(args) -> int:
    report = oracle_check(args.kind, args.budget, args.seed, args.exhaustive, args.jobs)
    if args.report:
        storage.save_report(args.report, report)
    print(f"{report.kind}: {report.checked} checked, {report.mismatches} mismatches")
    for example in report.examples:
        print(f"  {example}")
    return EXIT_YES if report.passed else EXIT_NO


def cmd_render(args) -> int:
    fig = storage.load_figure(args.figure, args.n)
    _emit_figure(fig, args.format, args.out, args.scale)
    return EXIT_YES


# === Parser ===

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aggrelab", description="Biased DLA and ballistic deposition toolkit")
    parser.add_argument("--log-level", default=None, help="Logging level (default from AGGRELAB_LOG_LEVEL)")
    parser.add_argument("--settings", default=None, help="YAML file overriding configuration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Run a throw script, a random script or a growth run")
    p.add_argument("--script")
    p.add_argument("--k", type=int, default=1, choices=(1, 2, 3, 4))
    p.add_argument("--n", type=int, default=20, help="Lattice size for random runs")
    p.add_argument("--m", type=int, default=50, help="Throws in a random script")
    p.add_argument("--max-len", type=int, default=None, help="Moves per random walk")
    p.add_argument("--grow", type=int, default=0, help="Grow a cluster of this many particles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("ascii", "pbm", "png"), default="ascii")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("predict", help="Is a site occupied after a script?")
    p.add_argument("--script", required=True)
    p.add_argument("--k", type=int, default=1, choices=(1, 2, 3, 4))
    p.add_argument("--site", required=True, help="'height col', or 'row col' with --row-convention")
    p.add_argument("--row-convention", action="store_true")
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("bd-predict", help="Ballistic Deposition prediction")
    p.add_argument("--graph", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--site", required=True, help="'height vertex'")
    p.set_defaults(handler=cmd_bd_predict)

    p = sub.add_parser("bead-sort", help="Sort positive integers by dropping beads")
    p.add_argument("values", type=int, nargs="+")
    p.set_defaults(handler=cmd_bead_sort)

    p = sub.add_parser("realize", help="Decide whether a figure can be grown")
    p.add_argument("--k", type=int, default=1, choices=(1, 2))
    p.add_argument("--figure", required=True)
    p.add_argument("--n", type=int, default=0, help="Lattice size (default: figure width)")
    p.add_argument("--emit-order", "--emit-sequence", dest="emit_order", action="store_true")
    p.add_argument("--oracle", action="store_true", help="Cross-check with brute force")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_realize)

    p = sub.add_parser("compile-circuit", help="Compile a NOR circuit to 2-DLA throws")
    p.add_argument("--circuit", required=True)
    p.add_argument("--assign", required=True, help="e.g. a=1,b=0")
    p.add_argument("--emit-script", action="store_true")
    p.add_argument("--check", action="store_true")
    p.add_argument("--k", type=int, default=2, choices=(2, 3))
    p.add_argument("--out")
    p.set_defaults(handler=cmd_compile_circuit)

    p = sub.add_parser("reduce", help="Exact-length reachability through BD prediction")
    p.add_argument("--digraph", required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--out-prefix")
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser("oracle-check", help="Run an equivalence suite")
    p.add_argument("kind", choices=[k.value for k in OracleKind])
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--report", help="Write the report as YAML")
    p.set_defaults(handler=cmd_oracle_check)

    p = sub.add_parser("render", help="Convert a figure file")
    p.add_argument("--figure", required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--format", choices=("ascii", "pbm", "png"), default="pbm")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_render)

    return parser


# === Main Entry Point ===

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_YES

    try:
        if args.settings:
            config.load_settings(args.settings)
        logging.basicConfig(format=config.LOG_FORMAT, level=(args.log_level or config.LOG_LEVEL).upper())
        return args.handler(args)
    except (AggrelabError, OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
