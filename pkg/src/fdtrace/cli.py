"""Command-line entry point: ``fdtrace solve | analyze | oracle``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

from . import analyzers
from .analyzers.activity import format_activations, format_stats
from .analyzers.evolution import to_csv
from .engine import Engine
from .model import Labelling, Model, ModelSyntaxError, ValStrategy, VarStrategy, builtin, parse_model
from .search import format_solution, solve
from .trace import TraceFormatError, TraceWriter, read_trace

log = logging.getLogger("fdtrace")

ANALYZERS = ("tree", "evolution", "stats", "useless", "validate")
_OUTPUT_NAMES = {"tree": "tree.dot", "evolution": "evolution.csv", "stats": "stats.txt",
                 "useless": "useless.txt", "validate": "validate.txt"}

FOLDS = {
    "tree": analyzers.TreeBuilder,
    "evolution": analyzers.EvolutionBuilder,
    "stats": analyzers.StatsCollector,
    "useless": analyzers.ActivationTracker,
    "validate": analyzers.TraceValidator,
}

EXIT_OK, EXIT_NONE, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def load_model(args) -> Model:
    if args.builtin and args.model:
        raise CliError("give either --builtin or --model, not both")
    if args.builtin:
        try:
            return builtin(args.builtin)
        except ValueError as exc:
            raise CliError(str(exc)) from None
    if args.model:
        path = Path(args.model)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read model: {exc}") from None
        try:
            return parse_model(text, context=path.name)
        except ModelSyntaxError as exc:
            raise CliError(f"{path}:{exc}") from None
    raise CliError("no model given (use --builtin or -m/--model)")


def _labelling(model: Model, args) -> Labelling:
    lab = model.effective_labelling()
    if args.var_strategy or args.val_strategy:
        lab = Labelling(lab.variables,
                        VarStrategy(args.var_strategy) if args.var_strategy else lab.var_strategy,
                        ValStrategy(args.val_strategy) if args.val_strategy else lab.val_strategy)
    return lab


class _Analysis:
    """Live analyzers attached to the engine as sinks."""

    def __init__(self, kinds):
        self.kinds = kinds
        self.folds = {k: FOLDS[k]() for k in kinds}

    def sinks(self):
        return list(self.folds.values())

    def render(self, kind) -> tuple[str, bool]:
        """Text output of one analyzer and whether it found problems."""
        return render_analysis(kind, self.folds[kind])


def render_analysis(kind, fold) -> tuple[str, bool]:
    if kind == "tree":
        tree = fold.result()
        return analyzers.emit_dot(tree), False
    if kind == "evolution":
        return to_csv(fold.result(), fold.variables, include_updates=True), False
    if kind == "stats":
        return format_stats(fold.result()), False
    if kind == "useless":
        return format_activations(fold.useless()), False
    if kind == "validate":
        violations = fold.finish()
        return analyzers.format_report(violations), bool(violations)
    raise CliError(f"unknown analyzer {kind!r}")


def _parse_kinds(text) -> list[str]:
    kinds = [k.strip() for k in text.split(",") if k.strip()] if text else []
    for k in kinds:
        if k not in ANALYZERS:
            raise CliError(f"unknown analyzer {k!r} (choose from {', '.join(ANALYZERS)})")
    return kinds


def cmd_solve(args) -> int:
    model = load_model(args)
    kinds = _parse_kinds(args.analyze)
    fmt = args.format or "jsonl"
    trace_target = args.trace
    if trace_target in ("jsonl", "compact"):
        fmt, trace_target = trace_target, "-"
    if trace_target is None and args.format:
        trace_target = "-"

    with contextlib.ExitStack() as stack:
        sinks = []
        if trace_target == "-":
            sinks.append(TraceWriter(sys.stdout, fmt))
        elif trace_target is not None:
            try:
                fh = stack.enter_context(open(trace_target, "w", encoding="utf-8"))
            except OSError as exc:
                raise CliError(f"cannot write trace: {exc}") from None
            sinks.append(TraceWriter(fh, fmt))
        analysis = _Analysis(kinds)
        sinks += analysis.sinks()

        engine = Engine(model.initial_domains(), sinks)
        found = []
        buffer = trace_target == "-"
        for solution in solve(model, engine, labelling=_labelling(model, args)):
            found.append(solution)
            if not buffer:
                print(format_solution(solution), flush=True)
            if args.max_solutions and len(found) >= args.max_solutions:
                break
        if buffer:
            for s in found:
                print(format_solution(s))
        if engine.sink_errors:
            chrono, exc = engine.sink_errors[0]
            raise CliError(f"trace output failed at event {chrono}: {exc}")

    problems = False
    for kind in kinds:
        text, bad = analysis.render(kind)
        problems |= bad
        if args.analysis_dir:
            out = Path(args.analysis_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / _OUTPUT_NAMES[kind]).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(f"# {kind}\n{text}")
    log.info("%d solution(s), %d events", len(found), engine.chrono)
    if problems:
        log.error("trace validation reported violations")
    return EXIT_OK if found else EXIT_NONE


def cmd_analyze(args) -> int:
    if args.kind not in ANALYZERS:
        raise CliError(f"unknown analyzer {args.kind!r}")
    fold = FOLDS[args.kind]()
    try:
        for event in read_trace(args.input):
            fold(event)
        text, bad = render_analysis(args.kind, fold)
    except (TraceFormatError, analyzers.TreeError) as exc:
        raise CliError(f"{args.input}: {exc}") from None
    except OSError as exc:
        raise CliError(f"cannot read trace: {exc}") from None
    if args.output and args.output != "-":
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_NONE if bad else EXIT_OK


def cmd_oracle(args) -> int:
    model = load_model(args)
    try:
        solutions = analyzers.oracle_solve(model, limit=args.limit)
    except analyzers.OracleSizeError as exc:
        raise CliError(str(exc)) from None
    for s in solutions:
        print(format_solution(s))
    return EXIT_OK if solutions else EXIT_NONE


def _model_args(p):
    p.add_argument("--builtin", metavar="NAME[:N]",
                   help="built-in model: sorted, nqueens:<n>, random:<seed>")
    p.add_argument("-m", "--model", metavar="PATH", help="model file (.fd)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdtrace", description="Traceable finite-domain solver.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a model, emitting a trace and/or live analyses")
    _model_args(p)
    p.add_argument("--trace", metavar="PATH|-",
                   help="trace destination ('-' for stdout; 'compact' or 'jsonl' also mean stdout)")
    p.add_argument("--format", choices=("jsonl", "compact"),
                   help="trace format (default jsonl; alone, writes the trace to stdout)")
    p.add_argument("--analyze", metavar="KIND[,KIND]",
                   help=f"live analyzers: {', '.join(ANALYZERS)}")
    p.add_argument("--analysis-dir", metavar="DIR",
                   help="write analyzer outputs into DIR instead of stdout")
    p.add_argument("--max-solutions", type=int, default=0, metavar="N", help="stop after N solutions")
    p.add_argument("--var-strategy", choices=[s.value for s in VarStrategy])
    p.add_argument("--val-strategy", choices=[s.value for s in ValStrategy])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="run an analyzer over a .fdtrace.jsonl file")
    p.add_argument("kind", choices=ANALYZERS)
    p.add_argument("input", help="trace file")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="enumerate all solutions by brute force")
    _model_args(p)
    p.add_argument("--limit", type=int, default=analyzers.oracle.DEFAULT_LIMIT,
                   help="largest search space to enumerate")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"fdtrace: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except BrokenPipeError:
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
