"""Command-line interface.

Exit codes: 0 true/pass/found, 1 false/fail/no-halt/none-found,
2 undecided/budget exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import encoder
from .gridmodel import build_grid_model, verify_run_encoding
from .kripke import ModelError, read_model
from .semantics import BOUNDED, EXACT, EvaluationError, QuantStrategy, Undecided, evaluate, sat_search
from .syntax import ParseError, parse_formula, print_formula, size, split_and
from .turing import Halts, MachineError, load_machine, run, halts_within

EXIT_TRUE, EXIT_FALSE, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3

DEFAULT_N_RANGE = (-8, 8)
DEFAULT_M_RANGE = (-2, 12)

ENCODE_VARIANTS = ("phi", "grid", "sane", "trans", "reduction-halting", "reduction-nonhalting")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def d(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--strategy", choices=(EXACT, BOUNDED), default=d(EXACT),
                        help="how to decide [*] (default: exact)")
    parser.add_argument("--max-profiles", type=_positive, default=d(None),
                        help="update-profile budget (default 2^20)")
    parser.add_argument("--max-clauses", type=_positive, default=d(None),
                        help="bounded mode: clauses per update (default 3)")
    parser.add_argument("--max-depth", type=_positive, default=d(None),
                        help="bounded mode: clause body height (default 2)")
    parser.add_argument("--allow-c-in-updates", action="store_true", default=d(False),
                        help="bounded mode: allow C in clause bodies")
    parser.add_argument("--c-reflexive", action="store_true", default=d(False),
                        help="evaluate C over the reflexive-transitive closure")
    parser.add_argument("--json", action="store_true", default=d(False),
                        help="machine-readable output")


def _range(parser, name, default):
    parser.add_argument(f"--{name}-range", nargs=2, type=int, metavar=("LO", "HI"),
                        default=list(default))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aaulc", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="evaluate a formula at a world of a model")
    _global_flags(p, suppress=True)
    p.add_argument("model", help="model JSON document")
    p.add_argument("world")
    p.add_argument("formula", nargs="?")
    p.add_argument("-f", "--formula-file")

    p = sub.add_parser("encode", help="compile a Turing machine into formulas")
    _global_flags(p, suppress=True)
    p.add_argument("machine")
    p.add_argument("variant", choices=ENCODE_VARIANTS)
    p.add_argument("--stats", action="store_true", help="print node/conjunct counts to stderr")
    p.add_argument("--no-other", choices=("on", "off"), default="on",
                   help="include no_other in the grid formula (default on)")
    p.add_argument("--allow-start-reentry", action="store_true")

    p = sub.add_parser("grid", help="build or verify a finite window of the grid model")
    _global_flags(p, suppress=True)
    p.add_argument("machine")
    p.add_argument("action", choices=("build", "verify"))
    _range(p, "n", DEFAULT_N_RANGE)
    _range(p, "m", DEFAULT_M_RANGE)
    p.add_argument("--allow-start-reentry", action="store_true")

    p = sub.add_parser("tm", help="run a Turing machine")
    _global_flags(p, suppress=True)
    p.add_argument("machine")
    p.add_argument("action", choices=("run", "halts"))
    p.add_argument("steps", nargs="?", type=int, help="step bound for 'halts'")
    _range(p, "n", DEFAULT_N_RANGE)
    _range(p, "m", DEFAULT_M_RANGE)
    p.add_argument("--allow-start-reentry", action="store_true")

    p = sub.add_parser("sat", help="search small models for a witness")
    _global_flags(p, suppress=True)
    p.add_argument("formula")
    p.add_argument("--max-worlds", type=_positive, default=2)
    p.add_argument("--max-models", type=_positive, default=500_000)
    return parser


def strategy_from_args(args) -> QuantStrategy:
    if args.strategy == EXACT and (args.max_clauses is not None or args.max_depth is not None):
        raise InputError("--max-clauses/--max-depth only apply to --strategy bounded")
    kw = {"mode": args.strategy, "allow_c_in_updates": args.allow_c_in_updates,
          "c_reflexive": args.c_reflexive}
    for name in ("max_profiles", "max_clauses", "max_depth"):
        if getattr(args, name) is not None:
            kw[name] = getattr(args, name)
    return QuantStrategy(**kw)


def _read_formula(args):
    if (args.formula is None) == (args.formula_file is None):
        raise InputError("give exactly one of FORMULA or --formula-file")
    if args.formula_file:
        with open(args.formula_file) as fh:
            return parse_formula(fh.read())
    return parse_formula(args.formula)


def _emit(args, text: str, payload: dict) -> None:
    print(json.dumps(payload) if args.json else text)


def cmd_check(args) -> int:
    strategy = strategy_from_args(args)
    model = read_model(args.model)
    phi = _read_formula(args)
    try:
        value = evaluate(model, args.world, phi, strategy)
    except Undecided as exc:
        _emit(args, f"UNDECIDED({exc.reason})", {"verdict": "UNDECIDED", "reason": exc.reason})
        return EXIT_UNDECIDED
    _emit(args, "TRUE" if value else "FALSE", {"verdict": "TRUE" if value else "FALSE"})
    return EXIT_TRUE if value else EXIT_FALSE


def cmd_encode(args) -> int:
    tm = load_machine(args.machine, args.allow_start_reentry)
    voc = encoder.Vocabulary.for_machine(tm)
    no_other = args.no_other == "on"
    builders = {
        "phi": lambda: encoder.encode_phi(tm, voc, no_other),
        "grid": lambda: encoder.encode_grid(voc, no_other),
        "sane": lambda: encoder.encode_sane(tm, voc),
        "trans": lambda: encoder.encode_transitions(tm, voc),
        "reduction-halting": lambda: encoder.reduction_formula(tm, voc, encoder.HALTING, no_other),
        "reduction-nonhalting": lambda: encoder.reduction_formula(tm, voc, encoder.NON_HALTING, no_other),
    }
    phi = builders[args.variant]()
    text = print_formula(phi)
    stats = {"nodes": size(phi), "conjuncts": len(split_and(phi)), "chars": len(text)}
    _emit(args, text, {"formula": text, **({"stats": stats} if args.stats else {})})
    if args.stats and not args.json:
        print(" ".join(f"{k}={v}" for k, v in stats.items()), file=sys.stderr)
    return EXIT_TRUE


def cmd_grid(args) -> int:
    tm = load_machine(args.machine, args.allow_start_reentry)
    grid = build_grid_model(tm, tuple(args.n_range), tuple(args.m_range))
    if args.action == "build":
        print(json.dumps(grid.model.to_doc()))
        return EXIT_TRUE
    report = verify_run_encoding(tm, grid)
    print(report.to_json() if args.json else report.format())
    return EXIT_TRUE if report.passed else EXIT_FALSE


def cmd_tm(args) -> int:
    tm = load_machine(args.machine, args.allow_start_reentry)
    if args.action == "run":
        table = run(tm, tuple(args.n_range), tuple(args.m_range))
        if args.json:
            print(json.dumps({str(m): [[c.symbol, c.state, c.head] for c in row]
                              for m, row in table.rows()}))
        else:
            print(table.format())
        return EXIT_TRUE
    if args.steps is None or args.steps < 0:
        raise InputError("'halts' needs a non-negative step bound")
    result = halts_within(tm, args.steps)
    if isinstance(result, Halts):
        _emit(args, f"HALTS {result.at}", {"halts": True, "at": result.at})
        return EXIT_TRUE
    _emit(args, f"NO-HALT-WITHIN {result.bound}", {"halts": False, "bound": result.bound})
    return EXIT_FALSE


def cmd_sat(args) -> int:
    strategy = strategy_from_args(args)
    phi = parse_formula(args.formula)
    res = sat_search(phi, args.max_worlds, strategy, args.max_models)
    if res.found:
        print(json.dumps({"world": res.world, "model": res.model.to_doc()}))
        return EXIT_TRUE
    if res.status == "budget":
        _emit(args, f"BUDGET-EXHAUSTED {res.models_checked}",
              {"status": "budget", "models_checked": res.models_checked})
        return EXIT_UNDECIDED
    _emit(args, f"NONE-FOUND {res.bound}", {"status": "none-found", "bound": res.bound})
    return EXIT_FALSE


COMMANDS = {"check": cmd_check, "encode": cmd_encode, "grid": cmd_grid, "tm": cmd_tm, "sat": cmd_sat}


def _one_line_warning(message, category, filename, lineno, line=None):
    return f"aaulc: warning: {message}\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    saved = warnings.formatwarning
    warnings.formatwarning = _one_line_warning
    try:
        return COMMANDS[args.command](args)
    except (InputError, ParseError, ModelError, MachineError, EvaluationError,
            ValueError, OSError) as exc:
        print(f"aaulc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        warnings.formatwarning = saved


if __name__ == "__main__":
    sys.exit(main())
