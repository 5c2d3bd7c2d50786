"""Arbitrary arrow update logic with common knowledge: parsing, model checking,
and the Turing-machine-to-formula reduction."""

from .kripke import Model, Partition, bisim_partition, load_model, quotient, reachable
from .semantics import (
    QuantStrategy,
    SatResult,
    Undecided,
    apply_update,
    check_arbitrary,
    evaluate,
    sat_search,
)
from .syntax import ParseError, is_aulc, parse_formula, print_formula
from .turing import TuringMachine, halts_within, run

__all__ = [
    "Model", "Partition", "bisim_partition", "load_model", "quotient", "reachable",
    "QuantStrategy", "SatResult", "Undecided", "apply_update", "check_arbitrary",
    "evaluate", "sat_search", "ParseError", "is_aulc", "parse_formula", "print_formula",
    "TuringMachine", "halts_within", "run",
]
