"""Compile a Turing machine into the formula describing its run on a grid.

The output formula is::

    C grid & C sane & C transitions & start_state & pos

``grid`` forces every reachable world into a Z x Z grid (agents left, right,
up, down) whose points are a-reflexive; ``sane`` and ``transitions`` force
the valuation on that grid to follow the machine's run.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    BOTTOM,
    TOP,
    And,
    Arbitrary,
    Atom,
    Box,
    Common,
    Diamond,
    Formula,
    Implies,
    Neg,
    conj,
    disj,
)
from .turing import VOID_STATE, Move, TuringMachine

A = "a"
LEFT, RIGHT, UP, DOWN = "left", "right", "up", "down"
DIRECTIONS = (LEFT, RIGHT, UP, DOWN)
INVERSE_PAIRS = ((LEFT, RIGHT), (RIGHT, LEFT), (UP, DOWN), (DOWN, UP))
COMMUTING_PAIRS = tuple((x, y) for x in (UP, DOWN) for y in (LEFT, RIGHT)) + \
    tuple((x, y) for x in (LEFT, RIGHT) for y in (UP, DOWN))

NON_HALTING = "nonhalting"
HALTING = "halting"


@dataclass(frozen=True)
class Vocabulary:
    """Atom and agent names used by the encoding of one machine."""

    symbol_atoms: dict[str, str]
    state_atoms: dict[str, str]  # includes the void state
    agents: tuple[str, ...]
    pos: str = "pos"
    lpos: str = "lpos"
    rpos: str = "rpos"

    @classmethod
    def for_machine(cls, tm: TuringMachine, extra_agents: tuple[str, ...] = ()) -> Vocabulary:
        agents = (A,) + DIRECTIONS + tuple(x for x in extra_agents if x not in (A,) + DIRECTIONS)
        return cls({s: f"sym_{s}" for s in tm.alphabet},
                   {s: f"st_{s}" for s in tm.states + (VOID_STATE,)},
                   agents)

    def sym(self, symbol: str) -> Atom:
        return Atom(self.symbol_atoms[symbol])

    def st(self, state: str) -> Atom:
        return Atom(self.state_atoms[state])

    @property
    def atom_names(self) -> frozenset[str]:
        return frozenset(self.symbol_atoms.values()) | frozenset(self.state_atoms.values()) | \
            {self.pos, self.lpos, self.rpos}


def _dia_a() -> Formula:
    return Diamond(A, TOP)


def grid_conjuncts(voc: Vocabulary) -> dict[str, Formula]:
    alive = _dia_a()
    return {
        "ref_a": And(alive, Arbitrary(Box(A, alive))),
        "no_other": conj(Box(x, BOTTOM) for x in voc.agents if x not in DIRECTIONS + (A,)),
        "direction": conj(
            And(Diamond(x, TOP), Arbitrary(Implies(Diamond(x, alive), Box(x, alive))))
            for x in DIRECTIONS),
        "inverse": Arbitrary(Implies(alive, conj(Box(x, Box(y, alive)) for x, y in INVERSE_PAIRS))),
        "commute": Arbitrary(conj(Implies(Diamond(x, Diamond(y, alive)), Box(y, Box(x, alive)))
                                  for x, y in COMMUTING_PAIRS)),
    }


def encode_grid(voc: Vocabulary, no_other: bool = True) -> Formula:
    parts = grid_conjuncts(voc)
    if not no_other:
        del parts["no_other"]
    return conj(parts.values())


def _exactly_one(atoms: list[Atom]) -> Formula:
    return disj(conj([p] + [Neg(q) for q in atoms if q != p]) for p in atoms)


def sane_conjuncts(tm: TuringMachine, voc: Vocabulary) -> dict[str, Formula]:
    pos, lpos, rpos = Atom(voc.pos), Atom(voc.lpos), Atom(voc.rpos)
    states = [voc.st(s) for s in tm.states + (VOID_STATE,)]
    symbols = [voc.sym(a) for a in tm.alphabet]
    start, void = voc.st(tm.start), voc.st(VOID_STATE)
    return {
        "position_1": conj([Neg(And(pos, lpos)), Neg(And(pos, rpos)), Neg(And(rpos, lpos))]),
        "position_2": And(Implies(disj([pos, rpos]), Box(RIGHT, rpos)),
                          Implies(disj([pos, lpos]), Box(LEFT, lpos))),
        "one_state": _exactly_one(states),
        "same_state": conj(Implies(s, And(Box(LEFT, s), Box(RIGHT, s))) for s in states),
        "one_symbol": _exactly_one(symbols),
        "void_state": Implies(disj([start, void]), Box(DOWN, void)),
        "initial_symbol": Implies(start, voc.sym(tm.blank)),
        "unchanged": conj(Implies(And(Neg(pos), a), Box(UP, a)) for a in symbols),
    }


def encode_sane(tm: TuringMachine, voc: Vocabulary) -> Formula:
    return conj(sane_conjuncts(tm, voc).values())


def _domain(tm: TuringMachine):
    for s in tm.states:
        for a in tm.alphabet:
            yield s, a, tm.delta[(a, s)]


def transition_conjuncts(tm: TuringMachine, voc: Vocabulary) -> dict[str, Formula]:
    pos = Atom(voc.pos)

    def at(s, a):
        return conj([pos, voc.st(s), voc.sym(a)])

    shift = {
        Move.LEFT: Box(UP, Box(LEFT, pos)),
        Move.RIGHT: Box(UP, Box(RIGHT, pos)),
        Move.REMAIN: Box(UP, pos),
    }
    moves = [Implies(at(s, a), shift[mv])
             for move in (Move.LEFT, Move.RIGHT, Move.REMAIN)
             for s, a, (_, _, mv) in _domain(tm) if mv is move]
    states = [Implies(at(s, a), Box(UP, voc.st(t)))
              for target in tm.states + (VOID_STATE,)
              for s, a, (_, t, _) in _domain(tm) if t == target]
    symbols = [Implies(at(s, a), Box(UP, voc.sym(b)))
               for written in tm.alphabet
               for s, a, (b, _, _) in _domain(tm) if b == written]
    return {
        "position_change": conj(moves),
        "state_change": conj(states),
        "symbol_change": conj(symbols),
    }


def encode_transitions(tm: TuringMachine, voc: Vocabulary) -> Formula:
    return conj(transition_conjuncts(tm, voc).values())


def encode_phi(tm: TuringMachine, voc: Vocabulary | None = None, no_other: bool = True) -> Formula:
    voc = voc or Vocabulary.for_machine(tm)
    return conj([
        Common(encode_grid(voc, no_other)),
        Common(encode_sane(tm, voc)),
        Common(encode_transitions(tm, voc)),
        voc.st(tm.start),
        Atom(voc.pos),
    ])


def reduction_formula(tm: TuringMachine, voc: Vocabulary | None = None,
                      variant: str = NON_HALTING, no_other: bool = True) -> Formula:
    """``phi -> C ~end`` (valid iff non-halting) or ``phi -> ~C ~end`` (valid iff halting)."""
    voc = voc or Vocabulary.for_machine(tm)
    never_ends = Common(Neg(voc.st(tm.end)))
    if variant == NON_HALTING:
        return Implies(encode_phi(tm, voc, no_other), never_ends)
    if variant == HALTING:
        return Implies(encode_phi(tm, voc, no_other), Neg(never_ends))
    raise ValueError(f"unknown variant {variant!r}")
