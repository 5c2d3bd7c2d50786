"""Finite windows of the grid model built from a machine's run, and a checker
for the [*]-free parts of the encoding on those windows."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .encoder import (
    A,
    DIRECTIONS,
    DOWN,
    LEFT,
    RIGHT,
    UP,
    Vocabulary,
    grid_conjuncts,
    sane_conjuncts,
    transition_conjuncts,
)
from .kripke import Model
from .semantics import Evaluator
from .syntax import TOP, Diamond, Formula, conj
from .turing import RunTable, TuringMachine, run

_STEP = {RIGHT: (1, 0), LEFT: (-1, 0), UP: (0, 1), DOWN: (0, -1)}


def world_id(n: int, m: int) -> str:
    return f"{n},{m}"


def parse_world_id(w: str) -> tuple[int, int]:
    n, m = w.split(",")
    return int(n), int(m)


@dataclass(frozen=True)
class GridWindow:
    model: Model
    n_range: tuple[int, int]
    m_range: tuple[int, int]
    table: RunTable
    vocabulary: Vocabulary


def build_grid_model(tm: TuringMachine, n_range: tuple[int, int], m_range: tuple[int, int],
                     voc: Vocabulary | None = None) -> GridWindow:
    """Window ``n_range x m_range`` of the grid whose valuation is the run table.

    ``up`` increases time ``m`` and ``right`` increases tape position ``n``;
    ``a`` is the identity and any other agent has no arrows.
    """
    voc = voc or Vocabulary.for_machine(tm)
    table = run(tm, n_range, m_range)
    (n0, n1), (m0, m1) = table.n_range, table.m_range
    points = [(n, m) for m in range(m0, m1 + 1) for n in range(n0, n1 + 1)]
    worlds = tuple(world_id(n, m) for n, m in points)
    relations = {A: [(w, w) for w in worlds]}
    for x, (dn, dm) in _STEP.items():
        relations[x] = [(world_id(n, m), world_id(n + dn, m + dm)) for n, m in points
                        if n0 <= n + dn <= n1 and m0 <= m + dm <= m1]
    valuation = {}
    for n, m in points:
        cell = table[(n, m)]
        props = {voc.symbol_atoms[cell.symbol], voc.state_atoms[cell.state]}
        if m >= 0:
            head = table.head_at[m]
            if n == head:
                props.add(voc.pos)
            elif n < head:
                props.add(voc.lpos)
            else:
                props.add(voc.rpos)
        valuation[world_id(n, m)] = props
    model = Model(worlds, voc.agents, relations, valuation)
    return GridWindow(model, table.n_range, table.m_range, table, voc)


def interior_worlds(grid: GridWindow, margin: int) -> list[str]:
    """Worlds at least ``margin`` cells away from every window edge, in (m, n) order."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    (n0, n1), (m0, m1) = grid.n_range, grid.m_range
    return [world_id(n, m) for m in range(m0 + margin, m1 - margin + 1)
            for n in range(n0 + margin, n1 - margin + 1)]


@dataclass(frozen=True)
class ConjunctResult:
    name: str
    passed: bool
    margin: int
    checked: int
    counterexample: str | None = None

    def line(self) -> str:
        s = f"CONJUNCT {self.name} {'PASS' if self.passed else 'FAIL'}"
        return s if self.passed else f"{s} world {self.counterexample}"


@dataclass(frozen=True)
class VerificationReport:
    results: list[ConjunctResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> ConjunctResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self) -> list[ConjunctResult]:
        return [r for r in self.results if not r.passed]

    def format(self) -> str:
        return "\n".join(r.line() for r in self.results)

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "results": [
            {"conjunct": r.name, "status": "PASS" if r.passed else "FAIL",
             "world": r.counterexample, "margin": r.margin, "checked": r.checked}
            for r in self.results]}, indent=2)


def checked_conjuncts(tm: TuringMachine, voc: Vocabulary) -> list[tuple[str, Formula, int]]:
    """``(name, formula, margin)`` for everything verifiable on a finite window."""
    grid = grid_conjuncts(voc)
    items = [(name, f, 2) for name, f in sane_conjuncts(tm, voc).items()]
    items += [(name, f, 2) for name, f in transition_conjuncts(tm, voc).items()]
    items += [
        ("no_other", grid["no_other"], 1),
        ("direction_diamonds", conj(Diamond(x, TOP) for x in DIRECTIONS), 1),
        ("ref_a_diamond", Diamond(A, TOP), 0),
    ]
    return items


def verify_run_encoding(tm: TuringMachine, grid: GridWindow,
                        voc: Vocabulary | None = None) -> VerificationReport:
    """Evaluate each [*]-free conjunct on the interior worlds of ``grid``.

    A failing conjunct reports the first counterexample in (n, m) order.
    """
    voc = voc or grid.vocabulary
    ev = Evaluator()
    results = []
    for name, phi, margin in checked_conjuncts(tm, voc):
        true = ev.definite(grid.model, phi)
        interior = interior_worlds(grid, margin)
        bad = sorted((parse_world_id(w) for w in interior if w not in true))
        results.append(ConjunctResult(name, not bad, margin, len(interior),
                                      world_id(*bad[0]) if bad else None))
    return VerificationReport(results)
