"""Deterministic single-tape Turing machines and their run tables."""

from __future__ import annotations

import enum
import json
import re
import warnings
from dataclasses import dataclass
from typing import Mapping

VOID_STATE = "s_void"
_NAME_RE = re.compile(r"[A-Za-z0-9_]+")


class MachineError(ValueError):
    pass


class Move(enum.Enum):
    LEFT = "L"
    REMAIN = "N"
    RIGHT = "R"

    @property
    def offset(self) -> int:
        return {"L": -1, "N": 0, "R": 1}[self.value]


@dataclass(frozen=True)
class TuringMachine:
    """``(alphabet, states, delta)``.

    ``alphabet[0]`` is the blank symbol.  ``delta`` maps ``(symbol, state)`` to
    ``(written symbol, next state, move)`` and must be total.
    """

    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    delta: Mapping[tuple[str, str], tuple[str, str, Move]]
    start: str
    end: str

    @property
    def blank(self) -> str:
        return self.alphabet[0]

    def validate(self, allow_start_reentry: bool = False) -> None:
        if not self.alphabet:
            raise MachineError("alphabet is empty")
        for kind, names in (("symbol", self.alphabet), ("state", self.states)):
            if len(set(names)) != len(names):
                raise MachineError(f"duplicate {kind} names")
            for n in names:
                if not isinstance(n, str) or not _NAME_RE.fullmatch(n):
                    raise MachineError(f"invalid {kind} name {n!r}")
        if VOID_STATE in self.states:
            raise MachineError(f"{VOID_STATE!r} is reserved for the dummy state")
        for s in (self.start, self.end):
            if s not in self.states:
                raise MachineError(f"state {s!r} is not among the states")
        if self.start == self.end:
            raise MachineError("start and end state must differ")
        missing = [(a, s) for a in self.alphabet for s in self.states if (a, s) not in self.delta]
        if missing:
            raise MachineError(f"delta is not total; missing (symbol, state) pairs: {missing}")
        for (a, s), (b, t, mv) in self.delta.items():
            if a not in self.alphabet or s not in self.states:
                raise MachineError(f"delta defined outside alphabet x states: {(a, s)}")
            if b not in self.alphabet or t not in self.states or not isinstance(mv, Move):
                raise MachineError(f"bad delta entry for {(a, s)}: {(b, t, mv)}")
        reentry = [k for k, v in self.delta.items() if v[1] == self.start]
        if reentry and not allow_start_reentry:
            warnings.warn(f"start state {self.start!r} re-occurs via {reentry}", stacklevel=2)

    def step(self, symbol: str, state: str) -> tuple[str, str, Move]:
        return self.delta[(symbol, state)]


def machine_from_doc(doc: dict) -> TuringMachine:
    """Parse a machine document.

    ``start``/``end`` default to the first and second listed states.
    """
    try:
        alphabet = tuple(doc["alphabet"])
        states = tuple(doc["states"])
        entries = doc["delta"]
    except (KeyError, TypeError) as exc:
        raise MachineError(f"machine document is missing {exc}") from None
    if len(states) < 2:
        raise MachineError("need at least a start and an end state")
    delta = {}
    for e in entries:
        try:
            key = (e["read"], e["state"])
            value = (e["write"], e["next"], Move(e["move"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MachineError(f"malformed delta entry {e!r}: {exc}") from None
        if key in delta:
            raise MachineError(f"duplicate delta entry for {key}")
        delta[key] = value
    return TuringMachine(alphabet, states, delta,
                         doc.get("start", states[0]), doc.get("end", states[1]))


def load_machine(path, allow_start_reentry: bool = False) -> TuringMachine:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MachineError(f"invalid JSON: {exc}") from None
    tm = machine_from_doc(doc)
    tm.validate(allow_start_reentry)
    return tm


def machine_to_doc(tm: TuringMachine) -> dict:
    return {
        "alphabet": list(tm.alphabet),
        "states": list(tm.states),
        "start": tm.start,
        "end": tm.end,
        "delta": [{"state": s, "read": a, "write": b, "next": t, "move": mv.value}
                  for (a, s), (b, t, mv) in tm.delta.items()],
    }


@dataclass(frozen=True)
class Cell:
    symbol: str
    state: str
    head: int

    def __str__(self):
        return f"{self.symbol}/{self.state}/{self.head}"


@dataclass(frozen=True)
class RunTable:
    """A finite window of the run, rows indexed by time ``m``."""

    n_range: tuple[int, int]
    m_range: tuple[int, int]
    cells: Mapping[tuple[int, int], Cell]
    head_at: Mapping[int, int]  # true head position per row m >= 0, possibly outside the window

    def __getitem__(self, nm: tuple[int, int]) -> Cell:
        return self.cells[nm]

    def rows(self):
        n0, n1 = self.n_range
        for m in range(self.m_range[0], self.m_range[1] + 1):
            yield m, [self.cells[(n, m)] for n in range(n0, n1 + 1)]

    def format(self) -> str:
        return "\n".join(f"{m:>4}: " + " ".join(str(c) for c in row) for m, row in self.rows())


def _check_range(r, name):
    lo, hi = r
    if lo > hi:
        raise ValueError(f"empty {name} range {r}")
    return int(lo), int(hi)


def run(tm: TuringMachine, n_range: tuple[int, int], m_range: tuple[int, int]) -> RunTable:
    """Tabulate the run on the blank tape over ``n_range x m_range``.

    The simulated tape is widened by ``m_max`` cells on each side so the
    window never sees a truncated tape.
    """
    n0, n1 = _check_range(n_range, "n")
    m0, m1 = _check_range(m_range, "m")
    cells = {}
    for m in range(m0, min(m1, -1) + 1):
        for n in range(n0, n1 + 1):
            cells[(n, m)] = Cell(tm.blank, VOID_STATE, 0)
    head_at = {}
    if m1 >= 0:
        lo, hi = min(n0, 0) - m1, max(n1, 0) + m1
        tape = [tm.blank] * (hi - lo + 1)
        head, state = 0, tm.start
        for m in range(0, m1 + 1):
            head_at[m] = head
            if m >= m0:
                for n in range(n0, n1 + 1):
                    cells[(n, m)] = Cell(tape[n - lo], state, int(n == head))
            written, state, move = tm.step(tape[head - lo], state)
            tape[head - lo] = written
            head += move.offset
    return RunTable((n0, n1), (m0, m1), cells, head_at)


@dataclass(frozen=True)
class Halts:
    at: int


@dataclass(frozen=True)
class NoHaltWithinBound:
    bound: int


def halts_within(tm: TuringMachine, steps: int) -> Halts | NoHaltWithinBound:
    """First time ``m <= steps`` at which the machine is in its end state."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    tape: dict[int, str] = {}
    head, state = 0, tm.start
    for m in range(steps + 1):
        if state == tm.end:
            return Halts(m)
        written, state, move = tm.step(tape.get(head, tm.blank), state)
        tape[head] = written
        head += move.offset
    return NoHaltWithinBound(steps)
