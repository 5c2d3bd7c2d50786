"""Formula AST, parser and printer.

Primitive nodes are ``Atom``, ``Top``, ``Neg``, ``Or``, ``Box``, ``Common``,
``Update`` and ``Arbitrary``.  ``And``, ``Implies``, ``Diamond``,
``DiamondArbitrary`` and ``Bottom`` are plain functions that build the
primitive expansion, so two formulas are equal iff their expansions are.

Concrete syntax (lowest to highest precedence)::

    formula := implies
    implies := or ( "->" implies )?
    or      := and ( "|" and )*
    and     := unary ( "&" unary )*
    unary   := "~" unary | "[" agent "]" unary | "<" agent ">" unary
             | "C" unary | "[*]" unary | "<*>" unary
             | "[" update "]" unary | atomic
    atomic  := "T" | "F" | ident | "(" formula ")"
    update  := "{" ( clause ("," clause)* )? "}"
    clause  := "(" formula "," ident "," formula ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
RESERVED = frozenset({"T", "F", "C"})


def _check_ident(name: str, what: str) -> None:
    if not isinstance(name, str) or not IDENT_RE.fullmatch(name):
        raise ValueError(f"invalid {what} name: {name!r}")


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        _check_ident(self.name, "atom")
        if self.name in RESERVED:
            raise ValueError(f"{self.name!r} is a reserved word and cannot name an atom")

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "T"


@dataclass(frozen=True)
class Neg:
    body: Formula

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Box:
    agent: str
    body: Formula

    def __post_init__(self):
        _check_ident(self.agent, "agent")

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Common:
    body: Formula

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Clause:
    """An arrow-update clause ``(pre, agent, post)``; bodies must be [*]-free."""

    pre: Formula
    agent: str
    post: Formula

    def __post_init__(self):
        _check_ident(self.agent, "agent")
        if not (is_aulc(self.pre) and is_aulc(self.post)):
            raise ValueError("arrow update clause bodies must not contain [*]")

    def __str__(self):
        return f"({print_formula(self.pre)}, {self.agent}, {print_formula(self.post)})"


@dataclass(frozen=True)
class ArrowUpdate:
    clauses: tuple[Clause, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))

    def normalized(self) -> ArrowUpdate:
        """Drop duplicate clauses, keeping first occurrences."""
        return ArrowUpdate(tuple(dict.fromkeys(self.clauses)))

    @property
    def agents(self) -> frozenset[str]:
        return frozenset(c.agent for c in self.clauses)

    def __str__(self):
        return "{" + ", ".join(str(c) for c in self.normalized().clauses) + "}"


@dataclass(frozen=True)
class Update:
    update: ArrowUpdate
    body: Formula

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Arbitrary:
    body: Formula

    def __str__(self):
        return print_formula(self)


Formula = Union[Atom, Top, Neg, Or, Box, Common, Update, Arbitrary]

TOP = Top()
BOTTOM = Neg(TOP)


# -- derived forms -----------------------------------------------------------

def Bottom() -> Formula:
    return BOTTOM


def And(left: Formula, right: Formula) -> Formula:
    return Neg(Or(Neg(left), Neg(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Or(Neg(left), right)


def Diamond(agent: str, body: Formula) -> Formula:
    return Neg(Box(agent, Neg(body)))


def DiamondArbitrary(body: Formula) -> Formula:
    return Neg(Arbitrary(Neg(body)))


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``T``."""
    result = None
    for p in parts:
        result = p if result is None else And(result, p)
    return TOP if result is None else result


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``F``."""
    result = None
    for p in parts:
        result = p if result is None else Or(result, p)
    return BOTTOM if result is None else result


def update(*clauses: tuple[Formula, str, Formula]) -> ArrowUpdate:
    return ArrowUpdate(tuple(Clause(*c) for c in clauses))


# -- structural queries ------------------------------------------------------

def children(phi: Formula) -> Iterator[Formula]:
    """Immediate subformulas, including the bodies of update clauses."""
    if isinstance(phi, (Neg, Box, Common, Arbitrary)):
        yield phi.body
    elif isinstance(phi, Or):
        yield phi.left
        yield phi.right
    elif isinstance(phi, Update):
        for c in phi.update.clauses:
            yield c.pre
            yield c.post
        yield phi.body


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over every subformula (with repetitions)."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(reversed(list(children(f))))


def is_aulc(phi) -> bool:
    """True iff no ``Arbitrary`` node occurs anywhere in ``phi``."""
    return not any(isinstance(f, Arbitrary) for f in subformulas(phi))


def has_common(phi: Formula) -> bool:
    return any(isinstance(f, Common) for f in subformulas(phi))


def atoms_of(phi: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulas(phi) if isinstance(f, Atom))


def agents_of(phi: Formula) -> frozenset[str]:
    out = set()
    for f in subformulas(phi):
        if isinstance(f, Box):
            out.add(f.agent)
        elif isinstance(f, Update):
            out |= f.update.agents
    return frozenset(out)


def size(phi: Formula) -> int:
    """Number of AST nodes, counting clause bodies."""
    return sum(1 for _ in subformulas(phi))


def height(phi: Formula) -> int:
    kids = list(children(phi))
    return 0 if not kids else 1 + max(height(k) for k in kids)


def normalize(phi: Formula) -> Formula:
    """Remove duplicate clauses from every update inside ``phi``."""
    if isinstance(phi, (Atom, Top)):
        return phi
    if isinstance(phi, Neg):
        return Neg(normalize(phi.body))
    if isinstance(phi, Or):
        return Or(normalize(phi.left), normalize(phi.right))
    if isinstance(phi, Box):
        return Box(phi.agent, normalize(phi.body))
    if isinstance(phi, Common):
        return Common(normalize(phi.body))
    if isinstance(phi, Arbitrary):
        return Arbitrary(normalize(phi.body))
    if isinstance(phi, Update):
        clauses = (Clause(normalize(c.pre), c.agent, normalize(c.post))
                   for c in phi.update.clauses)
        return Update(ArrowUpdate(tuple(clauses)).normalized(), normalize(phi.body))
    raise TypeError(f"not a formula: {phi!r}")


def split_and(phi: Formula) -> list[Formula]:
    """Flatten a nest of conjunctions into its conjuncts."""
    if isinstance(phi, Neg) and isinstance(phi.body, Or):
        l, r = phi.body.left, phi.body.right
        if isinstance(l, Neg) and isinstance(r, Neg):
            return split_and(l.body) + split_and(r.body)
    return [phi]


# -- printer -----------------------------------------------------------------

_IMPLIES, _OR, _AND, _UNARY = 1, 2, 3, 4


def print_formula(phi: Formula) -> str:
    """Render ``phi`` with minimal parentheses; ``parse_formula`` inverts it."""
    return _pp(phi, _IMPLIES)


def _pp(phi: Formula, level: int) -> str:
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Or):
        l, r = phi.left, phi.right
        if isinstance(l, Neg):
            s, own = f"{_pp(l.body, _OR)} -> {_pp(r, _IMPLIES)}", _IMPLIES
        else:
            s, own = f"{_pp(l, _OR)} | {_pp(r, _AND)}", _OR
        return f"({s})" if level > own else s
    if isinstance(phi, Neg):
        b = phi.body
        if isinstance(b, Top):
            return "F"
        if isinstance(b, Or) and isinstance(b.left, Neg) and isinstance(b.right, Neg):
            s = f"{_pp(b.left.body, _AND)} & {_pp(b.right.body, _UNARY)}"
            return f"({s})" if level > _AND else s
        if isinstance(b, Box) and isinstance(b.body, Neg):
            return f"<{b.agent}>{_pp(b.body.body, _UNARY)}"
        if isinstance(b, Arbitrary) and isinstance(b.body, Neg):
            return f"<*>{_pp(b.body.body, _UNARY)}"
        return "~" + _pp(b, _UNARY)
    if isinstance(phi, Box):
        return f"[{phi.agent}]{_pp(phi.body, _UNARY)}"
    if isinstance(phi, Common):
        return "C " + _pp(phi.body, _UNARY)
    if isinstance(phi, Arbitrary):
        return "[*]" + _pp(phi.body, _UNARY)
    if isinstance(phi, Update):
        return f"[{phi.update}]{_pp(phi.body, _UNARY)}"
    raise TypeError(f"not a formula: {phi!r}")


# -- parser ------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


_TOKEN_RE = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_]*)|([()\[\]{}<>,~|&*]))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            if text[i:].strip() == "":
                break
            j = i + len(text[i:]) - len(text[i:].lstrip())
            raise ParseError(f"unexpected character {text[j]!r}", j, text)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        i = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> str:
        return self.tokens[self.i][0]

    @property
    def pos(self) -> int:
        return self.tokens[self.i][1]

    def error(self, msg: str):
        raise ParseError(msg, self.pos, self.text)

    def advance(self) -> str:
        t = self.tok
        self.i += 1
        return t

    def expect(self, t: str) -> None:
        if self.tok != t:
            found = "end of input" if self.tok == "<eof>" else repr(self.tok)
            self.error(f"expected {t!r}, found {found}")
        self.i += 1

    def ident(self, what: str) -> str:
        if not IDENT_RE.fullmatch(self.tok):
            self.error(f"expected {what}, found {self.tok!r}")
        return self.advance()

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.tok == "->":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.tok == "|":
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.tok == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.tok
        if t == "~":
            self.advance()
            return Neg(self.unary())
        if t == "C":
            self.advance()
            return Common(self.unary())
        if t == "[":
            self.advance()
            if self.tok == "*":
                self.advance()
                self.expect("]")
                return Arbitrary(self.unary())
            if self.tok == "{":
                u = self.arrow_update()
                self.expect("]")
                return Update(u, self.unary())
            agent = self.ident("agent, '*' or '{'")
            self.expect("]")
            return Box(agent, self.unary())
        if t == "<":
            self.advance()
            if self.tok == "*":
                self.advance()
                self.expect(">")
                return DiamondArbitrary(self.unary())
            agent = self.ident("agent or '*'")
            self.expect(">")
            return Diamond(agent, self.unary())
        return self.atomic()

    def atomic(self) -> Formula:
        t = self.tok
        if t == "T":
            self.advance()
            return TOP
        if t == "F":
            self.advance()
            return BOTTOM
        if t == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if IDENT_RE.fullmatch(t):
            self.advance()
            return Atom(t)
        if t == "<eof>":
            self.error("unexpected end of input")
        self.error(f"unexpected token {t!r}")

    def arrow_update(self) -> ArrowUpdate:
        self.expect("{")
        clauses = []
        if self.tok != "}":
            clauses.append(self.clause())
            while self.tok == ",":
                self.advance()
                clauses.append(self.clause())
        self.expect("}")
        return ArrowUpdate(tuple(clauses))

    def clause(self) -> Clause:
        start = self.pos
        self.expect("(")
        pre = self.formula()
        self.expect(",")
        agent = self.ident("agent")
        self.expect(",")
        post = self.formula()
        self.expect(")")
        if not (is_aulc(pre) and is_aulc(post)):
            raise ParseError("update clause body contains [*]", start, self.text)
        return Clause(pre, agent, post)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.tok != "<eof>":
        p.error(f"unexpected token {p.tok!r}")
    return f


def parse_update(text: str) -> ArrowUpdate:
    p = _Parser(text)
    u = p.arrow_update()
    if p.tok != "<eof>":
        p.error(f"unexpected token {p.tok!r}")
    return u
