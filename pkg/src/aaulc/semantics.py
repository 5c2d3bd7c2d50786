"""Evaluation of formulas on finite models.

Formulas are evaluated set-at-a-time: every subformula gets a pair of
world sets ``(true, false)``.  For [*]-free formulas the two sets partition
the model; a ``[*]`` that the chosen strategy cannot settle leaves some worlds
in neither set, and asking for their truth value raises ``Undecided``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from .kripke import Model, backward_closure, bisim_partition
from .syntax import (
    TOP,
    Arbitrary,
    ArrowUpdate,
    Atom,
    Box,
    Clause,
    Common,
    Formula,
    Neg,
    Or,
    Top,
    Update,
    agents_of,
    atoms_of,
    has_common,
    height,
    is_aulc,
    subformulas,
)

EXACT = "exact"
BOUNDED = "bounded"


class EvaluationError(ValueError):
    pass


class Undecided(Exception):
    """The strategy could not settle a ``[*]`` subformula within its budget."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class QuantStrategy:
    """How ``[*]`` is decided, plus evaluation switches.

    ``exact`` enumerates every semantic update profile over the bisimulation
    classes of the model and is complete on finite models.  ``bounded`` tries
    concrete updates with at most ``max_clauses`` clauses whose bodies come
    from a finite pool; it can refute ``[*]phi`` but never confirm it.
    """

    mode: str = EXACT
    max_clauses: int = 3
    max_depth: int = 2
    max_profiles: int = 2 ** 20
    allow_c_in_updates: bool = False
    c_reflexive: bool = False
    prune_agents: bool = False

    def __post_init__(self):
        if self.mode not in (EXACT, BOUNDED):
            raise ValueError(f"unknown strategy mode {self.mode!r}")
        for name in ("max_clauses", "max_depth", "max_profiles"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


DEFAULT_STRATEGY = QuantStrategy()


@dataclass
class Evaluator:
    strategy: QuantStrategy = DEFAULT_STRATEGY
    reasons: list[str] = field(default_factory=list)

    def extension(self, model: Model, phi: Formula) -> tuple[frozenset[str], frozenset[str]]:
        """``(worlds where phi is true, worlds where phi is false)``."""
        if isinstance(phi, Atom):
            t = model.extension(phi.name)
            return t, model.world_set - t
        if isinstance(phi, Top):
            return model.world_set, frozenset()
        if isinstance(phi, Neg):
            t, f = self.extension(model, phi.body)
            return f, t
        if isinstance(phi, Or):
            t1, f1 = self.extension(model, phi.left)
            t2, f2 = self.extension(model, phi.right)
            return t1 | t2, f1 & f2
        if isinstance(phi, Box):
            if phi.agent not in model.agents:
                raise EvaluationError(f"unknown agent {phi.agent!r}")
            t, f = self.extension(model, phi.body)
            succ = model.successors[phi.agent]
            return (frozenset(w for w in model.worlds if succ[w] <= t),
                    frozenset(w for w in model.worlds if succ[w] & f))
        if isinstance(phi, Common):
            t, f = self.extension(model, phi.body)
            not_true = model.world_set - t
            bad = backward_closure(model, not_true)
            falsified = backward_closure(model, f)
            if self.strategy.c_reflexive:
                bad |= not_true
                falsified |= f
            return model.world_set - bad, falsified
        if isinstance(phi, Update):
            return self.extension(self.apply(model, phi.update), phi.body)
        if isinstance(phi, Arbitrary):
            if self.strategy.mode == EXACT:
                return self._arbitrary_exact(model, phi.body)
            return self._arbitrary_bounded(model, phi.body)
        raise TypeError(f"not a formula: {phi!r}")

    def definite(self, model: Model, phi: Formula) -> frozenset[str]:
        t, f = self.extension(model, phi)
        if len(t) + len(f) != len(model.worlds):
            raise Undecided("; ".join(self.reasons) or "undecided")
        return t

    def apply(self, model: Model, upd: ArrowUpdate) -> Model:
        relations = {a: set() for a in model.agents}
        for c in upd.clauses:
            if c.agent not in model.agents:
                raise EvaluationError(f"unknown agent {c.agent!r} in update clause")
            pre = self.definite(model, c.pre)
            post = self.definite(model, c.post)
            relations[c.agent].update((u, v) for u, v in model.relations[c.agent]
                                      if u in pre and v in post)
        return model.with_relations(relations)

    def _quantified_agents(self, model: Model, body: Formula) -> list[str]:
        if self.strategy.prune_agents and not has_common(body) and is_aulc(body):
            used = agents_of(body)
            return [a for a in model.agents if a in used]
        return list(model.agents)

    def _arbitrary_exact(self, model: Model, body: Formula):
        part = bisim_partition(model)
        agents = self._quantified_agents(model, body)
        groups = []
        for a in agents:
            by_pair = defaultdict(list)
            for u, v in model.relations[a]:
                by_pair[(part.block_of[u], part.block_of[v])].append((u, v))
            groups.extend((a, by_pair[k]) for k in sorted(by_pair))
        if 2 ** len(groups) > self.strategy.max_profiles:
            self.reasons.append(
                f"[*] needs 2^{len(groups)} update profiles, budget is {self.strategy.max_profiles}")
            return frozenset(), frozenset()
        fixed = {a: model.relations[a] for a in model.agents if a not in agents}
        true, false = set(model.worlds), set()
        for mask in range(2 ** len(groups)):
            relations = {a: set() for a in agents}
            relations.update(fixed)
            for i, (a, arrows) in enumerate(groups):
                if mask >> i & 1:
                    relations[a].update(arrows)
            t, f = self.extension(model.with_relations(relations), body)
            true &= t
            false |= f
            if not true and len(false) == len(model.worlds):
                break
        return frozenset(true), frozenset(false)

    def body_pool(self, model: Model, body: Formula) -> list[Formula]:
        """Candidate clause bodies for the bounded search, closed under negation."""
        pool = [TOP] + [Atom(p) for p in sorted(model.atoms | atoms_of(body))]
        for f in subformulas(body):
            if not is_aulc(f) or height(f) > self.strategy.max_depth:
                continue
            if has_common(f) and not self.strategy.allow_c_in_updates:
                continue
            pool.append(f)
        closed = []
        for f in pool:
            closed.append(f)
            closed.append(f.body if isinstance(f, Neg) else Neg(f))
        return list(dict.fromkeys(closed))

    def candidate_updates(self, model: Model, body: Formula) -> list[ArrowUpdate]:
        """Concrete updates of at most ``max_clauses`` clauses, one per distinct effect on ``model``."""
        reps = {}
        for f in self.body_pool(model, body):
            reps.setdefault(self.definite(model, f), f)
        effects = {}
        for a in self._quantified_agents(model, body):
            arrows = model.relations[a]
            for (pre_ext, pre), (post_ext, post) in itertools.product(reps.items(), repeat=2):
                kept = frozenset((a, u, v) for u, v in arrows if u in pre_ext and v in post_ext)
                effects.setdefault(kept, Clause(pre, a, post))
        fixed = [Clause(TOP, a, TOP) for a in model.agents
                 if a not in self._quantified_agents(model, body)]
        seen = {frozenset(): ()}
        frontier = [frozenset()]
        for _ in range(self.strategy.max_clauses):
            nxt = []
            for s in frontier:
                for eff, clause in effects.items():
                    u = s | eff
                    if u not in seen:
                        seen[u] = seen[s] + (clause,)
                        nxt.append(u)
                        if len(seen) > self.strategy.max_profiles:
                            self.reasons.append("bounded [*] search exceeded its update budget")
                            return [ArrowUpdate(c + tuple(fixed)) for c in seen.values()]
            frontier = nxt
        return [ArrowUpdate(c + tuple(fixed)) for c in seen.values()]

    def _arbitrary_bounded(self, model: Model, body: Formula):
        false = set()
        for upd in self.candidate_updates(model, body):
            _, f = self.extension(self.apply(model, upd), body)
            false |= f
            if len(false) == len(model.worlds):
                break
        if len(false) < len(model.worlds):
            self.reasons.append("bounded [*] search found no counterexample")
        return frozenset(), frozenset(false)


def _check_world(model: Model, w: str) -> None:
    if w not in model.world_set:
        raise EvaluationError(f"unknown world {w!r}")


def apply_update(model: Model, upd: ArrowUpdate, strategy: QuantStrategy = DEFAULT_STRATEGY) -> Model:
    """``M*U``: keep an a-arrow iff some a-clause's pre holds at its source and post at its target."""
    return Evaluator(strategy).apply(model, upd)


def extension(model: Model, phi: Formula, strategy: QuantStrategy = DEFAULT_STRATEGY):
    return Evaluator(strategy).extension(model, phi)


def evaluate(model: Model, w: str, phi: Formula, strategy: QuantStrategy = DEFAULT_STRATEGY) -> bool:
    """Truth of ``phi`` at ``w``; raises ``Undecided`` if the strategy cannot tell."""
    _check_world(model, w)
    ev = Evaluator(strategy)
    t, f = ev.extension(model, phi)
    if w in t:
        return True
    if w in f:
        return False
    raise Undecided("; ".join(dict.fromkeys(ev.reasons)) or "undecided")


def check_arbitrary(model: Model, w: str, phi: Formula,
                    strategy: QuantStrategy = DEFAULT_STRATEGY) -> bool | None:
    """Decide ``[*]phi`` at ``w``; ``None`` means undecided."""
    try:
        return evaluate(model, w, Arbitrary(phi), strategy)
    except Undecided:
        return None


@dataclass(frozen=True)
class SatResult:
    status: str  # "found" | "none-found" | "budget"
    bound: int
    models_checked: int
    model: Model | None = None
    world: str | None = None
    undecided: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


def _models(n: int, atoms: list[str], agents: list[str]):
    worlds = tuple(f"w{i}" for i in range(n))
    pairs = [(u, v) for u in worlds for v in worlds]
    vals = [frozenset(a for i, a in enumerate(atoms) if bits >> i & 1) for bits in range(2 ** len(atoms))]
    # sorted valuation vectors: one representative per permutation class of valuations
    for val_idx in itertools.combinations_with_replacement(range(len(vals)), n):
        valuation = {w: vals[i] for w, i in zip(worlds, val_idx)}
        for bits in range(2 ** (len(pairs) * len(agents))):
            relations = {}
            for k, a in enumerate(agents):
                chunk = bits >> (k * len(pairs))
                relations[a] = [p for i, p in enumerate(pairs) if chunk >> i & 1]
            yield Model(worlds, tuple(agents), relations, valuation)


def sat_search(phi: Formula, max_worlds: int, strategy: QuantStrategy = DEFAULT_STRATEGY,
               max_models: int = 500_000) -> SatResult:
    """Look for a small model of ``phi``.

    Only witnesses are meaningful: "none-found" does not mean unsatisfiable.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    atoms = sorted(atoms_of(phi))
    agents = sorted(agents_of(phi))
    checked = undecided = 0
    for n in range(1, max_worlds + 1):
        for model in _models(n, atoms, agents):
            checked += 1
            if checked > max_models:
                return SatResult("budget", n, checked - 1, undecided=undecided)
            t, f = Evaluator(strategy).extension(model, phi)
            if t:
                w = next(w for w in model.worlds if w in t)
                return SatResult("found", n, checked, model, w, undecided)
            undecided += len(model.worlds) - len(f)
    return SatResult("none-found", max_worlds, checked, undecided=undecided)
