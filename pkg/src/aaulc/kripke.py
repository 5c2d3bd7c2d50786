"""Finite multi-agent Kripke models, reachability and bisimulation."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .syntax import IDENT_RE


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Model:
    """``(W, R, V)`` with agent-indexed relations.

    Treat instances as immutable; derived lookup tables are cached.
    """

    worlds: tuple[str, ...]
    agents: tuple[str, ...]
    relations: Mapping[str, frozenset[tuple[str, str]]]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        worlds = tuple(self.worlds)
        if len(set(worlds)) != len(worlds):
            raise ModelError("duplicate world ids")
        agents = tuple(dict.fromkeys(self.agents))
        for a in agents:
            if not IDENT_RE.fullmatch(a):
                raise ModelError(f"invalid agent name {a!r}")
        wset = set(worlds)
        rel = {}
        for a, pairs in self.relations.items():
            if a not in agents:
                raise ModelError(f"relation given for undeclared agent {a!r}")
            pairs = frozenset((u, v) for u, v in pairs)
            for u, v in pairs:
                if u not in wset or v not in wset:
                    bad = u if u not in wset else v
                    raise ModelError(f"relation {a!r} mentions unknown world {bad!r}")
            rel[a] = pairs
        for a in agents:
            rel.setdefault(a, frozenset())
        val = {w: frozenset() for w in worlds}
        for w, props in self.valuation.items():
            if w not in wset:
                raise ModelError(f"valuation mentions unknown world {w!r}")
            val[w] = frozenset(props)
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "valuation", val)

    @cached_property
    def world_set(self) -> frozenset[str]:
        return frozenset(self.worlds)

    @cached_property
    def successors(self) -> dict[str, dict[str, frozenset[str]]]:
        """``successors[a][w]`` is R_a(w)."""
        out = {}
        for a in self.agents:
            succ = {w: set() for w in self.worlds}
            for u, v in self.relations[a]:
                succ[u].add(v)
            out[a] = {w: frozenset(s) for w, s in succ.items()}
        return out

    @cached_property
    def predecessors(self) -> dict[str, frozenset[str]]:
        """Union over agents of the inverse relations."""
        pred = {w: set() for w in self.worlds}
        for pairs in self.relations.values():
            for u, v in pairs:
                pred[v].add(u)
        return {w: frozenset(s) for w, s in pred.items()}

    @cached_property
    def atoms(self) -> frozenset[str]:
        return frozenset().union(*self.valuation.values()) if self.worlds else frozenset()

    def extension(self, atom: str) -> frozenset[str]:
        return frozenset(w for w in self.worlds if atom in self.valuation[w])

    def with_relations(self, relations: Mapping[str, Iterable[tuple[str, str]]]) -> Model:
        return Model(self.worlds, self.agents, relations, self.valuation)

    def to_doc(self) -> dict:
        index = {w: i for i, w in enumerate(self.worlds)}
        return {
            "worlds": list(self.worlds),
            "agents": list(self.agents),
            "relations": {a: [list(p) for p in sorted(self.relations[a],
                                                      key=lambda p: (index[p[0]], index[p[1]]))]
                          for a in self.agents},
            "valuation": {w: sorted(self.valuation[w]) for w in self.worlds},
        }


def load_model(doc) -> Model:
    """Build a validated model from a JSON document (dict, JSON text or path)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    unknown = set(doc) - {"worlds", "agents", "relations", "valuation"}
    if unknown:
        raise ModelError(f"unknown keys in model document: {sorted(unknown)}")
    worlds = doc.get("worlds")
    if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
        raise ModelError("'worlds' must be a list of strings")
    if not worlds:
        raise ModelError("a model needs at least one world")
    agents = doc.get("agents", [])
    if not isinstance(agents, list) or not all(isinstance(a, str) for a in agents):
        raise ModelError("'agents' must be a list of strings")
    relations = doc.get("relations", {})
    if not isinstance(relations, dict):
        raise ModelError("'relations' must be an object")
    rel = {}
    for a, pairs in relations.items():
        if not isinstance(pairs, list):
            raise ModelError(f"relation {a!r} must be a list of pairs")
        for p in pairs:
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
                raise ModelError(f"relation {a!r} has a malformed pair {p!r}")
        rel[a] = [tuple(p) for p in pairs]
    valuation = doc.get("valuation", {})
    if not isinstance(valuation, dict):
        raise ModelError("'valuation' must be an object")
    for w, props in valuation.items():
        if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
            raise ModelError(f"valuation of {w!r} must be a list of strings")
    return Model(tuple(worlds), tuple(agents), rel, valuation)


def read_model(path) -> Model:
    with open(path) as fh:
        return load_model(json.load(fh))


def reachable(model: Model, w: str, reflexive: bool = False) -> frozenset[str]:
    """Worlds reachable from ``w`` in one or more steps of any agent's relation."""
    seen = set()
    todo = deque([w])
    while todo:
        u = todo.popleft()
        for a in model.agents:
            for v in model.successors[a][u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    if reflexive:
        seen.add(w)
    return frozenset(seen)


def backward_closure(model: Model, targets: Iterable[str]) -> frozenset[str]:
    """Worlds with a path of length >= 1 into ``targets``."""
    seen = set()
    todo = deque(targets)
    while todo:
        v = todo.popleft()
        for u in model.predecessors[v]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return frozenset(seen)


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset[str], ...]
    block_of: Mapping[str, int]

    def __len__(self):
        return len(self.blocks)

    def same_block(self, u: str, v: str) -> bool:
        return self.block_of[u] == self.block_of[v]


def bisim_partition(model: Model) -> Partition:
    """Coarsest bisimulation on ``model`` by signature refinement.

    Blocks are numbered by first occurrence in ``model.worlds``.
    """
    def renumber(keys):
        ids = {}
        return {w: ids.setdefault(keys[w], len(ids)) for w in model.worlds}, len(ids)

    block, count = renumber({w: model.valuation[w] for w in model.worlds})
    while True:
        sig = {
            w: (block[w],) + tuple(frozenset(block[v] for v in model.successors[a][w])
                                   for a in model.agents)
            for w in model.worlds
        }
        new_block, new_count = renumber(sig)
        if new_count == count:
            break
        block, count = new_block, new_count
    members = [[] for _ in range(count)]
    for w in model.worlds:
        members[block[w]].append(w)
    return Partition(tuple(frozenset(m) for m in members), block)


def quotient(model: Model, partition: Partition | None = None) -> tuple[Model, dict[str, str]]:
    """Collapse each block to its first world.

    Returns the quotient model and the map from original world to quotient world.
    """
    if partition is None:
        partition = bisim_partition(model)
    rep = {}
    for w in model.worlds:
        rep.setdefault(partition.block_of[w], w)
    for w in model.worlds:
        if model.valuation[w] != model.valuation[rep[partition.block_of[w]]]:
            raise ModelError("partition is not valuation-respecting")
    to_rep = {w: rep[partition.block_of[w]] for w in model.worlds}
    worlds = tuple(rep[i] for i in range(len(partition.blocks)))
    relations = {a: {(to_rep[u], to_rep[v]) for u, v in model.relations[a]} for a in model.agents}
    valuation = {w: model.valuation[w] for w in worlds}
    return Model(worlds, model.agents, relations, valuation), to_rep
