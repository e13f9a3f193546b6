"""Finite predicate Kripke models over expanding domains."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import (
    Atom, Formula, Sequent, Var, diamond_tower, free_vars, Not,
    And, Implies, Box, ForAll, Top, Bot, SymDia,
)


class ModelError(ValueError):
    pass


class UnboundVariable(ModelError):
    pass


class NoWitness(ModelError):
    """A cycle is reachable, so no diamond tower ever fails."""


@dataclass(frozen=True)
class Frame:
    worlds: tuple
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        if not self.worlds:
            raise ModelError("a frame needs at least one world")

    def successors(self, w) -> list:
        return [v for v in self.worlds if (w, v) in self.edges]


@dataclass(frozen=True)
class KripkeModel:
    """``interp[w][P]`` is a set of argument tuples.

    A predicate symbol is a name together with an arity, so ``P`` and
    ``P(x)`` are independent: their tuples simply differ in length.
    """

    frame: Frame
    domains: Mapping
    interp: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "domains", {w: frozenset(d) for w, d in self.domains.items()})
        object.__setattr__(
            self, "interp",
            {w: {p: frozenset(tuple(t) for t in ts) for p, ts in preds.items()} for w, preds in self.interp.items()},
        )
        object.__setattr__(self, "_succ", {w: tuple(self.frame.successors(w)) for w in self.frame.worlds})

    @property
    def worlds(self):
        return self.frame.worlds

    def successors(self, w) -> tuple:
        return self._succ[w]

    def holds(self, w, pred: str, args: tuple) -> bool:
        return args in self.interp.get(w, {}).get(pred, ())


def validate_model(m: KripkeModel) -> list[str]:
    """All violations of domain monotonicity and interpretation typing."""
    problems = []
    worlds = set(m.worlds)
    for a, b in sorted(m.frame.edges, key=repr):
        if a not in worlds or b not in worlds:
            problems.append(f"edge ({a},{b}) mentions an unknown world")
    for w in m.worlds:
        if w not in m.domains or not m.domains[w]:
            problems.append(f"domain of {w} is missing or empty")
    for a, b in sorted(m.frame.edges, key=repr):
        if a in m.domains and b in m.domains and not m.domains[a] <= m.domains[b]:
            missing = sorted(m.domains[a] - m.domains[b], key=repr)
            problems.append(f"domains not monotone along ({a},{b}): {missing} missing at {b}")
    for w in sorted(m.interp, key=repr):
        if w not in worlds:
            problems.append(f"interpretation given for unknown world {w}")
            continue
        dom = m.domains.get(w, frozenset())
        for p in sorted(m.interp[w]):
            for tup in sorted(m.interp[w][p], key=repr):
                bad = [d for d in tup if d not in dom]
                if bad:
                    problems.append(f"I({w},{p}) contains {list(tup)} outside D_{w}")
    return problems


def forces(m: KripkeModel, w, phi: Formula, env: Mapping | None = None) -> bool:
    """Truth of ``phi`` at world ``w`` under the variable assignment ``env``."""
    env = {} if env is None else env
    t = type(phi)
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Atom:
        try:
            args = tuple(env[a] for a in phi.args)
        except KeyError as e:
            raise UnboundVariable(f"free variable {e.args[0]} has no value") from None
        return m.holds(w, phi.pred, args)
    if t is And:
        return forces(m, w, phi.left, env) and forces(m, w, phi.right, env)
    if t is Implies:
        return (not forces(m, w, phi.left, env)) or forces(m, w, phi.right, env)
    if t is Not:
        return not forces(m, w, phi.body, env)
    if t is ForAll:
        inner = dict(env)
        for d in m.domains[w]:
            inner[phi.var] = d
            if not forces(m, w, phi.body, inner):
                return False
        return True
    if t is Box:
        return all(forces(m, v, phi.body, env) for v in m.successors(w))
    if t is SymDia:
        raise ModelError("symbolic towers have no truth value")
    raise TypeError(f"not a formula: {phi!r}")


def assignments(m: KripkeModel, w, variables: Iterable[Var]):
    """Every assignment of ``variables`` into ``D_w``."""
    vs = sorted(variables)
    dom = sorted(m.domains[w], key=repr)
    for values in itertools.product(dom, repeat=len(vs)):
        yield dict(zip(vs, values))


def valid_at(m: KripkeModel, w, phi: Formula) -> bool:
    return all(forces(m, w, phi, env) for env in assignments(m, w, free_vars(phi)))


def valid_in_model(m: KripkeModel, phi: Formula) -> bool:
    """Truth of the universal closure of ``phi`` at every world."""
    return all(valid_at(m, w, phi) for w in m.worlds)


def refutes_sequent(m: KripkeModel, w, s: Sequent, env: Mapping | None = None) -> bool:
    """Some assignment makes every antecedent true and every succedent false at ``w``.

    With ``env`` given only that assignment is tried.
    """
    envs = [env] if env is not None else assignments(m, w, s.free_vars())
    for e in envs:
        if all(forces(m, w, f, e) for f in s.ante) and not any(forces(m, w, f, e) for f in s.succ):
            return True
    return False


# --------------------------------------------------------------------------
# Frame classification


@dataclass(frozen=True)
class FrameClassReport:
    transitive: bool
    irreflexive: bool
    conversely_well_founded: bool
    bounded_length: bool
    height: dict  # world -> longest outgoing path length; None below a cycle

    def as_dict(self) -> dict:
        return {
            "transitive": self.transitive,
            "irreflexive": self.irreflexive,
            "conversely_well_founded": self.conversely_well_founded,
            "bounded_length": self.bounded_length,
            "height": {str(k): v for k, v in self.height.items()},
        }


def reachable(frame: Frame, w) -> set:
    """Worlds reachable from ``w`` by one or more edges."""
    seen: set = set()
    todo = list(frame.successors(w))
    while todo:
        v = todo.pop()
        if v not in seen:
            seen.add(v)
            todo.extend(frame.successors(v))
    return seen


def heights(frame: Frame) -> dict:
    """Longest path length (in edges) from each world; None if a cycle is reachable."""
    reach = {w: reachable(frame, w) for w in frame.worlds}
    cyclic = {w for w in frame.worlds if w in reach[w]}
    out: dict = {}

    def h(w):
        if w not in out:
            if w in cyclic or reach[w] & cyclic:
                out[w] = None
            else:
                out[w] = max((h(v) + 1 for v in frame.successors(w)), default=0)
        return out[w]

    for w in frame.worlds:
        h(w)
    return out


def classify_frame(frame: Frame) -> FrameClassReport:
    e = frame.edges
    transitive = all((a, c) in e for (a, b) in e for (b2, c) in e if b == b2)
    irreflexive = all(a != b for a, b in e)
    h = heights(frame)
    acyclic = all(v is not None for v in h.values())
    # on a finite frame, an infinite ascending chain exists iff there is a
    # cycle, and path lengths are bounded iff there is no cycle
    return FrameClassReport(transitive, irreflexive, acyclic, acyclic, h)


def boundedness_witness(m: KripkeModel, w) -> int:
    """Least ``n`` such that ``~dia^n T`` holds at ``w``."""
    h = heights(m.frame)
    if h[w] is None:
        raise NoWitness(f"a cycle is reachable from {w}")
    n = 0
    while forces(m, w, diamond_tower(n)):
        n += 1
    return n


def transitive_closure(edges: Iterable[tuple]) -> frozenset:
    closure = set(edges)
    while True:
        extra = {(a, d) for (a, b) in closure for (c, d) in closure if b == c} - closure
        if not extra:
            return frozenset(closure)
        closure |= extra


# --------------------------------------------------------------------------
# JSON model files


def model_to_json(m: KripkeModel) -> dict:
    return {
        "worlds": [str(w) for w in m.worlds],
        "edges": [[str(a), str(b)] for a, b in sorted(m.frame.edges, key=lambda e: (str(e[0]), str(e[1])))],
        "domains": {str(w): sorted(str(d) for d in m.domains[w]) for w in m.worlds},
        "interp": {
            str(w): {p: sorted([str(d) for d in tup] for tup in ts) for p, ts in sorted(m.interp.get(w, {}).items()) if ts}
            for w in m.worlds
        },
    }


def model_from_json(data: Mapping) -> KripkeModel:
    try:
        worlds = [str(w) for w in data["worlds"]]
        edges = [(str(a), str(b)) for a, b in data.get("edges", [])]
        domains = {str(w): [str(d) for d in ds] for w, ds in data["domains"].items()}
        interp = {
            str(w): {str(p): [tuple(str(d) for d in tup) for tup in ts] for p, ts in preds.items()}
            for w, preds in data.get("interp", {}).items()
        }
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed model file: {e}") from None
    return KripkeModel(Frame(worlds, edges), domains, interp)


def load_model(path) -> KripkeModel:
    with open(path) as fh:
        return model_from_json(json.load(fh))


def describe_world(m: KripkeModel, w) -> str:
    facts = []
    for p, ts in sorted(m.interp.get(w, {}).items()):
        for tup in sorted(ts):
            facts.append(f"{p}({','.join(map(str, tup))})" if tup else p)
    return f"{w}: D={sorted(m.domains[w], key=str)} true={facts}"
