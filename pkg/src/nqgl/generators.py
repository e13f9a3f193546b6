"""Random finite models and formula corpora for property testing."""

from __future__ import annotations

import itertools
import os
import random

from .kripke import Frame, KripkeModel, transitive_closure
from .syntax import (
    And, Atom, BOT, Box, Formula, Implies, Not, PredicateSymbol, TOP, atoms_of, modal_depth, size,
)

ELEMENTS = ("d0", "d1", "d2")


def seeded_rng(default: int = 0) -> random.Random:
    """RNG seeded from ``NQGL_SEED`` when set."""
    return random.Random(int(os.environ.get("NQGL_SEED", default)))


def random_model(rng: random.Random, symbols, max_worlds: int = 5, max_domain: int = 3,
                 edge_prob: float = 0.4) -> KripkeModel:
    """Transitive acyclic frame with expanding domains.

    Edges only run from lower to higher labels, so the frame is acyclic
    before and after closure.  Each world's domain contains the domains of
    its predecessors.
    """
    n = rng.randint(1, max_worlds)
    worlds = [f"w{i}" for i in range(n)]
    raw = {(worlds[i], worlds[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_prob}
    edges = transitive_closure(raw)
    pool = ELEMENTS[:max_domain]
    domains: dict = {}
    for j, w in enumerate(worlds):
        inherited = set()
        for i in range(j):
            if (worlds[i], w) in edges:
                inherited |= domains[worlds[i]]
        extra = {d for d in pool if rng.random() < 0.4}
        dom = inherited | extra
        if not dom:
            dom = {rng.choice(pool)}
        domains[w] = dom
    interp: dict = {}
    for w in worlds:
        preds: dict = {}
        dom = sorted(domains[w])
        for sym in symbols:
            tuples = [t for t in itertools.product(dom, repeat=sym.arity) if rng.random() < 0.5]
            preds.setdefault(sym.name, []).extend(tuples)
        interp[w] = preds
    return KripkeModel(Frame(worlds, edges), {w: sorted(d) for w, d in domains.items()}, interp)


def symbols_of(formulas) -> list:
    out = {a.symbol for f in formulas for a in atoms_of(f)}
    return sorted(out, key=lambda s: (s.name, s.arity))


def random_propositional(rng: random.Random, atoms=("P", "Q"), max_size: int = 12,
                         max_modal_depth: int = 2) -> Formula:
    """Rejection-sample a formula within the size and modal depth limits."""
    leaves = [Atom(a, ()) for a in atoms] + [TOP, BOT]

    def gen(budget: int, md: int) -> Formula:
        if budget <= 1:
            return rng.choice(leaves)
        r = rng.random()
        if r < 0.2:
            return rng.choice(leaves)
        if r < 0.35:
            return Not(gen(budget - 1, md))
        if r < 0.55 and md > 0:
            return Box(gen(budget - 1, md - 1))
        left = rng.randint(1, max(1, budget - 2))
        ctor = And if rng.random() < 0.4 else Implies
        return ctor(gen(left, md), gen(budget - 1 - left, md))

    while True:
        f = gen(rng.randint(1, max_size), max_modal_depth)
        if size(f) <= max_size and modal_depth(f) <= max_modal_depth:
            return f


def propositional_corpus(n: int, seed: int = 0, **kw) -> list:
    rng = random.Random(seed)
    seen: set = set()
    out: list = []
    while len(out) < n:
        f = random_propositional(rng, **kw)
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


__all__ = [
    "PredicateSymbol", "random_model", "random_propositional", "propositional_corpus", "seeded_rng", "symbols_of",
]
