"""Bounded backward proof search in the cut-free fragment.

Rules are applied cumulatively: a premise keeps the principal formula, so
every propositional and quantifier step is invertible and the search may
commit to the first applicable one.  Only the box rule discards context; it
is tried for each boxed succedent formula in turn, keeping every boxed
antecedent both boxed and unboxed in the premise.

``depth`` bounds the number of box and quantifier steps along a branch.
Propositional steps are free; they terminate by the subformula property.
The search never applies the Boundedness-of-length rule, so a ``None``
answer means "no proof within the bound", not "unprovable".
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import Proof, Rule, box_rule, axiom, weaken_to
from .syntax import (
    And, Bot, Box, ForAll, Implies, Not, Sequent, TOP, Var, sort_key, substitute,
    unbox_set, CaptureError,
)


class SearchExhausted(Exception):
    """The node budget ran out before the search finished."""


@dataclass
class SearchStats:
    nodes: int = 0
    exhausted: bool = False


class ProofSearch:
    def __init__(self, depth: int, max_nodes: int = 200_000):
        self.depth = depth
        self.max_nodes = max_nodes
        self.stats = SearchStats()
        self._proved: dict = {}
        self._failed: dict = {}  # (ante, succ) -> largest budget known to fail
        self._active: set = set()

    def prove(self, s: Sequent) -> Proof | None:
        try:
            return self._prove(s.ante, s.succ, self.depth, frozenset())
        except SearchExhausted:
            self.stats.exhausted = True
            return None

    # ------------------------------------------------------------------

    def _prove(self, ante: frozenset, succ: frozenset, budget: int, done: frozenset) -> Proof | None:
        key = (ante, succ)
        if key in self._proved:
            return self._proved[key]
        if self._failed.get(key, -1) >= budget or key in self._active:
            return None
        self.stats.nodes += 1
        if self.stats.nodes > self.max_nodes:
            raise SearchExhausted
        self._active.add(key)
        try:
            p = self._expand(ante, succ, budget, done)
        finally:
            self._active.discard(key)
        if p is None:
            self._failed[key] = max(budget, self._failed.get(key, -1))
        else:
            self._proved[key] = p
        return p

    def _expand(self, ante, succ, budget, done) -> Proof | None:
        seq = Sequent(ante, succ)
        shared = ante & succ
        if shared:
            return weaken_to(axiom(min(shared, key=sort_key)), seq)
        if TOP in succ:
            return weaken_to(Proof(Rule.AXIOM_TOP, Sequent.of([], [TOP])), seq)
        if Bot() in ante:
            return weaken_to(Proof(Rule.AXIOM_BOT, Sequent.of([Bot()], [])), seq)

        left = sorted(ante, key=sort_key)
        right = sorted(succ, key=sort_key)

        # invertible propositional steps
        for f in left:
            t = type(f)
            if t is Not and f.body not in succ:
                return self._unary(Rule.NEG_L, seq, f, ante, succ | {f.body}, budget, done)
            if t is And:
                if f.left not in ante:
                    return self._unary(Rule.AND_L1, seq, f, ante | {f.left}, succ, budget, done)
                if f.right not in ante:
                    return self._unary(Rule.AND_L2, seq, f, ante | {f.right}, succ, budget, done)
            if t is Implies and f.left not in succ and f.right not in ante:
                p1 = self._prove(ante, succ | {f.left}, budget, done)
                if p1 is None:
                    return None
                p2 = self._prove(ante | {f.right}, succ, budget, done)
                if p2 is None:
                    return None
                return Proof(Rule.IMP_L, seq, (p1, p2), {"principal": f})
        for f in right:
            t = type(f)
            if t is Not and f.body not in ante:
                return self._unary(Rule.NEG_R, seq, f, ante | {f.body}, succ, budget, done)
            if t is And and f.left not in succ and f.right not in succ:
                p1 = self._prove(ante, succ | {f.left}, budget, done)
                if p1 is None:
                    return None
                p2 = self._prove(ante, succ | {f.right}, budget, done)
                if p2 is None:
                    return None
                return Proof(Rule.AND_R, seq, (p1, p2), {"principal": f})
            if t is Implies and not (f.left in ante and f.right in succ):
                return self._unary(Rule.IMP_R, seq, f, ante | {f.left}, succ | {f.right}, budget, done)

        if budget <= 0:
            return None

        # quantifier steps, each costing one unit of depth
        for f in right:
            if type(f) is ForAll and f not in done:
                y = Var(max((v.index for v in seq.vars()), default=-1) + 1)
                inst = substitute(f.body, y, f.var)
                p = self._prove(ante, succ | {inst}, budget - 1, done | {f})
                if p is None:
                    return None
                return Proof(Rule.ALL_R, seq, (p,), {"eigen": y, "principal": f})
        terms = sorted(seq.free_vars()) or [Var(max((v.index for v in seq.vars()), default=-1) + 1)]
        for f in left:
            if type(f) is ForAll:
                for z in terms:
                    try:
                        inst = substitute(f.body, z, f.var)
                    except CaptureError:
                        continue
                    if inst not in ante:
                        p = self._prove(ante | {inst}, succ, budget - 1, done)
                        if p is None:
                            return None
                        return Proof(Rule.ALL_L, seq, (p,), {"witness": z, "principal": f})

        # the only non-invertible step
        boxed = unbox_set(ante)
        prem_ante = frozenset(Box(b) for b in boxed) | boxed
        for f in right:
            if type(f) is Box:
                p = self._prove(prem_ante, frozenset([f.body]), budget - 1, frozenset())
                if p is not None:
                    return weaken_to(box_rule(p, boxed, boxed), seq)
        return None

    def _unary(self, rule, seq, principal, ante, succ, budget, done):
        p = self._prove(ante, succ, budget, done)
        if p is None:
            return None
        return Proof(rule, seq, (p,), {"principal": principal})


def bounded_prove(s: Sequent, depth: int, max_nodes: int = 200_000) -> Proof | None:
    return ProofSearch(depth, max_nodes).prove(s)


def is_provable(s: Sequent, depth: int, max_nodes: int = 200_000) -> bool:
    return bounded_prove(s, depth, max_nodes) is not None
