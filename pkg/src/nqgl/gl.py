"""Decision procedure for propositional GL.

Backward search in a G3-style calculus whose only modal rule is the GL rule

    box G, G, box A |- A
    --------------------   (context on both sides may be present below)
    box G |- box A

Propositional rules are invertible, so the search commits to them.  At a
leaf where only atoms and boxed formulas remain, the GL rule is tried once
for each boxed succedent formula.  Every application adds ``box A`` to the
boxed antecedents, so the set of boxed antecedents strictly grows along a
branch and the search halts.  A failed search yields a finite transitive
irreflexive countermodel whose worlds are the failed saturated leaves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .kripke import Frame, KripkeModel, classify_frame, refutes_sequent, transitive_closure, validate_model
from .syntax import (
    And, Atom, Bot, Box, Formula, Implies, Not, Sequent, TOP, Top,
    is_propositional, sort_key, subformulas, unbox_set,
)
from .kernel import _shared_context


class GLRule(str, enum.Enum):
    AX = "gl-ax"
    TOP_R = "gl-top"
    BOT_L = "gl-bot"
    AND_L = "gl-and-l"
    AND_R = "gl-and-r"
    IMP_L = "gl-imp-l"
    IMP_R = "gl-imp-r"
    NEG_L = "gl-neg-l"
    NEG_R = "gl-neg-r"
    GLR = "gl-box"


_GL_ARITY = {
    GLRule.AX: 0, GLRule.TOP_R: 0, GLRule.BOT_L: 0, GLRule.AND_L: 1, GLRule.AND_R: 2,
    GLRule.IMP_L: 2, GLRule.IMP_R: 1, GLRule.NEG_L: 1, GLRule.NEG_R: 1, GLRule.GLR: 1,
}


@dataclass(frozen=True, eq=False)
class GLProof:
    rule: GLRule
    conclusion: Sequent
    premises: tuple = ()
    principal: Formula | None = None
    boxed: frozenset | None = None  # GL rule only: the boxed context kept

    def __post_init__(self):
        object.__setattr__(self, "rule", GLRule(self.rule))
        object.__setattr__(self, "premises", tuple(self.premises))

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


@dataclass(frozen=True)
class Countermodel:
    model: KripkeModel
    world: str


@dataclass(frozen=True)
class GLVerdict:
    sequent: Sequent
    proof: GLProof | None = None
    countermodel: Countermodel | None = None
    stats: dict = field(default_factory=dict)

    @property
    def provable(self) -> bool:
        return self.proof is not None


class NotPropositional(ValueError):
    pass


# --------------------------------------------------------------------------
# proof checking for the GL calculus


def check_gl_proof(p: GLProof, path: tuple = ()) -> str | None:
    """None if ``p`` is a correct derivation, else a message naming the node."""
    where = "root" + "".join(f".{i}" for i in path)
    if len(p.premises) != _GL_ARITY[p.rule]:
        return f"{where} [{p.rule.value}]: wrong number of premises"
    msg = _check_gl_node(p)
    if msg:
        return f"{where} [{p.rule.value}]: {msg}"
    for i, q in enumerate(p.premises):
        msg = check_gl_proof(q, path + (i,))
        if msg:
            return msg
    return None


def _check_gl_node(p: GLProof) -> str | None:
    c = p.conclusion
    f = p.principal
    prem = [q.conclusion for q in p.premises]
    r = p.rule
    if not all(is_propositional(x) for x in c.formulas()):
        return "non-propositional formula"
    if r is GLRule.AX:
        return None if c.ante & c.succ else "no formula occurs on both sides"
    if r is GLRule.TOP_R:
        return None if Top() in c.succ else "T not in the succedent"
    if r is GLRule.BOT_L:
        return None if Bot() in c.ante else "F not in the antecedent"
    if f is None:
        return "principal formula missing"
    fs = frozenset([f])

    def one(princ_l=(), princ_r=(), side_l=(), side_r=()):
        return (_shared_context(c.ante, frozenset(princ_l), [prem[0].ante], [frozenset(side_l)])
                and _shared_context(c.succ, frozenset(princ_r), [prem[0].succ], [frozenset(side_r)]))

    if r is GLRule.AND_L and type(f) is And:
        return None if one(princ_l=fs, side_l=[f.left, f.right]) else "premise mismatch"
    if r is GLRule.IMP_R and type(f) is Implies:
        return None if one(princ_r=fs, side_l=[f.left], side_r=[f.right]) else "premise mismatch"
    if r is GLRule.NEG_L and type(f) is Not:
        return None if one(princ_l=fs, side_r=[f.body]) else "premise mismatch"
    if r is GLRule.NEG_R and type(f) is Not:
        return None if one(princ_r=fs, side_l=[f.body]) else "premise mismatch"
    if r is GLRule.AND_R and type(f) is And:
        ok = (_shared_context(c.ante, frozenset(), [prem[0].ante, prem[1].ante], [frozenset(), frozenset()])
              and _shared_context(c.succ, fs, [prem[0].succ, prem[1].succ], [frozenset([f.left]), frozenset([f.right])]))
        return None if ok else "premise mismatch"
    if r is GLRule.IMP_L and type(f) is Implies:
        ok = (_shared_context(c.ante, fs, [prem[0].ante, prem[1].ante], [frozenset(), frozenset([f.right])])
              and _shared_context(c.succ, frozenset(), [prem[0].succ, prem[1].succ], [frozenset([f.left]), frozenset()]))
        return None if ok else "premise mismatch"
    if r is GLRule.GLR and type(f) is Box:
        if f not in c.succ:
            return "boxed goal not in the succedent"
        boxed = p.boxed
        if boxed is None:
            return "boxed context missing"
        if not boxed <= c.ante or any(type(x) is not Box for x in boxed):
            return "boxed context is not a set of boxed antecedents"
        want = Sequent(boxed | unbox_set(boxed) | {f}, frozenset([f.body]))
        return None if prem[0] == want else "premise is not box G, G, box A |- A"
    return f"principal formula does not fit rule {r.value}"


# --------------------------------------------------------------------------
# search


@dataclass
class _Failure:
    """A saturated leaf together with the failures of its GL-rule premises."""

    leaf: Sequent
    children: list


class GLProver:
    def __init__(self):
        self._memo: dict = {}
        self.max_glr_depth = 0
        self.nodes = 0

    def search(self, s: Sequent, glr_depth: int = 0, ancestors: frozenset = frozenset()):
        key = (s.ante, s.succ)
        if key in self._memo:
            return self._memo[key]
        self.nodes += 1
        res = self._search(s, glr_depth, ancestors)
        self._memo[key] = res
        return res

    def _search(self, s: Sequent, depth: int, ancestors: frozenset):
        ante, succ = s.ante, s.succ
        shared = ante & succ
        if shared:
            return GLProof(GLRule.AX, s, principal=min(shared, key=sort_key))
        if TOP in succ:
            return GLProof(GLRule.TOP_R, s)
        if Bot() in ante:
            return GLProof(GLRule.BOT_L, s)
        for f in sorted(ante, key=sort_key):
            t = type(f)
            rest = ante - {f}
            if t is Not:
                return self._unary(GLRule.NEG_L, s, f, Sequent(rest, succ | {f.body}), depth, ancestors)
            if t is And:
                return self._unary(GLRule.AND_L, s, f, Sequent(rest | {f.left, f.right}, succ), depth, ancestors)
            if t is Implies:
                return self._binary(GLRule.IMP_L, s, f, Sequent(rest, succ | {f.left}),
                                    Sequent(rest | {f.right}, succ), depth, ancestors)
        for f in sorted(succ, key=sort_key):
            t = type(f)
            rest = succ - {f}
            if t is Not:
                return self._unary(GLRule.NEG_R, s, f, Sequent(ante | {f.body}, rest), depth, ancestors)
            if t is Implies:
                return self._unary(GLRule.IMP_R, s, f, Sequent(ante | {f.left}, rest | {f.right}), depth, ancestors)
            if t is And:
                return self._binary(GLRule.AND_R, s, f, Sequent(ante, rest | {f.left}),
                                    Sequent(ante, rest | {f.right}), depth, ancestors)
        # saturated: only atoms, T on the left, F on the right and boxes remain
        boxed = frozenset(f for f in ante if type(f) is Box)
        children = []
        for goal in sorted((f for f in succ if type(f) is Box), key=sort_key):
            prem = Sequent(boxed | unbox_set(boxed) | {goal}, frozenset([goal.body]))
            key = (prem.ante, prem.succ)
            if key in ancestors:
                # unreachable: the boxed antecedents strictly grow
                continue
            self.max_glr_depth = max(self.max_glr_depth, depth + 1)
            res = self.search(prem, depth + 1, ancestors | {key})
            if isinstance(res, GLProof):
                return GLProof(GLRule.GLR, s, (res,), principal=goal, boxed=boxed)
            children.append(res)
        return _Failure(s, children)

    def _unary(self, rule, s, f, prem, depth, ancestors):
        res = self.search(prem, depth, ancestors)
        if isinstance(res, GLProof):
            return GLProof(rule, s, (res,), principal=f)
        return res

    def _binary(self, rule, s, f, p1, p2, depth, ancestors):
        r1 = self.search(p1, depth, ancestors)
        if not isinstance(r1, GLProof):
            return r1
        r2 = self.search(p2, depth, ancestors)
        if not isinstance(r2, GLProof):
            return r2
        return GLProof(rule, s, (r1, r2), principal=f)


def decide(s: Sequent | Formula) -> GLVerdict:
    """Prove ``s`` in the GL calculus or return a finite countermodel."""
    if isinstance(s, Formula):
        s = Sequent.of([], [s])
    for f in s.formulas():
        if not is_propositional(f):
            raise NotPropositional(f"not a propositional formula: {f}")
    prover = GLProver()
    res = prover.search(s)
    stats = {"nodes": prover.nodes, "max_glr_depth": prover.max_glr_depth}
    if isinstance(res, GLProof):
        return GLVerdict(s, proof=res, stats=stats)
    model, root = countermodel_from_failure(res)
    return GLVerdict(s, countermodel=Countermodel(model, root), stats=stats)


def countermodel_from_failure(root: _Failure) -> tuple[KripkeModel, str]:
    """Worlds are the distinct failed leaves; R is the closure of the descent."""
    ids: dict = {}
    order: list = []
    edges: set = set()
    todo = [root]
    while todo:
        node = todo.pop(0)
        key = (node.leaf.ante, node.leaf.succ)
        if key in ids:
            continue
        ids[key] = f"w{len(order)}"
        order.append(node)
        todo.extend(node.children)
    for node in order:
        a = ids[(node.leaf.ante, node.leaf.succ)]
        for ch in node.children:
            edges.add((a, ids[(ch.leaf.ante, ch.leaf.succ)]))
    worlds = [ids[(n.leaf.ante, n.leaf.succ)] for n in order]
    interp = {
        ids[(n.leaf.ante, n.leaf.succ)]: {f.pred: [()] for f in n.leaf.ante if type(f) is Atom}
        for n in order
    }
    model = KripkeModel(Frame(worlds, transitive_closure(edges)), {w: ["d0"] for w in worlds}, interp)
    return model, worlds[0]


def certify(v: GLVerdict, s: Sequent | None = None) -> str | None:
    """None when the verdict's evidence checks out, else the reason it does not."""
    s = v.sequent if s is None else s
    if isinstance(s, Formula):
        s = Sequent.of([], [s])
    if v.proof is not None:
        if v.proof.conclusion != s:
            return "proof concludes a different sequent"
        return check_gl_proof(v.proof)
    if v.countermodel is None:
        return "verdict carries no evidence"
    m, w = v.countermodel.model, v.countermodel.world
    problems = validate_model(m)
    if problems:
        return "invalid model: " + "; ".join(problems)
    rep = classify_frame(m.frame)
    if not rep.transitive:
        return "countermodel frame is not transitive"
    if not rep.irreflexive:
        return "countermodel frame is not irreflexive"
    if not rep.bounded_length:
        return "countermodel frame is not of bounded length"
    if not refutes_sequent(m, w, s):
        return f"world {w} does not refute the sequent"
    return None


def boxed_subformula_count(s: Sequent) -> int:
    return len({g for f in s.formulas() for g in subformulas(f) if type(g) is Box})
