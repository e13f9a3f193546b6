"""Proof objects for NQGL and a rule-by-rule checker.

Sequents are pairs of sets, so a rule's principal formula may also survive
in the premise context.  The checker therefore asks whether *some* choice of
contexts makes a node an instance of its rule rather than demanding one
literal shape; see :func:`_shared_context` and :func:`_split_context`.

The Boundedness-of-length rule has one premise for every ``n``.  A node using
it carries a :class:`SchematicCertificate`: a single proof template whose
formulas may contain the symbolic tower ``dia^(n) A``.  The certificate is
accepted when a symbolic pass checks the template with the exponent left
opaque and every instance up to a bound ``K`` re-checks concretely.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

from .syntax import (
    And, Atom, Bot, Box, CaptureError, ForAll, Formula, Implies, Not, Sequent, SymDia, TOP, Top, Var,
    box_set, diamond_tower, has_symbolic, instantiate_symbolic, substitute, vars_of,
)


class Rule(str, enum.Enum):
    AXIOM_ID = "axiom-id"
    AXIOM_TOP = "axiom-top"
    AXIOM_BOT = "axiom-bot"
    SET = "set"
    CUT = "cut"
    AND_R = "and-r"
    AND_L1 = "and-l1"
    AND_L2 = "and-l2"
    IMP_R = "imp-r"
    IMP_L = "imp-l"
    NEG_R = "neg-r"
    NEG_L = "neg-l"
    ALL_R = "all-r"
    ALL_L = "all-l"
    BOX = "box"
    OMEGA = "omega"


PREMISE_COUNT = {
    Rule.AXIOM_ID: 0, Rule.AXIOM_TOP: 0, Rule.AXIOM_BOT: 0,
    Rule.SET: 1, Rule.CUT: 2, Rule.AND_R: 2, Rule.AND_L1: 1, Rule.AND_L2: 1,
    Rule.IMP_R: 1, Rule.IMP_L: 2, Rule.NEG_R: 1, Rule.NEG_L: 1,
    Rule.ALL_R: 1, Rule.ALL_L: 1, Rule.BOX: 1, Rule.OMEGA: 0,
}


@dataclass(frozen=True)
class SchematicCertificate:
    """Finite stand-in for the premises ``Γ -> Δ, dia^k T`` for every k."""

    template: "Proof"
    K: int = 3


@dataclass(frozen=True, eq=False)
class Proof:
    """One node of a proof tree.

    ``ann`` keys by rule: ``box`` needs ``gamma`` and ``delta`` (frozensets of
    formulas), ``all-r`` needs ``eigen``, ``all-l`` needs ``witness``,
    ``cut`` needs ``formula``, ``omega`` needs ``cert``.  Any rule may name
    its ``principal`` formula; otherwise candidates are tried.
    """

    rule: Rule
    conclusion: Sequent
    premises: tuple = ()
    ann: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule(self.rule))
        object.__setattr__(self, "premises", tuple(self.premises))

    def nodes(self):
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.premises))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        return 1 + max((q.height() for q in self.premises), default=0)

    def uses_cut(self) -> bool:
        for p in self.nodes():
            if p.rule is Rule.CUT:
                return True
            if p.rule is Rule.OMEGA and p.ann["cert"].template.uses_cut():
                return True
        return False


@dataclass(frozen=True)
class Rejection:
    path: tuple  # premise indices from the root
    rule: Rule
    reason: str

    def __str__(self):
        where = "root" if not self.path else "root" + "".join(f".{i}" for i in self.path)
        return f"{where} [{self.rule.value}]: {self.reason}"


class CheckError(Exception):
    def __init__(self, rejection: Rejection):
        super().__init__(str(rejection))
        self.rejection = rejection


class _Fail(Exception):
    pass


# --------------------------------------------------------------------------
# context matching


def _shared_context(concl: frozenset, princ: frozenset, prems: list, sides: list) -> bool:
    """Is there one context G with ``concl = G ∪ princ`` and ``prems[i] = G ∪ sides[i]``?"""
    if not princ <= concl:
        return False
    g = concl - princ
    for p, s in zip(prems, sides):
        if not s <= p:
            return False
        g = g | (p - s)
    if not g <= concl:
        return False
    return all(g <= p for p in prems)


def _split_context(concl: frozenset, princ: frozenset, prems: list, sides: list) -> bool:
    """Are there contexts G_i with ``prems[i] = G_i ∪ sides[i]`` and ``concl = ∪G_i ∪ princ``?"""
    lower = set(princ)
    upper = set(princ)
    for p, s in zip(prems, sides):
        if not s <= p:
            return False
        lower |= p - s
        upper |= p
    return lower <= concl and concl <= upper


def _one_premise(concl: Sequent, prem: Sequent, princ_l=(), princ_r=(), side_l=(), side_r=()) -> bool:
    return (
        _shared_context(concl.ante, frozenset(princ_l), [prem.ante], [frozenset(side_l)])
        and _shared_context(concl.succ, frozenset(princ_r), [prem.succ], [frozenset(side_r)])
    )


# --------------------------------------------------------------------------
# the checker


def check_proof(p: Proof, allow_cut: bool = True, *, symbolic: bool = False) -> Rejection | None:
    """Return None if every node of ``p`` is a correct rule instance."""
    try:
        _check(p, allow_cut, symbolic, ())
    except CheckError as e:
        return e.rejection
    return None


def _reject(path, rule, reason):
    raise CheckError(Rejection(tuple(path), rule, reason))


def _check(p: Proof, allow_cut: bool, symbolic: bool, path: tuple) -> None:
    # pre-order: the first failing node from the root is reported
    rule = p.rule
    expected = PREMISE_COUNT[rule]
    if len(p.premises) != expected:
        _reject(path, rule, f"expected {expected} premises, found {len(p.premises)}")
    if not symbolic:
        for f in p.conclusion.formulas():
            if has_symbolic(f):
                _reject(path, rule, "symbolic tower outside a certificate template")
    try:
        _check_node(p, allow_cut, symbolic)
    except _Fail as e:
        _reject(path, rule, str(e))
    except CheckError as e:
        # certificate failure: report at the omega node, naming the template node
        inner = e.rejection
        where = "template" + "".join(f".{i}" for i in inner.path)
        raise CheckError(Rejection(tuple(path), rule,
                                   f"certificate rejected at {where} [{inner.rule.value}]: {inner.reason}")) from None
    for i, q in enumerate(p.premises):
        _check(q, allow_cut, symbolic, path + (i,))


def _candidates(side: frozenset, kind, ann: dict):
    princ = ann.get("principal")
    if princ is not None:
        return [princ] if princ in side and type(princ) is kind else []
    return sorted((f for f in side if type(f) is kind), key=str)


def _check_node(p: Proof, allow_cut: bool, symbolic: bool) -> None:
    c = p.conclusion
    r = p.rule
    prem = [q.conclusion for q in p.premises]
    ann = p.ann

    if r is Rule.AXIOM_ID:
        if len(c.ante) == 1 and c.ante == c.succ:
            return
        raise _Fail("identity axiom must have the form A |- A")
    if r is Rule.AXIOM_TOP:
        if not c.ante and c.succ == {TOP}:
            return
        raise _Fail("top axiom must be |- T")
    if r is Rule.AXIOM_BOT:
        if c.ante == {Bot()} and not c.succ:
            return
        raise _Fail("bottom axiom must be F |-")
    if r is Rule.SET:
        if prem[0].ante <= c.ante and prem[0].succ <= c.succ:
            return
        raise _Fail("premise is not a subsequent of the conclusion")
    if r is Rule.CUT:
        if not allow_cut:
            raise _Fail("cut is not allowed in the cut-free fragment")
        phi = ann.get("formula")
        if phi is None:
            raise _Fail("cut node lacks its cut formula")
        ok = (
            _split_context(c.ante, frozenset(), [prem[0].ante, prem[1].ante], [frozenset(), frozenset([phi])])
            and _split_context(c.succ, frozenset(), [prem[0].succ, prem[1].succ], [frozenset([phi]), frozenset()])
        )
        if ok:
            return
        raise _Fail(f"not a cut on {phi}")
    if r is Rule.AND_R:
        for f in _candidates(c.succ, And, ann):
            if _shared_context(c.ante, frozenset(), [prem[0].ante, prem[1].ante], [frozenset(), frozenset()]) and \
               _shared_context(c.succ, frozenset([f]), [prem[0].succ, prem[1].succ], [frozenset([f.left]), frozenset([f.right])]):
                return
        raise _Fail("no conjunction in the succedent matches the premises")
    if r in (Rule.AND_L1, Rule.AND_L2):
        for f in _candidates(c.ante, And, ann):
            part = f.left if r is Rule.AND_L1 else f.right
            if _one_premise(c, prem[0], princ_l=[f], side_l=[part]):
                return
        raise _Fail("no conjunction in the antecedent matches the premise")
    if r is Rule.IMP_R:
        for f in _candidates(c.succ, Implies, ann):
            if _one_premise(c, prem[0], princ_r=[f], side_l=[f.left], side_r=[f.right]):
                return
        raise _Fail("no implication in the succedent matches the premise")
    if r is Rule.IMP_L:
        for f in _candidates(c.ante, Implies, ann):
            if _split_context(c.ante, frozenset([f]), [prem[0].ante, prem[1].ante], [frozenset(), frozenset([f.right])]) and \
               _split_context(c.succ, frozenset(), [prem[0].succ, prem[1].succ], [frozenset([f.left]), frozenset()]):
                return
        raise _Fail("no implication in the antecedent matches the premises")
    if r is Rule.NEG_R:
        for f in _candidates(c.succ, Not, ann):
            if _one_premise(c, prem[0], princ_r=[f], side_l=[f.body]):
                return
        raise _Fail("no negation in the succedent matches the premise")
    if r is Rule.NEG_L:
        for f in _candidates(c.ante, Not, ann):
            if _one_premise(c, prem[0], princ_l=[f], side_r=[f.body]):
                return
        raise _Fail("no negation in the antecedent matches the premise")
    if r is Rule.ALL_R:
        y = ann.get("eigen")
        if not isinstance(y, Var):
            raise _Fail("forall-right node lacks its eigenvariable")
        if y in c.vars():
            raise _Fail(f"eigenvariable {y} occurs in the conclusion")
        for f in _candidates(c.succ, ForAll, ann):
            try:
                inst = substitute(f.body, y, f.var)
            except CaptureError as e:
                raise _Fail(str(e)) from None
            if _one_premise(c, prem[0], princ_r=[f], side_r=[inst]):
                return
        raise _Fail("no universal formula in the succedent matches the premise")
    if r is Rule.ALL_L:
        z = ann.get("witness")
        if not isinstance(z, Var):
            raise _Fail("forall-left node lacks its witness variable")
        for f in _candidates(c.ante, ForAll, ann):
            try:
                inst = substitute(f.body, z, f.var)
            except CaptureError:
                continue
            if _one_premise(c, prem[0], princ_l=[f], side_l=[inst]):
                return
        raise _Fail("no universal formula in the antecedent matches the premise")
    if r is Rule.BOX:
        gamma = ann.get("gamma")
        delta = ann.get("delta")
        if gamma is None or delta is None:
            raise _Fail("box node lacks its (gamma, delta) split")
        if len(c.succ) != 1:
            raise _Fail("box conclusion must have a single succedent formula")
        (goal,) = c.succ
        if type(goal) is not Box:
            raise _Fail("box conclusion succedent is not boxed")
        want_prem = Sequent(box_set(gamma) | frozenset(delta), frozenset([goal.body]))
        want_concl_ante = box_set(gamma) | box_set(delta)
        if c.ante != want_concl_ante:
            raise _Fail("conclusion antecedent is not box(gamma) ∪ box(delta)")
        if prem[0] != want_prem:
            raise _Fail("premise is not box(gamma), delta |- body")
        return
    if r is Rule.OMEGA:
        cert = ann.get("cert")
        if not isinstance(cert, SchematicCertificate):
            raise _Fail("omega node lacks its certificate")
        if symbolic:
            raise _Fail("omega nodes may not occur inside a certificate template")
        rej = check_schematic(cert, c, allow_cut)
        if rej is not None:
            raise CheckError(rej)
        return
    raise _Fail(f"unknown rule {r}")


# --------------------------------------------------------------------------
# schematic certificates


def instantiate(cert: SchematicCertificate | Proof, k: int) -> Proof:
    """The template with the symbolic exponent set to ``k``."""
    p = cert.template if isinstance(cert, SchematicCertificate) else cert

    def inst_f(f):
        return instantiate_symbolic(f, k)

    def go(q: Proof) -> Proof:
        ann = {}
        for key, val in q.ann.items():
            if isinstance(val, Formula):
                ann[key] = inst_f(val)
            elif isinstance(val, frozenset):
                ann[key] = frozenset(inst_f(f) if isinstance(f, Formula) else f for f in val)
            else:
                ann[key] = val
        concl = Sequent(frozenset(map(inst_f, q.conclusion.ante)), frozenset(map(inst_f, q.conclusion.succ)))
        return Proof(q.rule, concl, tuple(go(x) for x in q.premises), ann)

    return go(p)


def omega_premise(context: Sequent, k: int) -> Sequent:
    return Sequent(context.ante, context.succ | {diamond_tower(k)})


def check_schematic(cert: SchematicCertificate, context: Sequent, allow_cut: bool = True) -> Rejection | None:
    """Check a certificate for the premise family of ``context``."""
    symbolic_goal = Sequent(context.ante, context.succ | {SymDia(TOP)})
    tpl = cert.template
    if tpl.conclusion != symbolic_goal:
        return Rejection((), tpl.rule, f"template concludes {tpl.conclusion}, expected {symbolic_goal}")
    rej = check_proof(tpl, allow_cut, symbolic=True)
    if rej is not None:
        return Rejection(rej.path, rej.rule, f"symbolic pass: {rej.reason}")
    for k in range(cert.K + 1):
        inst = instantiate(cert, k)
        want = omega_premise(context, k)
        if inst.conclusion != want:
            return Rejection((), inst.rule, f"instance {k} concludes {inst.conclusion}, expected {want}")
        rej = check_proof(inst, allow_cut)
        if rej is not None:
            return Rejection(rej.path, rej.rule, f"instance {k}: {rej.reason}")
    return None


# --------------------------------------------------------------------------
# proof constructors


def axiom(phi: Formula) -> Proof:
    return Proof(Rule.AXIOM_ID, Sequent.of([phi], [phi]))


def weaken(p: Proof, ante: Iterable[Formula] = (), succ: Iterable[Formula] = ()) -> Proof:
    target = Sequent(p.conclusion.ante | frozenset(ante), p.conclusion.succ | frozenset(succ))
    if target == p.conclusion:
        return p
    return Proof(Rule.SET, target, (p,))


def weaken_to(p: Proof, target: Sequent) -> Proof:
    if target == p.conclusion:
        return p
    return Proof(Rule.SET, target, (p,))


def box_rule(p: Proof, gamma: Iterable[Formula], delta: Iterable[Formula]) -> Proof:
    gamma, delta = frozenset(gamma), frozenset(delta)
    (goal,) = p.conclusion.succ
    concl = Sequent(box_set(gamma) | box_set(delta), frozenset([Box(goal)]))
    return Proof(Rule.BOX, concl, (p,), {"gamma": gamma, "delta": delta})


def cut(p1: Proof, p2: Proof, phi: Formula) -> Proof:
    c1, c2 = p1.conclusion, p2.conclusion
    concl = Sequent(c1.ante | (c2.ante - {phi}), (c1.succ - {phi}) | c2.succ)
    return Proof(Rule.CUT, concl, (p1, p2), {"formula": phi})


def mk_necessitation(p: Proof) -> Proof:
    """From a proof of ``Γ |- A`` build ``box Γ |- box A``."""
    if len(p.conclusion.succ) != 1:
        raise ValueError("necessitation needs a single succedent formula")
    return box_rule(p, (), p.conclusion.ante)


def mk_four_axiom(phi: Formula) -> Proof:
    """``box A |- box box A`` by one box step keeping ``A`` boxed."""
    return box_rule(axiom(Box(phi)), [phi], [])


def mk_diamond_ladder(k: int) -> Proof:
    """Cut-free proof of ``dia^(k+1) T |- dia^k T``."""
    if k == 0:
        return weaken(Proof(Rule.AXIOM_TOP, Sequent.of([], [TOP])), ante=[diamond_tower(1)])
    lower = diamond_tower(k - 1)
    mid = diamond_tower(k)
    upper = diamond_tower(k + 1)
    inner = mk_diamond_ladder(k - 1)  # dia^k T |- dia^(k-1) T
    # ~dia^(k-1) T |- ~dia^k T
    s1 = Proof(Rule.NEG_L, Sequent.of([mid, Not(lower)], []), (inner,), {"principal": Not(lower)})
    s2 = Proof(Rule.NEG_R, Sequent.of([Not(lower)], [Not(mid)]), (s1,), {"principal": Not(mid)})
    # box ~dia^(k-1) T |- box ~dia^k T
    s3 = box_rule(s2, [], [Not(lower)])
    # box ~dia^(k-1) T, dia^(k+1) T |-
    s4 = Proof(Rule.NEG_L, Sequent.of([Box(Not(lower)), upper], []), (s3,), {"principal": upper})
    return Proof(Rule.NEG_R, Sequent.of([upper], [mid]), (s4,), {"principal": mid})


def mk_identity(phi: Formula) -> Proof:
    """Cut-free proof of ``A |- A`` from atomic identity axioms only."""
    t = type(phi)
    if t is Atom:
        return axiom(phi)
    if t is Top:
        return weaken(Proof(Rule.AXIOM_TOP, Sequent.of([], [TOP])), ante=[TOP])
    if t is Bot:
        return weaken(Proof(Rule.AXIOM_BOT, Sequent.of([phi], [])), succ=[phi])
    if t is And:
        left = Proof(Rule.AND_L1, Sequent.of([phi], [phi.left]), (mk_identity(phi.left),), {"principal": phi})
        right = Proof(Rule.AND_L2, Sequent.of([phi], [phi.right]), (mk_identity(phi.right),), {"principal": phi})
        return Proof(Rule.AND_R, Sequent.of([phi], [phi]), (left, right), {"principal": phi})
    if t is Implies:
        mp = Proof(Rule.IMP_L, Sequent.of([phi, phi.left], [phi.right]),
                   (mk_identity(phi.left), mk_identity(phi.right)), {"principal": phi})
        return Proof(Rule.IMP_R, Sequent.of([phi], [phi]), (mp,), {"principal": phi})
    if t is Not:
        inner = Proof(Rule.NEG_L, Sequent.of([phi, phi.body], []), (mk_identity(phi.body),), {"principal": phi})
        return Proof(Rule.NEG_R, Sequent.of([phi], [phi]), (inner,), {"principal": phi})
    if t is Box:
        return box_rule(mk_identity(phi.body), [], [phi.body])
    if t is ForAll:
        y = Var(max((v.index for v in vars_of(phi)), default=-1) + 1)
        inst = substitute(phi.body, y, phi.var)
        left = Proof(Rule.ALL_L, Sequent.of([phi], [inst]), (mk_identity(inst),), {"witness": y, "principal": phi})
        return Proof(Rule.ALL_R, Sequent.of([phi], [phi]), (left,), {"eigen": y, "principal": phi})
    raise TypeError(f"no identity proof for {phi!r}")


def mk_omega(context: Sequent, template: Proof, K: int = 3) -> Proof:
    return Proof(Rule.OMEGA, context, (), {"cert": SchematicCertificate(template, K)})


def weakening_family(context: Sequent, proof: Proof, K: int = 3, offset: int = 0) -> Proof:
    """Omega node whose template weakens ``proof`` by the symbolic tower.

    ``offset`` shifts the exponent; any offset other than 0 yields a
    certificate for the wrong premise family.
    """
    tower = diamond_tower(offset, SymDia(TOP))
    template = weaken_to(proof, Sequent(context.ante, context.succ | {tower}))
    return mk_omega(context, template, K)
