import pytest
from hypothesis import given, settings

from conftest import fo_formulas
from nqgl.kernel import (
    Proof, Rule, SchematicCertificate, axiom, box_rule, check_proof, check_schematic, cut, instantiate,
    mk_diamond_ladder, mk_four_axiom, mk_identity, mk_necessitation, mk_omega, omega_premise, weaken,
    weaken_to, weakening_family,
)
from nqgl.syntax import (
    Atom, Box, Sequent, SymDia, TOP, Var, diamond_tower, parse, parse_sequent, sequent_text, size, substitute,
)

P, Q, R = parse("P"), parse("Q"), parse("R")


def ok(p, allow_cut=True):
    rej = check_proof(p, allow_cut)
    assert rej is None, str(rej)


def test_box_node_with_split():
    prem = Proof(Rule.AXIOM_ID, parse_sequent("box P, Q |- R"))  # stand-in premise, not itself valid
    node = Proof(Rule.BOX, parse_sequent("box P, box Q |- box R"), (prem,), {"gamma": {P}, "delta": {Q}})
    rej = check_proof(node)
    assert rej is not None and rej.path == (0,)  # only the premise is at fault
    good_prem = weaken(axiom(Q), ante=[Box(P)])
    node = Proof(Rule.BOX, parse_sequent("box P, box Q |- box Q"), (good_prem,), {"gamma": {P}, "delta": {Q}})
    assert check_proof(node) is None


def test_box_wrong_split_rejected():
    prem = weaken(axiom(Q), ante=[Box(P)])
    node = Proof(Rule.BOX, parse_sequent("box P, box Q |- box Q"), (prem,), {"gamma": set(), "delta": {P, Q}})
    rej = check_proof(node)
    assert rej is not None and rej.path == () and rej.rule is Rule.BOX


def test_all_r_eigenvariable_violation():
    y = Var(1)
    gamma = parse("P(v1)")
    prem = weaken(axiom(parse("P(v1)")), ante=[])
    node = Proof(Rule.ALL_R, Sequent.of([gamma], [parse("forall v0. P(v0)")]), (prem,), {"eigen": y})
    rej = check_proof(node)
    assert rej is not None and "eigen" in rej.reason


def test_all_r_bound_occurrence_also_blocks():
    # v1 only occurs bound in the lower sequent, which still counts
    gamma = parse("forall v1. P(v1)")
    concl = Sequent.of([gamma], [parse("forall v0. P(v0)")])

    def node(y):
        inst = Atom("P", (y,))
        prem = Proof(Rule.ALL_L, Sequent.of([gamma], [inst]), (axiom(inst),), {"witness": y})
        return Proof(Rule.ALL_R, concl, (prem,), {"eigen": y})

    rej = check_proof(node(Var(1)))
    assert rej is not None and rej.path == () and "eigen" in rej.reason
    assert check_proof(node(Var(2))) is None


def test_four_axiom_examples():
    for t in ["P", "T", "forall v0. P(v0)"]:
        p = mk_four_axiom(parse(t))
        ok(p, allow_cut=False)
        assert p.conclusion == Sequent.of([Box(parse(t))], [Box(Box(parse(t)))])


def test_necessitation_examples():
    top = Proof(Rule.AXIOM_TOP, Sequent.of([], [TOP]))
    assert sequent_text(mk_necessitation(top).conclusion) == "|- box T"
    assert sequent_text(mk_necessitation(axiom(P)).conclusion) == "box P |- box P"
    pq = parse("P & Q")
    andl = Proof(Rule.AND_L1, Sequent.of([pq], [P]), (axiom(P),))
    n = mk_necessitation(andl)
    ok(n, allow_cut=False)
    assert sequent_text(n.conclusion) == "box (P & Q) |- box P"
    with pytest.raises(ValueError):
        mk_necessitation(weaken(axiom(P), succ=[Q]))


def test_ladders():
    assert sequent_text(mk_diamond_ladder(0).conclusion) == "dia T |- T"
    assert sequent_text(mk_diamond_ladder(1).conclusion) == "dia dia T |- dia T"
    for k in range(7):
        p = mk_diamond_ladder(k)
        ok(p, allow_cut=False)
        assert p.conclusion == Sequent.of([diamond_tower(k + 1)], [diamond_tower(k)])
        assert p.size() == 5 * k + 2  # node counts recorded from the construction


def test_identity_examples():
    assert mk_identity(parse("P(v0)")).rule is Rule.AXIOM_ID
    assert mk_identity(parse("P(v0)")).size() == 1
    p = mk_identity(parse("P & Q"))
    assert {q.rule for q in p.nodes()} == {Rule.AND_R, Rule.AND_L1, Rule.AND_L2, Rule.AXIOM_ID}
    b = mk_identity(parse("box P"))
    assert b.rule is Rule.BOX and b.ann["delta"] == {P}
    ok(b, allow_cut=False)


@given(fo_formulas(max_leaves=6))
@settings(max_examples=200)
def test_identity_admissible(phi):
    if size(phi) > 12:
        return
    p = mk_identity(phi)
    ok(p, allow_cut=False)
    for node in p.nodes():
        if node.rule is Rule.AXIOM_ID:
            (a,) = node.conclusion.ante
            assert type(a).__name__ == "Atom"


def test_cut_policy():
    c = cut(mk_four_axiom(P), mk_four_axiom(Box(P)), Box(Box(P)))
    assert sequent_text(c.conclusion) == "box P |- box box box P"
    ok(c, allow_cut=True)
    rej = check_proof(c, allow_cut=False)
    assert rej is not None and rej.rule is Rule.CUT


def test_cut_wrong_formula_rejected():
    c = cut(mk_four_axiom(P), mk_four_axiom(Box(P)), Box(Box(P)))
    bad = Proof(Rule.CUT, c.conclusion, c.premises, {"formula": Box(P)})
    assert check_proof(bad) is not None


def test_mutations_of_gallery_annotations(gallery):
    four = gallery["fouraxiom"]
    assert check_proof(Proof(Rule.BOX, four.conclusion, four.premises, {"gamma": set(), "delta": {Box(P)}})) is not None
    ident = gallery["identity_5"]  # forall v0. P(v0) |- forall v0. P(v0)
    assert ident.rule is Rule.ALL_R
    bad = Proof(Rule.ALL_R, ident.conclusion, ident.premises, {**ident.ann, "eigen": Var(0)})
    assert check_proof(bad) is not None
    inner = ident.premises[0]
    bad_l = Proof(Rule.ALL_L, inner.conclusion, inner.premises, {**inner.ann, "witness": Var(7)})
    assert check_proof(bad_l) is not None


def test_premise_count_is_enforced():
    p = Proof(Rule.SET, Sequent.of([P], [P]), ())
    assert check_proof(p) is not None


# ω-rule


def test_weakening_family_accepted_and_instances():
    ctx = Sequent.of([P], [P])
    node = weakening_family(ctx, axiom(P))
    ok(node, allow_cut=False)
    cert = node.ann["cert"]
    assert instantiate(cert, 0).conclusion == Sequent.of([P], [P, TOP])
    assert instantiate(cert, 2).conclusion == Sequent.of([P], [P, diamond_tower(2)])
    for k in range(9):
        inst = instantiate(cert, k)
        ok(inst)
        assert inst.conclusion == omega_premise(ctx, k)


def test_weakening_family_offset_rejected():
    ctx = Sequent.of([P], [P])
    node = weakening_family(ctx, axiom(P), K=3, offset=1)
    rej = check_proof(node)
    assert rej is not None and rej.rule is Rule.OMEGA


def test_wrong_conclusion_rejected():
    node = weakening_family(Sequent.of([P], [P]), axiom(P))
    moved = Proof(Rule.OMEGA, Sequent.of([P], [P, Q]), (), node.ann)
    assert check_proof(moved) is not None


def test_symbolic_pass_catches_exponent_dependence():
    # ladder(1) has an exponent-specific shape, so a template that mentions
    # dia^(n) T inside an axiom is refused by the symbolic pass
    tpl = Proof(Rule.AXIOM_ID, Sequent.of([SymDia(TOP)], [SymDia(TOP)]))
    ctx = Sequent.of([parse("dia^(n) T", allow_symbolic=True)], [])
    rej = check_schematic(SchematicCertificate(tpl, 3), ctx)
    assert rej is not None


def test_symbolic_tower_outside_template_rejected():
    p = Proof(Rule.AXIOM_TOP, Sequent.of([], [TOP, SymDia(TOP)]))
    assert check_proof(p) is not None


def test_ladder_template():
    ladder = mk_diamond_ladder(1)
    node = weakening_family(ladder.conclusion, ladder)
    ok(node, allow_cut=False)
    for k in range(6):
        ok(instantiate(node.ann["cert"], k), allow_cut=False)


def test_nested_omega_refused():
    inner = weakening_family(Sequent.of([P], [P]), axiom(P))
    ctx = Sequent.of([P], [P])
    tpl = weaken_to(inner, Sequent(ctx.ante, ctx.succ | {SymDia(TOP)}))
    assert check_proof(mk_omega(ctx, tpl)) is not None


def test_cut_inside_template_follows_policy():
    ctx = Sequent.of([Box(P)], [Box(Box(Box(P)))])
    c = cut(mk_four_axiom(P), mk_four_axiom(Box(P)), Box(Box(P)))
    node = weakening_family(ctx, c)
    assert check_proof(node, allow_cut=True) is None
    assert check_proof(node, allow_cut=False) is not None
    assert node.uses_cut()


def test_substitute_used_by_all_l():
    phi = parse("forall v0. P(v0)")
    inst = substitute(phi.body, Var(3), Var(0))
    p = Proof(Rule.ALL_L, Sequent.of([phi], [inst]), (axiom(inst),), {"witness": Var(3)})
    ok(p)
    wrong = Proof(Rule.ALL_L, Sequent.of([phi], [inst]), (axiom(inst),), {"witness": Var(2)})
    assert check_proof(wrong) is not None


def test_box_rule_helper_builds_expected_conclusion():
    p = box_rule(weaken(axiom(Q), ante=[Box(P)]), [P], [Q])
    assert sequent_text(p.conclusion) == "box P, box Q |- box Q"
    assert check_proof(p) is None
