"""Generated derivations, each one re-checked before it is returned."""

from __future__ import annotations

from pathlib import Path

from .kernel import (
    Proof, Rule, check_proof, mk_diamond_ladder, mk_four_axiom, mk_identity, mk_necessitation,
    weakening_family, axiom, omega_premise,
)
from .proofio import dump_proof
from .search import bounded_prove
from .syntax import Box, Sequent, TOP, diamond_tower, parse, parse_sequent

IDENTITY_FORMULAS = [
    "P", "P & Q", "P -> Q", "~P", "box P", "forall v0. P(v0)", "box (P -> box Q)", "T", "F",
]
FOUR_AXIOM_FORMULAS = ["P", "T", "forall v0. P(v0)", "P & Q", "box P"]
LADDER_MAX = 5
LOEB_CONTEXT = "box (box P -> P) |- box P"
LOEB_MAX = 3
LOEB_DEPTH = 8


def _necessitation_examples() -> dict:
    p = parse("P")
    pq = parse("P & Q")
    and_l = Proof(Rule.AND_L1, Sequent.of([pq], [p]), (axiom(p),), {"principal": pq})
    top = Proof(Rule.AXIOM_TOP, Sequent.of([], [TOP]))
    return {
        "necessitation_top": mk_necessitation(top),
        "necessitation_id": mk_necessitation(axiom(p)),
        "necessitation_and": mk_necessitation(and_l),
    }


def loeb_premise_proofs(max_n: int = LOEB_MAX, depth: int = LOEB_DEPTH) -> dict:
    ctx = parse_sequent(LOEB_CONTEXT)
    out = {}
    for n in range(max_n + 1):
        p = bounded_prove(omega_premise(ctx, n), depth)
        if p is None:
            raise RuntimeError(f"no proof of the omega premise at n={n} within depth {depth}")
        out[n] = p
    return out


def gallery_proofs() -> dict:
    """Name -> proof, every entry accepted by the kernel (cut-free)."""
    out: dict = {}
    for i, t in enumerate(IDENTITY_FORMULAS):
        out[f"identity_{i}"] = mk_identity(parse(t))
    for i, t in enumerate(FOUR_AXIOM_FORMULAS):
        out[f"fouraxiom_{i}"] = mk_four_axiom(parse(t))
    out["fouraxiom"] = out["fouraxiom_0"]
    out.update(_necessitation_examples())
    for k in range(LADDER_MAX + 1):
        out[f"ladder_{k}"] = mk_diamond_ladder(k)
    p = parse("P")
    out["omega_weakening"] = weakening_family(Sequent.of([p], [p]), axiom(p))
    ladder1 = mk_diamond_ladder(1)
    out["omega_ladder"] = weakening_family(ladder1.conclusion, ladder1)
    for n, proof in loeb_premise_proofs().items():
        out[f"loeb_premise_{n}"] = proof
    for name, proof in out.items():
        rej = check_proof(proof, allow_cut=False)
        if rej is not None:
            raise AssertionError(f"gallery proof {name} rejected: {rej}")
    return out


def write_gallery(out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, proof in gallery_proofs().items():
        path = out / f"{name}.json"
        dump_proof(proof, path)
        written.append(path)
    return written


def gallery_facts() -> list:
    """Cut-free facts from the gallery constructors, used as cut fodder.

    Besides the gallery itself this adds four-axiom instances over box
    towers and necessitated ladders, so that facts chain through cuts.
    """
    facts = [p for p in gallery_proofs().values() if p.rule is not Rule.OMEGA]
    for base in ["P", "forall v0. P(v0)", "P & Q"]:
        phi = parse(base)
        for _ in range(4):
            facts.append(mk_four_axiom(phi))
            phi = Box(phi)
    for k in range(LADDER_MAX):
        facts.append(mk_necessitation(mk_diamond_ladder(k)))
    for t in ["box forall v0. P(v0)", "box box P"]:
        facts.append(mk_identity(parse(t)))
    seen: dict = {}
    for p in facts:
        seen.setdefault(p.conclusion, p)
    return list(seen.values())


__all__ = [
    "gallery_proofs", "write_gallery", "gallery_facts", "loeb_premise_proofs", "diamond_tower",
]
