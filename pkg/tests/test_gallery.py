import json

import pytest
from hypothesis import given, settings

from conftest import fo_formulas
from nqgl.gallery import gallery_facts
from nqgl.generators import random_model, seeded_rng, symbols_of
from nqgl.kernel import Rule, check_proof, mk_identity
from nqgl.kripke import refutes_sequent
from nqgl.proofio import ProofFormatError, proof_from_data, proof_from_json, proof_to_json
from nqgl.syntax import sequent_text


def test_gallery_contents(gallery):
    assert sequent_text(gallery["ladder_3"].conclusion) == "dia dia dia dia T |- dia dia dia T"
    assert sum(name.startswith("fouraxiom_") for name in gallery) == 5
    assert sum(name.startswith("ladder_") for name in gallery) == 6
    assert {f"loeb_premise_{n}" for n in range(4)} <= set(gallery)
    assert gallery["omega_weakening"].rule is Rule.OMEGA
    assert gallery["omega_ladder"].rule is Rule.OMEGA


def test_every_proof_round_trips(gallery):
    for name, p in gallery.items():
        data = json.loads(json.dumps(proof_to_json(p)))
        q = proof_from_data(data)
        assert proof_to_json(q) == data, name
        assert check_proof(q, allow_cut=False) is None, name


def test_omega_file_layout(gallery):
    data = proof_to_json(gallery["omega_weakening"])
    assert data["rule"] == "omega" and "premises" not in data
    assert data["cert"]["K"] == 3
    assert "dia^(n) T" in data["cert"]["template"]["conclusion"]


def test_bad_files():
    with pytest.raises(ProofFormatError):
        proof_from_json({"rule": "modus-ponens", "conclusion": "|- P"})
    with pytest.raises(ProofFormatError):
        proof_from_json({"conclusion": "|- P"})
    with pytest.raises(ProofFormatError):
        proof_from_json({"rule": "all-r", "conclusion": "|- P", "ann": {"eigen": "x"}})


def test_facts_check():
    facts = gallery_facts()
    assert len({p.conclusion for p in facts}) == len(facts)
    for p in facts:
        assert check_proof(p, allow_cut=False) is None


def test_soundness_on_seeded_models(gallery, monkeypatch):
    monkeypatch.setenv("NQGL_SEED", "11")
    rng = seeded_rng()
    ends = [p.conclusion for p in gallery.values()]
    syms = symbols_of(f for s in ends for f in s.formulas())
    for _ in range(40):
        m = random_model(rng, syms)
        for s in ends:
            assert not any(refutes_sequent(m, w, s) for w in m.worlds)


@given(fo_formulas(max_leaves=5))
@settings(max_examples=60)
def test_identity_proofs_round_trip(phi):
    p = mk_identity(phi)
    assert proof_to_json(proof_from_json(proof_to_json(p))) == proof_to_json(p)
