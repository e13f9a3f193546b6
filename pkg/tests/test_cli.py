import io
import json
import subprocess
import sys

import pytest

from nqgl.cli import run, sequent_formula
from nqgl.syntax import parse, parse_sequent


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    lines = [json.loads(x) for x in buf.getvalue().splitlines() if x.strip()]
    return code, lines


@pytest.fixture(scope="module")
def gallery_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("gallery")
    code, lines = call("gallery", str(d))
    assert code == 0
    return d


def test_prove_loeb():
    code, (rec,) = call("prove", "box(box P -> P) -> box P")
    assert code == 0 and rec["verdict"] == "provable" and rec["certified"]


def test_prove_refuted_with_oracle(tmp_path):
    out = tmp_path / "m.json"
    code, (rec,) = call("prove", "box P -> P", "--oracle-check", "3", "--emit", str(out))
    assert code == 1 and rec["verdict"] == "refuted" and rec["oracle"]["agrees"]
    code, (fc,) = call("model-check", str(out), "box P -> P", "--world", rec["world"])
    assert code == 1 and fc["verdict"] == "refuted"


def test_prove_emits_checkable_proof(tmp_path):
    out = tmp_path / "p.json"
    code, _ = call("prove", "box P -> box box P", "--emit", str(out))
    assert code == 0
    code, (rec,) = call("check-proof", str(out))
    assert code == 0 and rec["calculus"] == "gl"


def test_prove_predicate_sequents(tmp_path):
    out = tmp_path / "p.json"
    code, (rec,) = call("prove", "forall v0. P(v0) |- P(v1)", "--emit", str(out))
    assert code == 0 and rec["method"] == "bounded-search"
    code, _ = call("check-proof", str(out), "--no-cut")
    assert code == 0
    code, (rec,) = call("prove", "|- (forall v0. box P(v0)) -> box forall v0. P(v0)")
    assert code == 1 and rec["verdict"] == "refuted" and rec["certified"]


def test_frame_check_two_chain(tmp_path):
    f = tmp_path / "chain.json"
    f.write_text(json.dumps({"worlds": ["w0", "w1"], "edges": [["w0", "w1"]],
                             "domains": {"w0": ["a"], "w1": ["a"]}, "interp": {}}))
    code, (rec,) = call("frame-check", str(f))
    assert code == 0
    assert rec["transitive"] and rec["irreflexive"] and rec["conversely_well_founded"] and rec["bounded_length"]
    assert rec["boundedness_witness"] == {"w0": 2, "w1": 1}


def test_frame_check_loop(tmp_path):
    f = tmp_path / "loop.json"
    f.write_text(json.dumps({"worlds": ["w0"], "edges": [["w0", "w0"]], "domains": {"w0": ["a"]}}))
    code, (rec,) = call("frame-check", str(f))
    assert code == 1 and rec["boundedness_witness"] == {"w0": None}


def test_gallery_self_check(gallery_dir):
    files = sorted(gallery_dir.glob("*.json"))
    assert len(files) >= 25
    for f in files:
        code, (rec,) = call("check-proof", str(f), "--no-cut")
        assert code == 0, rec


def test_fouraxiom_and_ladder_files(gallery_dir):
    code, (rec,) = call("check-proof", str(gallery_dir / "fouraxiom.json"), "--no-cut")
    assert code == 0
    code, (rec,) = call("check-proof", str(gallery_dir / "ladder_3.json"))
    assert rec["conclusion"] == "dia dia dia dia T |- dia dia dia T"


def test_omega_weakening_at_seven(gallery_dir):
    from nqgl.kernel import check_proof, instantiate
    from nqgl.proofio import load_proof
    p = load_proof(gallery_dir / "omega_weakening.json")
    inst = instantiate(p.ann["cert"], 7)
    assert check_proof(inst) is None
    code, _ = call("check-proof", str(gallery_dir / "omega_weakening.json"), "--K", "8")
    assert code == 0


def test_mutated_proof_file_rejected(gallery_dir, tmp_path):
    data = json.loads((gallery_dir / "fouraxiom.json").read_text())
    data["ann"]["gamma"], data["ann"]["delta"] = [], data["ann"]["gamma"]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(data))
    code, (rec,) = call("check-proof", str(f))
    assert code == 1 and rec["verdict"] == "rejected" and rec["path"] == []


def test_countermodel_writes_model_and_trace(tmp_path):
    m, t = tmp_path / "m.json", tmp_path / "t.jsonl"
    code, (rec,) = call("countermodel", "|- forall v0. P(v0) -> box forall v0. P(v0)",
                        "--depth", "6", "--height", "4", "--model", str(m), "--trace", str(t))
    assert code == 0 and rec["verdict"] == "refuted"
    trace = [json.loads(x) for x in t.read_text().splitlines()]
    assert trace and {"stage", "formula", "case", "world"} <= set(trace[0])
    code, (fc,) = call("frame-check", str(m))
    assert code == 0


def test_countermodel_of_provable():
    code, (rec,) = call("countermodel", "P |- P")
    assert code == 1 and rec["verdict"] == "provable"


def test_saturate_trace():
    code, lines = call("saturate", "~P |-", "--stages", "3")
    assert code == 0
    assert lines[0]["case"] == "not-S" and lines[0]["added_right"] == ["P"]
    assert lines[-1]["event"] == "summary" and lines[-1]["violations"] == []


def test_parse_command():
    code, (rec,) = call("parse", "dia dia T")
    assert code == 0 and rec["text"] == "dia dia T" and rec["modal_depth"] == 2


def test_errors_exit_two(tmp_path):
    code, (rec,) = call("parse", "box (P &")
    assert code == 2 and rec["error"] == "syntax" and rec["position"] == 8
    code, (rec,) = call("check-proof", str(tmp_path / "missing.json"))
    assert code == 2 and rec["error"] == "file-not-found"
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, (rec,) = call("check-proof", str(bad))
    assert code == 2 and rec["error"] == "malformed-json" and rec["line"] == 1
    code, _ = call("no-such-command")
    assert code == 2


def test_output_is_deterministic():
    a = call("prove", "box (P | Q) -> box P | box Q")
    b = call("prove", "box (P | Q) -> box P | box Q")
    assert a == b


def test_pretty_mode():
    buf = io.StringIO()
    assert run(["--pretty", "prove", "box P -> box box P"], stdout=buf) == 0
    assert buf.getvalue().startswith("[prove]")


def test_sequent_formula():
    assert sequent_formula(parse_sequent("P, Q |- R")) == parse("P & Q -> R")
    assert sequent_formula(parse_sequent("|- R")) == parse("R")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nqgl", "prove", "box P -> box box P"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["verdict"] == "provable"
