import pytest

from nqgl import oracle
from nqgl._oracle_py import count_evaluations
from nqgl.kripke import classify_frame, forces
from nqgl.oracle import frames_up_to, strict_orders, validity_oracle
from nqgl.syntax import parse


def test_strict_order_counts():
    # unlabeled posets on n points: OEIS A000112
    assert [len(strict_orders(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]


def test_enumerated_frames_are_in_class():
    from nqgl.oracle import _to_model
    for succ in frames_up_to(4):
        m = _to_model(succ, [], ())
        r = classify_frame(m.frame)
        assert r.transitive and r.irreflexive and r.bounded_length


def test_examples():
    hit = validity_oracle(parse("dia T"))
    assert hit is not None
    m, w = hit
    assert len(m.worlds) == 1 and not forces(m, w, parse("dia T"))
    assert validity_oracle(parse("box (box P -> P) -> box P"), 4) is None
    assert validity_oracle(parse("P | ~P")) is None


def test_counterexample_really_refutes():
    for t in ["box P -> P", "box box P -> box P", "dia T -> dia dia T", "box (P | Q) -> box P | box Q"]:
        m, w = validity_oracle(parse(t), 3)
        assert not forces(m, w, parse(t))


def test_needs_enough_worlds():
    # dia dia T fails only given chains of length two
    f = parse("box box F -> box F")
    assert validity_oracle(f, 1) is None
    assert validity_oracle(f, 2) is not None


@pytest.mark.skipif(oracle.BACKEND != "compiled", reason="extension not built")
def test_backends_agree():
    from nqgl.generators import propositional_corpus
    for f in propositional_corpus(60, seed=3):
        a = validity_oracle(f, 3, backend="python")
        b = validity_oracle(f, 3, backend="compiled")
        assert (a is None) == (b is None)
        if a is not None:
            assert a[1] == b[1]


def test_rejects_predicates():
    with pytest.raises(ValueError):
        validity_oracle(parse("forall v0. P(v0)"))


def test_evaluation_count():
    assert count_evaluations(2, strict_orders(2)) == 16 + 16


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys
    env = dict(os.environ, NQGL_PURE_PYTHON="1")
    code = "from nqgl import oracle; from nqgl.syntax import parse; " \
           "print(oracle.BACKEND, oracle.validity_oracle(parse('box P -> P'))[1])"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "w0"]
