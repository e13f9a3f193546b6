"""Command-line entry point.

Reports are JSON lines on stdout (``--pretty`` for a human layout).  Exit
status: 0 success, provable or valid; 1 refuted or rejected; 2 usage,
input or format errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from functools import reduce
from pathlib import Path

from . import __version__
from .gallery import write_gallery
from .gl import NotPropositional, certify, check_gl_proof, decide
from .kernel import Proof, Rule, SchematicCertificate, check_proof
from .kripke import (
    ModelError, boundedness_witness, classify_frame, forces, load_model, model_to_json, validate_model,
    assignments, NoWitness,
)
from .gl import GLProof
from .oracle import validity_oracle
from .proofio import ProofFormatError, dump_proof, load_proof
from .saturation import (
    Pair, ProvableSequent, SaturationError, check_saturated, countermodel, saturate_stages,
)
from .search import bounded_prove
from .syntax import (
    And, Formula, FormulaSyntaxError, Implies, Or, Sequent, TOP, BOT, VariableUniverse, free_vars,
    is_propositional, modal_depth, parse, parse_sequent, sequent_text, size, sorted_formulas, to_text,
)

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Reporter:
    def __init__(self, pretty: bool, stream=None):
        self.pretty = pretty
        self.stream = stream if stream is not None else sys.stdout

    def emit(self, record: dict) -> None:
        if self.pretty:
            head = record.get("command", "")
            lines = [f"[{head}]"] if head else []
            for k, v in record.items():
                if k == "command":
                    continue
                if isinstance(v, (dict, list)):
                    v = json.dumps(v, sort_keys=True)
                lines.append(f"  {k}: {v}")
            self.stream.write("\n".join(lines) + "\n")
        else:
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        self.stream.flush()


def sequent_formula(s: Sequent) -> Formula:
    """``/\\G -> \\/D`` for a sequent ``G |- D``."""
    ante = sorted_formulas(s.ante)
    succ = sorted_formulas(s.succ)
    left = reduce(And, ante) if ante else TOP
    right = reduce(Or, succ) if succ else BOT
    if not ante:
        return right if succ else BOT
    return Implies(left, right)


def _read_sequent(text: str) -> Sequent:
    return parse_sequent(text)


def _override_K(p: Proof, K: int) -> Proof:
    if p.rule is Rule.OMEGA:
        cert = p.ann["cert"]
        return Proof(p.rule, p.conclusion, (), {**p.ann, "cert": SchematicCertificate(cert.template, K)})
    return Proof(p.rule, p.conclusion, tuple(_override_K(q, K) for q in p.premises), p.ann)


# --------------------------------------------------------------------------
# commands


def cmd_parse(args, out: Reporter) -> int:
    if args.sequent or "|-" in args.text:
        s = _read_sequent(args.text)
        out.emit({"command": "parse", "kind": "sequent", "text": sequent_text(s),
                  "free_vars": [str(v) for v in sorted(s.free_vars())]})
        return EXIT_OK
    phi = parse(args.text)
    out.emit({"command": "parse", "kind": "formula", "text": to_text(phi), "size": size(phi),
              "modal_depth": modal_depth(phi), "propositional": is_propositional(phi),
              "free_vars": [str(v) for v in sorted(free_vars(phi))]})
    return EXIT_OK


def cmd_check_proof(args, out: Reporter) -> int:
    p = load_proof(args.file)
    rec = {"command": "check-proof", "file": str(args.file)}
    if isinstance(p, GLProof):
        msg = check_gl_proof(p)
        rec.update(calculus="gl", conclusion=sequent_text(p.conclusion), size=p.size())
        rec.update(verdict="accepted" if msg is None else "rejected")
        if msg:
            rec["reason"] = msg
        out.emit(rec)
        return EXIT_OK if msg is None else EXIT_NO
    if args.K is not None:
        p = _override_K(p, args.K)
    rej = check_proof(p, allow_cut=not args.no_cut)
    rec.update(calculus="nqgl", conclusion=sequent_text(p.conclusion), size=p.size(),
               cut_free=not p.uses_cut(), verdict="accepted" if rej is None else "rejected")
    if rej is not None:
        rec["path"] = list(rej.path)
        rec["rule"] = rej.rule.value
        rec["reason"] = rej.reason
    out.emit(rec)
    return EXIT_OK if rej is None else EXIT_NO


def _emit_artifact(path, obj) -> None:
    if isinstance(obj, (Proof, GLProof)):
        dump_proof(obj, path)
    else:
        Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def cmd_prove(args, out: Reporter) -> int:
    s = _read_sequent(args.text)
    rec: dict = {"command": "prove", "sequent": sequent_text(s)}
    propositional = all(is_propositional(f) for f in s.formulas())
    if propositional:
        v = decide(s)
        problem = certify(v)
        rec.update(method="gl-decision", verdict="provable" if v.provable else "refuted",
                   certified=problem is None, stats=v.stats)
        if problem:
            rec["certify_error"] = problem
        if v.provable:
            rec["proof_size"] = v.proof.size()
            artifact = v.proof
        else:
            rec["world"] = v.countermodel.world
            rec["model"] = model_to_json(v.countermodel.model)
            artifact = model_to_json(v.countermodel.model)
        if args.oracle_check:
            hit = validity_oracle(sequent_formula(s), max_worlds=args.oracle_check)
            oracle_valid = hit is None
            if v.provable:
                agrees = oracle_valid
            else:
                # small frames passing cannot contradict a larger countermodel
                agrees = not oracle_valid or len(v.countermodel.model.worlds) > args.oracle_check
            rec["oracle"] = {"max_worlds": args.oracle_check, "valid": oracle_valid, "agrees": agrees}
        if args.emit:
            _emit_artifact(args.emit, artifact)
            rec["emitted"] = str(args.emit)
        out.emit(rec)
        if problem or (args.oracle_check and not rec["oracle"]["agrees"]):
            return EXIT_NO if problem is None else EXIT_USAGE
        return EXIT_OK if v.provable else EXIT_NO
    if args.oracle_check:
        raise UsageError("--oracle-check needs a propositional sequent")
    proof = bounded_prove(s, args.depth)
    if proof is not None:
        rec.update(method="bounded-search", depth=args.depth, verdict="provable", proof_size=proof.size(),
                   certified=check_proof(proof, allow_cut=False) is None)
        if args.emit:
            _emit_artifact(args.emit, proof)
            rec["emitted"] = str(args.emit)
        out.emit(rec)
        return EXIT_OK
    try:
        res = countermodel(s, depth=args.depth, cap=args.height)
    except SaturationError as e:
        rec.update(method="bounded-search", depth=args.depth, verdict="unknown", reason=str(e))
        out.emit(rec)
        return EXIT_NO
    rec.update(method="saturation", depth=args.depth, verdict="refuted" if res.ok else "unknown",
               certified=res.ok, world=res.fragment.root, model=model_to_json(res.fragment.model))
    if args.emit:
        _emit_artifact(args.emit, model_to_json(res.fragment.model))
        rec["emitted"] = str(args.emit)
    out.emit(rec)
    return EXIT_NO


def cmd_countermodel(args, out: Reporter) -> int:
    s = _read_sequent(args.text)
    rec: dict = {"command": "countermodel", "sequent": sequent_text(s), "depth": args.depth, "height": args.height}
    try:
        res = countermodel(s, depth=args.depth, cap=args.height)
    except ProvableSequent as e:
        rec.update(verdict="provable", proof_size=e.proof.size())
        out.emit(rec)
        return EXIT_NO
    except SaturationError as e:
        rec.update(verdict="inconclusive", reason=str(e))
        out.emit(rec)
        return EXIT_NO
    frag = res.fragment
    rec.update(
        verdict="refuted" if res.ok else "inconclusive",
        world=frag.root,
        height_bound=frag.worlds[frag.root].gl_witness,
        worlds=len(frag.worlds),
        refutes=res.refutes,
        frame=res.frame.as_dict(),
        model_problems=res.model_problems,
        truth_lemma=res.truth_lemma,
        saturation={k: r.as_dict() for k, r in res.saturation.items()},
        truncated=[[w, to_text(f)] for w, f in frag.truncated],
        model=model_to_json(frag.model),
    )
    if args.model:
        _emit_artifact(args.model, model_to_json(frag.model))
        rec["model_file"] = str(args.model)
    if args.trace:
        with open(args.trace, "w") as fh:
            for name, w in frag.worlds.items():
                for r in w.state.trace:
                    fh.write(json.dumps({"world": name, **r.as_dict()}, sort_keys=True) + "\n")
        rec["trace_file"] = str(args.trace)
    out.emit(rec)
    return EXIT_OK if res.ok else EXIT_NO


def _load_model_checked(path):
    m = load_model(path)
    problems = validate_model(m)
    if problems:
        raise ModelError("; ".join(problems))
    return m


def cmd_model_check(args, out: Reporter) -> int:
    m = _load_model_checked(args.model)
    phi = parse(args.formula)
    worlds = [args.world] if args.world else list(m.worlds)
    for w in worlds:
        if w not in m.domains:
            raise UsageError(f"unknown world {w!r}")
    per = {}
    for w in worlds:
        fails = [{str(k): v for k, v in env.items()} for env in assignments(m, w, free_vars(phi))
                 if not forces(m, w, phi, env)]
        per[w] = {"holds": not fails, "failing_assignments": fails}
    ok = all(r["holds"] for r in per.values())
    out.emit({"command": "model-check", "formula": to_text(phi), "verdict": "valid" if ok else "refuted",
              "worlds": per})
    return EXIT_OK if ok else EXIT_NO


def cmd_frame_check(args, out: Reporter) -> int:
    m = _load_model_checked(args.model)
    rep = classify_frame(m.frame)
    witnesses = {}
    for w in m.worlds:
        try:
            witnesses[str(w)] = boundedness_witness(m, w)
        except NoWitness:
            witnesses[str(w)] = None
    ok = rep.transitive and rep.irreflexive and rep.bounded_length
    out.emit({"command": "frame-check", **rep.as_dict(), "boundedness_witness": witnesses,
              "in_class": ok})
    return EXIT_OK if ok else EXIT_NO


def cmd_saturate(args, out: Reporter) -> int:
    s = _read_sequent(args.text)
    universe = VariableUniverse.covering(s.vars())
    if not len(universe):
        universe = universe.fresh()[1]
    st = saturate_stages(Pair(s.ante, s.succ), universe, args.stages, depth=args.depth)
    for r in st.trace:
        out.emit({"command": "saturate", "event": "stage", **r.as_dict()})
    rep = check_saturated(st)
    out.emit({"command": "saturate", "event": "summary", "stages": st.stage,
              "S": [to_text(f) for f in sorted_formulas(st.pair.left)],
              "T": [to_text(f) for f in sorted_formulas(st.pair.right)],
              "universe": [str(v) for v in st.universe], **rep.as_dict()})
    return EXIT_OK if rep.ok else EXIT_NO


def cmd_gallery(args, out: Reporter) -> int:
    files = write_gallery(args.out_dir)
    for f in files:
        out.emit({"command": "gallery", "file": str(f)})
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nqgl", description="NQGL proof kernel, GL decision and Kripke tools")
    ap.add_argument("--pretty", action="store_true", help="human-readable reports")
    ap.add_argument("--version", action="version", version=f"nqgl {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and normalise a formula or sequent")
    p.add_argument("text")
    p.add_argument("--sequent", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check-proof", help="check a proof file")
    p.add_argument("file")
    p.add_argument("--no-cut", action="store_true", help="reject Cut (cut-free fragment)")
    p.add_argument("--K", type=int, default=None, help="instance bound for omega certificates")
    p.set_defaults(func=cmd_check_proof)

    p = sub.add_parser("prove", help="decide a propositional sequent, or search a predicate one")
    p.add_argument("text")
    p.add_argument("--emit", help="write the proof or countermodel here")
    p.add_argument("--oracle-check", type=int, default=0, metavar="N",
                   help="cross-check with the exhaustive oracle on frames of up to N worlds")
    p.add_argument("--depth", type=int, default=8, help="search depth for predicate sequents")
    p.add_argument("--height", type=int, default=8, help="height-bound cap for countermodel search")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("countermodel", help="canonical countermodel by saturation")
    p.add_argument("text")
    p.add_argument("--depth", type=int, default=6, help="consistency search depth")
    p.add_argument("--height", type=int, default=8, help="cap on the height bound n")
    p.add_argument("--model", help="model output file")
    p.add_argument("--trace", help="stage trace output file (JSON lines)")
    p.set_defaults(func=cmd_countermodel)

    p = sub.add_parser("model-check", help="evaluate a formula in a model file")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--world")
    p.set_defaults(func=cmd_model_check)

    p = sub.add_parser("frame-check", help="classify the frame of a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_frame_check)

    p = sub.add_parser("saturate", help="run saturation stages on a pair")
    p.add_argument("text")
    p.add_argument("--stages", type=int, default=50)
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=cmd_saturate)

    p = sub.add_parser("gallery", help="write the gallery of checked proofs")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_gallery)
    return ap


def run(argv=None, stdout=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    out = Reporter(args.pretty, stdout)
    try:
        return args.func(args, out)
    except FormulaSyntaxError as e:
        out.emit({"command": args.command, "error": "syntax", "message": str(e),
                  "position": getattr(e, "pos", None)})
    except FileNotFoundError as e:
        out.emit({"command": args.command, "error": "file-not-found", "message": str(e)})
    except json.JSONDecodeError as e:
        out.emit({"command": args.command, "error": "malformed-json", "message": e.msg,
                  "line": e.lineno, "column": e.colno})
    except (ProofFormatError, ModelError, NotPropositional, UsageError) as e:
        out.emit({"command": args.command, "error": type(e).__name__, "message": str(e)})
    except SaturationError as e:
        out.emit({"command": args.command, "error": "saturation", "message": str(e)})
        return EXIT_NO
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())
