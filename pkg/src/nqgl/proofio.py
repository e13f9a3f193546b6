"""JSON encoding of proof trees.

A node is ``{rule, conclusion, premises, ann}`` with the conclusion written
as sequent text.  An omega node carries ``cert: {template, K}`` instead of
premises; template formulas may contain ``dia^(n+c) A``.  Proofs in the GL
calculus are tagged ``"calculus": "gl"`` at the root.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .gl import GLProof, GLRule
from .kernel import Proof, Rule, SchematicCertificate
from .syntax import Formula, Sequent, Var, parse, parse_sequent, sequent_text, sorted_formulas, to_text


class ProofFormatError(ValueError):
    pass


_VAR = re.compile(r"v(\d+)\Z")


def _var(text) -> Var:
    m = _VAR.match(str(text))
    if not m:
        raise ProofFormatError(f"not a variable: {text!r}")
    return Var(int(m.group(1)))


def _ann_to_json(ann: dict) -> dict:
    out = {}
    for key, val in sorted(ann.items()):
        if key == "cert":
            continue
        if isinstance(val, Formula):
            out[key] = to_text(val)
        elif isinstance(val, frozenset):
            out[key] = [to_text(f) for f in sorted_formulas(val)]
        elif isinstance(val, Var):
            out[key] = str(val)
        else:
            out[key] = val
    return out


def proof_to_json(p: Proof) -> dict:
    node = {"rule": p.rule.value, "conclusion": sequent_text(p.conclusion)}
    if p.rule is Rule.OMEGA:
        cert = p.ann["cert"]
        node["cert"] = {"template": proof_to_json(cert.template), "K": cert.K}
        return node
    node["premises"] = [proof_to_json(q) for q in p.premises]
    node["ann"] = _ann_to_json(p.ann)
    return node


def gl_proof_to_json(p: GLProof, root: bool = True) -> dict:
    node: dict = {"rule": p.rule.value, "conclusion": sequent_text(p.conclusion)}
    if root:
        node = {"calculus": "gl", **node}
    ann = {}
    if p.principal is not None:
        ann["principal"] = to_text(p.principal)
    if p.boxed is not None:
        ann["boxed"] = [to_text(f) for f in sorted_formulas(p.boxed)]
    node["premises"] = [gl_proof_to_json(q, False) for q in p.premises]
    node["ann"] = ann
    return node


def _formula(text, symbolic: bool) -> Formula:
    if not isinstance(text, str):
        raise ProofFormatError(f"expected formula text, got {text!r}")
    return parse(text, allow_symbolic=symbolic)


def _sequent(text, symbolic: bool) -> Sequent:
    if not isinstance(text, str):
        raise ProofFormatError(f"expected sequent text, got {text!r}")
    return parse_sequent(text, allow_symbolic=symbolic)


def _require(node, key):
    if not isinstance(node, dict) or key not in node:
        raise ProofFormatError(f"proof node missing {key!r}")
    return node[key]


def proof_from_json(node, symbolic: bool = False) -> Proof:
    try:
        rule = Rule(_require(node, "rule"))
    except ValueError:
        raise ProofFormatError(f"unknown rule {node.get('rule')!r}") from None
    concl = _sequent(_require(node, "conclusion"), symbolic)
    if rule is Rule.OMEGA:
        cert = _require(node, "cert")
        template = proof_from_json(_require(cert, "template"), symbolic=True)
        K = cert.get("K", 3)
        if not isinstance(K, int) or K < 0:
            raise ProofFormatError(f"bad instance bound K={K!r}")
        return Proof(rule, concl, (), {"cert": SchematicCertificate(template, K)})
    prems = node.get("premises", [])
    if not isinstance(prems, list):
        raise ProofFormatError("premises must be a list")
    ann_in = node.get("ann", {}) or {}
    ann: dict = {}
    for key, val in ann_in.items():
        if key in ("gamma", "delta"):
            ann[key] = frozenset(_formula(t, symbolic) for t in val)
        elif key in ("eigen", "witness"):
            ann[key] = _var(val)
        elif key in ("formula", "principal"):
            ann[key] = _formula(val, symbolic)
        else:
            raise ProofFormatError(f"unknown annotation {key!r}")
    return Proof(rule, concl, tuple(proof_from_json(q, symbolic) for q in prems), ann)


def gl_proof_from_json(node) -> GLProof:
    try:
        rule = GLRule(_require(node, "rule"))
    except ValueError:
        raise ProofFormatError(f"unknown GL rule {node.get('rule')!r}") from None
    concl = _sequent(_require(node, "conclusion"), False)
    ann = node.get("ann", {}) or {}
    principal = _formula(ann["principal"], False) if "principal" in ann else None
    boxed = frozenset(_formula(t, False) for t in ann["boxed"]) if "boxed" in ann else None
    prems = tuple(gl_proof_from_json(q) for q in node.get("premises", []))
    return GLProof(rule, concl, prems, principal, boxed)


def load_proof(path) -> Proof | GLProof:
    data = json.loads(Path(path).read_text())
    return proof_from_data(data)


def proof_from_data(data) -> Proof | GLProof:
    if isinstance(data, dict) and data.get("calculus") == "gl":
        return gl_proof_from_json(data)
    return proof_from_json(data)


def dump_proof(p, path) -> None:
    data = gl_proof_to_json(p) if isinstance(p, GLProof) else proof_to_json(p)
    Path(path).write_text(json.dumps(data, indent=1) + "\n")
