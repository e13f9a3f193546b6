"""Exhaustive validity oracle over small finite transitive irreflexive frames.

The inner loop (every frame times every valuation) runs in the compiled
extension when it is importable.  Set ``NQGL_PURE_PYTHON=1`` to force the
pure-Python evaluator.
"""

from __future__ import annotations

import itertools
import os
from functools import lru_cache

from . import _oracle_py
from .kripke import Frame, KripkeModel
from .syntax import And, Atom, Bot, Box, Formula, Implies, Not, Top, atoms_of, is_propositional, sort_key

if os.environ.get("NQGL_PURE_PYTHON"):
    _ext = None
else:
    try:
        from . import _oracle_ext as _ext
    except ImportError:  # extension not built
        _ext = None

BACKEND = "compiled" if _ext is not None else "python"
_find = _ext.find_refutation if _ext is not None else _oracle_py.find_refutation


def backend_find(backend: str):
    if backend == "python":
        return _oracle_py.find_refutation
    if backend == "compiled":
        if _ext is None:
            raise RuntimeError("compiled oracle is not available")
        return _ext.find_refutation
    raise ValueError(backend)


@lru_cache(maxsize=None)
def strict_orders(n: int) -> tuple:
    """Transitive irreflexive relations on ``n`` worlds, one per isomorphism class.

    Each entry is a tuple of successor bitmasks.  Every finite strict order
    has a linear extension, so it suffices to enumerate relations whose
    edges point from lower to higher labels.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    perms = list(itertools.permutations(range(n)))
    seen = set()
    out = []
    for bits in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
        if any((a, c) not in rel for (a, b) in rel for (b2, c) in rel if b == b2):
            continue
        canon = min(tuple(sorted((p[a], p[b]) for a, b in rel)) for p in perms)
        if canon in seen:
            continue
        seen.add(canon)
        succ = [0] * n
        for a, b in rel:
            succ[a] |= 1 << b
        out.append(tuple(succ))
    return tuple(out)


def frames_up_to(max_worlds: int) -> list:
    return [f for n in range(1, max_worlds + 1) for f in strict_orders(n)]


def compile_formula(phi: Formula, atom_index: dict) -> tuple[list, list]:
    ops: list = []
    args: list = []

    def emit(f):
        t = type(f)
        if t is Top:
            ops.append(_oracle_py.OP_TOP); args.append(0)
        elif t is Bot:
            ops.append(_oracle_py.OP_BOT); args.append(0)
        elif t is Atom:
            ops.append(_oracle_py.OP_ATOM); args.append(atom_index[f])
        elif t is Not or t is Box:
            emit(f.body)
            ops.append(_oracle_py.OP_NOT if t is Not else _oracle_py.OP_BOX); args.append(0)
        elif t is And or t is Implies:
            emit(f.left)
            emit(f.right)
            ops.append(_oracle_py.OP_AND if t is And else _oracle_py.OP_IMP); args.append(0)
        else:
            raise ValueError(f"not a propositional formula: {f}")

    emit(phi)
    return ops, args


def validity_oracle(phi: Formula, max_worlds: int = 4, backend: str | None = None):
    """A refuting ``(model, world)`` over frames with at most ``max_worlds`` worlds, or None."""
    if not is_propositional(phi):
        raise ValueError("the oracle handles propositional formulas only")
    atoms = sorted(atoms_of(phi), key=sort_key)
    index = {a: i for i, a in enumerate(atoms)}
    ops, args = compile_formula(phi, index)
    frames = frames_up_to(max_worlds)
    find = _find if backend is None else backend_find(backend)
    hit = find(ops, args, len(atoms), frames)
    if hit is None:
        return None
    fi, val, world = hit
    return _to_model(frames[fi], atoms, val), f"w{world}"


def _to_model(succ: tuple, atoms: list, val: tuple) -> KripkeModel:
    n = len(succ)
    worlds = [f"w{i}" for i in range(n)]
    edges = [(f"w{a}", f"w{b}") for a in range(n) for b in range(n) if succ[a] >> b & 1]
    interp = {
        f"w{i}": {a.pred: [()] for a, mask in zip(atoms, val) if mask >> i & 1}
        for i in range(n)
    }
    return KripkeModel(Frame(worlds, edges), {w: ["d0"] for w in worlds}, interp)
