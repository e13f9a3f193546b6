"""Formulas, sequents, parsing and printing, substitution and set operators.

The AST holds only the primitive connectives (T, F, atoms, &, ->, ~, forall,
box).  Disjunction, the existential quantifier and the diamond are expanded
by the parser:

    A | B       ~(~A & ~B)
    exists x. A ~forall x. ~A
    dia A       ~box ~A

The printer folds ``~box ~A`` back to ``dia A`` so that towers stay readable;
the folding is a pure abbreviation and re-parses to the same tree.

Templates used by schematic certificates may contain the leaf
``dia^(n) A`` (``SymDia``), standing for the diamond applied ``n`` times to
``A`` for a symbolic exponent ``n``.  ``dia^(n+2) A`` parses to two explicit
diamonds around that leaf.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class FormulaSyntaxError(ValueError):
    """Raised on malformed formula or sequent text."""

    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


class ArityError(FormulaSyntaxError):
    pass


class CaptureError(ValueError):
    """Substitution would capture the substituted variable."""


@dataclass(frozen=True, order=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("variable index must be non-negative")

    def __str__(self):
        return f"v{self.index}"


@dataclass(frozen=True, order=True)
class PredicateSymbol:
    name: str
    arity: int


# --------------------------------------------------------------------------
# Formula nodes.  Hashes are cached: formulas are used as set members on
# every step of proof search.


class Formula:
    __slots__ = ("_hash", "_key")

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"<{type(self).__name__} {to_text(self)}>"


class _Const(Formula):
    __slots__ = ()

    def _fields(self):
        return ()


class Top(_Const):
    __slots__ = ()


class Bot(_Const):
    __slots__ = ()


class SymDia(Formula):
    """Diamond applied a symbolic number of times (template leaf)."""

    __slots__ = ("body",)

    def __init__(self, body: Formula):
        object.__setattr__(self, "body", body)

    def _fields(self):
        return (self.body,)


class Atom(Formula):
    __slots__ = ("pred", "args")

    def __init__(self, pred: str, args: Iterable[Var] = ()):
        object.__setattr__(self, "pred", pred)
        object.__setattr__(self, "args", tuple(args))

    @property
    def symbol(self) -> PredicateSymbol:
        return PredicateSymbol(self.pred, len(self.args))

    def _fields(self):
        return (self.pred, self.args)


class _Unary(Formula):
    __slots__ = ("body",)

    def __init__(self, body: Formula):
        object.__setattr__(self, "body", body)

    def _fields(self):
        return (self.body,)


class Not(_Unary):
    __slots__ = ()


class Box(_Unary):
    __slots__ = ()


class _Binary(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def _fields(self):
        return (self.left, self.right)


class And(_Binary):
    __slots__ = ()


class Implies(_Binary):
    __slots__ = ()


class ForAll(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var: Var, body: Formula):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _fields(self):
        return (self.var, self.body)


TOP = Top()
BOT = Bot()


# derived forms -------------------------------------------------------------

def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Exists(x: Var, a: Formula) -> Formula:
    return Not(ForAll(x, Not(a)))


def Dia(a: Formula) -> Formula:
    return Not(Box(Not(a)))


def dia_body(phi: Formula) -> Formula | None:
    """Return ``A`` if ``phi`` is literally ``~box ~A``."""
    if type(phi) is Not and type(phi.body) is Box and type(phi.body.body) is Not:
        return phi.body.body.body
    return None


def diamond_tower(n: int, base: Formula = TOP) -> Formula:
    """The diamond applied ``n`` times to ``base`` (default T), fully expanded."""
    if n < 0:
        raise ValueError("tower height must be non-negative")
    f = base
    for _ in range(n):
        f = Dia(f)
    return f


def box_tower(n: int, base: Formula) -> Formula:
    f = base
    for _ in range(n):
        f = Box(f)
    return f


def tower_height(phi: Formula) -> int | None:
    """If ``phi`` is a concrete diamond tower over T, its height."""
    n = 0
    while True:
        if type(phi) is Top:
            return n
        inner = dia_body(phi)
        if inner is None:
            return None
        phi = inner
        n += 1


def height_bound(n: int) -> Formula:
    """``box ~dia^n T``, the formula marking a GL-pair."""
    return Box(Not(diamond_tower(n)))


def box_set(s: Iterable[Formula]) -> frozenset:
    return frozenset(Box(f) for f in s)


def unbox_set(s: Iterable[Formula]) -> frozenset:
    return frozenset(f.body for f in s if type(f) is Box)


# variables -------------------------------------------------------------------

def vars_of(phi: Formula) -> frozenset:
    """Variables with a free or bound occurrence in ``phi``."""
    out: set = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        t = type(f)
        if t is Atom:
            out.update(f.args)
        elif t is ForAll:
            out.add(f.var)
            stack.append(f.body)
        elif t is And or t is Implies:
            stack.append(f.left)
            stack.append(f.right)
        elif t is Not or t is Box or t is SymDia:
            stack.append(f.body)
    return frozenset(out)


def vars_of_set(s: Iterable[Formula]) -> frozenset:
    out: frozenset = frozenset()
    for f in s:
        out |= vars_of(f)
    return out


def free_vars(phi: Formula) -> frozenset:
    t = type(phi)
    if t is Atom:
        return frozenset(phi.args)
    if t is ForAll:
        return free_vars(phi.body) - {phi.var}
    if t is And or t is Implies:
        return free_vars(phi.left) | free_vars(phi.right)
    if t is Not or t is Box or t is SymDia:
        return free_vars(phi.body)
    return frozenset()


def substitute(phi: Formula, z: Var, x: Var) -> Formula:
    """Replace free occurrences of ``x`` by ``z``; raise CaptureError on capture."""
    if z == x:
        return phi
    return _subst(phi, z, x)


def _subst(phi: Formula, z: Var, x: Var) -> Formula:
    t = type(phi)
    if t is Atom:
        if x not in phi.args:
            return phi
        return Atom(phi.pred, tuple(z if a == x else a for a in phi.args))
    if t is ForAll:
        if phi.var == x or x not in free_vars(phi.body):
            return phi
        if phi.var == z:
            raise CaptureError(f"{z} would be captured by forall {phi.var}")
        return ForAll(phi.var, _subst(phi.body, z, x))
    if t is And or t is Implies:
        return t(_subst(phi.left, z, x), _subst(phi.right, z, x))
    if t is Not or t is Box or t is SymDia:
        return t(_subst(phi.body, z, x))
    return phi


def size(phi: Formula) -> int:
    t = type(phi)
    if t is And or t is Implies:
        return 1 + size(phi.left) + size(phi.right)
    if t is Not or t is Box or t is SymDia or t is ForAll:
        return 1 + size(phi.body)
    return 1


def modal_depth(phi: Formula) -> int:
    t = type(phi)
    if t is Box:
        return 1 + modal_depth(phi.body)
    if t is And or t is Implies:
        return max(modal_depth(phi.left), modal_depth(phi.right))
    if t is Not or t is ForAll or t is SymDia:
        return modal_depth(phi.body)
    return 0


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal of the syntactic subformulas (with repeats)."""
    yield phi
    t = type(phi)
    if t is And or t is Implies:
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif t is Not or t is Box or t is ForAll or t is SymDia:
        yield from subformulas(phi.body)


def atoms_of(phi: Formula) -> frozenset:
    return frozenset(f for f in subformulas(phi) if type(f) is Atom)


def is_propositional(phi: Formula) -> bool:
    for f in subformulas(phi):
        t = type(f)
        if t is ForAll or t is SymDia or (t is Atom and f.args):
            return False
    return True


def has_symbolic(phi: Formula) -> bool:
    return any(type(f) is SymDia for f in subformulas(phi))


def instantiate_symbolic(phi: Formula, k: int) -> Formula:
    """Replace every ``dia^(n) A`` leaf by the concrete tower of height ``k``."""
    t = type(phi)
    if t is SymDia:
        return diamond_tower(k, instantiate_symbolic(phi.body, k))
    if t is And or t is Implies:
        return t(instantiate_symbolic(phi.left, k), instantiate_symbolic(phi.right, k))
    if t is Not or t is Box:
        return t(instantiate_symbolic(phi.body, k))
    if t is ForAll:
        return ForAll(phi.var, instantiate_symbolic(phi.body, k))
    return phi


# --------------------------------------------------------------------------
# Printing.  Precedence levels: 0 implication, 1 disjunction (never printed),
# 2 conjunction, 3 prefix operators.

def to_text(phi: Formula) -> str:
    return _show(phi, 0)


def _show(phi: Formula, ctx: int) -> str:
    t = type(phi)
    if t is Top:
        return "T"
    if t is Bot:
        return "F"
    if t is Atom:
        if not phi.args:
            return phi.pred
        return f"{phi.pred}({','.join(str(a) for a in phi.args)})"
    if t is Implies:
        s = f"{_show(phi.left, 1)} -> {_show(phi.right, 0)}"
        return s if ctx <= 0 else f"({s})"
    if t is And:
        s = f"{_show(phi.left, 2)} & {_show(phi.right, 3)}"
        return s if ctx <= 2 else f"({s})"
    if t is SymDia:
        return f"dia^(n) {_show(phi.body, 3)}"
    inner = dia_body(phi)
    if inner is not None:
        return f"dia {_show(inner, 3)}"
    if t is Not:
        return f"~{_show(phi.body, 3)}"
    if t is Box:
        return f"box {_show(phi.body, 3)}"
    if t is ForAll:
        # the body of a prefix quantifier extends only over a prefix-level
        # formula, so binary bodies need parentheses
        return f"forall {phi.var}. {_show(phi.body, 3)}"
    raise TypeError(f"not a formula: {phi!r}")


def sort_key(phi: Formula) -> str:
    try:
        return phi._key
    except AttributeError:
        k = to_text(phi)
        object.__setattr__(phi, "_key", k)
        return k


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<turnstile>\|-)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[()~&|,.])"
    r"|(?P<symexp>\^\(\s*n\s*(?:\+\s*\d+\s*)?\))"
    r"|(?P<var>v\d+)\b"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r")"
)

_KEYWORDS = {"box", "dia", "forall", "exists"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "word" and value in _KEYWORDS:
            kind = value
        out.append((kind, value, start))
        pos = m.end()
    out.append(("eof", "", n))
    return out


class _Parser:
    def __init__(self, text: str, signature: dict | None, allow_symbolic: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature if signature is not None else {}
        self.allow_symbolic = allow_symbolic

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.advance()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise FormulaSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return tok

    def at(self, kind, value=None):
        tok = self.peek()
        return tok[0] == kind and (value is None or tok[1] == value)

    def formula(self) -> Formula:
        return self.implication()

    def implication(self):
        left = self.disjunction()
        if self.at("arrow"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.at("punct", "|"):
            self.advance()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.prefix()
        while self.at("punct", "&"):
            self.advance()
            f = And(f, self.prefix())
        return f

    def prefix(self):
        kind, value, pos = self.peek()
        if kind == "punct" and value == "~":
            self.advance()
            return Not(self.prefix())
        if kind == "box":
            self.advance()
            return Box(self.prefix())
        if kind == "dia":
            self.advance()
            if self.at("symexp"):
                _, exp, epos = self.advance()
                if not self.allow_symbolic:
                    raise FormulaSyntaxError("symbolic exponent outside a template", epos, self.text)
                m = re.search(r"\+\s*(\d+)", exp)
                offset = int(m.group(1)) if m else 0
                return diamond_tower(offset, SymDia(self.prefix()))
            return Dia(self.prefix())
        if kind in ("forall", "exists"):
            self.advance()
            var = self.variable()
            self.expect("punct", ".")
            body = self.prefix()
            return ForAll(var, body) if kind == "forall" else Exists(var, body)
        return self.primary()

    def variable(self) -> Var:
        kind, value, pos = self.advance()
        if kind != "var":
            raise FormulaSyntaxError(f"expected a variable vN, found {value or 'end of input'!r}", pos, self.text)
        return Var(int(value[1:]))

    def primary(self):
        kind, value, pos = self.advance()
        if kind == "punct" and value == "(":
            f = self.formula()
            self.expect("punct", ")")
            return f
        if kind == "word":
            if value == "T":
                return TOP
            if value == "F":
                return BOT
            if not value[0].isupper():
                raise FormulaSyntaxError(f"predicate names start with an uppercase letter: {value!r}", pos, self.text)
            args: list[Var] = []
            if self.at("punct", "("):
                self.advance()
                if not self.at("punct", ")"):
                    args.append(self.variable())
                    while self.at("punct", ","):
                        self.advance()
                        args.append(self.variable())
                self.expect("punct", ")")
            known = self.sig.get(value)
            if known is None:
                self.sig[value] = len(args)
            elif known != len(args):
                raise ArityError(f"predicate {value} used with arity {len(args)}, expected {known}", pos, self.text)
            return Atom(value, args)
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", pos, self.text)

    def formula_list(self, stop_kinds) -> list[Formula]:
        out: list[Formula] = []
        if self.peek()[0] in stop_kinds:
            return out
        out.append(self.formula())
        while self.at("punct", ","):
            self.advance()
            out.append(self.formula())
        return out


def parse(text: str, signature: dict | None = None, *, allow_symbolic: bool = False) -> Formula:
    """Parse formula text.

    ``signature`` maps predicate names to arities; it is filled in as new
    names are seen, so passing the same dict across calls enforces
    consistent arities.
    """
    p = _Parser(text, signature, allow_symbolic)
    f = p.formula()
    if not p.at("eof"):
        _, value, pos = p.peek()
        raise FormulaSyntaxError(f"trailing input {value!r}", pos, text)
    return f


# --------------------------------------------------------------------------
# Sequents


@dataclass(frozen=True)
class Sequent:
    ante: frozenset = field(default_factory=frozenset)
    succ: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.ante, frozenset):
            object.__setattr__(self, "ante", frozenset(self.ante))
        if not isinstance(self.succ, frozenset):
            object.__setattr__(self, "succ", frozenset(self.succ))

    @classmethod
    def of(cls, ante: Iterable[Formula] = (), succ: Iterable[Formula] = ()) -> "Sequent":
        return cls(frozenset(ante), frozenset(succ))

    def formulas(self) -> frozenset:
        return self.ante | self.succ

    def vars(self) -> frozenset:
        return vars_of_set(self.formulas())

    def free_vars(self) -> frozenset:
        out: frozenset = frozenset()
        for f in self.formulas():
            out |= free_vars(f)
        return out

    def __str__(self):
        return sequent_text(self)


def sorted_formulas(s: Iterable[Formula]) -> list[Formula]:
    return sorted(s, key=sort_key)


def sequent_text(s: Sequent) -> str:
    left = ", ".join(to_text(f) for f in sorted_formulas(s.ante))
    right = ", ".join(to_text(f) for f in sorted_formulas(s.succ))
    if left and right:
        return f"{left} |- {right}"
    if left:
        return f"{left} |-"
    if right:
        return f"|- {right}"
    return "|-"


def parse_sequent(text: str, signature: dict | None = None, *, allow_symbolic: bool = False) -> Sequent:
    """Parse ``G1, G2 |- D1, D2``; text without a turnstile is ``|- text``."""
    p = _Parser(text, signature, allow_symbolic)
    if not any(t[0] == "turnstile" for t in p.toks):
        return Sequent.of((), [parse(text, p.sig, allow_symbolic=allow_symbolic)])
    ante = p.formula_list(("turnstile",))
    p.expect("turnstile")
    succ = p.formula_list(("eof",))
    if not p.at("eof"):
        _, value, pos = p.peek()
        raise FormulaSyntaxError(f"trailing input {value!r}", pos, text)
    return Sequent.of(ante, succ)


# --------------------------------------------------------------------------
# Variable universes


@dataclass(frozen=True)
class VariableUniverse:
    """A finite explicit set of variables plus an untouched reserve.

    Every variable with index at or above ``watermark`` is unused, so the
    complement of the explicit part is always infinite.
    """

    explicit: frozenset = frozenset()
    watermark: int = 0

    def __post_init__(self):
        object.__setattr__(self, "explicit", frozenset(self.explicit))
        if any(v.index >= self.watermark for v in self.explicit):
            raise ValueError("explicit variables must lie below the reserve watermark")

    @classmethod
    def covering(cls, variables: Iterable[Var], watermark: int = 0) -> "VariableUniverse":
        vs = frozenset(variables)
        top = max((v.index + 1 for v in vs), default=0)
        return cls(vs, max(top, watermark))

    def __contains__(self, v: Var) -> bool:
        return v in self.explicit

    def __iter__(self):
        return iter(sorted(self.explicit))

    def __len__(self):
        return len(self.explicit)

    def fresh(self) -> tuple[Var, "VariableUniverse"]:
        """Draw the first reserve variable and add it to the explicit part."""
        z = Var(self.watermark)
        return z, VariableUniverse(self.explicit | {z}, self.watermark + 1)

    def reserve_var(self, offset: int = 0) -> Var:
        return Var(self.watermark + offset)

    def extend(self, variables: Iterable[Var]) -> "VariableUniverse":
        return VariableUniverse.covering(self.explicit | frozenset(variables), self.watermark)

    def within(self, phi: Formula) -> bool:
        return vars_of(phi) <= self.explicit

    def issubset(self, other: "VariableUniverse") -> bool:
        return self.explicit <= other.explicit


def fresh_var(avoid: Iterable[Var]) -> Var:
    return Var(max((v.index for v in avoid), default=-1) + 1)
