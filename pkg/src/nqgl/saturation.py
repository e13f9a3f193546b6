"""Finitely consistent pairs, staged saturation and canonical-model fragments.

Consistency of a pair ``(S, T)`` is approximated by bounded cut-free search
for ``S |- T``; every result therefore carries the depth it was computed at.
Because the search applies rules cumulatively, searching the whole finite
pair is the same as searching all of its finite subpairs.

Saturation follows the staged construction: formulas are visited along the
triangular schedule g0; g0,g1; g0,g1,g2; ... and each visit applies the case
for the formula's main connective.  The schedule ranges over the subformula
closure of the pair, grown as instances are added.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .kripke import Frame, KripkeModel, forces, validate_model, classify_frame, refutes_sequent
from .search import ProofSearch
from .syntax import (
    And, Atom, Box, CaptureError, ForAll, Formula, Implies, Not, Sequent, Var, VariableUniverse,
    box_set, free_vars, height_bound, sorted_formulas, subformulas, substitute, to_text, unbox_set,
)

DEFAULT_DEPTH = 6
DEFAULT_CAP = 8


class SaturationError(Exception):
    pass


class NoConsistentChoice(SaturationError):
    def __init__(self, stage: int, formula: Formula, depth: int):
        super().__init__(f"stage {stage}: no consistent choice for {to_text(formula)} at depth {depth}")
        self.stage = stage
        self.formula = formula


class SeedInconsistent(SaturationError):
    pass


class ProvableSequent(SaturationError):
    def __init__(self, sequent: Sequent, proof):
        super().__init__(f"{sequent} is provable")
        self.proof = proof


class NoHeightBound(SaturationError):
    pass


@dataclass(frozen=True)
class Pair:
    left: frozenset = frozenset()
    right: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))

    def add(self, left: Iterable[Formula] = (), right: Iterable[Formula] = ()) -> "Pair":
        return Pair(self.left | frozenset(left), self.right | frozenset(right))

    def as_sequent(self) -> Sequent:
        return Sequent(self.left, self.right)

    def formulas(self) -> frozenset:
        return self.left | self.right


class ConsistencyOracle:
    """Memoised ``S |/- T`` by bounded search at a fixed depth."""

    def __init__(self, depth: int = DEFAULT_DEPTH, max_nodes: int = 100_000):
        self.depth = depth
        self.max_nodes = max_nodes
        self._memo: dict = {}
        self.calls = 0
        self.inconclusive = 0

    def __call__(self, p: Pair) -> bool:
        key = (p.left, p.right)
        if key not in self._memo:
            self.calls += 1
            search = ProofSearch(self.depth, self.max_nodes)
            self._memo[key] = search.prove(p.as_sequent()) is None
            if search.stats.exhausted:
                self.inconclusive += 1
        return self._memo[key]


def bounded_consistent(p: Pair, depth: int, max_nodes: int = 100_000) -> bool:
    return ConsistencyOracle(depth, max_nodes)(p)


# --------------------------------------------------------------------------
# staged saturation


@dataclass(frozen=True)
class StageRecord:
    stage: int
    formula: Formula
    side: str | None  # "S", "T" or None when the formula is in neither
    case: str
    choice: str = ""
    added_left: tuple = ()
    added_right: tuple = ()
    new_var: Var | None = None

    def as_dict(self) -> dict:
        d = {"stage": self.stage, "formula": to_text(self.formula), "side": self.side, "case": self.case}
        if self.choice:
            d["choice"] = self.choice
        if self.added_left:
            d["added_left"] = [to_text(f) for f in self.added_left]
        if self.added_right:
            d["added_right"] = [to_text(f) for f in self.added_right]
        if self.new_var is not None:
            d["new_var"] = str(self.new_var)
        return d


@dataclass
class SaturationState:
    universe: VariableUniverse
    pair: Pair
    stage: int = 0
    schedule: list = field(default_factory=list)
    processed: dict = field(default_factory=dict)  # formula -> universe at its last visit
    trace: list = field(default_factory=list)
    history: list = field(default_factory=list)  # (universe, left, right) after each stage
    depth: int = DEFAULT_DEPTH
    exhausted: bool = False
    captures: list = field(default_factory=list)


def _closure_order(formulas: Iterable[Formula]) -> list:
    out: list = []
    seen: set = set()
    for f in sorted_formulas(formulas):
        for g in subformulas(f):
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


class Saturator:
    def __init__(self, start: Pair, universe: VariableUniverse, depth: int = DEFAULT_DEPTH,
                 oracle: ConsistencyOracle | None = None):
        self.oracle = oracle if oracle is not None else ConsistencyOracle(depth)
        self.state = SaturationState(universe, start, depth=self.oracle.depth)
        self.state.schedule = _closure_order(start.formulas())
        self._known = set(self.state.schedule)
        self._block = 0
        self._pos = 0

    def _extend_schedule(self, formulas: Iterable[Formula]) -> None:
        for g in _closure_order(formulas):
            if g not in self._known:
                self._known.add(g)
                self.state.schedule.append(g)

    def _next_formula(self) -> Formula:
        sched = self.state.schedule
        limit = min(self._block, len(sched) - 1)
        f = sched[self._pos]
        if self._pos >= limit:
            self._block += 1
            self._pos = 0
        else:
            self._pos += 1
        return f

    def step(self) -> StageRecord:
        st = self.state
        f = self._next_formula()
        rec = self._apply(f)
        st.stage += 1
        if rec.side is not None:
            st.processed[f] = st.universe
        if rec.added_left or rec.added_right:
            self._extend_schedule(rec.added_left + rec.added_right)
        st.trace.append(rec)
        st.history.append((st.universe, st.pair.left, st.pair.right))
        return rec

    def run(self, stages: int) -> SaturationState:
        for _ in range(stages):
            self.step()
        return self.state

    def run_to_exhaustion(self, max_stages: int = 20_000) -> SaturationState:
        """Step until one full pass over the schedule changes nothing."""
        quiet = 0
        while self.state.stage < max_stages:
            rec = self.step()
            changed = bool(rec.added_left or rec.added_right or rec.new_var)
            quiet = 0 if changed else quiet + 1
            full_pass = self._block > len(self.state.schedule)
            if full_pass and quiet > len(self.state.schedule):
                self.state.exhausted = True
                break
        return self.state

    # ------------------------------------------------------------------

    def _commit(self, f, side, case, left=(), right=(), choice="", universe=None, new_var=None):
        st = self.state
        left = tuple(sorted_formulas(set(left) - st.pair.left))
        right = tuple(sorted_formulas(set(right) - st.pair.right))
        if left or right:
            cand = st.pair.add(left, right)
            if not self.oracle(cand):
                raise NoConsistentChoice(st.stage, f, self.oracle.depth)
            st.pair = cand
        if universe is not None:
            st.universe = universe
        return StageRecord(st.stage, f, side, case, choice, left, right, new_var)

    def _try_choices(self, f, side, case, options):
        """Commit the first option that keeps the pair consistent."""
        st = self.state
        for label, left, right in options:
            cand = st.pair.add(left, right)
            if self.oracle(cand):
                return self._commit(f, side, case, left, right, choice=label)
        raise NoConsistentChoice(st.stage, f, self.oracle.depth)

    def _apply(self, f: Formula) -> StageRecord:
        st = self.state
        S, T = st.pair.left, st.pair.right
        t = type(f)
        side = "S" if f in S else "T" if f in T else None
        if side is None:
            return StageRecord(st.stage, f, None, "absent")
        if t is And:
            if side == "S":
                return self._commit(f, side, "and-S", left=[f.left, f.right])
            if f.left in T or f.right in T:
                return StageRecord(st.stage, f, side, "and-T", "already satisfied")
            return self._try_choices(f, side, "and-T", [("left", [], [f.left]), ("right", [], [f.right])])
        if t is Implies:
            if side == "T":
                return self._commit(f, side, "imp-T", left=[f.left], right=[f.right])
            if f.left in T or f.right in S:
                return StageRecord(st.stage, f, side, "imp-S", "already satisfied")
            return self._try_choices(f, side, "imp-S", [("antecedent", [], [f.left]), ("consequent", [f.right], [])])
        if t is Not:
            if side == "S":
                return self._commit(f, side, "not-S", right=[f.body])
            return self._commit(f, side, "not-T", left=[f.body])
        if t is ForAll:
            if side == "S":
                insts = []
                for z in st.universe:
                    try:
                        insts.append(substitute(f.body, z, f.var))
                    except CaptureError:
                        st.captures.append((f, z))
                return self._commit(f, side, "all-S", left=insts)
            for z in st.universe:
                try:
                    if substitute(f.body, z, f.var) in T:
                        return StageRecord(st.stage, f, side, "all-T", f"already witnessed by {z}")
                except CaptureError:
                    continue
            z, universe = st.universe.fresh()
            inst = substitute(f.body, z, f.var)
            return self._commit(f, side, "all-T", right=[inst], choice=f"fresh {z}", universe=universe, new_var=z)
        return StageRecord(st.stage, f, side, "otherwise")


def saturate_stages(start: Pair, universe: VariableUniverse, stages: int, depth: int = DEFAULT_DEPTH,
                    oracle: ConsistencyOracle | None = None) -> SaturationState:
    sat = Saturator(start, universe, depth, oracle)
    if not sat.oracle(start):
        raise SeedInconsistent(f"start pair is not consistent at depth {sat.oracle.depth}")
    return sat.run(stages)


def saturate(start: Pair, universe: VariableUniverse, depth: int = DEFAULT_DEPTH,
             oracle: ConsistencyOracle | None = None, max_stages: int = 20_000) -> SaturationState:
    sat = Saturator(start, universe, depth, oracle)
    if not sat.oracle(start):
        raise SeedInconsistent(f"start pair is not consistent at depth {sat.oracle.depth}")
    return sat.run_to_exhaustion(max_stages)


# --------------------------------------------------------------------------
# checking saturation


@dataclass
class SaturationReport:
    violations: list
    processed: int
    unprocessed: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "violations": self.violations,
            "processed": self.processed,
            "unprocessed": [to_text(f) for f in self.unprocessed],
        }


def check_saturated(state: SaturationState) -> SaturationReport:
    """Check the four closure conditions on every processed member of the pair."""
    S, T = state.pair.left, state.pair.right
    out: list = []
    shared = S & T
    for f in sorted_formulas(shared):
        out.append(f"{to_text(f)} lies in both S and T")
    unprocessed = []
    for f in sorted_formulas(S | T):
        if f not in state.processed:
            if type(f) in (And, Implies, Not, ForAll):
                unprocessed.append(f)
            continue
        u = state.processed[f]
        t = type(f)
        s = to_text(f)
        if t is And:
            if f in S and not (f.left in S and f.right in S):
                out.append(f"condition 1: {s} in S but a conjunct is missing from S")
            if f in T and not (f.left in T or f.right in T):
                out.append(f"condition 1: {s} in T but neither conjunct is in T")
        elif t is Implies:
            if f in S and not (f.left in T or f.right in S):
                out.append(f"condition 2: {s} in S but neither antecedent in T nor consequent in S")
            if f in T and not (f.left in S and f.right in T):
                out.append(f"condition 2: {s} in T but antecedent not in S or consequent not in T")
        elif t is Not:
            if f in S and f.body not in T:
                out.append(f"condition 3: {s} in S but {to_text(f.body)} not in T")
            if f in T and f.body not in S:
                out.append(f"condition 3: {s} in T but {to_text(f.body)} not in S")
        elif t is ForAll:
            if f in S:
                for z in u:
                    try:
                        inst = substitute(f.body, z, f.var)
                    except CaptureError:
                        out.append(f"condition 4: instance of {s} at {z} would capture {z}")
                        continue
                    if inst not in S:
                        out.append(f"condition 4: {s} in S but {to_text(inst)} not in S")
            if f in T:
                ok = False
                for z in u:
                    try:
                        if substitute(f.body, z, f.var) in T:
                            ok = True
                            break
                    except CaptureError:
                        continue
                if not ok:
                    out.append(f"condition 4: {s} in T without a witness in T")
    return SaturationReport(out, len(state.processed), unprocessed)


def check_pair(pair: Pair, universe: VariableUniverse) -> list:
    """Closure conditions on a hand-built pair, every member treated as processed."""
    st = SaturationState(universe, pair, processed={f: universe for f in pair.formulas()})
    return check_saturated(st).violations


# --------------------------------------------------------------------------
# canonical worlds


@dataclass
class CanonicalWorld:
    universe: VariableUniverse
    pair: Pair
    gl_witness: int
    state: SaturationState | None = None

    def boxed_targets(self) -> list:
        return [f for f in sorted_formulas(self.pair.right) if type(f) is Box]


def gl_witness(left: frozenset, cap: int = 64) -> int | None:
    """Least n with ``box ~dia^n T`` in ``left``."""
    for n in range(cap + 1):
        if height_bound(n) in left:
            return n
    return None


def successor_seed(world: CanonicalWorld, target: Formula) -> Pair:
    carried = unbox_set(world.pair.left)
    return Pair(carried | box_set(carried), {target.body})


def successor_pair(world: CanonicalWorld, target: Formula, depth: int = DEFAULT_DEPTH,
                   oracle: ConsistencyOracle | None = None) -> CanonicalWorld:
    """Saturated GL-pair refuting the body of the boxed succedent ``target``."""
    if type(target) is not Box or target not in world.pair.right:
        raise ValueError(f"{to_text(target)} is not a boxed member of T")
    oracle = oracle if oracle is not None else ConsistencyOracle(depth)
    seed = successor_seed(world, target)
    if not oracle(seed):
        raise SeedInconsistent(
            f"successor seed for {to_text(target)} is inconsistent at depth {oracle.depth}")
    st = saturate(seed, world.universe, oracle=oracle)
    n = gl_witness(st.pair.left)
    if n is None:
        raise NoHeightBound(f"successor for {to_text(target)} lost its height bound")
    return CanonicalWorld(st.universe, st.pair, n, st)


def root_from_sequent(s: Sequent, depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP,
                      oracle: ConsistencyOracle | None = None) -> CanonicalWorld:
    """Least height bound n keeping ``box ~dia^n T, G |- D`` consistent, then saturate."""
    oracle = oracle if oracle is not None else ConsistencyOracle(depth)
    proof = ProofSearch(oracle.depth, oracle.max_nodes).prove(s)
    if proof is not None:
        raise ProvableSequent(s, proof)
    for n in range(cap + 1):
        start = Pair(s.ante | {height_bound(n)}, s.succ)
        if oracle(start):
            break
    else:
        raise NoHeightBound(f"no height bound n <= {cap} is consistent with {s} at depth {oracle.depth}")
    fv = s.free_vars()
    watermark = max((v.index + 1 for v in s.vars()), default=0)
    universe = VariableUniverse(fv, watermark)
    if not fv:
        # domains are non-empty
        universe = universe.fresh()[1]
    st = saturate(start, universe, oracle=oracle)
    return CanonicalWorld(st.universe, st.pair, gl_witness(st.pair.left), st)


def canonical_relation(a: CanonicalWorld, b: CanonicalWorld) -> bool:
    carried = unbox_set(a.pair.left)
    return a.universe.issubset(b.universe) and (carried | box_set(carried)) <= b.pair.left


@dataclass
class CanonicalFragment:
    model: KripkeModel
    root: str
    worlds: dict  # name -> CanonicalWorld
    truncated: list  # (world name, boxed target) pairs left unexpanded

    def world(self, name: str) -> CanonicalWorld:
        return self.worlds[name]


def build_canonical_fragment(root: CanonicalWorld, max_depth: int = 8, depth: int | None = None,
                             oracle: ConsistencyOracle | None = None) -> CanonicalFragment:
    """Expand boxed succedent formulas into successors; R is the canonical relation."""
    oracle = oracle if oracle is not None else ConsistencyOracle(depth if depth is not None else root.state.depth
                                                                 if root.state else DEFAULT_DEPTH)
    worlds: list = [root]
    truncated: list = []
    queue = [(0, 0)]
    while queue:
        idx, level = queue.pop(0)
        w = worlds[idx]
        for target in w.boxed_targets():
            if level >= max_depth:
                truncated.append((f"w{idx}", target))
                continue
            child = successor_pair(w, target, oracle=oracle)
            worlds.append(child)
            queue.append((len(worlds) - 1, level + 1))
    names = [f"w{i}" for i in range(len(worlds))]
    edges = [(names[i], names[j]) for i, a in enumerate(worlds) for j, b in enumerate(worlds)
             if canonical_relation(a, b)]
    domains = {names[i]: [str(v) for v in w.universe] for i, w in enumerate(worlds)}
    interp: dict = {}
    for i, w in enumerate(worlds):
        preds: dict = {}
        for f in w.pair.left:
            if type(f) is Atom and all(a in w.universe for a in f.args):
                preds.setdefault(f.pred, []).append(tuple(str(a) for a in f.args))
        interp[names[i]] = preds
    model = KripkeModel(Frame(names, edges), domains, interp)
    return CanonicalFragment(model, names[0], dict(zip(names, worlds)), truncated)


def identity_env(phi: Formula) -> dict:
    return {v: str(v) for v in free_vars(phi)}


def truth_lemma_violations(frag: CanonicalFragment) -> list:
    """Members of S must be forced and members of T refuted, world by world."""
    out = []
    for name, w in frag.worlds.items():
        processed = w.state.processed if w.state is not None else {}
        for f in sorted_formulas(w.pair.left):
            if f in processed or type(f) in (Atom, Box):
                if not forces(frag.model, name, f, identity_env(f)):
                    out.append(f"{name}: {to_text(f)} in S but not forced")
        for f in sorted_formulas(w.pair.right):
            if f in processed or type(f) in (Atom, Box):
                if forces(frag.model, name, f, identity_env(f)):
                    out.append(f"{name}: {to_text(f)} in T but forced")
    return out


@dataclass
class CountermodelResult:
    fragment: CanonicalFragment
    refutes: bool
    model_problems: list
    frame: object
    truth_lemma: list
    saturation: dict

    @property
    def ok(self) -> bool:
        fr = self.frame
        return (self.refutes and not self.model_problems and fr.transitive and fr.irreflexive
                and fr.bounded_length and not self.truth_lemma
                and all(r.ok for r in self.saturation.values()))


def countermodel(s: Sequent, depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP,
                 max_depth: int | None = None) -> CountermodelResult:
    """Root world, canonical fragment and every check on it."""
    oracle = ConsistencyOracle(depth)
    root = root_from_sequent(s, cap=cap, oracle=oracle)
    frag = build_canonical_fragment(root, max_depth=max_depth if max_depth is not None else cap + 1, oracle=oracle)
    env = {v: str(v) for v in s.free_vars()}
    refutes = refutes_sequent(frag.model, frag.root, s, env)
    sat = {name: check_saturated(w.state) for name, w in frag.worlds.items()}
    return CountermodelResult(frag, refutes, validate_model(frag.model), classify_frame(frag.model.frame),
                              truth_lemma_violations(frag), sat)
