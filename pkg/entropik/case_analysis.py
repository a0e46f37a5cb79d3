from __future__ import annotations

import asyncio
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from entropik.dsl.formatter import jet_name
from entropik.dsl.parser import DslError, Scope, parse_expression
from entropik.entropy_split import ConstraintSystem, NonzeroFacts, normalize_constraint
from entropik.errors import DepthCapExceeded, DivisionByZeroExpr, ParseFailed
from entropik.kernel.atoms import Atom, dominates, partial, slots_of, unit
from entropik.kernel.calculus import argument_derivative_multi
from entropik.kernel.expr import Expr, substitute
from entropik.kernel.poly import Poly
from entropik.kernel.tree import normalize, tree_atoms
from entropik.model import ModelDef

logger = logging.getLogger(__name__)

ZERO_POLARITY = "zero"
NONZERO_POLARITY = "nonzero"

DEFAULT_PIVOTS = 3

_RESOLVE_PASSES = 8
_SETTLE_ROUNDS = 64


@dataclass(frozen=True)
class Assumption:
    expr: Expr
    polarity: str

    def __post_init__(self) -> None:
        if self.expr.is_constant():
            raise ValueError("an assumption needs a nonconstant expression")
        if self.polarity not in (ZERO_POLARITY, NONZERO_POLARITY):
            raise ValueError(f"unknown polarity {self.polarity!r}")

    @property
    def is_zero(self) -> bool:
        return self.polarity == ZERO_POLARITY

    def negated(self) -> Assumption:
        return Assumption(self.expr, NONZERO_POLARITY if self.is_zero else ZERO_POLARITY)


def parse_assumption(text: str, m: ModelDef) -> Assumption:
    """``EXPR = 0`` or ``EXPR != 0`` in the model expression grammar."""
    if "!=" in text:
        lhs, _, rhs = text.partition("!=")
        polarity = NONZERO_POLARITY
    elif "=" in text:
        lhs, _, rhs = text.partition("=")
        polarity = ZERO_POLARITY
    else:
        raise ParseFailed(f"assumption {text!r} needs '= 0' or '!= 0'", [])
    if rhs.strip() != "0":
        raise ParseFailed(f"assumption {text!r} must compare with 0", [])
    scope = Scope(m.indeps, m.fields, {d.name: d.args for d in m.decls})
    try:
        e = normalize(parse_expression(lhs.strip(), scope), m.space)
    except DslError as err:
        raise ParseFailed(f"assumption {text!r}: {err.message}", []) from None
    if e.is_constant():
        raise ParseFailed(f"assumption {text!r} is a constant", [])
    return Assumption(e, polarity)


def parse_pivot(text: str, cs: ConstraintSystem) -> Expr:
    """A pivot expression in the normal form case reduction reports its needed pivots in."""
    m = cs.model
    scope = Scope(m.indeps, m.fields, {d.name: d.args for d in m.decls})
    try:
        e = normalize(parse_expression(text, scope), m.space)
    except DslError as err:
        raise ParseFailed(f"pivot {text!r}: {err.message}", []) from None
    pivot, _ = normalize_constraint(e, NonzeroFacts.from_exprs(cs.nonzero))
    if pivot.is_constant():
        raise ParseFailed(f"pivot {text!r} is a constant or a certified nonzero factor", [])
    return pivot


def default_classifier(m: ModelDef) -> tuple[str, ...]:
    if m.classify:
        return m.classify
    names = {a.name for a in tree_atoms(m.entropy.lhs) if a.is_constitutive}
    return tuple(d.name for d in m.decls if d.name in names)


@dataclass
class Reduction:
    assumptions: tuple[Assumption, ...]
    solved: dict[Atom, Expr] = field(default_factory=dict)
    constraints: list[Expr] = field(default_factory=list)
    needed: list[Expr] = field(default_factory=list)
    integrability: list[Expr] = field(default_factory=list)
    certificates: list[str] = field(default_factory=list)
    contradiction: str | None = None
    zero_atoms: set[Atom] = field(default_factory=set)

    @property
    def inconsistent(self) -> bool:
        return self.contradiction is not None

    def signature(self) -> tuple:
        return frozenset(self.solved.items()), frozenset(self.constraints)

    def derived_facts(self, m: ModelDef, resolve) -> list[str]:
        """Symbols whose first partials vanish, wholly or per argument."""
        out: list[str] = []
        for d in m.decls:
            zero = [
                j for j in range(d.arity)
                if resolve(Expr.atom(partial(d.name, unit(d.arity, j))), self.solved).is_zero()
            ]
            if d.arity and len(zero) == d.arity:
                out.append(f"{d.name} is constant")
            elif zero:
                names = ", ".join(jet_name(d.args[j], m.indeps) for j in zero)
                out.append(f"{d.name} does not depend on {names}")
        return out


@dataclass
class _State:
    facts: NonzeroFacts
    reduction: Reduction
    generation: dict[Atom, int] = field(default_factory=dict)
    pending: list[tuple[str, Expr]] = field(default_factory=list)
    remaining: list[tuple[str, Expr]] = field(default_factory=list)
    skipped: list[Expr] = field(default_factory=list)
    seen: set[Expr] = field(default_factory=set)
    counts: Counter = field(default_factory=Counter)
    base_facts: NonzeroFacts = field(default_factory=NonzeroFacts)


class Reducer:
    """Linear single-symbol elimination over a constraint system with certified nonzero factors."""

    def __init__(self, cs: ConstraintSystem, classify: tuple[str, ...] | None = None, force_residual_zero: bool = False) -> None:
        self.system = cs
        self.model = cs.model
        self.space = cs.model.space
        self.classifier = set(classify or default_classifier(cs.model))
        base = [(f"constraint {i + 1}", c) for i, c in enumerate(cs.all_constraints())]
        if force_residual_zero and not cs.residual.is_zero():
            base.append(("residual", cs.residual_numerator()))
        self.base = base
        self.force_residual_zero = force_residual_zero

    def rank(self, a: Atom) -> tuple:
        return (a.name not in self.classifier, a.key)

    def is_classifying(self, e: Expr) -> bool:
        return all(a.name in self.classifier for a in e.atoms() if a.is_constitutive)

    def _slots(self, a: Atom) -> tuple[int, ...]:
        return slots_of(a, len(self.space.arguments(a.name)))

    def _value(self, a: Atom, solved: dict[Atom, Expr]) -> Expr | None:
        if a in solved:
            return solved[a]
        best: Atom | None = None
        target = None
        for key in solved:
            if key.name != a.name:
                continue
            if target is None:
                target = self._slots(a)
            have = self._slots(key)
            if dominates(target, have) and (best is None or (sum(have), key.key) > (best.order, best.key)):
                best = key
        if best is None:
            return None
        delta = tuple(t - h for t, h in zip(target, self._slots(best)))
        return argument_derivative_multi(solved[best], delta, self.space.arguments(a.name), self.space)

    def resolve(self, e: Expr, solved: dict[Atom, Expr]) -> Expr:
        """Substitute solved partials and every derivative of them."""
        for _ in range(_RESOLVE_PASSES):
            mapping = {}
            for a in e.atoms():
                if a.is_constitutive:
                    v = self._value(a, solved)
                    if v is not None:
                        mapping[a] = v
            if not mapping:
                return e
            e = substitute(e, mapping)
        return e

    def _pick(self, c: Expr, state: _State, generic: bool) -> tuple[Atom, Expr] | None:
        atoms = c.atoms()
        linear = [
            a for a in atoms
            if a.is_constitutive and c.num.degree_in(a) == 1
            and not any(
                b is not a and b.is_constitutive and b.name == a.name and dominates(self._slots(b), self._slots(a))
                for b in atoms
            )
        ]
        skipped: list[Expr] = []
        for a in sorted(linear, key=self.rank, reverse=True):
            coeff = Expr.poly(c.num.diff(a))
            if any(b.name == a.name and dominates(self._slots(b), self._slots(a)) for b in coeff.atoms() if b.is_constitutive):
                continue
            if state.facts.proves_nonzero(coeff):
                state.skipped.extend(skipped)
                return a, coeff
            pivot, _ = normalize_constraint(coeff, state.facts)
            if generic and self.is_classifying(coeff) and not pivot.is_constant():
                state.facts.add(pivot)
                state.reduction.certificates.append(f"assumed {pivot!r} != 0 for the general case")
                state.skipped.extend(skipped)
                return a, coeff
            if not pivot.is_constant():
                skipped.append(pivot)
        return None

    def _count_candidates(self, c: Expr, state: _State) -> None:
        c, _ = normalize_constraint(c, state.base_facts)
        if c in state.seen or c.is_constant():
            return
        state.seen.add(c)
        found: set[Expr] = set()
        for a in c.atoms():
            if not a.is_constitutive or c.num.degree_in(a) != 1:
                continue
            pivot, _ = normalize_constraint(Expr.poly(c.num.diff(a)), state.base_facts)
            if pivot.is_constant() or not self.is_classifying(pivot) or state.base_facts.proves_nonzero(pivot):
                continue
            if len(pivot.num) <= 2 and pivot.num.total_degree() <= 2:
                found.add(pivot)
        state.counts.update(found)

    def _absorb(self, state: _State, label: str, c: Expr, generation: int, generic: bool) -> Expr | None:
        red = state.reduction
        c = self.resolve(c, red.solved)
        if generic:
            self._count_candidates(c, state)
        c, notes = normalize_constraint(c, state.facts)
        for note in notes:
            red.certificates.append(f"{label}: {note}")
        if c.is_zero():
            return None
        if c.is_constant():
            red.contradiction = f"{label} reduces to a nonzero constant"
            return None
        choice = self._pick(c, state, generic)
        if choice is None:
            return c
        atom, coeff = choice
        rest = Expr.poly(c.num - coeff.num * Poly.atom(atom))
        self._record(state, atom, -rest / coeff, generation)
        red.certificates.append(f"{label}: solved {atom!r} with nonzero factor {coeff!r}")
        return None

    def _record(self, state: _State, atom: Atom, value: Expr, generation: int) -> None:
        red = state.reduction
        slots = self._slots(atom)
        for k in [k for k in red.solved if k.name == atom.name and k is not atom and k not in red.zero_atoms]:
            if dominates(self._slots(k), slots):
                state.pending.append((f"compatibility of {k!r}", Expr.atom(k) - red.solved.pop(k)))
                state.generation.pop(k, None)
        update = {atom: value}
        red.solved = {k: self.resolve(v, update) for k, v in red.solved.items()}
        red.solved[atom] = value
        state.generation[atom] = generation

    def _settle(self, state: _State, items: list[tuple[str, Expr]], generation: int, generic: bool) -> None:
        work = state.remaining + items
        state.remaining = []
        for _ in range(_SETTLE_ROUNDS):
            work = work + state.pending
            state.pending = []
            kept: list[tuple[str, Expr]] = []
            progressed = False
            for label, c in work:
                out = self._absorb(state, label, c, generation, generic)
                if state.reduction.inconsistent:
                    return
                if out is None:
                    progressed = True
                else:
                    kept.append((label, out))
            work = kept
            if not state.pending and (not progressed or not kept):
                break
        state.remaining = work + state.pending
        state.pending = []

    def integrability(self, state: _State) -> list[tuple[str, Expr]]:
        """Cross-derivative conditions between solved partials of the same symbol."""
        red = state.reduction
        out: list[tuple[str, Expr]] = []
        for d in self.model.decls:
            keys = sorted(
                (k for k in red.solved if k.name == d.name and state.generation.get(k) == 1),
                key=self._slots,
            )
            for i, ka in enumerate(keys):
                for kb in keys[i + 1:]:
                    sa, sb = self._slots(ka), self._slots(kb)
                    gamma = tuple(max(x, y) for x, y in zip(sa, sb))
                    da = tuple(g - x for g, x in zip(gamma, sa))
                    db = tuple(g - y for g, y in zip(gamma, sb))
                    cond = argument_derivative_multi(red.solved[ka], da, d.args, self.space) - argument_derivative_multi(
                        red.solved[kb], db, d.args, self.space
                    )
                    out.append((f"integrability of {ka!r} and {kb!r}", cond))
        return out

    def _run(self, assumptions: tuple[Assumption, ...], generic: bool) -> _State:
        red = Reduction(tuple(assumptions))
        state = _State(
            NonzeroFacts.from_exprs(self.system.nonzero), red, base_facts=NonzeroFacts.from_exprs(self.system.nonzero)
        )
        asserted = list(self.system.nonzero)
        items: list[tuple[str, Expr]] = []
        for asm in assumptions:
            if not asm.is_zero:
                state.facts.add(asm.expr)
                asserted.append(asm.expr)
        try:
            for asm in assumptions:
                if not asm.is_zero:
                    continue
                e = asm.expr
                if e.num.is_monomial() and len(e.num.atoms()) == 1 and e.den.is_constant():
                    a = next(iter(e.num.atoms()))
                    if a.is_constitutive:
                        red.solved[a] = Expr.const(0)
                        red.zero_atoms.add(a)
                        red.certificates.append(f"assumed {a!r} = 0")
                        continue
                items.append((f"assumption {e!r} = 0", e))
            self._settle(state, self.base + items, 1, generic)
            if not red.inconsistent:
                conditions = self.integrability(state)
                red.integrability = [c for _, c in conditions]
                self._settle(state, conditions, 2, generic)
            if not red.inconsistent:
                self._check_asserted(state, asserted)
        except DivisionByZeroExpr:
            red.contradiction = "a factor certified nonzero vanishes under the assumptions"
        if red.inconsistent:
            logger.debug("inconsistent case: %s", red.contradiction)
            return state
        red.constraints = [c for _, c in state.remaining]
        for c in red.constraints:
            self._pick(c, state, False)
        needed: list[Expr] = []
        for p in state.skipped:
            p, _ = normalize_constraint(self.resolve(p, red.solved), state.facts)
            if p.is_constant() or state.facts.proves_nonzero(p) or p in needed:
                continue
            needed.append(p)
        red.needed = needed
        return state

    def reduce(self, assumptions: tuple[Assumption, ...] = ()) -> Reduction:
        return self._run(tuple(assumptions), False).reduction

    def blocking(self, red: Reduction) -> set[Expr]:
        """Normalized coefficients of the constitutive atoms a remaining constraint is linear in."""
        facts = NonzeroFacts.from_exprs(
            list(self.system.nonzero) + [a.expr for a in red.assumptions if not a.is_zero]
        )
        out: set[Expr] = set()
        for c in red.constraints:
            for a in c.atoms():
                if not a.is_constitutive or c.num.degree_in(a) != 1:
                    continue
                pivot, _ = normalize_constraint(Expr.poly(c.num.diff(a)), facts)
                if not pivot.is_constant():
                    out.add(pivot)
        return out

    def _check_asserted(self, state: _State, asserted: list[Expr]) -> None:
        red = state.reduction
        for e in asserted:
            if self.resolve(e, red.solved).is_zero():
                red.contradiction = f"{e!r} is asserted nonzero but reduces to 0"
                return

    def candidates(self) -> list[Expr]:
        """Pivot candidates met while reducing the general case, most frequent first."""
        counts = self._run((), True).counts
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], _expr_key(kv[0])))
        return [e for e, _ in ranked]


def _expr_key(e: Expr) -> tuple:
    return tuple(sorted(a.key for a in e.atoms())), len(e.num)


def pivot_candidates(cs: ConstraintSystem, classify: tuple[str, ...] | None = None, force_residual_zero: bool = False) -> list[Expr]:
    """Classifier-only coefficients that block or guard eliminations, by occurrence count."""
    found = Reducer(cs, classify, force_residual_zero).candidates()
    logger.info("%s: %d pivot candidates", cs.model.name, len(found))
    return found


def apply_assumptions(cs: ConstraintSystem, assumptions, classify: tuple[str, ...] | None = None, force_residual_zero: bool = False) -> Reduction:
    return Reducer(cs, classify, force_residual_zero).reduce(tuple(assumptions))


@dataclass
class CaseNode:
    assumptions: tuple[Assumption, ...]
    reduction: Reduction
    children: list[CaseNode] = field(default_factory=list)
    status: str = "leaf"
    pivot: Expr | None = None
    pruned: list[str] = field(default_factory=list)
    facts: list[str] = field(default_factory=list)

    def walk(self) -> Iterator[CaseNode]:
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> list[CaseNode]:
        return [n for n in self.walk() if not n.children]


@dataclass
class CaseTree:
    root: CaseNode
    pivots: list[Expr]
    depth: int
    warnings: list[str] = field(default_factory=list)

    def leaves(self) -> list[CaseNode]:
        return self.root.leaves()


async def _grow(reducer: Reducer, tree: CaseTree, node: CaseNode, depth_left: int, workers: asyncio.Semaphore) -> None:
    red = node.reduction
    if red.inconsistent:
        node.status = "closed-inconsistent"
        return
    node.facts = red.derived_facts(reducer.model, reducer.resolve)
    used = {a.expr for a in node.assumptions}
    blocking = reducer.blocking(red)
    listed = [p for p in tree.pivots if p not in used and (p in red.needed or p in blocking)]
    if listed and depth_left == 0:
        path = " and ".join(_describe(a) for a in node.assumptions) or "the root"
        warning = DepthCapExceeded(f"depth cap {tree.depth} reached under {path}; pivot {listed[0]!r} not split")
        tree.warnings.append(warning.describe())
        logger.warning(warning.message)
        node.status = "open"
        return
    for pivot in listed:
        yes = node.assumptions + (Assumption(pivot, NONZERO_POLARITY),)
        no = node.assumptions + (Assumption(pivot, ZERO_POLARITY),)

        async def run(path):
            async with workers:
                return await asyncio.to_thread(reducer.reduce, path)

        first, second = await asyncio.gather(run(yes), run(no))
        if not first.inconsistent and not second.inconsistent and first.signature() == second.signature():
            red.certificates.append(f"pivot {pivot!r} does not change the reduced system")
            continue
        children = []
        for path, reduced in ((yes, first), (no, second)):
            if reduced.inconsistent:
                node.pruned.append(f"{_describe(path[-1])}: {reduced.contradiction}")
                continue
            children.append(CaseNode(path, reduced))
        if not children:
            node.status = "closed-inconsistent"
            red.contradiction = "both polarities of " + repr(pivot) + " are inconsistent"
            return
        node.pivot = pivot
        node.children = children
        node.status = "branch"
        await asyncio.gather(*(_grow(reducer, tree, child, depth_left - 1, workers) for child in children))
        return
    node.status = "open" if red.needed or red.constraints else "leaf"


def _describe(a: Assumption) -> str:
    return f"{a.expr!r} {'=' if a.is_zero else '!='} 0"


async def build_tree_async(
    reducer: Reducer,
    pivots: list[Expr],
    depth: int,
    assumptions: tuple[Assumption, ...] = (),
    workers: int = 4,
) -> CaseTree:
    if depth < 1:
        raise ValueError("depth cap must be at least 1")
    root = CaseNode(tuple(assumptions), await asyncio.to_thread(reducer.reduce, tuple(assumptions)))
    tree = CaseTree(root, list(pivots), depth)
    await _grow(reducer, tree, root, depth, asyncio.Semaphore(max(1, workers)))
    return tree


def build_tree(
    cs: ConstraintSystem,
    pivots: list[Expr] | None = None,
    depth: int = 3,
    assumptions: tuple[Assumption, ...] = (),
    classify: tuple[str, ...] | None = None,
    force_residual_zero: bool = False,
    workers: int = 4,
) -> CaseTree:
    """Binary case tree over ``pivots`` (default: the top ranked candidates)."""
    reducer = Reducer(cs, classify, force_residual_zero)
    if pivots is None:
        pivots = reducer.candidates()[:DEFAULT_PIVOTS]
    tree = asyncio.run(build_tree_async(reducer, pivots, depth, assumptions, workers))
    logger.info("%s: case tree with %d leaves", cs.model.name, len(tree.leaves()))
    return tree
