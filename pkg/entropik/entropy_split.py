from __future__ import annotations

import logging
from dataclasses import dataclass, field

from entropik.errors import NotPolynomialInFreeElements
from entropik.kernel.atoms import Atom, AtomKind
from entropik.kernel.expr import Expr
from entropik.kernel.linalg import factor_pivots
from entropik.kernel.poly import ONE, Monomial, Poly, mono_key
from entropik.model import ModelDef, classify_atoms, expand_model, jet_order, symmetrization_constraints
from entropik.solution_set import SolvedSystem, close_consequences

logger = logging.getLogger(__name__)


@dataclass
class NonzeroFacts:
    """Atoms and polynomials known not to vanish; jet coordinates count as generic."""

    atoms: set[Atom] = field(default_factory=set)
    polys: list[Poly] = field(default_factory=list)

    @classmethod
    def from_exprs(cls, exprs) -> NonzeroFacts:
        facts = cls()
        for e in exprs:
            facts.add(e)
        return facts

    def add(self, e: Expr) -> None:
        for part in (e.num, e.den):
            if part.is_constant():
                continue
            if part.is_monomial():
                (mono, _), = part.terms.items()
                self.atoms.update(a for a, _ in mono)
                continue
            _, lc = part.leading()
            p = part.scale(1 / lc)
            if p not in self.polys:
                self.polys.append(p)

    def certifies(self, a: Atom) -> bool:
        return a.kind in (AtomKind.JET, AtomKind.INDEP) or a in self.atoms

    def proves_nonzero(self, e: Expr) -> bool:
        p = e.num
        if p.is_zero():
            return False
        content = p.content()
        if any(not self.certifies(a) for a, _ in content):
            return False
        rest = p.div_monomial(content) if content else p
        if rest.is_constant():
            return True
        _, lc = rest.leading()
        return rest.scale(1 / lc) in self.polys


def normalize_constraint(e: Expr, facts: NonzeroFacts) -> tuple[Expr, list[str]]:
    """Numerator with certified factors removed and leading coefficient 1."""
    p = e.num
    notes: list[str] = []
    if p.is_zero():
        return Expr.const(0), notes
    content = p.content()
    drop = tuple((a, k) for a, k in content if facts.certifies(a))
    if drop:
        p = p.div_monomial(drop)
        notes.append("cancelled " + "*".join(f"{a!r}^{k}" if k > 1 else repr(a) for a, k in drop))
    for q in facts.polys:
        while not p.is_constant():
            quotient = p.divide_exact(q)
            if quotient is None:
                break
            p = quotient
            notes.append(f"cancelled a nonzero factor with {len(q)} terms")
    if p.is_constant():
        return Expr.const(1), notes
    _, lc = p.leading()
    return Expr.poly(p.scale(1 / lc)), notes


@dataclass
class ConstraintSystem:
    model: ModelDef
    entropy: Expr
    constraints: list[Expr]
    residual: Expr
    denominator: Expr
    nonzero: list[Expr]
    free: list[Atom]
    table: dict[Monomial, Expr]
    sources: list[list[Monomial]]
    symmetrization: list[Expr] = field(default_factory=list)
    cancellations: list[str] = field(default_factory=list)

    @property
    def numerator(self) -> Poly:
        return self.entropy.num

    def residual_numerator(self) -> Expr:
        return self.table.get(ONE, Expr.const(0))

    def all_constraints(self) -> list[Expr]:
        return self.constraints + [c for c in self.symmetrization if c not in self.constraints]

    def reconstruct(self) -> Poly:
        total = Poly()
        for mono, coeff in self.table.items():
            total = total + coeff.num.mul_term(mono, 1)
        return total

    def residual_statement(self) -> str:
        if self.residual.is_zero():
            return "residual vanishes identically"
        if self.denominator.is_constant():
            return "residual >= 0"
        return "residual numerator >= 0 where the denominator is positive, <= 0 where it is negative"


def entropy_on_solutions(m: ModelDef, s: SolvedSystem) -> Expr:
    """Expanded entropy production with the solved form substituted."""
    entropy = expand_model(m).entropy
    if s.missing([entropy]):
        s = close_consequences(m, s, [entropy])
    return s.apply(entropy)


def free_elements(m: ModelDef, s: SolvedSystem) -> list[Atom]:
    expanded = expand_model(m)
    exprs = [*expanded.equations, expanded.entropy, *(step.source for step in s.consequences)]
    classes = classify_atoms(m, exprs, order=jet_order(exprs))
    return sorted(classes.free)


def split(m: ModelDef, e: Expr, free: list[Atom], s: SolvedSystem | None = None) -> ConstraintSystem:
    """Coefficients of the cleared numerator over the free elements."""
    free_set = set(free)
    bad = sorted(e.den.atoms() & free_set)
    if bad:
        raise NotPolynomialInFreeElements(
            f"entropy denominator depends on free element {bad[0]!r}", atom=bad[0]
        )
    table = {mono: Expr.poly(coeff) for mono, coeff in e.num.split(free_set).items() if not coeff.is_zero()}
    nonzero: list[Expr] = []
    for cond in [*(s.pivots if s else []), *factor_pivots(e.den), *expand_model(m).nonzero]:
        if not cond.is_constant() and cond not in nonzero:
            nonzero.append(cond)
    facts = NonzeroFacts.from_exprs(nonzero)
    constraints: list[Expr] = []
    sources: list[list[Monomial]] = []
    notes: list[str] = []
    for mono in sorted(table, key=mono_key):
        if mono == ONE:
            continue
        c, log = normalize_constraint(table[mono], facts)
        for line in log:
            notes.append(f"coefficient of {_mono_text(mono)}: {line}")
        if c in constraints:
            sources[constraints.index(c)].append(mono)
            continue
        constraints.append(c)
        sources.append([mono])
    symmetric: list[Expr] = []
    for sym in symmetrization_constraints(m):
        c, _ = normalize_constraint(sym, facts)
        if c not in symmetric:
            symmetric.append(c)
    residual = table.get(ONE, Expr.const(0)) / e.denominator()
    for line in notes:
        logger.debug(line)
    logger.info(
        "%s: %d constraints over %d free elements, residual %s",
        m.name, len(constraints), len(free), "zero" if residual.is_zero() else "nonzero",
    )
    return ConstraintSystem(
        model=m,
        entropy=e,
        constraints=constraints,
        residual=residual,
        denominator=e.denominator(),
        nonzero=nonzero,
        free=list(free),
        table=table,
        sources=sources,
        symmetrization=symmetric,
        cancellations=notes,
    )


def _mono_text(mono: Monomial) -> str:
    return "*".join(f"{a.name}{a.index}" + (f"^{k}" if k > 1 else "") for a, k in mono) or "1"


def analyze(m: ModelDef, s: SolvedSystem) -> ConstraintSystem:
    """Entropy on solutions split over the free elements of ``s``."""
    e = entropy_on_solutions(m, s)
    return split(m, e, free_elements(m, s), s)
