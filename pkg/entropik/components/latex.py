"""LaTeX output. sympy typesets finished expressions; it never does engine arithmetic."""

from __future__ import annotations

from collections.abc import Iterable, Mapping

import sympy
from sympy.printing.latex import latex

from entropik.kernel.atoms import Atom, AtomKind
from entropik.kernel.expr import Expr
from entropik.kernel.poly import Poly
from entropik.model import ModelDef
from entropik.state import AnalysisState

PREAMBLE = r"""\documentclass{article}
\usepackage{amsmath}
\begin{document}
"""


def symbol_latex(name: str) -> str:
    return latex(sympy.Symbol(name))


class LatexTypesetter:
    """Maps kernel atoms to sympy symbols carrying their LaTeX names."""

    def __init__(self, indeps: tuple[str, ...], decls: Mapping[str, tuple[Atom, ...]]) -> None:
        self.indeps = indeps
        self.decls = decls
        self._symbols: dict[Atom, sympy.Symbol] = {}
        self._names: dict[sympy.Symbol, str] = {}

    @classmethod
    def for_model(cls, m: ModelDef, extra: Mapping[str, tuple[Atom, ...]] | None = None) -> LatexTypesetter:
        decls = {d.name: d.args for d in m.decls}
        decls.update(extra or {})
        return cls(m.indeps, decls)

    def atom_latex(self, a: Atom) -> str:
        if a.kind in (AtomKind.INDEP, AtomKind.CONSTIT):
            return symbol_latex(a.name)
        if a.kind is AtomKind.JET:
            base = symbol_latex(a.name)
            if not a.order:
                return base
            sub = "".join(symbol_latex(v) * n for v, n in zip(self.indeps, a.index))
            return f"{{{base}}}_{{{sub}}}"
        args = self.decls[a.name]
        order = sum(a.index)
        top = r"\partial" + (f"^{{{order}}}" if order > 1 else "")
        bottom = " ".join(
            r"\partial " + self.atom_latex(args[slot]) + (f"^{{{n}}}" if n > 1 else "")
            for slot, n in enumerate(a.index) if n
        )
        return rf"\frac{{{top} {symbol_latex(a.name)}}}{{{bottom}}}"

    def symbol(self, a: Atom) -> sympy.Symbol:
        s = self._symbols.get(a)
        if s is None:
            s = sympy.Symbol(f"a{len(self._symbols)}_{a.name}")
            self._symbols[a] = s
            self._names[s] = self.atom_latex(a)
        return s

    def _poly(self, p: Poly) -> sympy.Expr:
        terms = []
        for mono, c in p.sorted_terms():
            factor = sympy.Rational(c.numerator, c.denominator)
            for a, k in mono:
                factor *= self.symbol(a) ** k
            terms.append(factor)
        return sympy.Add(*terms)

    def to_sympy(self, e: Expr) -> sympy.Expr:
        return self._poly(e.num) / self._poly(e.den)

    def expr(self, e: Expr) -> str:
        return latex(self.to_sympy(e), symbol_names=self._names)


def equations(t: LatexTypesetter, exprs: Iterable[Expr], relation: str = "= 0") -> list[str]:
    rows = [f"  {t.expr(e)} &{relation}" for e in exprs]
    if not rows:
        return []
    return [r"\begin{align*}", " \\\\\n".join(rows), r"\end{align*}"]


def assignments(t: LatexTypesetter, pairs: Iterable[tuple[Atom, Expr]]) -> list[str]:
    rows = [f"  {t.atom_latex(a)} &= {t.expr(v)}" for a, v in pairs]
    if not rows:
        return []
    return [r"\begin{align*}", " \\\\\n".join(rows), r"\end{align*}"]


def _section(title: str) -> str:
    return rf"\section*{{{title}}}"


def latex_document(state: AnalysisState) -> str:
    """Standalone document with the constraints, residual, Liu identities and case pivots."""
    m = state.model
    body: list[str] = []
    t = LatexTypesetter.for_model(m)
    if state.system is not None:
        cs = state.system
        body.append(_section("Constraints of " + m.name.replace("_", r"\_")))
        body.extend(equations(t, cs.all_constraints()))
        body.append(_section("Residual entropy inequality"))
        body.extend(equations(t, [cs.residual], r"\geq 0" if not cs.residual.is_zero() else "= 0"))
        if cs.nonzero:
            body.append(_section("Side conditions"))
            body.extend(equations(t, cs.nonzero, r"\neq 0"))
    if state.liu is not None:
        lt = LatexTypesetter.for_model(m, {lam.name: state.liu.dependency for lam in state.liu.multipliers})
        body.append(_section("Liu identities"))
        body.extend(equations(lt, state.liu.identities))
        if state.multipliers is not None and state.multipliers.values:
            body.append(_section("Multipliers"))
            body.extend(assignments(lt, sorted(state.multipliers.values.items(), key=lambda kv: kv[0].key)))
    if state.tree is not None and state.tree.pivots:
        body.append(_section("Case pivots"))
        body.extend(equations(t, state.tree.pivots, r"= 0 \text{ or } \neq 0"))
    if state.candidate is not None:
        failing = [c.value for c in state.candidate.failures]
        body.append(_section("Candidate check"))
        body.extend(equations(t, failing, r"\neq 0") if failing else [r"All constraints vanish."])
    return PREAMBLE + "\n".join(body) + "\n\\end{document}\n"
