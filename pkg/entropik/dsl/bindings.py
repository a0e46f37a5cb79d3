"""Candidate constitutive families: closed-form bindings for model symbols.

A bindings file is line oriented like a model file::

    parameter gamma
    parameter Cv = 3/2
    function F(rho)
    arbitrary eta Phi1
    bind p = (gamma - 1)*rho*eps
    bind deta/drho = -Cv*(gamma - 1)/rho
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from entropik.dsl.parser import (
    NONRATIONAL,
    Cursor,
    DslError,
    ExpressionParser,
    Scope,
    bundled_path,
    strip_comment,
    tokenize,
)
from entropik.errors import InvalidBinding, NonRationalBinding, UnboundSymbol
from entropik.kernel.atoms import Atom, AtomKind, constit, dominates, slots_of
from entropik.kernel.calculus import JetSpace, argument_derivative_multi
from entropik.kernel.expr import Expr, SubstitutionMap, substitute
from entropik.kernel.tree import Sym, normalize
from entropik.model import ModelDef

logger = logging.getLogger(__name__)


@dataclass
class Bindings:
    model: ModelDef
    parameters: dict[str, Fraction | None] = field(default_factory=dict)
    functions: dict[str, tuple[Atom, ...]] = field(default_factory=dict)
    arbitrary: set[str] = field(default_factory=set)
    values: dict[Atom, Expr] = field(default_factory=dict)
    source: str = "<bindings>"

    @property
    def space(self) -> JetSpace:
        extra = dict(self.functions)
        extra.update({name: () for name in self.parameters})
        return self.model.space.with_args(extra)

    def symbolic_parameters(self) -> list[Atom]:
        return [constit(n) for n, v in sorted(self.parameters.items()) if v is None]

    def is_free_symbol(self, name: str) -> bool:
        """Symbols that stay symbolic after substitution."""
        return name in self.arbitrary or name in self.functions or (
            name in self.parameters and self.parameters[name] is None
        )

    def value_of(self, atom: Atom) -> Expr | None:
        """Bound value of a constitutive atom, derived from the most specific binding below it."""
        if atom.kind not in (AtomKind.CONSTIT, AtomKind.PARTIAL):
            return None
        if atom.name in self.parameters:
            value = self.parameters[atom.name]
            return None if value is None else Expr.const(value)
        if self.is_free_symbol(atom.name):
            return None
        args = self.space.arguments(atom.name)
        target = slots_of(atom, len(args))
        best: Atom | None = None
        for bound in self.values:
            if bound.name != atom.name:
                continue
            have = slots_of(bound, len(args))
            if dominates(target, have) and (best is None or sum(have) > best.order):
                best = bound
        if best is None:
            raise UnboundSymbol(
                f"{self.source}: constitutive symbol {atom.name} has no binding for this derivative",
                symbol=atom.name,
            )
        have = slots_of(best, len(args))
        delta = tuple(t - h for t, h in zip(target, have))
        return argument_derivative_multi(self.values[best], delta, args, self.space)

    def substitution(self, exprs) -> SubstitutionMap:
        pairs: dict[Atom, Expr] = {}
        pending = [a for e in exprs for a in e.atoms()]
        seen: set[Atom] = set()
        while pending:
            a = pending.pop()
            if a in seen:
                continue
            seen.add(a)
            value = self.value_of(a)
            if value is None:
                continue
            pairs[a] = value
        return SubstitutionMap(pairs)

    def apply(self, e: Expr) -> Expr:
        """Substitute bound values until no bound atom remains."""
        for _ in range(8):
            m = self.substitution([e])
            if not len(m):
                return e
            e = substitute(e, m)
        raise InvalidBinding(f"{self.source}: bindings refer to each other cyclically")


def parse_bindings(text: str, model: ModelDef, source: str = "<bindings>") -> Bindings:
    b = Bindings(model, source=source)
    scope = Scope(model.indeps, model.fields, {d.name: d.args for d in model.decls})
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        try:
            tokens = tokenize(line)
            if not tokens:
                continue
            _statement(b, scope, Cursor(tokens, len(line)))
        except DslError as err:
            where = f"{source}:{lineno}:{err.start}"
            if err.code == NonRationalBinding.code:
                raise NonRationalBinding(f"{where}: {err.message}") from None
            raise InvalidBinding(f"{where}: {err.message}", diagnostic_code=err.code) from None
    logger.debug("parsed %d bindings from %s", len(b.values), source)
    return b


def _statement(b: Bindings, scope: Scope, cur: Cursor) -> None:
    head = cur.expect_name("a bindings statement")
    if head.text == "parameter":
        name = cur.expect_name("a parameter name")
        _fresh(scope, name)
        value: Fraction | None = None
        if cur.at("="):
            cur.next()
            node = ExpressionParser(cur, scope, NONRATIONAL).expression()
            e = normalize(node)
            if not e.is_constant():
                raise DslError("EPK-B003", f"parameter {name.text} needs a rational constant", name.start, name.end)
            value = e.constant_value()
        b.parameters[name.text] = value
        scope.decls[name.text] = ()
    elif head.text == "function":
        name = cur.expect_name("a function name")
        _fresh(scope, name)
        cur.expect("(")
        args: list[Atom] = []
        while not cur.at(")"):
            tok = cur.expect_name("an argument")
            atom = scope.jet_atom(tok.text)
            if atom is None:
                raise DslError("EPK-B003", f"argument {tok.text!r} is not a field jet variable", tok.start, tok.end)
            args.append(atom)
            if not cur.at(","):
                break
            cur.next()
        cur.expect(")")
        b.functions[name.text] = tuple(args)
        scope.decls[name.text] = tuple(args)
    elif head.text == "arbitrary":
        while not cur.done():
            tok = cur.expect_name("a constitutive symbol")
            if tok.text not in scope.decls:
                raise DslError("EPK-B003", f"{tok.text!r} is not a model symbol", tok.start, tok.end)
            b.arbitrary.add(tok.text)
    elif head.text == "bind":
        start = cur.peek()
        target = ExpressionParser(cur, scope).primary()
        if not isinstance(target, Sym) or not target.atom.is_constitutive or target.atom.name not in {
            d.name for d in b.model.decls
        }:
            raise DslError(
                "EPK-B003", "bind needs a model constitutive symbol or one of its partials",
                start.start if start else 1, start.end if start else 1,
            )
        cur.expect("=")
        node = ExpressionParser(cur, scope, NONRATIONAL).expression()
        b.values[target.atom] = normalize(node, b.space)
    else:
        raise DslError("EPK-B003", f"unknown bindings statement {head.text!r}", head.start, head.end)
    cur.expect_end()


def _fresh(scope: Scope, tok) -> None:
    if tok.text in scope.decls or tok.text in scope.fields or tok.text in scope.indeps:
        raise DslError("EPK-B003", f"{tok.text!r} is already declared", tok.start, tok.end)


def load_bindings(path: str | Path, model: ModelDef) -> Bindings:
    path = Path(path)
    return parse_bindings(path.read_text(encoding="utf-8"), model, source=str(path))


def resolve_bindings(name: str | Path, model: ModelDef) -> Bindings:
    """A bindings file path or the name of a bundled ``.bind`` file."""
    path = Path(name)
    if not path.exists():
        bundled = bundled_path(str(name), ".bind")
        if bundled is not None:
            path = bundled
    if not path.exists():
        raise FileNotFoundError(f"no bindings file or bundled bindings named {name!r}")
    return load_bindings(path, model)
