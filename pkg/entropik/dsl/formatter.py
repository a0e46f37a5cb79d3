from __future__ import annotations

import hashlib
from typing import Mapping

from entropik.kernel.atoms import Atom, AtomKind
from entropik.kernel.expr import Expr
from entropik.kernel.tree import Add, Deriv, Div, Mul, Neg, Node, Num, Pow, Sym, from_expr
from entropik.model import ModelDef


class Printer:
    """Source-text printer with the minimal parentheses the parser needs to rebuild the same tree."""

    def __init__(self, indeps: tuple[str, ...], decls: Mapping[str, tuple[Atom, ...]]) -> None:
        self.indeps = indeps
        self.decls = decls

    @classmethod
    def for_model(cls, m: ModelDef) -> Printer:
        return cls(m.indeps, {d.name: d.args for d in m.decls})

    def atom(self, a: Atom) -> str:
        if a.kind is AtomKind.INDEP or a.kind is AtomKind.CONSTIT:
            return a.name
        if a.kind is AtomKind.JET:
            return jet_name(a, self.indeps)
        args = self.decls[a.name]
        parts = [f"d{a.name}"]
        for slot, count in enumerate(a.index):
            parts.extend([f"d{self.atom(args[slot])}"] * count)
        return "(" + "/".join(parts) + ")"

    def node(self, n: Node) -> str:
        if isinstance(n, Num):
            return str(n.value)
        if isinstance(n, Sym):
            return self.atom(n.atom)
        if isinstance(n, Add):
            out = [self.node(n.terms[0]) if not isinstance(n.terms[0], Add) else f"({self.node(n.terms[0])})"]
            for t in n.terms[1:]:
                if isinstance(t, Neg):
                    inner = t.arg
                    text = self.node(inner)
                    out.append(f" - ({text})" if isinstance(inner, Add) else f" - {text}")
                else:
                    out.append(f" + ({self.node(t)})" if isinstance(t, Add) else f" + {self.node(t)}")
            return "".join(out)
        if isinstance(n, Mul):
            parts = []
            for i, f in enumerate(n.factors):
                wrap = isinstance(f, (Add, Mul)) or (isinstance(f, Div) and i > 0)
                parts.append(f"({self.node(f)})" if wrap else self.node(f))
            return "*".join(parts)
        if isinstance(n, Div):
            num = f"({self.node(n.num)})" if isinstance(n.num, Add) else self.node(n.num)
            den = f"({self.node(n.den)})" if isinstance(n.den, (Add, Mul, Div)) else self.node(n.den)
            return f"{num}/{den}"
        if isinstance(n, Neg):
            if isinstance(n.arg, (Add, Mul, Div)):
                return f"-({self.node(n.arg)})"
            return f"-{self.node(n.arg)}"
        if isinstance(n, Pow):
            base = self.node(n.base)
            if not isinstance(n.base, (Sym, Num, Deriv)):
                base = f"({base})"
            return f"{base}^{n.exp}"
        if isinstance(n, Deriv):
            return f"d{n.var}({self.node(n.arg)})"
        raise TypeError(f"not an expression tree node: {n!r}")

    def expr(self, e: Expr) -> str:
        return self.node(from_expr(e))


def jet_name(a: Atom, indeps: tuple[str, ...]) -> str:
    if not a.order:
        return a.name
    return a.name + "_" + "".join(indeps[i] * count for i, count in enumerate(a.index))


def format_model(m: ModelDef) -> str:
    """Canonical source text; parsing it gives back an equal ModelDef."""
    p = Printer.for_model(m)
    lines = [f"independent {' '.join(m.indeps)}", f"field {' '.join(m.fields)}"]
    for d in m.decls:
        line = f"constitutive {d.name}({', '.join(p.atom(a) for a in d.args)})"
        if d.symmetric:
            pairs = " ".join(f"({p.atom(d.args[i])}, {p.atom(d.args[j])})" for i, j in d.symmetric)
            line += f" symmetric {pairs}"
        lines.append(line)
    for eq in m.equations:
        lines.append(f"equation {eq.label}: {p.node(eq.lhs)} = {p.node(eq.rhs)}")
    lines.append(f"entropy: {p.node(m.entropy.lhs)} >= {p.node(m.entropy.rhs)}")
    lines.append(f"leading: {', '.join(p.atom(a) for a in m.leading)}")
    if m.assumptions:
        lines.append(f"assume nonzero: {', '.join(p.node(a) for a in m.assumptions)}")
    if m.classify:
        lines.append(f"classify: {', '.join(m.classify)}")
    if m.max_order is not None:
        lines.append(f"max_order: {m.max_order}")
    return "\n".join(lines) + "\n"


def fingerprint(m: ModelDef) -> str:
    return hashlib.sha256(format_model(m).encode("utf-8")).hexdigest()
