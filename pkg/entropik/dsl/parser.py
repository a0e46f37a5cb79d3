from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from entropik.dsl import diagnostics as dx
from entropik.dsl.diagnostics import ParseDiagnostic, SourceSpan
from entropik.errors import EntropikError, ParseFailed
from entropik.kernel.atoms import Atom, AtomKind, add_index, constit, indep, is_consequence, jet, partial, unit
from entropik.kernel.tree import Add, Deriv, Div, Mul, Neg, Node, Num, Pow, Sym, normalize, tree_atoms
from entropik.model import ConstitDecl, Equation, Inequality, ModelDef, expand_model

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+(?:\.\d*)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>>=|[-+*/^(),=:])"
)

NONRATIONAL = frozenset({"log", "ln", "exp", "sqrt", "sin", "cos", "tan", "abs"})


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


class DslError(Exception):
    def __init__(self, code: str, message: str, start: int, end: int, hint: str | None = None) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.start = start
        self.end = end
        self.hint = hint


def tokenize(line: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise DslError(dx.SYNTAX, f"unexpected character {line[pos]!r}", pos + 1, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), m.start() + 1, m.end()))
        pos = m.end()
    return tokens


def strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


class Cursor:
    def __init__(self, tokens: list[Token], width: int) -> None:
        self.tokens = tokens
        self.pos = 0
        self.width = width

    def peek(self, k: int = 0) -> Token | None:
        i = self.pos + k
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.kind != "name" and tok.text == text

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise DslError(dx.SYNTAX, "unexpected end of line", self.width + 1, self.width + 1)
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text or tok.kind == "name":
            where = tok or Token("eol", "", self.width + 1, self.width + 1)
            found = f"{where.text!r}" if tok else "end of line"
            raise DslError(dx.SYNTAX, f"expected {text!r}, found {found}", where.start, where.end)
        self.pos += 1
        return tok

    def expect_name(self, what: str = "a name") -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "name":
            where = tok or Token("eol", "", self.width + 1, self.width + 1)
            raise DslError(dx.SYNTAX, f"expected {what}", where.start, where.end)
        self.pos += 1
        return tok

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def expect_end(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise DslError(dx.SYNTAX, f"unexpected {tok.text!r}", tok.start, tok.end)


@dataclass
class Scope:
    """Names visible to expressions: independent variables, fields and constitutive symbols."""

    indeps: tuple[str, ...] = ()
    fields: tuple[str, ...] = ()
    decls: dict[str, tuple[Atom, ...]] = field(default_factory=dict)

    def jet_atom(self, name: str) -> Atom | None:
        if name in self.fields:
            return jet(name, (0,) * len(self.indeps))
        for f in sorted(self.fields, key=len, reverse=True):
            if not name.startswith(f + "_"):
                continue
            alpha = self._multi_index(name[len(f) + 1:])
            if alpha is not None:
                return jet(f, alpha)
        return None

    def _multi_index(self, rest: str) -> tuple[int, ...] | None:
        if not rest:
            return None
        counts = [0] * len(self.indeps)
        names = sorted(self.indeps, key=len, reverse=True)
        pos = 0
        while pos < len(rest):
            hit = next((n for n in names if rest.startswith(n, pos)), None)
            if hit is None:
                return None
            counts[self.indeps.index(hit)] += 1
            pos += len(hit)
        return tuple(counts)

    def resolve(self, name: str) -> Atom | None:
        if name in self.indeps:
            return indep(name)
        if name in self.decls:
            return constit(name)
        return self.jet_atom(name)

    def argument_slot(self, symbol: str, name: str) -> int | None:
        args = self.decls.get(symbol, ())
        atom = self.jet_atom(name) or (indep(name) if name in self.indeps else None)
        if atom is None or atom not in args:
            return None
        return args.index(atom)


class ExpressionParser:
    """Recursive descent over one line; ``^`` binds tighter than unary minus."""

    def __init__(self, cursor: Cursor, scope: Scope, nonrational: frozenset[str] = frozenset()) -> None:
        self.cur = cursor
        self.scope = scope
        self.nonrational = nonrational

    def expression(self) -> Node:
        first = self.term()
        terms = [first]
        while self.cur.at("+") or self.cur.at("-"):
            op = self.cur.next()
            t = self.term()
            terms.append(t if op.text == "+" else Neg(t))
        return first if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Node:
        node = self.unary()
        open_mul = False
        while self.cur.at("*") or self.cur.at("/"):
            op = self.cur.next()
            rhs = self.unary()
            if op.text == "/":
                node = Div(node, rhs)
                open_mul = False
            elif open_mul:
                node = Mul(node.factors + (rhs,))
            else:
                node = Mul((node, rhs))
                open_mul = True
        return node

    def unary(self) -> Node:
        if self.cur.at("-"):
            self.cur.next()
            return Neg(self.unary())
        if self.cur.at("+"):
            tok = self.cur.next()
            raise DslError(dx.SYNTAX, "unary plus is not supported", tok.start, tok.end)
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if not self.cur.at("^"):
            return base
        self.cur.next()
        exp = self._exponent()
        if self.cur.at("^"):
            tok = self.cur.peek()
            raise DslError(dx.SYNTAX, "chained powers need parentheses", tok.start, tok.end)
        return Pow(base, exp)

    def _exponent(self) -> int:
        wrapped = self.cur.at("(")
        if wrapped:
            self.cur.next()
        sign = 1
        if self.cur.at("-"):
            self.cur.next()
            sign = -1
        tok = self.cur.next()
        if tok.kind != "num" or "." in tok.text:
            raise DslError(dx.SYNTAX, "exponents must be integer literals", tok.start, tok.end)
        if wrapped:
            self.cur.expect(")")
        return sign * int(tok.text)

    def primary(self) -> Node:
        tok = self.cur.next()
        if tok.kind == "num":
            if "." in tok.text:
                raise DslError(
                    dx.SYNTAX, f"decimal literal {tok.text}", tok.start, tok.end,
                    hint="write rationals as a quotient of integers, e.g. 3/2",
                )
            return Num(int(tok.text))
        if tok.text == "(" and tok.kind == "op":
            inner = self.expression()
            self.cur.expect(")")
            return inner
        if tok.kind != "name":
            raise DslError(dx.SYNTAX, f"unexpected {tok.text!r}", tok.start, tok.end)
        if self.cur.at("("):
            return self._call(tok)
        found = self._partial(tok)
        if found is not None:
            return Sym(found)
        atom = self.scope.resolve(tok.text)
        if atom is None:
            raise DslError(
                dx.UNKNOWN_IDENTIFIER, f"unknown identifier {tok.text!r}", tok.start, tok.end,
                hint="declare it with 'field' or 'constitutive'",
            )
        return Sym(atom)

    def _call(self, tok: Token) -> Node:
        name = tok.text
        if name.startswith("d") and name[1:] in self.scope.indeps:
            self.cur.next()
            arg = self.expression()
            self.cur.expect(")")
            return Deriv(name[1:], arg)
        if name in self.nonrational:
            raise DslError("EPK-B002", f"{name}() is not a rational operation", tok.start, tok.end)
        if name not in self.scope.decls:
            raise DslError(dx.UNKNOWN_IDENTIFIER, f"unknown function {name!r}", tok.start, tok.end)
        self.cur.next()
        given: list[tuple[Node, Token]] = []
        if not self.cur.at(")"):
            while True:
                start = self.cur.peek()
                given.append((self.expression(), start))
                if not self.cur.at(","):
                    break
                self.cur.next()
        close = self.cur.expect(")")
        declared = self.scope.decls[name]
        if len(given) != len(declared):
            raise DslError(
                dx.ARITY, f"{name} takes {len(declared)} arguments, got {len(given)}",
                tok.start, close.end,
            )
        for i, ((node, start), want) in enumerate(zip(given, declared)):
            if node != Sym(want):
                raise DslError(
                    dx.ARITY, f"argument {i + 1} of {name} must be its declared dependency",
                    start.start, close.end,
                )
        return Sym(constit(name))

    def _partial(self, tok: Token) -> Atom | None:
        name = tok.text
        symbol = name[1:]
        if not name.startswith("d") or not self.scope.decls.get(symbol):
            return None
        arity = len(self.scope.decls[symbol])
        slots = [0] * arity
        while self.cur.at("/") and self._slot_at(symbol, 1) is not None:
            slot = self._slot_at(symbol, 1)
            self.cur.next()
            self.cur.next()
            slots[slot] += 1
        if not any(slots):
            return None
        return partial(symbol, slots)

    def _slot_at(self, symbol: str, k: int) -> int | None:
        tok = self.cur.peek(k)
        if tok is None or tok.kind != "name" or not tok.text.startswith("d"):
            return None
        return self.scope.argument_slot(symbol, tok.text[1:])


def parse_expression(text: str, scope: Scope, nonrational: frozenset[str] = frozenset()) -> Node:
    """Parse a single expression; raises DslError."""
    cur = Cursor(tokenize(text), len(text))
    node = ExpressionParser(cur, scope, nonrational).expression()
    cur.expect_end()
    return node


def derivative_chain(node: Node) -> tuple[Atom, list[str]] | None:
    """Base jet variable and operator names of ``dt(dx(u))`` style nesting or a shorthand symbol."""
    counts: list[str] = []
    while isinstance(node, Deriv):
        counts.append(node.var)
        node = node.arg
    if not isinstance(node, Sym) or node.atom.kind is not AtomKind.JET:
        return None
    return node.atom, counts


@dataclass
class ParseResult:
    model: ModelDef | None
    diagnostics: list[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return self.model is not None

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.is_error]


class _ModelBuilder:
    def __init__(self, file: str) -> None:
        self.file = file
        self.diagnostics: list[ParseDiagnostic] = []
        self.scope = Scope()
        self.decls: list[ConstitDecl] = []
        self.equations: list[Equation] = []
        self.equation_lines: list[int] = []
        self.entropy: Inequality | None = None
        self.entropy_line = 0
        self.leading: list[Atom] = []
        self.leading_line = 0
        self.assumptions: list[Node] = []
        self.max_order: int | None = None
        self.classify: list[str] | None = None
        self.seen: dict[str, int] = {}
        self.last_line = 1

    def span(self, line: int, start: int, end: int) -> SourceSpan:
        return SourceSpan(self.file, line, start, max(start, end))

    def report(self, line: int, err: DslError) -> None:
        self.diagnostics.append(dx.error(err.message, self.span(line, err.start, err.end), err.code, err.hint))

    def once(self, keyword: str, lineno: int, tok: Token, message: str) -> None:
        if keyword in self.seen:
            raise DslError(dx.REQUIRED_LINE, message, tok.start, tok.end, hint=f"first given on line {self.seen[keyword]}")
        self.seen[keyword] = lineno

    def expr(self, cur: Cursor) -> Node:
        return ExpressionParser(cur, self.scope).expression()

    # statements

    def independent(self, cur: Cursor, lineno: int, head: Token) -> None:
        self.once("independent", lineno, head, "repeated 'independent' line")
        names = self._name_list(cur, "an independent variable name")
        self.scope.indeps = tuple(names)

    def field(self, cur: Cursor, lineno: int, head: Token) -> None:
        self.once("field", lineno, head, "repeated 'field' line")
        names = self._name_list(cur, "a field name", taken=set(self.scope.indeps))
        self.scope.fields = tuple(names)

    def _name_list(self, cur: Cursor, what: str, taken: set[str] = frozenset()) -> list[str]:
        names: list[str] = []
        while not cur.done():
            tok = cur.expect_name(what)
            if tok.text in names or tok.text in taken:
                raise DslError(dx.DUPLICATE, f"duplicate name {tok.text!r}", tok.start, tok.end)
            names.append(tok.text)
        if not names:
            raise DslError(dx.SYNTAX, f"expected {what}", cur.width + 1, cur.width + 1)
        return names

    def constitutive(self, cur: Cursor, lineno: int, head: Token) -> None:
        if "field" not in self.seen:
            raise DslError(dx.REQUIRED_LINE, "constitutive declarations need a 'field' line", head.start, head.end)
        name = cur.expect_name("a constitutive symbol name")
        if name.text in self.scope.decls or name.text in self.scope.fields or name.text in self.scope.indeps:
            raise DslError(dx.DUPLICATE, f"duplicate declaration of {name.text!r}", name.start, name.end)
        cur.expect("(")
        args: list[Atom] = []
        while not cur.at(")"):
            tok = cur.expect_name("a dependency")
            atom = self.scope.jet_atom(tok.text)
            if atom is None:
                raise DslError(
                    dx.INVALID_DECLARATION, f"dependency {tok.text!r} of {name.text} is not a field jet variable",
                    tok.start, tok.end,
                )
            if atom in args:
                raise DslError(dx.INVALID_DECLARATION, f"{name.text} repeats dependency {tok.text!r}", tok.start, tok.end)
            args.append(atom)
            if not cur.at(","):
                break
            cur.next()
        cur.expect(")")
        pairs: list[tuple[int, int]] = []
        if not cur.done():
            kw = cur.expect_name("'symmetric'")
            if kw.text != "symmetric":
                raise DslError(dx.SYNTAX, f"unexpected {kw.text!r}", kw.start, kw.end)
            while not cur.done():
                cur.expect("(")
                a = cur.expect_name("a dependency")
                cur.expect(",")
                b = cur.expect_name("a dependency")
                close = cur.expect(")")
                i = self._slot(args, a.text)
                j = self._slot(args, b.text)
                if i is None or j is None or i == j:
                    raise DslError(
                        dx.INVALID_DECLARATION, f"symmetric pair must name two distinct dependencies of {name.text}",
                        a.start, close.end,
                    )
                pairs.append((min(i, j), max(i, j)))
        self.scope.decls[name.text] = tuple(args)
        self.decls.append(ConstitDecl(name.text, tuple(args), tuple(pairs)))

    def _slot(self, args: list[Atom], name: str) -> int | None:
        atom = self.scope.jet_atom(name)
        return args.index(atom) if atom in args else None

    def equation(self, cur: Cursor, lineno: int, head: Token) -> None:
        label = cur.expect_name("an equation label")
        if any(eq.label == label.text for eq in self.equations):
            raise DslError(dx.DUPLICATE, f"duplicate equation label {label.text!r}", label.start, label.end)
        cur.expect(":")
        lhs = self.expr(cur)
        cur.expect("=")
        rhs = self.expr(cur)
        cur.expect_end()
        self.equations.append(Equation(label.text, lhs, rhs))
        self.equation_lines.append(lineno)

    def entropy_line(self, cur: Cursor, lineno: int, head: Token) -> None:
        self.once("entropy", lineno, head, "model requires exactly one entropy inequality")
        cur.expect(":")
        lhs = self.expr(cur)
        cur.expect(">=")
        rhs = self.expr(cur)
        cur.expect_end()
        self.entropy = Inequality(lhs, rhs)
        self.entropy_line = lineno

    def leading_line(self, cur: Cursor, lineno: int, head: Token) -> None:
        self.once("leading", lineno, head, "repeated 'leading' line")
        cur.expect(":")
        self.leading_line = lineno
        while True:
            start = cur.peek()
            node = self.expr(cur)
            end = cur.tokens[cur.pos - 1]
            atom = self._leading(node, start.start if start else 1, end.end)
            if atom in self.leading:
                raise DslError(dx.INVALID_LEADING, f"leading derivative {atom.name} listed twice", start.start, end.end)
            for other in self.leading:
                if is_consequence(atom, other) or is_consequence(other, atom):
                    raise DslError(
                        dx.INVALID_LEADING, "a leading derivative may not be a derivative of another",
                        start.start, end.end,
                    )
            self.leading.append(atom)
            if cur.done():
                break
            cur.expect(",")

    def _leading(self, node: Node, start: int, end: int) -> Atom:
        found = derivative_chain(node)
        if found is None:
            raise DslError(dx.INVALID_LEADING, "leading derivatives must be derivatives of a field", start, end)
        base, vars_ = found
        alpha = base.index
        for v in vars_:
            alpha = add_index(alpha, unit(len(self.scope.indeps), self.scope.indeps.index(v)))
        if sum(alpha) == 0:
            raise DslError(dx.INVALID_LEADING, "a leading derivative needs order at least one", start, end)
        return jet(base.name, alpha)

    def assume(self, cur: Cursor, lineno: int, head: Token) -> None:
        kw = cur.expect_name("'nonzero'")
        if kw.text != "nonzero":
            raise DslError(dx.SYNTAX, "only 'assume nonzero:' is supported", kw.start, kw.end)
        cur.expect(":")
        while True:
            first = cur.peek()
            node = self.expr(cur)
            if not tree_atoms(node):
                start = first.start if first else cur.width + 1
                end = cur.tokens[cur.pos - 1].end if cur.pos else start
                raise DslError(dx.INVALID_DECLARATION, "a nonzero assumption must mention a variable", start, end)
            self.assumptions.append(node)
            if cur.done():
                break
            cur.expect(",")

    def max_order_line(self, cur: Cursor, lineno: int, head: Token) -> None:
        self.once("max_order", lineno, head, "repeated 'max_order' line")
        cur.expect(":")
        tok = cur.next()
        if tok.kind != "num" or "." in tok.text or int(tok.text) < 1:
            raise DslError(dx.SYNTAX, "max_order must be a positive integer", tok.start, tok.end)
        cur.expect_end()
        self.max_order = int(tok.text)

    def classify_line(self, cur: Cursor, lineno: int, head: Token) -> None:
        self.once("classify", lineno, head, "repeated 'classify' line")
        cur.expect(":")
        names: list[str] = []
        while True:
            tok = cur.expect_name("a constitutive symbol")
            if not self.scope.decls.get(tok.text):
                raise DslError(
                    dx.UNKNOWN_IDENTIFIER, f"{tok.text!r} is not a declared constitutive function",
                    tok.start, tok.end,
                )
            names.append(tok.text)
            if cur.done():
                break
            cur.expect(",")
        self.classify = names


_STATEMENTS = {
    "independent": _ModelBuilder.independent,
    "field": _ModelBuilder.field,
    "constitutive": _ModelBuilder.constitutive,
    "equation": _ModelBuilder.equation,
    "entropy": _ModelBuilder.entropy_line,
    "leading": _ModelBuilder.leading_line,
    "assume": _ModelBuilder.assume,
    "max_order": _ModelBuilder.max_order_line,
    "classify": _ModelBuilder.classify_line,
}
_DECLARATIONS = ("independent", "field", "constitutive")


def parse_model(text: str, file: str = "<string>", name: str | None = None) -> ParseResult:
    """Parse model text; never raises, every problem becomes a located diagnostic."""
    builder = _ModelBuilder(file)
    try:
        _run(builder, text)
    except Exception as e:
        logger.exception(e)
        builder.diagnostics.append(dx.error(f"internal parser failure: {e}", builder.span(1, 1, 1)))
    if any(d.is_error for d in builder.diagnostics):
        return ParseResult(None, builder.diagnostics)
    model_name = name or Path(file).stem
    model = ModelDef(
        indeps=builder.scope.indeps,
        fields=builder.scope.fields,
        decls=tuple(builder.decls),
        equations=tuple(builder.equations),
        entropy=builder.entropy,
        leading=tuple(builder.leading),
        assumptions=tuple(builder.assumptions),
        max_order=builder.max_order,
        classify=tuple(builder.classify or ()),
        name=model_name,
    )
    _check_expansion(builder, model)
    if any(d.is_error for d in builder.diagnostics):
        return ParseResult(None, builder.diagnostics)
    return ParseResult(model, builder.diagnostics)


def _run(builder: _ModelBuilder, text: str) -> None:
    lines: list[tuple[int, list[Token], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        builder.last_line = lineno
        try:
            tokens = tokenize(line)
        except DslError as err:
            builder.report(lineno, err)
            continue
        if tokens:
            lines.append((lineno, tokens, len(line)))
    for keyword in _DECLARATIONS:
        for lineno, tokens, width in lines:
            if tokens[0].text == keyword:
                _statement(builder, keyword, lineno, tokens, width)
    for lineno, tokens, width in lines:
        head = tokens[0]
        if head.text in _DECLARATIONS:
            continue
        if head.kind != "name" or head.text not in _STATEMENTS:
            builder.report(lineno, DslError(dx.SYNTAX, f"unknown statement {head.text!r}", head.start, head.end))
            continue
        _statement(builder, head.text, lineno, tokens, width)
    _check_required(builder)


def _statement(builder: _ModelBuilder, keyword: str, lineno: int, tokens: list[Token], width: int) -> None:
    cur = Cursor(tokens, width)
    head = cur.next()
    try:
        _STATEMENTS[keyword](builder, cur, lineno, head)
        cur.expect_end()
    except DslError as err:
        builder.report(lineno, err)


def _check_required(b: _ModelBuilder) -> None:
    end = b.span(max(b.last_line, 1), 1, 1)
    if not b.scope.indeps:
        b.diagnostics.append(dx.error("model requires an 'independent' line", end, dx.REQUIRED_LINE))
    if not b.scope.fields:
        b.diagnostics.append(dx.error("model requires a 'field' line", end, dx.REQUIRED_LINE))
    if not b.equations:
        b.diagnostics.append(dx.error("model requires at least one equation", end, dx.REQUIRED_LINE))
    if b.entropy is None and "entropy" not in b.seen:
        b.diagnostics.append(dx.error("model requires exactly one entropy inequality", end, dx.REQUIRED_LINE))
    if "leading" not in b.seen:
        b.diagnostics.append(
            dx.error("model requires a 'leading' line", end, dx.REQUIRED_LINE, hint="try 'entropik leading FILE'")
        )
    elif b.equations and len(b.leading) != len(b.equations) and not any(d.is_error for d in b.diagnostics):
        b.diagnostics.append(
            dx.error(
                f"{len(b.equations)} equations need {len(b.equations)} leading derivatives, got {len(b.leading)}",
                b.span(b.leading_line, 1, 1), dx.INVALID_LEADING,
            )
        )


def _check_expansion(b: _ModelBuilder, model: ModelDef) -> None:
    space = model.space
    for eq, lineno in zip(model.equations, b.equation_lines):
        try:
            normalize(eq.lhs, space)
            normalize(eq.rhs, space)
        except EntropikError as e:
            b.diagnostics.append(dx.error(e.message, b.span(lineno, 1, 1), dx.SYNTAX))
    try:
        normalize(model.entropy.lhs, space)
        normalize(model.entropy.rhs, space)
    except EntropikError as e:
        b.diagnostics.append(dx.error(e.message, b.span(b.entropy_line, 1, 1), dx.SYNTAX))
    if any(d.is_error for d in b.diagnostics):
        return
    expanded = expand_model(model)
    for a in model.leading:
        if not any(a in e.atoms() for e in expanded.equations):
            b.diagnostics.append(
                dx.error(
                    f"leading derivative {a.name} (order {a.order}) does not occur in any equation",
                    b.span(b.leading_line, 1, 1), dx.INVALID_LEADING,
                )
            )
    used: set[str] = set()
    trees = [t for eq in model.equations for t in (eq.lhs, eq.rhs)]
    trees += [model.entropy.lhs, model.entropy.rhs, *model.assumptions]
    for t in trees:
        used |= {a.name for a in tree_atoms(t) if a.is_constitutive}
    for d in model.decls:
        if d.name not in used:
            b.diagnostics.append(
                dx.warning(f"constitutive symbol {d.name} is never used", b.span(1, 1, 1), dx.INVALID_DECLARATION)
            )


def load_model(path: str | Path) -> ModelDef:
    path = Path(path)
    result = parse_model(path.read_text(encoding="utf-8"), file=str(path), name=path.stem)
    if result.model is None:
        raise ParseFailed(f"{path}: {len(result.errors)} error(s)", result.diagnostics)
    for d in result.diagnostics:
        logger.warning(d.describe())
    return result.model


def bundled_path(name: str, suffix: str = ".epk") -> Path | None:
    candidate = resources.files("entropik.models") / f"{name}{suffix}"
    return Path(str(candidate)) if candidate.is_file() else None


def resolve_model(name: str | Path) -> ModelDef:
    """A bundled model name such as ``gas1d`` or a path to a ``.epk`` file."""
    path = Path(name)
    if not path.exists():
        bundled = bundled_path(str(name))
        if bundled is not None:
            path = bundled
    if not path.exists():
        raise FileNotFoundError(f"no model file or bundled model named {name!r}")
    return load_model(path)
