"""A small language for sums of products of theta functions.

Grammar (ASCII, whitespace-insensitive, ``#`` comments to end of line)::

    expr := ['-'] term (('+' | '-') term)*
    term := atom ('*' atom)*
    atom := INT [qpow] | qpow | call
    qpow := 'q' ['^' INT]
    call := ('phi' | 'psi') '(' 'q' ['^' INT] ')' ['^' INT]

``INT qpow`` without a ``*`` (as in ``2q^4``) is accepted as a single atom.
Every term is normalised to ``coefficient * q**qexponent * factors``.

Example::

    >>> parse("2q^4*psi(q^32)")
    Sum(terms=(Term(coefficient=2, qexponent=4, factors=(Factor(func='psi', arg=32, power=1),)),))
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

from .fps import Series, add, monomial_scale, mul, one
from .seq import theta

FUNCS = ("phi", "psi")


@dataclass(frozen=True)
class Factor:
    func: str
    arg: int = 1
    power: int = 1


@dataclass(frozen=True)
class Term:
    coefficient: int
    qexponent: int = 0
    factors: tuple[Factor, ...] = ()


@dataclass(frozen=True)
class Sum:
    terms: tuple[Term, ...]

    def __str__(self) -> str:
        return to_text(self)


class QdslSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: frozenset = frozenset()):
        self.line = line
        self.column = column
        self.expected = expected
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{detail}")


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"""
    (?P<WS>[ \t\r]+)
  | (?P<NL>\n)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<INT>[0-9]+)
  | (?P<NAME>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<OP>[-+*^()])
""", re.VERBOSE)


def tokenize(text: str) -> Iterator[Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QdslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "NL":
            line, line_start = line + 1, m.end()
        elif kind == "NAME":
            if m.group() not in FUNCS + ("q",):
                raise QdslSyntaxError(f"unknown name {m.group()!r}", line, pos - line_start + 1,
                                      frozenset(FUNCS + ("q",)))
            yield Token(m.group(), m.group(), line, pos - line_start + 1)
        elif kind == "INT":
            yield Token("INT", m.group(), line, pos - line_start + 1)
        elif kind == "OP":
            yield Token(m.group(), m.group(), line, pos - line_start + 1)
        pos = m.end()
    yield Token("EOF", "", line, pos - line_start + 1)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(tokenize(text))
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, expected=()) -> QdslSyntaxError:
        tok = self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        return QdslSyntaxError(f"{message}, found {found}", tok.line, tok.column, frozenset(expected))

    def accept(self, *kinds: str) -> Optional[Token]:
        if self.tok.kind in kinds:
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def expect(self, *kinds: str) -> Token:
        tok = self.accept(*kinds)
        if tok is None:
            raise self.error("unexpected token", kinds)
        return tok

    def integer(self, minimum: int, what: str) -> int:
        tok = self.expect("INT")
        value = int(tok.text)
        if value < minimum:
            raise QdslSyntaxError(f"{what} must be >= {minimum}, got {value}", tok.line, tok.column)
        return value

    def parse(self) -> Sum:
        terms = []
        sign = -1 if self.accept("-") else 1
        terms.append(self.term(sign))
        while True:
            op = self.accept("+", "-")
            if op is None:
                break
            terms.append(self.term(-1 if op.kind == "-" else 1))
        if self.tok.kind != "EOF":
            raise self.error("unexpected token", ("+", "-", "*", "EOF"))
        return Sum(tuple(terms))

    def term(self, sign: int) -> Term:
        start = self.tok
        coefficient, qexp, factors = sign, 0, []
        while True:
            c, e, f = self.atom()
            coefficient *= c
            qexp += e
            factors.extend(f)
            if not self.accept("*"):
                break
        if coefficient == 0:
            raise QdslSyntaxError("term has zero coefficient", start.line, start.column)
        return Term(coefficient, qexp, tuple(factors))

    def qpow(self) -> int:
        self.expect("q")
        return self.integer(0, "q exponent") if self.accept("^") else 1

    def atom(self) -> tuple[int, int, list[Factor]]:
        kind = self.tok.kind
        if kind == "INT":
            value = int(self.expect("INT").text)
            qexp = self.qpow() if self.tok.kind == "q" else 0
            return value, qexp, []
        if kind == "q":
            return 1, self.qpow(), []
        if kind in FUNCS:
            func = self.expect(*FUNCS).kind
            self.expect("(")
            self.expect("q")
            arg = self.integer(1, "theta argument exponent") if self.accept("^") else 1
            self.expect(")")
            power = self.integer(1, "power") if self.accept("^") else 1
            return 1, 0, [Factor(func, arg, power)]
        raise self.error("expected a number, q, phi or psi", ("INT", "q") + FUNCS)


def parse(text: str) -> Sum:
    """Parse a theta expression into its normal-form tree."""
    return _Parser(text).parse()


def _factor_text(f: Factor) -> str:
    arg = "q" if f.arg == 1 else f"q^{f.arg}"
    power = "" if f.power == 1 else f"^{f.power}"
    return f"{f.func}({arg}){power}"


def _term_text(t: Term) -> str:
    parts = []
    c = abs(t.coefficient)
    if c != 1 or (t.qexponent == 0 and not t.factors):
        parts.append(str(c))
    if t.qexponent == 1:
        parts.append("q")
    elif t.qexponent > 1:
        parts.append(f"q^{t.qexponent}")
    parts.extend(_factor_text(f) for f in t.factors)
    return "*".join(parts)


def to_text(expr: Sum) -> str:
    """Render ``expr`` in the grammar accepted by :func:`parse`."""
    out = []
    for i, t in enumerate(expr.terms):
        body = _term_text(t)
        if i == 0:
            out.append(("-" if t.coefficient < 0 else "") + body)
        else:
            out.append(("- " if t.coefficient < 0 else "+ ") + body)
    return " ".join(out)


class LeafCache:
    """Memo of theta leaves keyed by (func, arg, power, order)."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, factor: Factor, order: int) -> Series:
        key = (factor.func, factor.arg, factor.power, order)
        hit = self._data.get(key)
        if hit is not None:
            return hit
        value = theta(factor.func, factor.arg, order)
        for _ in range(factor.power - 1):
            value = mul(value, theta(factor.func, factor.arg, order))
        with self._lock:
            return self._data.setdefault(key, value)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


DEFAULT_CACHE = LeafCache()


def eval_term(term: Term, order: int, cache: Optional[LeafCache] = None) -> Series:
    cache = cache or DEFAULT_CACHE
    if term.qexponent >= order:
        return Series([0] * order)
    inner = order - term.qexponent
    # sparse factors first; the product fills in as it goes
    factors = sorted(term.factors, key=lambda f: (-f.arg, f.func, f.power))
    acc = None
    for f in factors:
        leaf = cache.get(f, inner)
        acc = leaf if acc is None else mul(acc, leaf)
    if acc is None:
        acc = one(inner)
    return monomial_scale(acc, term.coefficient, term.qexponent)


def evaluate(expr: Sum, order: int, cache: Optional[LeafCache] = None) -> Series:
    """Expand ``expr`` to exactly ``order`` coefficients."""
    if order < 1:
        raise ValueError("order must be positive")
    total = Series([0] * order)
    for term in expr.terms:
        total = add(total, eval_term(term, order, cache))
    return total
