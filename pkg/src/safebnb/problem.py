"""Problem data model and the problem-file parser.

File grammar::

    var <name> in [<lo>, <hi>];
    min <expr>;
    subject <expr> = 0;
    subject <expr> <= 0;

Expressions use infix ``+ - * / ^`` (integer exponents only), parentheses
and the functions ``sqrt exp log sin cos sqr``.  ``#`` starts a comment.
A constraint may carry any right-hand side; it is moved to the left.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

from .expr import FUNCTIONS, Binary, Const, Expr, Pow, Unary, Var, const, format_expr, variables
from .interval import Box, Interval

__all__ = ["Problem", "ParseError", "parse_problem", "parse_expression", "format_problem", "load_problem"]


class ParseError(ValueError):
    """Malformed problem text; carries 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Problem:
    """``min f(x)`` s.t. ``g_i(x) = 0``, ``h_j(x) <= 0``, ``x`` in ``domain``."""

    names: tuple[str, ...]
    domain: Box
    objective: Expr
    equalities: tuple[Expr, ...] = ()
    inequalities: tuple[Expr, ...] = ()
    name: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        if not isinstance(self.domain, Box):
            object.__setattr__(self, "domain", Box(self.domain))
        if len(self.domain) != len(self.names):
            raise ValueError("domain length must match the number of variables")
        for e in (self.objective, *self.equalities, *self.inequalities):
            bad = [i for i in variables(e) if i >= self.n]
            if bad:
                raise ValueError(f"expression references undeclared variable index {bad[0]}")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def k(self) -> int:
        return len(self.equalities)

    @property
    def m(self) -> int:
        return len(self.inequalities)

    def constraints(self):
        """Yield ``(expr, relation)`` pairs with relation ``'='`` or ``'<='``."""
        for g in self.equalities:
            yield g, "="
        for h in self.inequalities:
            yield h, "<="


# ---------------------------------------------------------------------------
# tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|[-+*/^()\[\],;=])
  """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, tok_text, line, pos - line_start + 1))
        nl = tok_text.count("\n")
        if nl:
            line += nl
            line_start = pos + tok_text.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, names: dict[str, int] | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.var_index: dict[str, int] = dict(names or {})

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            got = tok.text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        return tok

    # -- statements -------------------------------------------------------

    def problem(self) -> Problem:
        names: list[str] = []
        bounds: list[Interval] = []
        objective = None
        eqs: list[Expr] = []
        ineqs: list[Expr] = []
        while self.tok.kind != "eof":
            tok = self.tok
            if self.accept("var"):
                name_tok = self.tok
                if name_tok.kind != "name":
                    raise self.error("expected a variable name")
                self.i += 1
                if name_tok.text in self.var_index:
                    raise self.error(f"variable {name_tok.text!r} declared twice", name_tok)
                if name_tok.text in FUNCTIONS or name_tok.text in ("var", "min", "subject", "in"):
                    raise self.error(f"{name_tok.text!r} is reserved", name_tok)
                self.expect("in")
                self.expect("[")
                lo = self.signed_number()
                self.expect(",")
                hi = self.signed_number()
                close = self.expect("]")
                if lo > hi:
                    raise self.error(f"empty domain [{lo}, {hi}]", close)
                self.var_index[name_tok.text] = len(names)
                names.append(name_tok.text)
                bounds.append(Interval(lo, hi))
            elif self.accept("min"):
                if objective is not None:
                    raise self.error("more than one objective", tok)
                objective = self.expr()
            elif self.accept("subject"):
                lhs = self.expr()
                if self.accept("="):
                    rel = "="
                elif self.accept("<="):
                    rel = "<="
                elif self.accept(">="):
                    rel = ">="
                else:
                    raise self.error("expected '=', '<=' or '>='")
                rhs = self.expr()
                e = _move_left(lhs, rhs) if rel != ">=" else _move_left(rhs, lhs)
                (eqs if rel == "=" else ineqs).append(e)
            else:
                raise self.error(f"expected 'var', 'min' or 'subject', got {tok.text!r}")
            self.expect(";")
        if objective is None:
            raise ParseError("problem has no 'min' objective", self.tok.line, self.tok.col)
        return Problem(tuple(names), Box(bounds), objective, tuple(eqs), tuple(ineqs))

    def signed_number(self) -> float:
        sign = 1.0
        while self.tok.text in ("-", "+") and self.tok.kind == "op":
            if self.tok.text == "-":
                sign = -sign
            self.i += 1
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return sign * float(tok.text)
        if tok.kind == "name" and tok.text in ("inf", "infinity"):
            self.i += 1
            return sign * math.inf
        raise self.error("expected a number")

    # -- expressions ------------------------------------------------------
    # expr   := term (('+'|'-') term)*
    # term   := unary (('*'|'/') unary)*
    # unary  := '-' unary | '+' unary | power
    # power  := atom ('^' ['-'] INT)?

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            tok = self.tok
            if tok.kind == "num" and self.toks[self.i + 1].text != "^":
                self.i += 1
                return const("-" + tok.text)
            return Unary("neg", self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            neg = False
            paren = self.accept("(")
            if self.accept("-"):
                neg = True
            tok = self.tok
            if tok.kind != "num" or not re.fullmatch(r"\d+", tok.text):
                raise self.error("exponent must be an integer literal")
            self.i += 1
            if paren:
                self.expect(")")
            n = int(tok.text)
            return Pow(base, -n if neg else n)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return const(tok.text)
        if tok.kind == "name":
            self.i += 1
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            if tok.text not in self.var_index:
                raise self.error(f"undeclared variable {tok.text!r}", tok)
            return Var(self.var_index[tok.text], tok.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


def _move_left(lhs: Expr, rhs: Expr) -> Expr:
    if isinstance(rhs, Const) and rhs.value == 0.0:
        return lhs
    return Binary("-", lhs, rhs)


def parse_problem(text: str, name: str = "") -> Problem:
    """Parse problem-file text into a Problem."""
    p = _Parser(text).problem()
    if name:
        p = Problem(p.names, p.domain, p.objective, p.equalities, p.inequalities, name=name)
    return p


def parse_expression(text: str, names: Sequence[str]) -> Expr:
    """Parse a single expression over the given variable names."""
    parser = _Parser(text, {nm: i for i, nm in enumerate(names)})
    e = parser.expr()
    if parser.tok.kind != "eof":
        raise parser.error(f"trailing input {parser.tok.text!r}")
    return e


def _fmt_bound(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def format_problem(p: Problem) -> str:
    """Print ``p`` in the problem-file syntax (inverse of parse_problem)."""
    lines = [f"var {nm} in [{_fmt_bound(iv.lo)}, {_fmt_bound(iv.hi)}];" for nm, iv in zip(p.names, p.domain)]
    lines.append(f"min {format_expr(p.objective, p.names)};")
    for g in p.equalities:
        lines.append(f"subject {format_expr(g, p.names)} = 0;")
    for h in p.inequalities:
        lines.append(f"subject {format_expr(h, p.names)} <= 0;")
    return "\n".join(lines) + "\n"


_META_RE = re.compile(r"^#\s*(\w+)\s*:\s*(.+?)\s*$", re.MULTILINE)


def load_problem(path) -> Problem:
    """Read a problem file; ``# key: value`` comment lines become metadata."""
    from pathlib import Path

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    p = parse_problem(text, name=path.stem)
    meta = dict(_META_RE.findall(text))
    return Problem(p.names, p.domain, p.objective, p.equalities, p.inequalities, name=path.stem, metadata=meta)
