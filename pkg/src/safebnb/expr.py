"""Expression trees with point, interval and forward-mode AD evaluation.

An expression is compiled once into a post-order *tape*: a list of
``(opcode, a, b)`` instructions where operands refer to earlier slots.  All
evaluators walk the same tape, and the contractor reuses the slot layout
for its forward/backward passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import interval as ia
from .interval import Box, Interval

__all__ = [
    "Expr",
    "Var",
    "Const",
    "Binary",
    "Unary",
    "Pow",
    "DomainError",
    "as_expr",
    "const",
    "sqr",
    "sqrt",
    "exp",
    "log",
    "sin",
    "cos",
    "eval_point",
    "eval_interval",
    "forward_intervals",
    "gradient_point",
    "gradient_interval",
    "jacobian_point",
    "jacobian_interval",
    "format_expr",
    "variables",
    "is_affine_on",
]

UNARY_OPS = ("neg", "sqr", "sqrt", "exp", "log", "sin", "cos")
FUNCTIONS = ("sqr", "sqrt", "exp", "log", "sin", "cos")

# tape opcodes
VAR, CONST, ADD, SUB, MUL, DIV, NEG, SQR, SQRT, EXP, LOG, SIN, COS, POW = range(14)
_BIN_CODE = {"+": ADD, "-": SUB, "*": MUL, "/": DIV}
_UN_CODE = {"neg": NEG, "sqr": SQR, "sqrt": SQRT, "exp": EXP, "log": LOG, "sin": SIN, "cos": COS}


class DomainError(ArithmeticError):
    """A point left the natural domain of sqrt, log or division."""


class Expr:
    """Base class; supports ``+ - * / ** neg`` for building trees."""

    def __add__(self, other):
        return Binary("+", self, as_expr(other))

    def __radd__(self, other):
        return Binary("+", as_expr(other), self)

    def __sub__(self, other):
        return Binary("-", self, as_expr(other))

    def __rsub__(self, other):
        return Binary("-", as_expr(other), self)

    def __mul__(self, other):
        return Binary("*", self, as_expr(other))

    def __rmul__(self, other):
        return Binary("*", as_expr(other), self)

    def __truediv__(self, other):
        return Binary("/", self, as_expr(other))

    def __rtruediv__(self, other):
        return Binary("/", as_expr(other), self)

    def __neg__(self):
        return Unary("neg", self)

    def __pow__(self, n: int):
        return Pow(self, int(n))

    @cached_property
    def tape(self) -> list[tuple]:
        out: list[tuple] = []
        _compile(self, out)
        return out

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True, eq=False)
class Var(Expr):
    index: int
    name: str = ""

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("variable index must be non-negative")


@dataclass(frozen=True, eq=False)
class Const(Expr):
    value: float
    enclosure: Interval = field(default=None)
    text: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("constants must be finite")
        if self.enclosure is None:
            object.__setattr__(self, "enclosure", Interval.point(self.value))


@dataclass(frozen=True, eq=False)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in _BIN_CODE:
            raise ValueError(f"unknown binary operator {self.op!r}")


@dataclass(frozen=True, eq=False)
class Unary(Expr):
    op: str
    arg: Expr

    def __post_init__(self):
        if self.op not in _UN_CODE:
            raise ValueError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True, eq=False)
class Pow(Expr):
    base: Expr
    exponent: int


def const(value) -> Const:
    """Constant from a number or a decimal literal.

    A literal that is not exactly representable (``"0.1"``) gets an
    enclosure one ulp wide on each side of the nearest float.
    """
    if isinstance(value, str):
        text = value.strip()
        v = float(text)
        if not math.isfinite(v):
            raise ValueError(f"constant {text!r} is not finite")
        if Fraction(text) == Fraction(v):
            enc = Interval.point(v)
        else:
            enc = Interval(ia.next_down(v), ia.next_up(v))
        return Const(v, enc, text)
    return Const(float(value))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return const(x)


def sqr(e) -> Expr:
    return Unary("sqr", as_expr(e))


def sqrt(e) -> Expr:
    return Unary("sqrt", as_expr(e))


def exp(e) -> Expr:
    return Unary("exp", as_expr(e))


def log(e) -> Expr:
    return Unary("log", as_expr(e))


def sin(e) -> Expr:
    return Unary("sin", as_expr(e))


def cos(e) -> Expr:
    return Unary("cos", as_expr(e))


def _compile(e: Expr, out: list) -> int:
    if isinstance(e, Var):
        out.append((VAR, e.index, None))
    elif isinstance(e, Const):
        out.append((CONST, e.value, e.enclosure))
    elif isinstance(e, Binary) and e.op == "*" and _same_var(e.left, e.right):
        # x*x as one occurrence: tighter ranges and projections
        a = _compile(e.left, out)
        out.append((SQR, a, None))
    elif isinstance(e, Binary):
        a = _compile(e.left, out)
        b = _compile(e.right, out)
        out.append((_BIN_CODE[e.op], a, b))
    elif isinstance(e, Unary):
        a = _compile(e.arg, out)
        out.append((_UN_CODE[e.op], a, None))
    elif isinstance(e, Pow):
        a = _compile(e.base, out)
        out.append((POW, a, e.exponent))
    else:
        raise TypeError(f"not an expression: {e!r}")
    return len(out) - 1


def _same_var(a: Expr, b: Expr) -> bool:
    return isinstance(a, Var) and isinstance(b, Var) and a.index == b.index


def variables(e: Expr) -> set[int]:
    return {a for code, a, _ in e.tape if code == VAR}


# ---------------------------------------------------------------------------
# point evaluation
# ---------------------------------------------------------------------------


def eval_point(e: Expr, x: Sequence[float]) -> float:
    """Floating-point value of ``e`` at ``x``; NaN signals a domain failure."""
    vals: list[float] = []
    push = vals.append
    nan = math.nan
    for code, a, b in e.tape:
        if code == VAR:
            push(float(x[a]))
        elif code == CONST:
            push(a)
        elif code == ADD:
            push(vals[a] + vals[b])
        elif code == SUB:
            push(vals[a] - vals[b])
        elif code == MUL:
            push(vals[a] * vals[b])
        elif code == DIV:
            d = vals[b]
            push(vals[a] / d if d != 0.0 else nan)
        elif code == NEG:
            push(-vals[a])
        elif code == SQR:
            push(vals[a] * vals[a])
        elif code == SQRT:
            v = vals[a]
            push(math.sqrt(v) if v >= 0.0 else nan)
        elif code == EXP:
            v = vals[a]
            push(math.exp(v) if v < 709.78 else math.inf)
        elif code == LOG:
            v = vals[a]
            push(math.log(v) if v > 0.0 else nan)
        elif code == SIN:
            v = vals[a]
            push(math.sin(v) if math.isfinite(v) else nan)
        elif code == COS:
            v = vals[a]
            push(math.cos(v) if math.isfinite(v) else nan)
        else:  # POW
            v = vals[a]
            try:
                push(v**b if (v != 0.0 or b >= 0) else nan)
            except OverflowError:
                push(math.copysign(math.inf, v) if b % 2 else math.inf)
    return vals[-1]


def gradient_point(e: Expr, x: Sequence[float], n: int | None = None) -> tuple[float, np.ndarray]:
    """Value and gradient of ``e`` at ``x`` by forward-mode AD.

    Raises DomainError when evaluation leaves the natural domain.
    """
    n = len(x) if n is None else n
    vals: list[float] = []
    grads: list[dict] = []
    for code, a, b in e.tape:
        if code == VAR:
            v, g = float(x[a]), {a: 1.0}
        elif code == CONST:
            v, g = a, {}
        elif code == ADD:
            v, g = vals[a] + vals[b], _lin(grads[a], 1.0, grads[b], 1.0)
        elif code == SUB:
            v, g = vals[a] - vals[b], _lin(grads[a], 1.0, grads[b], -1.0)
        elif code == MUL:
            va, vb = vals[a], vals[b]
            v, g = va * vb, _lin(grads[a], vb, grads[b], va)
        elif code == DIV:
            va, vb = vals[a], vals[b]
            if vb == 0.0:
                raise DomainError("division by zero")
            v = va / vb
            g = _lin(grads[a], 1.0 / vb, grads[b], -v / vb)
        elif code == NEG:
            v, g = -vals[a], _scale(grads[a], -1.0)
        elif code == SQR:
            va = vals[a]
            v, g = va * va, _scale(grads[a], 2.0 * va)
        elif code == SQRT:
            va = vals[a]
            if va <= 0.0:
                raise DomainError("sqrt derivative outside its domain")
            v = math.sqrt(va)
            g = _scale(grads[a], 0.5 / v)
        elif code == EXP:
            v = math.exp(vals[a]) if vals[a] < 709.78 else math.inf
            g = _scale(grads[a], v)
        elif code == LOG:
            va = vals[a]
            if va <= 0.0:
                raise DomainError("log of a non-positive value")
            v, g = math.log(va), _scale(grads[a], 1.0 / va)
        elif code == SIN:
            va = vals[a]
            v, g = math.sin(va), _scale(grads[a], math.cos(va))
        elif code == COS:
            va = vals[a]
            v, g = math.cos(va), _scale(grads[a], -math.sin(va))
        else:  # POW
            va = vals[a]
            if va == 0.0 and b < 0:
                raise DomainError("negative power of zero")
            v = va**b
            g = _scale(grads[a], b * va ** (b - 1)) if b != 0 else {}
        vals.append(v)
        grads.append(g)
    if math.isnan(vals[-1]):
        raise DomainError("evaluation produced NaN")
    out = np.zeros(n)
    for k, d in grads[-1].items():
        out[k] = d
    return vals[-1], out


def _lin(ga: dict, sa: float, gb: dict, sb: float) -> dict:
    out = {k: v * sa for k, v in ga.items()}
    for k, v in gb.items():
        out[k] = out.get(k, 0.0) + v * sb
    return out


def _scale(g: dict, s: float) -> dict:
    return {k: v * s for k, v in g.items()}


def jacobian_point(exprs: Sequence[Expr], x: Sequence[float], n: int | None = None) -> np.ndarray:
    """Row i holds the gradient of ``exprs[i]`` at ``x``."""
    n = len(x) if n is None else n
    jac = np.zeros((len(exprs), n))
    for i, e in enumerate(exprs):
        jac[i] = gradient_point(e, x, n)[1]
    return jac


# ---------------------------------------------------------------------------
# interval evaluation
# ---------------------------------------------------------------------------


def forward_intervals(e: Expr, box: Box) -> list[Interval]:
    """Natural interval extension value of every tape slot."""
    vals: list[Interval] = []
    push = vals.append
    for code, a, b in e.tape:
        if code == VAR:
            push(box[a])
        elif code == CONST:
            push(b)
        elif code == ADD:
            push(vals[a] + vals[b])
        elif code == SUB:
            push(vals[a] - vals[b])
        elif code == MUL:
            push(vals[a] * vals[b])
        elif code == DIV:
            push(vals[a] / vals[b])
        elif code == NEG:
            push(-vals[a])
        elif code == SQR:
            push(ia.sqr(vals[a]))
        elif code == SQRT:
            push(ia.sqrt(vals[a]))
        elif code == EXP:
            push(ia.exp(vals[a]))
        elif code == LOG:
            push(ia.log(vals[a]))
        elif code == SIN:
            push(ia.sin(vals[a]))
        elif code == COS:
            push(ia.cos(vals[a]))
        else:
            push(ia.pow_int(vals[a], b))
    return vals


def eval_interval(e: Expr, box: Box) -> Interval:
    """Enclosure of the range of ``e`` over ``box``; EMPTY when undefined."""
    if box.is_empty:
        return ia.EMPTY
    v = forward_intervals(e, box)[-1]
    return v


_ONE = Interval.point(1.0)


def gradient_interval(e: Expr, box: Box) -> tuple[Interval, dict[int, Interval]]:
    """Interval value and sparse interval gradient ``{var: range}`` over ``box``."""
    vals: list[Interval] = []
    grads: list[dict] = []
    for code, a, b in e.tape:
        if code == VAR:
            v, g = box[a], {a: _ONE}
        elif code == CONST:
            v, g = b, {}
        elif code == ADD:
            v, g = vals[a] + vals[b], _ilin(grads[a], None, grads[b], None)
        elif code == SUB:
            v, g = vals[a] - vals[b], _ilin(grads[a], None, grads[b], -1.0)
        elif code == MUL:
            va, vb = vals[a], vals[b]
            v, g = va * vb, _ilin(grads[a], vb, grads[b], va)
        elif code == DIV:
            va, vb = vals[a], vals[b]
            v = va / vb
            # d(a/b) = da / b - (a/b) db / b
            g = _ilin(grads[a], _ONE / vb, grads[b], -(v / vb))
        elif code == NEG:
            v, g = -vals[a], _iscale(grads[a], -1.0)
        elif code == SQR:
            va = vals[a]
            v, g = ia.sqr(va), _iscale(grads[a], va * 2.0)
        elif code == SQRT:
            va = vals[a]
            v = ia.sqrt(va)
            g = _iscale(grads[a], _ONE / (v * 2.0))
        elif code == EXP:
            v = ia.exp(vals[a])
            g = _iscale(grads[a], v)
        elif code == LOG:
            va = vals[a]
            v = ia.log(va)
            g = _iscale(grads[a], _ONE / va.intersect(Interval(0.0, math.inf)))
        elif code == SIN:
            va = vals[a]
            v, g = ia.sin(va), _iscale(grads[a], ia.cos(va))
        elif code == COS:
            va = vals[a]
            v, g = ia.cos(va), _iscale(grads[a], -ia.sin(va))
        else:
            va = vals[a]
            v = ia.pow_int(va, b)
            g = _iscale(grads[a], ia.pow_int(va, b - 1) * float(b)) if b != 0 else {}
        vals.append(v)
        grads.append(g)
    return vals[-1], grads[-1]


def _ilin(ga: dict, sa, gb: dict, sb) -> dict:
    out = dict(ga) if sa is None else {k: v * sa for k, v in ga.items()}
    for k, v in gb.items():
        term = v if sb is None else v * sb
        prev = out.get(k)
        out[k] = term if prev is None else prev + term
    return out


def _iscale(g: dict, s) -> dict:
    return {k: v * s for k, v in g.items()}


def jacobian_interval(exprs: Sequence[Expr], box: Box) -> list[list[Interval]]:
    """Entry (i, j) encloses the partial derivative of ``exprs[i]`` w.r.t. x_j."""
    n = len(box)
    zero = Interval.point(0.0)
    rows = []
    for e in exprs:
        value, g = gradient_interval(e, box)
        row = []
        for j in range(n):
            if value.is_empty:
                row.append(ia.EMPTY)
            else:
                row.append(g.get(j, zero))
        rows.append(row)
    return rows


def is_affine_on(grad: dict[int, Interval]) -> bool:
    """A degenerate interval gradient proves the expression affine on the box."""
    return all(g.is_point and math.isfinite(g.lo) for g in grad.values())


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return 3
    if isinstance(e, Const) and (e.value < 0 or (e.text or "").startswith("-")):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def format_expr(e: Expr, names: Sequence[str] | None = None) -> str:
    """Render ``e`` in the problem-file syntax with minimal parentheses."""

    def fmt(node: Expr) -> str:
        if isinstance(node, Var):
            if names is not None:
                return names[node.index]
            return node.name or f"x{node.index}"
        if isinstance(node, Const):
            return node.text if node.text is not None else repr(node.value)
        if isinstance(node, Binary):
            p = _PREC[node.op]
            left = fmt(node.left)
            if _prec(node.left) < p:
                left = f"({left})"
            right = fmt(node.right)
            rp = _prec(node.right)
            if rp < p or (rp == p and node.op in "-/") or rp == 3:
                right = f"({right})"
            return f"{left} {node.op} {right}"
        if isinstance(node, Unary):
            inner = fmt(node.arg)
            if node.op == "neg":
                return f"-({inner})" if _prec(node.arg) <= 3 else f"-{inner}"
            return f"{node.op}({inner})"
        if isinstance(node, Pow):
            base = fmt(node.base)
            if _prec(node.base) <= 4:
                base = f"({base})"
            return f"{base}^{node.exponent}"
        raise TypeError(f"not an expression: {node!r}")

    return fmt(e)
