"""Interval arithmetic with outward rounding.

Every operation returns an interval guaranteed to contain the exact real
result.  Rounding errors are detected with error-free transformations
(TwoSum, Dekker's TwoProduct): an exact result is kept as is, an inexact
one is moved to the adjacent float in the outward direction.  Library
transcendentals are not correctly rounded, so their results are always
widened by one ulp on each side.

EMPTY is a sentinel value, not an exception.
"""

from __future__ import annotations

import math
import sys
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Interval",
    "Box",
    "EMPTY",
    "ENTIRE",
    "interval_binary",
    "interval_unary",
    "sqr",
    "sqrt",
    "exp",
    "log",
    "sin",
    "cos",
    "pow_int",
    "hull",
    "next_down",
    "next_up",
]

INF = math.inf
_MAX = sys.float_info.max
_SPLITTER = 134217729.0  # 2**27 + 1
# Dekker splitting is exact only away from overflow and underflow.
_SPLIT_HI = 1e290
_SPLIT_LO = 1e-270
_HALF_PI = math.pi / 2


def next_down(x: float) -> float:
    return math.nextafter(x, -INF)


def next_up(x: float) -> float:
    return math.nextafter(x, INF)


# ---------------------------------------------------------------------------
# directed scalar operations
# ---------------------------------------------------------------------------


def _sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def add_down(a: float, b: float) -> float:
    s = a + b
    if not math.isfinite(s):
        if math.isfinite(a) and math.isfinite(b):
            return _MAX if s > 0 else s
        return s
    if _sum_err(a, b, s) < 0:
        return next_down(s)
    return s


def add_up(a: float, b: float) -> float:
    s = a + b
    if not math.isfinite(s):
        if math.isfinite(a) and math.isfinite(b):
            return -_MAX if s < 0 else s
        return s
    if _sum_err(a, b, s) > 0:
        return next_up(s)
    return s


def _prod_err(a: float, b: float, p: float) -> float | None:
    """Exact error ``a*b - p`` or None when splitting is unsafe."""
    ap = abs(p)
    if not (_SPLIT_LO < ap < _SPLIT_HI) or abs(a) > _SPLIT_HI or abs(b) > _SPLIT_HI:
        return None
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def mul_down(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(p):
        if math.isfinite(a) and math.isfinite(b) and p > 0:
            return _MAX
        return p
    err = _prod_err(a, b, p)
    if err is None:
        p = next_down(p)
        # underflow must not cross zero
        return max(p, 0.0) if (a > 0) == (b > 0) else p
    return next_down(p) if err < 0 else p


def mul_up(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if math.isinf(p):
        if math.isfinite(a) and math.isfinite(b) and p < 0:
            return -_MAX
        return p
    err = _prod_err(a, b, p)
    if err is None:
        p = next_up(p)
        return min(p, 0.0) if (a > 0) != (b > 0) else p
    return next_up(p) if err > 0 else p


def _div_dir(a: float, b: float) -> tuple[float, int]:
    """Quotient rounded to nearest and the sign of (exact - rounded).

    A direction of 2 means the sign could not be determined.
    """
    if a == 0.0 or math.isinf(b):
        return 0.0, 0
    q = a / b
    if math.isinf(a):
        return q, 0
    if math.isinf(q):
        return q, (1 if q > 0 else -1) * 2
    if q == 0.0:
        return q, 2
    err = _prod_err(q, b, q * b)
    if err is None:
        return q, 2
    rem = (a - q * b) - err
    if rem == 0.0:
        return q, 0
    # exact - q = rem / b
    return q, 1 if (rem > 0) == (b > 0) else -1


def div_down(a: float, b: float) -> float:
    q, d = _div_dir(a, b)
    if math.isinf(q):
        return _MAX if (q > 0 and d) else q
    if d == 0 or d == 1:
        return q
    q = next_down(q)
    return max(q, 0.0) if (a > 0) == (b > 0) else q


def div_up(a: float, b: float) -> float:
    q, d = _div_dir(a, b)
    if math.isinf(q):
        return -_MAX if (q < 0 and d) else q
    if d == 0 or d == -1:
        return q
    q = next_up(q)
    return min(q, 0.0) if (a > 0) != (b > 0) else q


def _sqrt_dir(x: float) -> tuple[float, int]:
    r = math.sqrt(x)
    if r == 0.0 or math.isinf(r):
        return r, 0
    p = r * r
    err = _prod_err(r, r, p)
    if err is None:
        return r, 2
    rem = (x - p) - err
    if rem == 0.0:
        return r, 0
    return r, 1 if rem > 0 else -1


def sqrt_down(x: float) -> float:
    r, d = _sqrt_dir(x)
    return r if d in (0, 1) else next_down(r)


def sqrt_up(x: float) -> float:
    r, d = _sqrt_dir(x)
    return r if d in (0, -1) else next_up(r)


# ---------------------------------------------------------------------------
# Interval
# ---------------------------------------------------------------------------


class Interval:
    """Closed interval ``[lo, hi]`` of extended reals.

    Instances are immutable.  Arithmetic operators accept plain numbers,
    which are treated as degenerate intervals.
    """

    __slots__ = ("lo", "hi")

    lo: float
    hi: float

    def __init__(self, lo: float, hi: float | None = None) -> None:
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval bounds must not be NaN")
        if lo > hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        if lo == INF or hi == -INF:
            raise ValueError("interval must contain a real number")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @classmethod
    def point(cls, x: float) -> Interval:
        return _mk(x, x)

    # -- predicates -------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return x.is_empty or (self.lo <= x.lo and x.hi <= self.hi)
        return self.lo <= x <= self.hi

    def subset(self, other: Interval) -> bool:
        return self.is_empty or (other.lo <= self.lo and self.hi <= other.hi)

    def interior_subset(self, other: Interval) -> bool:
        """True when self lies in the topological interior of other."""
        if self.is_empty:
            return True
        lo_ok = other.lo == -INF or other.lo < self.lo
        hi_ok = other.hi == INF or self.hi < other.hi
        return lo_ok and hi_ok

    # -- measures -----------------------------------------------------------

    @property
    def width(self) -> float:
        if self.is_empty:
            return 0.0
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        lo, hi = self.lo, self.hi
        if lo == -INF and hi == INF:
            return 0.0
        if lo == -INF:
            return min(hi, -1e8)
        if hi == INF:
            return max(lo, 1e8)
        m = 0.5 * lo + 0.5 * hi
        return min(max(m, lo), hi)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    # -- set operations -----------------------------------------------------

    def intersect(self, other: Interval) -> Interval:
        lo = self.lo if self.lo > other.lo else other.lo
        hi = self.hi if self.hi < other.hi else other.hi
        if lo > hi:
            return EMPTY
        return _mk(lo, hi)

    __and__ = intersect

    def hull(self, other: Interval) -> Interval:
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return _mk(min(self.lo, other.lo), max(self.hi, other.hi))

    __or__ = hull

    def widen(self, ulps: int = 1) -> Interval:
        lo, hi = self.lo, self.hi
        for _ in range(ulps):
            lo, hi = next_down(lo), next_up(hi)
        return _mk(lo, hi)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> Interval:
        if self.is_empty:
            return EMPTY
        return _mk(-self.hi, -self.lo)

    def __add__(self, other) -> Interval:
        return _add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> Interval:
        return _sub(self, _coerce(other))

    def __rsub__(self, other) -> Interval:
        return _sub(_coerce(other), self)

    def __mul__(self, other) -> Interval:
        return _mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> Interval:
        return _div(self, _coerce(other))

    def __rtruediv__(self, other) -> Interval:
        return _div(_coerce(other), self)

    def __pow__(self, n: int) -> Interval:
        return pow_int(self, n)

    # -- dunder plumbing ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __iter__(self) -> Iterator[float]:
        yield self.lo
        yield self.hi

    def __repr__(self) -> str:
        if self.is_empty:
            return "Interval.EMPTY"
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __reduce__(self):
        if self.is_empty:
            return (_empty, ())
        return (Interval, (self.lo, self.hi))


def _mk(lo: float, hi: float) -> Interval:
    iv = object.__new__(Interval)
    object.__setattr__(iv, "lo", lo)
    object.__setattr__(iv, "hi", hi)
    return iv


def _empty() -> Interval:
    return EMPTY


EMPTY = _mk(INF, -INF)
ENTIRE = _mk(-INF, INF)
_ZERO = _mk(0.0, 0.0)
_NONNEG = _mk(0.0, INF)


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    x = float(x)
    return _mk(x, x)


def hull(items: Iterable[Interval]) -> Interval:
    out = EMPTY
    for iv in items:
        out = out.hull(iv)
    return out


# ---------------------------------------------------------------------------
# binary operations
# ---------------------------------------------------------------------------


def _add(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi or b.lo > b.hi:
        return EMPTY
    return _mk(add_down(a.lo, b.lo), add_up(a.hi, b.hi))


def _sub(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi or b.lo > b.hi:
        return EMPTY
    return _mk(add_down(a.lo, -b.hi), add_up(a.hi, -b.lo))


def _mul(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi or b.lo > b.hi:
        return EMPTY
    a1, a2, b1, b2 = a.lo, a.hi, b.lo, b.hi
    if a1 >= 0.0:
        if b1 >= 0.0:
            return _mk(mul_down(a1, b1), mul_up(a2, b2))
        if b2 <= 0.0:
            return _mk(mul_down(a2, b1), mul_up(a1, b2))
        return _mk(mul_down(a2, b1), mul_up(a2, b2))
    if a2 <= 0.0:
        if b1 >= 0.0:
            return _mk(mul_down(a1, b2), mul_up(a2, b1))
        if b2 <= 0.0:
            return _mk(mul_down(a2, b2), mul_up(a1, b1))
        return _mk(mul_down(a1, b2), mul_up(a1, b1))
    if b1 >= 0.0:
        return _mk(mul_down(a1, b2), mul_up(a2, b2))
    if b2 <= 0.0:
        return _mk(mul_down(a2, b1), mul_up(a1, b1))
    lo = min(mul_down(a1, b2), mul_down(a2, b1))
    hi = max(mul_up(a1, b1), mul_up(a2, b2))
    return _mk(lo, hi)


def _div(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi or b.lo > b.hi:
        return EMPTY
    a1, a2, b1, b2 = a.lo, a.hi, b.lo, b.hi
    if b1 > 0.0:
        if a1 >= 0.0:
            return _mk(div_down(a1, b2), div_up(a2, b1))
        if a2 <= 0.0:
            return _mk(div_down(a1, b1), div_up(a2, b2))
        return _mk(div_down(a1, b1), div_up(a2, b1))
    if b2 < 0.0:
        if a1 >= 0.0:
            return _mk(div_down(a2, b2), div_up(a1, b1))
        if a2 <= 0.0:
            return _mk(div_down(a2, b1), div_up(a1, b2))
        return _mk(div_down(a2, b2), div_up(a1, b2))
    # 0 in b: hull of the extended quotient
    if b1 == 0.0 and b2 == 0.0:
        return EMPTY
    if a1 == 0.0 and a2 == 0.0:
        return _ZERO
    if a1 < 0.0 < a2 or (b1 < 0.0 < b2):
        return ENTIRE
    if b1 == 0.0:  # b = [0, b2], b2 > 0
        if a1 >= 0.0:
            return _mk(div_down(a1, b2), INF)
        return _mk(-INF, div_up(a2, b2))
    # b = [b1, 0], b1 < 0
    if a1 >= 0.0:
        return _mk(-INF, div_up(a1, b1))
    return _mk(div_down(a2, b1), INF)


_BINARY = {"+": _add, "-": _sub, "*": _mul, "/": _div}


def interval_binary(op: str, a: Interval, b: Interval) -> Interval:
    """Apply ``op`` in {'+', '-', '*', '/'} to two intervals."""
    try:
        fn = _BINARY[op]
    except KeyError:
        raise ValueError(f"unknown binary operator {op!r}") from None
    return fn(_coerce(a), _coerce(b))


# ---------------------------------------------------------------------------
# unary operations
# ---------------------------------------------------------------------------


def sqr(a: Interval) -> Interval:
    if a.lo > a.hi:
        return EMPTY
    lo, hi = a.lo, a.hi
    if lo >= 0.0:
        return _mk(mul_down(lo, lo), mul_up(hi, hi))
    if hi <= 0.0:
        return _mk(mul_down(hi, hi), mul_up(lo, lo))
    m = max(-lo, hi)
    return _mk(0.0, mul_up(m, m))


def sqrt(a: Interval) -> Interval:
    a = a.intersect(_NONNEG)
    if a.is_empty:
        return EMPTY
    return _mk(sqrt_down(a.lo), sqrt_up(a.hi))


def _libm_down(fn, x: float) -> float:
    v = fn(x)
    return v if math.isinf(v) else next_down(v)


def _libm_up(fn, x: float) -> float:
    v = fn(x)
    return v if math.isinf(v) else next_up(v)


def _exp_down(x: float) -> float:
    if x == 0.0:
        return 1.0
    if x == -INF:
        return 0.0
    try:
        return max(0.0, _libm_down(math.exp, x))
    except OverflowError:
        return _MAX


def _exp_up(x: float) -> float:
    if x == 0.0:
        return 1.0
    if x == -INF:
        return 0.0
    try:
        return _libm_up(math.exp, x)
    except OverflowError:
        return INF


def exp(a: Interval) -> Interval:
    if a.lo > a.hi:
        return EMPTY
    return _mk(_exp_down(a.lo), _exp_up(a.hi))


def _log_down(x: float) -> float:
    if x == 0.0:
        return -INF
    if x == 1.0:
        return 0.0
    return _libm_down(math.log, x)


def _log_up(x: float) -> float:
    if x == 0.0:
        return -INF
    if x == 1.0:
        return 0.0
    return _libm_up(math.log, x)


def log(a: Interval) -> Interval:
    a = a.intersect(_NONNEG)
    if a.is_empty or a.hi == 0.0:
        return EMPTY
    return _mk(_log_down(a.lo), _log_up(a.hi))


def _trig(fn, a: Interval, phase: float) -> Interval:
    """Range of ``fn`` where maxima sit at ``phase + 2k*pi``."""
    if a.lo > a.hi:
        return EMPTY
    lo, hi = a.lo, a.hi
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi - lo >= 2 * math.pi:
        return _mk(-1.0, 1.0)
    # Extrema of fn lie at phase + k*pi; the slack on k only ever adds
    # extrema, which can widen but never shrink the result.
    slack = 1e-9
    k_lo = math.ceil((lo - phase) / math.pi - slack)
    k_hi = math.floor((hi - phase) / math.pi + slack)
    fa, fb = fn(lo), fn(hi)
    r_lo = next_down(min(fa, fb))
    r_hi = next_up(max(fa, fb))
    for k in range(k_lo, k_hi + 1):
        if k % 2 == 0:
            r_hi = 1.0
        else:
            r_lo = -1.0
    return _mk(max(-1.0, r_lo), min(1.0, r_hi))


def sin(a: Interval) -> Interval:
    if a.lo == 0.0 and a.hi == 0.0:
        return _ZERO
    return _trig(math.sin, a, _HALF_PI)


def cos(a: Interval) -> Interval:
    if a.lo == 0.0 and a.hi == 0.0:
        return _mk(1.0, 1.0)
    return _trig(math.cos, a, 0.0)


def _pow_point(x: float, n: int) -> Interval:
    """Enclosure of x**n for n >= 1 by repeated squaring."""
    result = None
    base = _mk(x, x)
    while n:
        if n & 1:
            result = base if result is None else _mul(result, base)
        n >>= 1
        if n:
            base = sqr(base)
    return result


def pow_int(a: Interval, n: int) -> Interval:
    """Integer power with a tight range (x**n is monotone or even)."""
    if a.lo > a.hi:
        return EMPTY
    n = int(n)
    if n == 0:
        return _mk(1.0, 1.0)
    if n < 0:
        return _div(_mk(1.0, 1.0), pow_int(a, -n))
    if n == 1:
        return a
    if n == 2:
        return sqr(a)
    if n % 2:
        return _mk(_pow_point(a.lo, n).lo, _pow_point(a.hi, n).hi)
    lo_mag, hi_mag = a.mig, a.mag
    return _mk(_pow_point(lo_mag, n).lo, _pow_point(hi_mag, n).hi)


_UNARY = {
    "neg": Interval.__neg__,
    "sqr": sqr,
    "sqrt": sqrt,
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
}


def interval_unary(op: str, a: Interval, n: int | None = None) -> Interval:
    """Apply a named unary operation; ``pow_int`` takes the exponent ``n``."""
    a = _coerce(a)
    if op == "pow_int":
        if n is None:
            raise ValueError("pow_int needs an exponent")
        return pow_int(a, n)
    try:
        fn = _UNARY[op]
    except KeyError:
        raise ValueError(f"unknown unary operator {op!r}") from None
    return fn(a)


def root_down(x: float, n: int) -> float:
    """Lower bound on the real n-th root of x (x >= 0 for even n)."""
    if x < 0.0:
        return -root_up(-x, n)
    if x == 0.0 or math.isinf(x):
        return x
    if n == 2:
        return sqrt_down(x)
    r = x ** (1.0 / n)
    # pow with a rounded exponent: relative error well below 1e-12
    return next_down(r * (1.0 - 1e-12))


def root_up(x: float, n: int) -> float:
    if x < 0.0:
        return -root_down(-x, n)
    if x == 0.0 or math.isinf(x):
        return x
    if n == 2:
        return sqrt_up(x)
    r = x ** (1.0 / n)
    return next_up(r * (1.0 + 1e-12))


# ---------------------------------------------------------------------------
# Box
# ---------------------------------------------------------------------------


class Box(Sequence[Interval]):
    """An immutable vector of intervals, one per variable."""

    __slots__ = ("_ivs",)

    def __init__(self, components: Iterable) -> None:
        ivs = []
        for c in components:
            if isinstance(c, Interval):
                ivs.append(c)
            else:
                lo, hi = c
                ivs.append(Interval(lo, hi))
        self._ivs = tuple(ivs)

    @classmethod
    def from_bounds(cls, lo: Sequence[float], hi: Sequence[float]) -> Box:
        return cls(Interval(a, b) for a, b in zip(lo, hi))

    @classmethod
    def from_point(cls, x: Sequence[float]) -> Box:
        return cls(_mk(float(v), float(v)) for v in x)

    @classmethod
    def empty(cls, n: int) -> Box:
        return cls([EMPTY] * n)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Box(self._ivs[i])
        return self._ivs[i]

    def __len__(self) -> int:
        return len(self._ivs)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._ivs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Box):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty and len(self) == len(other)
        return self._ivs == other._ivs

    def __hash__(self) -> int:
        return hash(self._ivs)

    def __repr__(self) -> str:
        if self.is_empty:
            return f"Box.empty({len(self)})"
        inner = ", ".join(f"[{iv.lo!r}, {iv.hi!r}]" for iv in self._ivs)
        return f"Box({inner})"

    @property
    def is_empty(self) -> bool:
        return any(iv.lo > iv.hi for iv in self._ivs)

    @property
    def lo(self) -> list[float]:
        return [iv.lo for iv in self._ivs]

    @property
    def hi(self) -> list[float]:
        return [iv.hi for iv in self._ivs]

    @property
    def widths(self) -> list[float]:
        return [iv.width for iv in self._ivs]

    def width(self) -> float:
        if self.is_empty or not self._ivs:
            return 0.0
        return max(iv.hi - iv.lo for iv in self._ivs)

    def midpoint(self) -> list[float]:
        return [iv.mid for iv in self._ivs]

    def volume(self) -> float:
        if self.is_empty:
            return 0.0
        v = 1.0
        for iv in self._ivs:
            v *= iv.hi - iv.lo
        return v

    def intersect(self, other: Box) -> Box:
        out = []
        for a, b in zip(self._ivs, other._ivs):
            c = a.intersect(b)
            if c.is_empty:
                return Box.empty(len(self))
            out.append(c)
        return Box(out)

    def hull(self, other: Box) -> Box:
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Box(a.hull(b) for a, b in zip(self._ivs, other._ivs))

    def subset(self, other: Box) -> bool:
        return self.is_empty or all(a.subset(b) for a, b in zip(self._ivs, other._ivs))

    def contains_point(self, x: Sequence[float]) -> bool:
        return all(iv.lo <= v <= iv.hi for iv, v in zip(self._ivs, x))

    def clamp_point(self, x: Sequence[float]) -> list[float]:
        return [min(max(float(v), iv.lo), iv.hi) for iv, v in zip(self._ivs, x)]

    def relative_widths(self) -> list[float]:
        return [iv.width / (1.0 + abs(iv.mid)) for iv in self._ivs]

    def max_relative_width_index(self) -> int:
        """Index of the widest component in relative terms; ties go to the lowest index."""
        rel = self.relative_widths()
        best = 0
        for i, r in enumerate(rel):
            if r > rel[best]:
                best = i
        return best

    def replace(self, i: int, iv: Interval) -> Box:
        ivs = list(self._ivs)
        ivs[i] = iv
        return Box(ivs)
