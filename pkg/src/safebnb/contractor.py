"""HC4-style hull-consistency filtering.

``hc4_revise`` evaluates one constraint forward over the box, intersects
the root with the allowed range, then projects that range back through
the tree onto each variable.  ``prune`` iterates it over every constraint
plus the objective cut ``f(x) <= U`` until the box stops shrinking.
"""

from __future__ import annotations

import math

from . import interval as ia
from .expr import (
    ADD,
    CONST,
    COS,
    DIV,
    EXP,
    LOG,
    MUL,
    NEG,
    POW,
    SIN,
    SQR,
    SQRT,
    SUB,
    VAR,
    Expr,
    forward_intervals,
)
from .interval import Box, Interval

__all__ = ["hc4_revise", "prune", "relation_range"]

INF = math.inf
_EQ = Interval(0.0, 0.0)
_LE = Interval(-INF, 0.0)
_NONNEG = Interval(0.0, INF)

MAX_SWEEPS = 20
MIN_SHRINK = 0.01


def relation_range(relation) -> Interval:
    """Allowed range of a constraint's expression: ``'='``, ``'<='`` or an Interval."""
    if isinstance(relation, Interval):
        return relation
    if relation == "=":
        return _EQ
    if relation == "<=":
        return _LE
    raise ValueError(f"unknown relation {relation!r}")


def _even_preimage(a: Interval, t: Interval, n: int) -> Interval:
    """Hull of ``{x in a : x**n in t}`` for even n."""
    t = t.intersect(_NONNEG)
    if t.is_empty:
        return ia.EMPTY
    r_lo = ia.root_down(t.lo, n)
    r_hi = ia.root_up(t.hi, n) if t.hi < INF else INF
    pos = a.intersect(Interval(r_lo, r_hi))
    neg = a.intersect(Interval(-r_hi, -r_lo))
    return pos.hull(neg)


def hc4_revise(constraint: Expr, relation, box: Box) -> Box:
    """Narrow ``box`` to points that may satisfy ``constraint relation``.

    Returns an empty box when the constraint is proven unsatisfiable.
    """
    n = len(box)
    if box.is_empty:
        return Box.empty(n)
    tape = constraint.tape
    vals = forward_intervals(constraint, box)
    for v in vals:
        if v.is_empty:
            return Box.empty(n)
    proj = list(vals)
    root = proj[-1].intersect(relation_range(relation))
    if root.is_empty:
        return Box.empty(n)
    proj[-1] = root
    dom = list(box)

    for i in range(len(tape) - 1, -1, -1):
        code, a, b = tape[i]
        t = proj[i]
        if code == VAR:
            d = dom[a].intersect(t)
            if d.is_empty:
                return Box.empty(n)
            dom[a] = d
            continue
        if code == CONST:
            continue
        if code == ADD:
            la = proj[a].intersect(t - proj[b])
            lb = proj[b].intersect(t - la)
        elif code == SUB:
            la = proj[a].intersect(t + proj[b])
            lb = proj[b].intersect(la - t)
        elif code == MUL:
            la, lb = proj[a], proj[b]
            if not (0.0 in lb and 0.0 in t):
                la = la.intersect(t / lb)
            if not la.is_empty and not (0.0 in la and 0.0 in t):
                lb = lb.intersect(t / la)
        elif code == DIV:
            la, lb = proj[a].intersect(t * proj[b]), proj[b]
            if not la.is_empty and not (0.0 in la and 0.0 in t):
                lb = lb.intersect(la / t)
        else:
            la, lb = _unary_back(code, proj[a], t, b), None
        if la.is_empty or (lb is not None and lb.is_empty):
            return Box.empty(n)
        proj[a] = la
        if lb is not None:
            proj[b] = lb
    return Box(dom)


def _unary_back(code: int, a: Interval, t: Interval, exponent) -> Interval:
    if code == NEG:
        return a.intersect(-t)
    if code == SQR:
        return _even_preimage(a, t, 2)
    if code == SQRT:
        return a.intersect(ia.sqr(t.intersect(_NONNEG)))
    if code == EXP:
        t = t.intersect(_NONNEG)
        if t.is_empty or t.hi == 0.0:
            return ia.EMPTY
        return a.intersect(ia.log(t))
    if code == LOG:
        return a.intersect(ia.exp(t))
    if code == POW:
        n = exponent
        if n <= 0:
            return a
        if n % 2 == 0:
            return _even_preimage(a, t, n)
        lo = ia.root_down(t.lo, n) if math.isfinite(t.lo) else -INF
        hi = ia.root_up(t.hi, n) if math.isfinite(t.hi) else INF
        return a.intersect(Interval(lo, hi))
    # SIN, COS: no inverse projection
    assert code in (SIN, COS)
    return a


def _shrunk(before: Box, after: Box) -> bool:
    """True when some dimension lost at least MIN_SHRINK of its width."""
    for a, b in zip(before, after):
        wa, wb = a.width, b.width
        if wa == wb:
            continue
        if math.isinf(wa):
            return True
        if wb < (1.0 - MIN_SHRINK) * wa:
            return True
    return False


def prune(p, box: Box, upper: float = INF, max_sweeps: int = MAX_SWEEPS) -> Box:
    """2B-filter ``box`` with every constraint of ``p`` and the cut ``f <= upper``.

    The result contains every feasible point of ``box`` whose objective is
    at most ``upper``; an empty result means the box can be discarded.
    """
    constraints = list(p.constraints())
    if upper < INF:
        constraints.append((p.objective, Interval(-INF, upper)))
    if not constraints or box.is_empty:
        return box
    current = box
    for _ in range(max_sweeps):
        start = current
        for expr, rel in constraints:
            current = hc4_revise(expr, rel, current)
            if current.is_empty:
                return current
        if not _shrunk(start, current):
            break
    return current
