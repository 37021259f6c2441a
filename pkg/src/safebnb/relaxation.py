"""Safe linear outer approximation of a problem over a box.

Each nonlinear expression ``e`` is bracketed by mean-value (first-order
interval-Taylor) expansions at two opposite corners of the box.  Around
the lower corner ``v`` every displacement ``x - v`` is non-negative, so

    e(x) >= e(v).lo + sum_j G_j.lo * (x_j - v_j)
    e(x) <= e(v).hi + sum_j G_j.hi * (x_j - v_j)

with ``G`` the interval gradient over the box; around the upper corner
the endpoint roles swap.  Coefficients are exact floats (interval
endpoints), and each right-hand side is computed in interval arithmetic
and rounded in the relaxing direction, so every row is a true statement
about real numbers.  Expressions whose interval gradient is degenerate
are affine on the box and are emitted as a single exact row when possible.

The objective enters through an auxiliary ``z >= f(x)`` and the LP
minimizes ``z``.
"""

from __future__ import annotations

import math

import numpy as np

from .expr import Expr, eval_interval, gradient_interval, is_affine_on
from .interval import Box, Interval
from .lp import LinearProgram

__all__ = ["linearize", "CLAMP", "LinearProgram"]

INF = math.inf
CLAMP = 1e8


def _clamp_box(box: Box) -> tuple[Box, bool]:
    clamped = False
    out = []
    for iv in box:
        lo, hi = iv.lo, iv.hi
        if lo < -CLAMP or hi > CLAMP:
            clamped = True
            lo, hi = max(lo, -CLAMP), min(hi, CLAMP)
            if lo > hi:  # component lies entirely beyond the clamp
                lo = hi = min(max(iv.lo, -CLAMP), CLAMP)
        out.append(Interval(lo, hi))
    return Box(out), clamped


def _dot_rhs(coef: list[float], point: list[float], offset: Interval, sign: float) -> float:
    """Upper end of ``sum coef_j * point_j + sign * offset`` in interval arithmetic."""
    acc = Interval.point(0.0)
    for a, v in zip(coef, point):
        if a != 0.0:
            acc = acc + Interval.point(a) * v
    acc = acc + (offset if sign > 0 else -offset)
    return acc.hi


def expression_cuts(e: Expr, box: Box, lower: bool, upper: bool):
    """Linear rows ``(coef, rhs, sense, tag)`` bracketing ``e`` over ``box``.

    ``lower`` requests rows encoding ``e(x) >= L(x)`` in the form needed by
    ``e <= 0``, i.e. ``L(x) <= 0``; ``upper`` requests ``U(x) >= 0``.  Rows
    carrying non-finite numbers are skipped.  Returns None when the
    interval gradient is unbounded.
    """
    n = len(box)
    _, grad = gradient_interval(e, box)
    G = [grad.get(j, Interval.point(0.0)) for j in range(n)]
    if any(g.is_empty or not g.is_bounded for g in G):
        return None
    rows = []
    if is_affine_on(grad):
        coef = [g.lo for g in G]
        c = box.midpoint()
        ec = eval_interval(e, Box.from_point(c))
        if ec.is_empty or not ec.is_bounded:
            return None
        # e(x) = coef.x + k with k in ec - coef.c
        k = ec - _dot_interval(coef, c)
        if lower and upper and k.is_point:
            rows.append((coef, -k.lo, "=", "affine"))
            return rows
        if lower:
            rows.append((coef, (-k).hi, "<=", "affine-lo"))
        if upper:
            rows.append(([-a for a in coef], k.hi, "<=", "affine-up"))
        return rows

    corners = (("lo", box.lo, [g.lo for g in G], [g.hi for g in G]), ("hi", box.hi, [g.hi for g in G], [g.lo for g in G]))
    for name, v, low_coef, up_coef in corners:
        ev = eval_interval(e, Box.from_point(v))
        if ev.is_empty or not ev.is_bounded:
            continue
        if lower:
            # low(x) = ev.lo + low_coef.(x - v) <= 0
            rhs = _dot_rhs(low_coef, v, Interval.point(ev.lo), -1.0)
            rows.append((low_coef, rhs, "<=", f"{name}-lower"))
        if upper:
            # up(x) = ev.hi + up_coef.(x - v) >= 0  <=>  -up_coef.x <= ev.hi - up_coef.v
            rhs = _dot_rhs([-a for a in up_coef], v, Interval.point(ev.hi), 1.0)
            rows.append(([-a for a in up_coef], rhs, "<=", f"{name}-upper"))
    return rows


def _dot_interval(coef, point) -> Interval:
    acc = Interval.point(0.0)
    for a, v in zip(coef, point):
        if a != 0.0:
            acc = acc + Interval.point(a) * v
    return acc


def linearize(p, box: Box, upper: float = INF) -> LinearProgram | None:
    """Linear relaxation of ``p`` over ``box`` with variables ``(x, z)``.

    Returns None ("unavailable") when the objective's interval gradient or
    range is unbounded over the box; constraints with unbounded gradients
    are simply left out, which keeps the relaxation valid.
    """
    n = p.n
    work, clamped = _clamp_box(box)
    f_range = eval_interval(p.objective, work)
    if f_range.is_empty or not f_range.is_bounded:
        return None

    A: list[list[float]] = []
    b: list[float] = []
    senses: list[str] = []
    tags: list[str] = []

    obj_cuts = expression_cuts(p.objective, work, lower=True, upper=False)
    if obj_cuts is None:
        return None
    for coef, rhs, sense, tag in obj_cuts:
        # f(x) >= low(x) turned into low(x) - z <= 0
        if not (math.isfinite(rhs) and all(map(math.isfinite, coef))):
            continue
        A.append(list(coef) + [-1.0])
        b.append(rhs)
        senses.append("<=")
        tags.append(f"objective:{tag}")

    for idx, (e, rel) in enumerate(p.constraints()):
        cuts = expression_cuts(e, work, lower=True, upper=(rel == "="))
        if not cuts:
            continue
        label = f"{'g' if rel == '=' else 'h'}{idx if rel == '=' else idx - p.k}"
        for coef, rhs, sense, tag in cuts:
            if not (math.isfinite(rhs) and all(map(math.isfinite, coef))):
                continue
            A.append(list(coef) + [0.0])
            b.append(rhs)
            senses.append(sense)
            tags.append(f"{label}:{tag}")

    if upper < INF:
        A.append([0.0] * n + [1.0])
        b.append(float(upper))
        senses.append("<=")
        tags.append("cut:z<=U")

    z_lo = max(f_range.lo, -CLAMP)
    z_hi = min(f_range.hi, CLAMP)
    lo = np.array(work.lo + [z_lo])
    hi = np.array(work.hi + [max(z_hi, z_lo)])
    c = np.zeros(n + 1)
    c[n] = 1.0
    true_box = Box(list(box) + [f_range])
    return LinearProgram(
        c=c,
        A=np.array(A, dtype=float).reshape(len(A), n + 1),
        senses=senses,
        b=np.array(b, dtype=float),
        lo=lo,
        hi=hi,
        box=true_box,
        n=n,
        clamped=clamped,
        tags=tags,
    )
