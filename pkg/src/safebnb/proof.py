"""Computational existence proofs for feasible points.

``inflate_and_prove`` turns an approximately feasible point into a box that
provably contains a feasible point.  The (slack-augmented) equality system
is made square by fixing the least useful unknowns at their current
values; the remaining square system is checked with the Krawczyk operator

    K(b) = c - Y F(c) + (I - Y J(b)) (b - c),   Y ~ inverse of mid J(b)

on boxes of growing radius.  ``K(b)`` inside the interior of ``b`` proves a
zero in ``b`` for every value of the fixed variables in their (1-ulp)
intervals, so the projected box contains a point satisfying all
equalities; remaining inequalities are then checked over the whole box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .expr import DomainError, Expr, eval_interval, format_expr, jacobian_interval
from .feasibility import constraint_residual, slack_augment
from .interval import Box, Interval, next_down, next_up

__all__ = [
    "Certificate",
    "ProvenBox",
    "InflationConfig",
    "krawczyk_operator",
    "krawczyk_existence",
    "inflate_and_prove",
    "replay_certificate",
]

INF = math.inf


@dataclass(frozen=True)
class InflationConfig:
    r0_min: float = 1e-8
    residual_factor: float = 10.0
    rho: float = 4.0
    rounds: int = 12
    max_condition: float = 1e12


@dataclass
class Certificate:
    """Everything needed to replay the existence test."""

    names: tuple[str, ...]
    equations: tuple[str, ...]
    unknowns: tuple[int, ...]
    box: Box
    center: tuple[float, ...]
    active_set: tuple[int, ...] = ()
    rounds: int = 0

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "equations": list(self.equations),
            "unknowns": list(self.unknowns),
            "box": [[iv.lo, iv.hi] for iv in self.box],
            "center": list(self.center),
            "active_set": list(self.active_set),
            "rounds": self.rounds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Certificate:
        return cls(
            names=tuple(d["names"]),
            equations=tuple(d["equations"]),
            unknowns=tuple(d["unknowns"]),
            box=Box([(float(lo), float(hi)) for lo, hi in d["box"]]),
            center=tuple(float(c) for c in d["center"]),
            active_set=tuple(d.get("active_set", ())),
            rounds=int(d.get("rounds", 0)),
        )


@dataclass
class ProvenBox:
    box: Box
    objective_range: Interval
    witness_seed: np.ndarray
    certificate: Certificate
    node_box: Box | None = field(default=None, repr=False)

    @property
    def upper(self) -> float:
        return self.objective_range.hi


def krawczyk_operator(
    eqs: Sequence[Expr],
    box: Box,
    center: Sequence[float],
    unknowns: Sequence[int] | None = None,
    max_condition: float = 1e12,
) -> list[Interval] | None:
    """Components of ``K(box)`` for the unknowns, or None if it cannot be formed.

    ``unknowns`` lists the variables solved for (default: all); other
    components of ``box`` are parameters ranging over their intervals.
    ``center`` gives the values of the unknowns at which F is evaluated.
    """
    if unknowns is None:
        unknowns = list(range(len(box)))
    unknowns = list(unknowns)
    m = len(unknowns)
    if len(eqs) != m:
        raise ValueError("Krawczyk test needs a square system")
    if box.is_empty:
        return None
    if m == 0:
        return []
    c = [float(v) for v in center]
    for j, cj in zip(unknowns, c):
        iv = box[j]
        if not (iv.is_bounded and iv.lo <= cj <= iv.hi):
            return None

    full_jac = jacobian_interval(eqs, box)
    J = [[full_jac[i][j] for j in unknowns] for i in range(m)]
    for row in J:
        for e in row:
            if e.is_empty or not e.is_bounded:
                return None
    mid = np.array([[0.5 * (e.lo + e.hi) for e in row] for row in J])
    try:
        if np.linalg.cond(mid) > max_condition:
            return None
        Y = np.linalg.inv(mid)
    except np.linalg.LinAlgError:
        return None

    cbox = list(box)
    for j, cj in zip(unknowns, c):
        cbox[j] = Interval.point(cj)
    cbox = Box(cbox)
    F = [eval_interval(e, cbox) for e in eqs]
    if any(f.is_empty or not f.is_bounded for f in F):
        return None
    radius = [box[j] - c[k] for k, j in enumerate(unknowns)]

    K = []
    for i in range(m):
        acc = Interval.point(c[i])
        for k in range(m):
            if Y[i, k] != 0.0:
                acc = acc - F[k] * float(Y[i, k])
        for j in range(m):
            # (I - Y J)_{ij}
            entry = Interval.point(1.0 if i == j else 0.0)
            for k in range(m):
                if Y[i, k] != 0.0:
                    entry = entry - J[k][j] * float(Y[i, k])
            acc = acc + entry * radius[j]
        K.append(acc)
    return K


def krawczyk_existence(
    eqs: Sequence[Expr],
    box: Box,
    center: Sequence[float],
    unknowns: Sequence[int] | None = None,
    max_condition: float = 1e12,
) -> bool:
    """True only if the square system ``eqs`` provably has a zero in ``box``."""
    if unknowns is None:
        unknowns = list(range(len(box)))
    K = krawczyk_operator(eqs, box, center, unknowns, max_condition)
    if K is None:
        return False
    return all(k.interior_subset(box[j]) for k, j in zip(K, unknowns))


def _select_unknowns(J: np.ndarray, max_condition: float) -> list[int] | None:
    """Greedy column choice (largest norms after orthogonalization)."""
    m, n = J.shape
    if m > n:
        return None
    _, _, perm = scipy.linalg.qr(J, pivoting=True, mode="economic")
    sel = sorted(int(j) for j in perm[:m])
    sub = J[:, sel]
    if not np.all(np.isfinite(sub)) or np.linalg.cond(sub) > max_condition:
        return None
    return sel


def _widened_point(v: float, dom: Interval) -> Interval:
    lo = max(next_down(v), dom.lo)
    hi = min(next_up(v), dom.hi)
    return Interval(min(lo, v), max(hi, v))


def _verify_inactive(p, box: Box, active: Sequence[int]) -> bool:
    for j, h in enumerate(p.inequalities):
        if j in active:
            continue
        rng = eval_interval(h, box)
        if rng.is_empty or rng.hi > 0.0:
            return False
    return True


def _refine(eqs, box: Box, center, unknowns, max_condition: float, steps: int = 40):
    """Shrink a proven box by ``X <- K(X) & X`` while each step still proves.

    Every zero in ``X`` lies in ``K(X)``, and each accepted box passes the
    existence test on its own, so the returned box is itself a certificate.
    """
    if not unknowns:
        return box, center
    for _ in range(steps):
        K = krawczyk_operator(eqs, box, center, unknowns, max_condition)
        if K is None:
            break
        comps = list(box)
        for k, j in zip(K, unknowns):
            comps[j] = k.intersect(box[j])
        cand = Box(comps)
        if cand.is_empty:
            break
        c2 = [cand[j].mid for j in unknowns]
        if not krawczyk_existence(eqs, cand, c2, unknowns, max_condition):
            break
        old = max(box[j].width for j in unknowns)
        box, center = cand, c2
        if max(cand[j].width for j in unknowns) > 0.9 * old:
            break
    return box, center


def inflate_and_prove(
    p,
    x_corr: Sequence[float],
    node_box: Box | None = None,
    config: InflationConfig | None = None,
) -> ProvenBox | None:
    """Prove that a box around ``x_corr`` contains a feasible point of ``p``.

    The proof box is confined to the problem domain rather than to
    ``node_box``: a feasible point found outside the node is still a valid
    upper bound, and cutting a proven box after the fact would void the
    proof.  Returns None when subsystem selection fails, all inflation
    rounds fail, or a remaining inequality cannot be verified over the box.
    """
    config = config or InflationConfig()
    node_box = p.domain if node_box is None else node_box
    x = np.asarray(p.domain.clamp_point(x_corr), dtype=float)
    if not np.all(np.isfinite(x)):
        return None
    system, z = slack_augment(p, x)
    n, nz = p.n, system.num_vars
    domain = list(p.domain) + [Interval(-INF, INF)] * (nz - n)

    residual = constraint_residual(p, x)
    if not math.isfinite(residual):
        return None
    r0 = max(config.r0_min, config.residual_factor * residual)

    eqs = system.equations
    if eqs:
        try:
            J = system.jacobian(z)
        except DomainError:
            return None
        unknowns = _select_unknowns(J, config.max_condition)
        if unknowns is None:
            return None
    else:
        unknowns = []

    fixed = [_widened_point(float(z[j]), domain[j]) for j in range(nz)]
    proven = None
    rounds = 0
    for t in range(config.rounds if unknowns else 1):
        rounds = t + 1
        r = r0 * config.rho**t
        comps = list(fixed)
        for j in unknowns:
            zj = float(z[j])
            rad = max(r, 4.0 * math.ulp(zj))
            comps[j] = Interval(zj - rad, zj + rad).widen().intersect(domain[j])
        trial = Box(comps)
        if trial.is_empty:
            continue
        if krawczyk_existence(eqs, trial, [z[j] for j in unknowns], unknowns, config.max_condition):
            proven = trial
            break
    if proven is None:
        return None
    center = [float(z[j]) for j in unknowns]
    proven, center = _refine(eqs, proven, center, unknowns, config.max_condition)

    box = Box(list(proven)[:n])
    if not _verify_inactive(p, box, system.active_set):
        return None
    f_range = eval_interval(p.objective, box)
    if f_range.is_empty:
        return None
    cert = Certificate(
        names=system.names,
        equations=tuple(format_expr(e, system.names) for e in eqs),
        unknowns=tuple(unknowns),
        box=proven,
        center=tuple(center),
        active_set=system.active_set,
        rounds=rounds,
    )
    return ProvenBox(box, f_range, np.asarray(x_corr, dtype=float), cert, node_box)


def replay_certificate(cert: Certificate | dict, p=None) -> bool:
    """Re-run the existence test from a stored certificate.

    With ``p`` given, the remaining inequalities are re-verified as well.
    """
    from .problem import parse_expression

    if isinstance(cert, dict):
        cert = Certificate.from_dict(cert)
    eqs = [parse_expression(text, cert.names) for text in cert.equations]
    ok = krawczyk_existence(eqs, cert.box, cert.center, cert.unknowns)
    if ok and p is not None:
        box = Box(list(cert.box)[: p.n])
        ok = _verify_inactive(p, box, cert.active_set)
    return ok
