"""Dense tableau simplex and rigorous post-processing of its output.

The simplex itself runs in plain floating point.  Its duals are then used
in an interval-evaluated Lagrangian, so the returned lower bound is valid
whatever rounding errors the simplex made.

Dual sign convention: for ``min c^T x`` with rows ``a_i x <= b_i`` the
multiplier ``y_i`` must be ``<= 0``; equality multipliers are free.  For
every feasible x, ``c^T x >= (c - A^T y)^T x + y^T b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .interval import Box, Interval

__all__ = [
    "LinearProgram",
    "LPSolution",
    "simplex_solve",
    "safe_lower_bound",
    "certify_infeasible",
]

INF = math.inf
OPTIMAL, INFEASIBLE, UNBOUNDED, FAILED = "optimal", "infeasible", "unbounded", "failed"
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9


@dataclass
class LinearProgram:
    """``min c^T x`` s.t. ``A x (<=|=) b`` and ``lo <= x <= hi``.

    ``box`` is the true variable domain used by the rigorous bound; ``lo``
    and ``hi`` are the finite (possibly clamped) bounds handed to simplex.
    """

    c: np.ndarray
    A: np.ndarray
    senses: list[str]
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    box: Box | None = None
    n: int | None = None
    clamped: bool = False
    tags: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        nv = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, nv)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        self.senses = list(self.senses)
        if len(self.senses) != self.A.shape[0] or self.b.size != self.A.shape[0]:
            raise ValueError("row count mismatch")
        if any(s not in ("<=", "=") for s in self.senses):
            raise ValueError("row senses must be '<=' or '='")
        if self.box is None:
            self.box = Box.from_bounds(self.lo, self.hi)
        if self.n is None:
            self.n = nv

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]


@dataclass
class LPSolution:
    status: str
    primal: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective_value: float = math.nan
    iterations: int = 0


class _Tableau:
    """Standard-form tableau ``T = [B^-1 A | B^-1 b]`` with a cost row."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, ncols = A.shape
        self.T = np.zeros((m + 1, ncols + 1))
        self.T[:m, :ncols] = A
        self.T[:m, -1] = b
        self.basis = list(basis)
        self.iterations = 0

    def set_cost(self, cost: np.ndarray) -> None:
        m = len(self.basis)
        row = np.zeros(self.T.shape[1])
        row[: cost.size] = cost
        for i, j in enumerate(self.basis):
            if row[j] != 0.0:
                row -= row[j] * self.T[i]
        self.T[m] = row

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.iterations += 1

    def run(self, allowed: np.ndarray, cap: int) -> str:
        """Bland's rule until optimal; returns OPTIMAL, UNBOUNDED or FAILED."""
        T = self.T
        m = len(self.basis)
        while True:
            if self.iterations >= cap:
                return FAILED
            red = T[m, :-1]
            entering = -1
            for j in np.flatnonzero(allowed & (red < -PIVOT_TOL)):
                entering = int(j)
                break
            if entering < 0:
                return OPTIMAL
            col = T[:m, entering]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            leave = min(ties, key=lambda r: self.basis[r])
            self.pivot(int(leave), entering)


def simplex_solve(lp: LinearProgram) -> LPSolution:
    """Two-phase primal simplex with Bland's anti-cycling rule.

    Variables are shifted to ``x = lo + x'`` and their upper bounds become
    explicit rows.  On infeasibility the phase-one duals are returned as a
    Farkas candidate for :func:`certify_infeasible`.
    """
    nv = lp.num_vars
    lo, hi = lp.lo, lp.hi
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("simplex needs finite variable bounds")
    if np.any(lo > hi):
        return LPSolution(INFEASIBLE, duals=np.zeros(lp.num_rows))
    m0 = lp.num_rows
    A_rows = np.vstack([lp.A, np.eye(nv)]) if m0 else np.eye(nv)
    rhs = np.concatenate([lp.b - lp.A @ lo, hi - lo]) if m0 else hi - lo
    senses = lp.senses + ["<="] * nv
    m = m0 + nv

    le_rows = [i for i in range(m) if senses[i] == "<="]
    n_slack = len(le_rows)
    flip = np.where(rhs < 0, -1.0, 1.0)
    need_art = [i for i in range(m) if senses[i] == "=" or flip[i] < 0]
    n_art = len(need_art)
    ncols = nv + n_slack + n_art
    A_std = np.zeros((m, ncols))
    A_std[:, :nv] = A_rows
    basis = [-1] * m
    for k, i in enumerate(le_rows):
        A_std[i, nv + k] = 1.0
        basis[i] = nv + k
    for k, i in enumerate(need_art):
        A_std[i, nv + n_slack + k] = flip[i]
        basis[i] = nv + n_slack + k
    A_std *= flip[:, None]
    b_std = rhs * flip

    cap = 10 * (m + ncols) ** 2
    tab = _Tableau(A_std, b_std, basis)
    art_start = nv + n_slack
    is_art = np.zeros(ncols, dtype=bool)
    is_art[art_start:] = True

    if n_art:
        cost1 = np.zeros(ncols)
        cost1[art_start:] = 1.0
        tab.set_cost(cost1)
        status = tab.run(np.ones(ncols, dtype=bool), cap)
        if status == FAILED:
            return LPSolution(FAILED, iterations=tab.iterations)
        phase1 = -tab.T[m, -1]
        if phase1 > FEAS_TOL * (1.0 + np.abs(b_std).max()):
            y = _duals(A_std, tab.basis, cost1, flip, range(m))
            return LPSolution(INFEASIBLE, duals=y[:m0], iterations=tab.iterations)
        # drive zero-level artificials out of the basis
        for r in range(m):
            if tab.basis[r] >= art_start:
                cand = np.flatnonzero(~is_art & (np.abs(tab.T[r, :ncols]) > PIVOT_TOL))
                if cand.size:
                    tab.pivot(r, int(cand[0]))
    keep = [r for r in range(m) if tab.basis[r] < art_start]
    if len(keep) < m:
        # redundant rows: artificial stuck at zero with no replacement
        tab.T = np.vstack([tab.T[keep], tab.T[m:]])
        tab.basis = [tab.basis[r] for r in keep]
    mk = len(keep)

    cost2 = np.zeros(ncols)
    cost2[:nv] = lp.c
    tab.set_cost(cost2)
    status = tab.run(~is_art, cap)
    if status != OPTIMAL:
        return LPSolution(status, iterations=tab.iterations)

    xs = np.zeros(ncols)
    for r, j in enumerate(tab.basis):
        xs[j] = tab.T[r, -1]
    x = lo + np.clip(xs[:nv], 0.0, hi - lo)
    y_full = np.zeros(m)
    y_full[keep] = _duals(A_std[keep], tab.basis, cost2, flip[keep], range(mk))
    y = y_full[:m0]
    for i in range(m0):
        if lp.senses[i] == "<=" and y[i] > 0.0:
            y[i] = 0.0
    return LPSolution(OPTIMAL, primal=x, duals=y, objective_value=float(lp.c @ x), iterations=tab.iterations)


def _duals(A_std: np.ndarray, basis: Sequence[int], cost: np.ndarray, flip: np.ndarray, rows) -> np.ndarray:
    """Row multipliers ``B^-T c_B`` mapped back through the row sign flips."""
    B = A_std[:, list(basis)]
    cB = cost[list(basis)]
    try:
        y = np.linalg.solve(B.T, cB)
    except np.linalg.LinAlgError:
        y = np.linalg.lstsq(B.T, cB, rcond=None)[0]
    return y * flip


def _lagrangian(lp: LinearProgram, y: np.ndarray, c: np.ndarray, box: Box) -> Interval:
    """Interval enclosure of ``(c - A^T y)^T x + y^T b`` over ``box``."""
    total = Interval.point(0.0)
    nz = [i for i in range(lp.num_rows) if y[i] != 0.0]
    for j in range(lp.num_vars):
        r = Interval.point(float(c[j]))
        for i in nz:
            a = lp.A[i, j]
            if a != 0.0:
                r = r - Interval.point(float(a)) * float(y[i])
        total = total + r * box[j]
    for i in nz:
        total = total + Interval.point(float(y[i])) * float(lp.b[i])
    return total


def _signs_ok(lp: LinearProgram, y: np.ndarray) -> bool:
    if y is None or len(y) != lp.num_rows or not np.all(np.isfinite(y)):
        return False
    return all(not (s == "<=" and yi > 0.0) for s, yi in zip(lp.senses, y))


def safe_lower_bound(lp: LinearProgram, sol: LPSolution, box: Box | None = None) -> float:
    """Rigorous lower bound on the LP optimum over ``box`` from the duals.

    Returns ``-inf`` when the multipliers have the wrong sign.
    """
    box = lp.box if box is None else box
    if sol.duals is None or not _signs_ok(lp, sol.duals):
        return -INF
    return _lagrangian(lp, sol.duals, lp.c, box).lo


def certify_infeasible(lp: LinearProgram, sol: LPSolution, box: Box | None = None) -> bool:
    """Verify a Farkas certificate: ``y^T (A x - b) < 0`` on the whole box."""
    box = lp.box if box is None else box
    y = sol.duals
    if y is None or not _signs_ok(lp, y) or not np.any(y):
        return False
    # y^T(Ax - b) = -[(0 - A^T y)^T x + y^T b]
    return _lagrangian(lp, y, np.zeros(lp.num_vars), box).lo > 0.0
