"""Newton iteration for under-determined systems (pseudo-feasible points).

Inequalities close to active are turned into equalities with squared
slacks, ``h_j(x) + s_j**2 = 0``, and the augmented system is solved by
minimum-norm Newton steps ``x <- x - J^+ r`` that stay as close as
possible to the starting point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .expr import DomainError, Expr, Unary, Var, eval_point, jacobian_point
from .interval import Box

__all__ = [
    "AugmentedSystem",
    "CorrectionResult",
    "RankDeficientError",
    "slack_augment",
    "default_active_threshold",
    "moore_penrose_step",
    "moore_penrose_step_normal",
    "feasibility_correction",
    "constraint_residual",
]

RANK_TOL = 1e-12


class RankDeficientError(np.linalg.LinAlgError):
    """The Jacobian does not have full row rank."""


@dataclass(frozen=True)
class AugmentedSystem:
    """Square-or-wide equation system over ``base_n + len(active_set)`` unknowns."""

    equations: tuple[Expr, ...]
    active_set: tuple[int, ...]
    base_n: int
    names: tuple[str, ...] = ()

    @property
    def num_vars(self) -> int:
        return self.base_n + len(self.active_set)

    def residual(self, z: Sequence[float]) -> np.ndarray:
        return np.array([eval_point(e, z) for e in self.equations])

    def jacobian(self, z: Sequence[float]) -> np.ndarray:
        return jacobian_point(self.equations, z, self.num_vars)


@dataclass
class CorrectionResult:
    point: np.ndarray
    residual: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)
    reason: str = ""


def default_active_threshold(h_value: float) -> float:
    return 0.1 * (1.0 + abs(h_value))


def slack_augment(p, x0: Sequence[float], delta_active: float | None = None) -> tuple[AugmentedSystem, np.ndarray]:
    """Build ``g(x) = 0`` plus ``h_j(x) + s_j^2 = 0`` for near-active ``h_j``.

    An inequality is active when ``h_j(x0) > -delta_active``; with
    ``delta_active=None`` the threshold is ``0.1 * (1 + |h_j(x0)|)``.
    """
    x0 = np.asarray(x0, dtype=float)
    n = p.n
    eqs = list(p.equalities)
    active = []
    slacks = []
    names = list(p.names)
    for j, h in enumerate(p.inequalities):
        hv = eval_point(h, x0)
        if math.isnan(hv):
            continue
        thr = default_active_threshold(hv) if delta_active is None else delta_active
        if hv > -thr:
            s_idx = n + len(active)
            active.append(j)
            slacks.append(math.sqrt(max(0.0, -hv)))
            s_name = f"_s{j}"
            names.append(s_name)
            eqs.append(h + Unary("sqr", Var(s_idx, s_name)))
    system = AugmentedSystem(tuple(eqs), tuple(active), n, tuple(names))
    return system, np.concatenate([x0, np.array(slacks)])


def moore_penrose_step(residual: Sequence[float], J: np.ndarray) -> np.ndarray:
    """Minimum-norm solution ``d`` of ``J d = residual`` via QR of ``J^T``.

    With ``J^T = Q R``: ``J d = R^T Q^T d``, so ``d = Q R^{-T} residual``
    lies in the row space of J.
    """
    J = np.atleast_2d(np.asarray(J, dtype=float))
    r = np.asarray(residual, dtype=float).reshape(-1)
    m, n = J.shape
    if m == 0:
        return np.zeros(n)
    if m > n:
        raise RankDeficientError("more equations than unknowns")
    Q, R = np.linalg.qr(J.T, mode="reduced")
    diag = np.abs(np.diag(R))
    scale = np.abs(R).max()
    if scale == 0.0 or diag.min() < RANK_TOL * scale:
        raise RankDeficientError("Jacobian is rank deficient")
    w = solve_triangular(R, r, trans="T", lower=False)
    return Q @ w


def moore_penrose_step_normal(residual: Sequence[float], J: np.ndarray) -> np.ndarray:
    """Same step through the normal equations ``J^T (J J^T)^{-1} r``."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    r = np.asarray(residual, dtype=float).reshape(-1)
    if J.shape[0] == 0:
        return np.zeros(J.shape[1])
    G = J @ J.T
    try:
        return J.T @ np.linalg.solve(G, r)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(str(exc)) from exc


def constraint_residual(p, x: Sequence[float]) -> float:
    """Infinity norm of ``g(x)`` and of the positive parts of ``h(x)``."""
    worst = 0.0
    for g in p.equalities:
        v = eval_point(g, x)
        if math.isnan(v):
            return math.inf
        worst = max(worst, abs(v))
    for h in p.inequalities:
        v = eval_point(h, x)
        if math.isnan(v):
            return math.inf
        worst = max(worst, v)
    return worst


def _norm(r: np.ndarray) -> float:
    if r.size == 0:
        return 0.0
    if np.any(np.isnan(r)):
        return math.nan
    return float(np.abs(r).max())


def feasibility_correction(
    p,
    x0: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 50,
    box: Box | None = None,
    max_halvings: int = 8,
) -> CorrectionResult:
    """Move ``x0`` onto the constraint manifold with minimum-norm Newton steps."""
    box = p.domain if box is None else box
    x0 = np.asarray(box.clamp_point(x0), dtype=float)
    system, z = slack_augment(p, x0)
    n = p.n

    def finish(z, it, history, ok, reason):
        x = np.asarray(box.clamp_point(z[:n]), dtype=float)
        res = constraint_residual(p, x)
        if ok and res > tol:
            ok, reason = False, reason or "inactive constraint or box violated"
        return CorrectionResult(x, res, it, ok, history, reason)

    r = system.residual(z)
    norm = _norm(r)
    history = [norm]
    if math.isnan(norm):
        return finish(z, 0, history, False, "domain failure")
    increases = 0
    it = 0
    while norm > tol:
        if it >= max_iter:
            return finish(z, it, history, False, "max_iter")
        try:
            J = system.jacobian(z)
            step = moore_penrose_step(r, J)
        except (RankDeficientError, DomainError) as exc:
            return finish(z, it, history, False, type(exc).__name__)
        it += 1
        t = 1.0
        cand = z - step
        r_new = system.residual(cand)
        n_new = _norm(r_new)
        halvings = 0
        while not (n_new < norm) and halvings < max_halvings:
            t *= 0.5
            halvings += 1
            cand = z - t * step
            r_new = system.residual(cand)
            n_new = _norm(r_new)
        if math.isnan(n_new):
            return finish(z, it, history, False, "domain failure")
        if n_new >= norm:
            increases += 1
            if increases >= 2:
                return finish(cand, it, history + [n_new], False, "diverged")
        else:
            increases = 0
        z, r, norm = cand, r_new, n_new
        history.append(norm)
    return finish(z, it, history, True, "")
