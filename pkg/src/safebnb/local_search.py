"""Penalty-based multistart local search.

The local solver minimizes ``f + mu * (sum g_i^2 + sum max(0, h_j)^2)`` by
projected gradient descent with an Armijo backtracking line search.  Its
output is only a guess: nothing here is rigorous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import DomainError, gradient_point
from .interval import Box

__all__ = ["DescentConfig", "penalty", "penalty_gradient", "local_descent", "multistart"]


@dataclass(frozen=True)
class DescentConfig:
    mu0: float = 10.0
    mu_factor: float = 10.0
    rounds: int = 3
    max_iter: int = 300
    armijo: float = 1e-4
    max_backtracks: int = 40
    gtol: float = 1e-10


def penalty(p, x: Sequence[float], mu: float) -> float:
    """Penalized objective; ``inf`` outside the functions' domains."""
    try:
        value, _ = penalty_gradient(p, x, mu)
    except DomainError:
        return math.inf
    return value


def penalty_gradient(p, x: Sequence[float], mu: float) -> tuple[float, np.ndarray]:
    n = p.n
    value, grad = gradient_point(p.objective, x, n)
    grad = grad.copy()
    for g in p.equalities:
        gv, gg = gradient_point(g, x, n)
        value += mu * gv * gv
        grad += 2.0 * mu * gv * gg
    for h in p.inequalities:
        hv, hg = gradient_point(h, x, n)
        if hv > 0.0:
            value += mu * hv * hv
            grad += 2.0 * mu * hv * hg
    if not math.isfinite(value) or not np.all(np.isfinite(grad)):
        raise DomainError("non-finite penalty")
    return value, grad


def _project(box: Box, x: np.ndarray) -> np.ndarray:
    return np.clip(x, box.lo, box.hi)


def _descend(p, x: np.ndarray, box: Box, mu: float, cfg: DescentConfig) -> np.ndarray:
    try:
        fx, gx = penalty_gradient(p, x, mu)
    except DomainError:
        return x
    step = 1.0
    prev = None
    for _ in range(cfg.max_iter):
        if prev is not None:
            # Barzilai-Borwein trial step
            s, y = x - prev[0], gx - prev[1]
            sy = float(s @ y)
            step = float(s @ s) / sy if sy > 0.0 else step * 2.0
        accepted = False
        for _ in range(cfg.max_backtracks):
            cand = _project(box, x - step * gx)
            d = cand - x
            if not np.any(d):
                break
            try:
                fc, gc = penalty_gradient(p, cand, mu)
            except DomainError:
                step *= 0.5
                continue
            if fc <= fx + cfg.armijo * float(gx @ d):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        prev = (x, gx)
        moved = float(np.abs(cand - x).max())
        x, fx, gx = cand, fc, gc
        if moved <= cfg.gtol * (1.0 + float(np.abs(x).max())):
            break
    return x


def local_descent(p, x0: Sequence[float], box: Box | None = None, config: DescentConfig | None = None) -> np.ndarray:
    """Approximate local minimizer of the penalty function inside ``box``.

    Returns ``x0`` (projected) when no round improves on it.
    """
    cfg = config or DescentConfig()
    box = p.domain if box is None else box
    x0 = _project(box, np.asarray(x0, dtype=float))
    x = x0.copy()
    mu = cfg.mu0
    for _ in range(cfg.rounds):
        x = _descend(p, x, box, mu, cfg)
        mu *= cfg.mu_factor
    mu_final = cfg.mu0 * cfg.mu_factor ** (cfg.rounds - 1)
    if not penalty(p, x, mu_final) <= penalty(p, x0, mu_final):
        return x0
    return x


def multistart(
    p,
    box: Box | None = None,
    nb_starts: int = 20,
    seed=0,
    config: DescentConfig | None = None,
) -> list[np.ndarray]:
    """Refine ``nb_starts`` uniform samples of ``box``; best penalty first."""
    if nb_starts < 1:
        raise ValueError("nb_starts must be at least 1")
    cfg = config or DescentConfig()
    box = p.domain if box is None else box
    rng = np.random.default_rng(seed)
    lo = np.maximum(np.asarray(box.lo), -1e8)
    hi = np.minimum(np.asarray(box.hi), 1e8)
    starts = lo + (hi - lo) * rng.random((nb_starts, p.n))
    mu_final = cfg.mu0 * cfg.mu_factor ** (cfg.rounds - 1)
    results = [local_descent(p, x0, box, cfg) for x0 in starts]
    keyed = [(penalty(p, x, mu_final), i) for i, x in enumerate(results)]
    keyed.sort()
    return [results[i] for _, i in keyed]
