"""Best-first interval branch and bound with pluggable upper bounding.

Each node is filtered by HC4, bounded from below by the safe LP bound of
its linear relaxation, and handed to an upper-bounding strategy:

* ``S1`` local-search guess, used without proof (unsafe baseline);
* ``S2`` local-search guess, then existence proof;
* ``S3`` LP solution, then feasibility correction, then proof;
* ``S4`` local-search guess, then correction, then proof;
* ``S5`` LP solution, then proof.

Only proven boxes lower the certified upper bound ``U``.
"""

from __future__ import annotations

import enum
import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .contractor import prune
from .expr import eval_interval, eval_point
from .feasibility import constraint_residual, feasibility_correction
from .interval import Box, Interval
from .local_search import DescentConfig, multistart
from .lp import INFEASIBLE, OPTIMAL, certify_infeasible, safe_lower_bound, simplex_solve
from .proof import InflationConfig, ProvenBox, inflate_and_prove
from .relaxation import linearize

__all__ = [
    "Strategy",
    "SolverConfig",
    "IterationRecord",
    "UpperBoundResult",
    "SolveReport",
    "split",
    "is_irreducible",
    "upper_bounding",
    "branch_and_bound",
    "OPTIMAL_STATUS",
    "INFEASIBLE_STATUS",
    "BUDGET_STATUS",
]

INF = math.inf
OPTIMAL_STATUS = "optimal-within-eps"
INFEASIBLE_STATUS = "infeasible-proven"
BUDGET_STATUS = "budget-exhausted"


class Strategy(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"

    @property
    def uses_lp_point(self) -> bool:
        return self in (Strategy.S3, Strategy.S5)

    @property
    def corrects(self) -> bool:
        return self in (Strategy.S3, Strategy.S4)

    @property
    def proves(self) -> bool:
        return self is not Strategy.S1


@dataclass(frozen=True)
class SolverConfig:
    eps: float = 1e-6
    strategy: Strategy = Strategy.S3
    nb_starts: int = 20
    node_starts: int = 1
    max_nodes: int = 100_000
    max_seconds: float = 60.0
    seed: int = 0
    unsafe_tol: float = 1e-3
    correction_tol: float = 1e-10
    inflation: InflationConfig = InflationConfig()
    descent: DescentConfig = DescentConfig()
    keep_log: bool = True
    audit_volume: bool = False

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if self.nb_starts < 1 or self.node_starts < 1:
            raise ValueError("start counts must be at least 1")


@dataclass
class IterationRecord:
    iteration: int
    L: float
    U: float
    node_lb: float
    width: float
    open_nodes: int
    events: list[str] = field(default_factory=list)
    elapsed: float = 0.0
    covered_volume: float | None = None


@dataclass
class UpperBoundResult:
    proven: list[ProvenBox] = field(default_factory=list)
    unsafe_value: float | None = None
    attempts: int = 0
    events: list[str] = field(default_factory=list)


@dataclass
class SolveReport:
    problem: str
    strategy: Strategy
    eps: float
    status: str
    L: float
    U: float
    certified_U: float
    unsafe: bool
    proven: list[ProvenBox]
    log: list[IterationRecord]
    nodes: int
    proof_attempts: int
    proof_successes: int
    lp_solves: int
    time_to_first_proven: float | None
    wall_time: float
    seed: int
    initial_volume: float = 0.0
    open_volume: float = 0.0
    discarded_volume: float = 0.0
    irreducible: int = 0

    @property
    def best(self) -> ProvenBox | None:
        return min(self.proven, key=lambda pb: pb.upper, default=None)

    @property
    def gap(self) -> float:
        return self.U - self.L


def _splittable(iv: Interval) -> bool:
    if not iv.is_bounded:
        return iv.width > 0.0
    m = iv.mid
    return iv.lo < m < iv.hi


def is_irreducible(b: Box) -> bool:
    """True when no component can be bisected in floating point."""
    return not any(_splittable(iv) for iv in b)


def split(b: Box) -> tuple[Box, Box]:
    """Bisect the component with the largest ``width / (1 + |mid|)``.

    Ties go to the lowest index; components that cannot be bisected in
    floating point are skipped.
    """
    if b.is_empty:
        raise ValueError("cannot split an empty box")
    rel = b.relative_widths()
    best = -1
    for i, iv in enumerate(b):
        if _splittable(iv) and (best < 0 or rel[i] > rel[best]):
            best = i
    if best < 0:
        raise ValueError("cannot split a degenerate box")
    iv = b[best]
    m = iv.mid
    return b.replace(best, Interval(iv.lo, m)), b.replace(best, Interval(m, iv.hi))


def _prove(p, x, node_box, cfg: SolverConfig, out: UpperBoundResult, stage: str) -> None:
    out.attempts += 1
    pb = inflate_and_prove(p, x, node_box, cfg.inflation)
    if pb is None:
        out.events.append(f"{stage}:proof-failed")
    else:
        out.proven.append(pb)
        out.events.append(f"{stage}:proven")


def _correct_then_prove(p, x, node_box, cfg: SolverConfig, out: UpperBoundResult, stage: str) -> None:
    res = feasibility_correction(p, x, tol=cfg.correction_tol)
    if not res.converged:
        out.events.append(f"{stage}:correction-failed:{res.reason}")
        return
    _prove(p, res.point, node_box, cfg, out, stage)


def upper_bounding(
    p,
    node_box: Box,
    x_lp: Sequence[float] | None,
    strategy: Strategy | str,
    nb_starts: int = 1,
    config: SolverConfig | None = None,
    seed=0,
) -> UpperBoundResult:
    """Search ``node_box`` for feasible points with the given strategy."""
    strategy = Strategy(strategy)
    cfg = config or SolverConfig(strategy=strategy)
    out = UpperBoundResult()
    tag = strategy.value

    if strategy.uses_lp_point:
        if x_lp is None:
            out.events.append(f"{tag}:no-lp-point")
            return out
        x = np.asarray(x_lp, dtype=float)[: p.n]
        if strategy.corrects:
            _correct_then_prove(p, x, node_box, cfg, out, tag)
        else:
            _prove(p, x, node_box, cfg, out, tag)
        return out

    guesses = multistart(p, node_box, nb_starts, seed, cfg.descent)
    guess = guesses[0]
    if strategy is Strategy.S1:
        if constraint_residual(p, guess) <= cfg.unsafe_tol:
            v = eval_point(p.objective, guess)
            if math.isfinite(v):
                out.unsafe_value = v
                out.events.append(f"{tag}:guess")
        if out.unsafe_value is None:
            out.events.append(f"{tag}:no-guess")
        return out
    if strategy is Strategy.S2:
        _prove(p, guess, node_box, cfg, out, tag)
    else:
        _correct_then_prove(p, guess, node_box, cfg, out, tag)
    return out


def _lower_bound(p, box: Box, upper: float):
    """Returns ``(lb, x_lp, discard, events)`` for a pruned, non-empty box."""
    events = []
    f_range = eval_interval(p.objective, box)
    if f_range.is_empty:
        return INF, None, True, ["objective-undefined"]
    lb = f_range.lo
    lp = linearize(p, box, upper)
    if lp is None:
        return lb, None, False, ["lp:unavailable"]
    sol = simplex_solve(lp)
    if sol.status == OPTIMAL:
        x_lp = sol.primal[: p.n]
        if not lp.clamped:
            lb = max(lb, safe_lower_bound(lp, sol))
        events.append("lp:optimal")
        return lb, x_lp, False, events
    if sol.status == INFEASIBLE and not lp.clamped and certify_infeasible(lp, sol):
        return INF, None, True, ["lp:infeasible-certified"]
    events.append(f"lp:{sol.status}")
    return lb, None, False, events


def branch_and_bound(p, eps: float | None = None, strategy: Strategy | str | None = None, config: SolverConfig | None = None) -> SolveReport:
    """Minimize ``p`` to within ``eps`` with rigorous bounds ``L <= f* <= U``."""
    cfg = config or SolverConfig()
    overrides = {}
    if eps is not None:
        overrides["eps"] = eps
    if strategy is not None:
        overrides["strategy"] = Strategy(strategy)
    if overrides:
        cfg = SolverConfig(**{**cfg.__dict__, **overrides})
    strat = cfg.strategy
    unsafe_mode = strat is Strategy.S1
    t0 = time.perf_counter()

    U = INF
    U_unsafe = INF
    proven: list[ProvenBox] = []
    attempts = successes = lp_solves = 0
    first_proven: float | None = None
    log: list[IterationRecord] = []

    def absorb(res: UpperBoundResult) -> None:
        nonlocal U, U_unsafe, attempts, successes, first_proven
        attempts += res.attempts
        for pb in res.proven:
            successes += 1
            if first_proven is None:
                first_proven = time.perf_counter() - t0
            if pb.upper < U:
                U = pb.upper
                proven.append(pb)
        if res.unsafe_value is not None and res.unsafe_value < U_unsafe:
            U_unsafe = res.unsafe_value

    def upper() -> float:
        return min(U, U_unsafe) if unsafe_mode else U

    root = p.domain
    initial_volume = root.volume()
    discarded = 0.0
    open_volume = initial_volume

    # root upper bounding
    if strat.uses_lp_point:
        _, x_root, _, _ = _lower_bound(p, root, INF)
        lp_solves += 1
        absorb(upper_bounding(p, root, x_root, strat, cfg.nb_starts, cfg, seed=[cfg.seed, 0]))
    else:
        absorb(upper_bounding(p, root, None, strat, cfg.nb_starts, cfg, seed=[cfg.seed, 0]))

    heap: list[tuple[float, int, Box]] = [(-INF, 0, root)]
    irreducible: list[tuple[float, Box]] = []
    counter = 1
    nodes = 0
    status = None

    def current_L() -> float:
        cands = [heap[0][0]] if heap else []
        cands += [lb for lb, _ in irreducible]
        return min(cands) if cands else INF

    while heap:
        L = current_L()
        if upper() - L <= cfg.eps:
            status = OPTIMAL_STATUS
            break
        if nodes >= cfg.max_nodes or time.perf_counter() - t0 > cfg.max_seconds:
            status = BUDGET_STATUS
            break
        parent_lb, _, box = heapq.heappop(heap)
        nodes += 1
        events: list[str] = []
        vol_before = box.volume()
        open_volume -= vol_before
        width = box.width()
        node_lb = parent_lb

        if parent_lb > upper():
            events.append("dominated")
            discarded += vol_before
        else:
            pruned = prune(p, box, upper())
            if pruned.is_empty:
                events.append("prune:empty")
                discarded += vol_before
            else:
                discarded += vol_before - pruned.volume()
                box = pruned
                lb, x_lp, discard, lb_events = _lower_bound(p, box, upper())
                lp_solves += 1
                events += lb_events
                node_lb = max(parent_lb, lb)
                if discard or node_lb > upper():
                    events.append("discarded")
                    discarded += box.volume()
                else:
                    res = upper_bounding(p, box, x_lp, strat, cfg.node_starts, cfg, seed=[cfg.seed, nodes])
                    absorb(res)
                    events += res.events
                    if node_lb > upper():
                        events.append("discarded")
                        discarded += box.volume()
                    elif is_irreducible(box):
                        events.append("irreducible")
                        irreducible.append((node_lb, box))
                        open_volume += box.volume()
                    else:
                        for child in split(box):
                            heapq.heappush(heap, (node_lb, counter, child))
                            counter += 1
                            open_volume += child.volume()

        if cfg.keep_log:
            log.append(
                IterationRecord(
                    iteration=nodes,
                    L=current_L(),
                    U=upper(),
                    node_lb=node_lb,
                    width=width,
                    open_nodes=len(heap) + len(irreducible),
                    events=events,
                    elapsed=time.perf_counter() - t0,
                    covered_volume=(open_volume + discarded) if cfg.audit_volume else None,
                )
            )

    U_final = upper()
    if status is None:
        # worklist exhausted
        L = current_L()
        if irreducible:
            status = OPTIMAL_STATUS if U_final - L <= cfg.eps else BUDGET_STATUS
        elif U_final < INF:
            # every other point was shown to be worse than the incumbent
            status, L = OPTIMAL_STATUS, U_final
        else:
            status, L, U_final = INFEASIBLE_STATUS, INF, -INF
    else:
        L = current_L()

    return SolveReport(
        problem=p.name,
        strategy=strat,
        eps=cfg.eps,
        status=status,
        L=L,
        U=U_final,
        certified_U=U,
        unsafe=unsafe_mode,
        proven=proven,
        log=log,
        nodes=nodes,
        proof_attempts=attempts,
        proof_successes=successes,
        lp_solves=lp_solves,
        time_to_first_proven=first_proven,
        wall_time=time.perf_counter() - t0,
        seed=cfg.seed,
        initial_volume=initial_volume,
        open_volume=open_volume,
        discarded_volume=discarded,
        irreducible=len(irreducible),
    )
