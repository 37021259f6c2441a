from __future__ import annotations

import math

import numpy as np
import pytest

from oracles.ray_projection import run as ray_oracle
from safebnb.interval import Box
from safebnb.problem import parse_problem
from safebnb.proof import replay_certificate
from safebnb.solver import (
    BUDGET_STATUS,
    INFEASIBLE_STATUS,
    OPTIMAL_STATUS,
    SolverConfig,
    Strategy,
    branch_and_bound,
    is_irreducible,
    split,
    upper_bounding,
)

SQRT2 = math.sqrt(2.0)


class TestSplit:
    def test_widest_variable(self):
        a, b = split(Box([(0, 4), (0, 1)]))
        assert a == Box([(0, 2), (0, 1)]) and b == Box([(2, 4), (0, 1)])

    def test_tie_goes_to_lowest_index(self):
        a, b = split(Box([(0, 1), (0, 1)]))
        assert a == Box([(0, 0.5), (0, 1)]) and b == Box([(0.5, 1), (0, 1)])

    def test_skips_degenerate_component(self):
        a, b = split(Box([(5, 5), (0, 2)]))
        assert a == Box([(5, 5), (0, 1)]) and b == Box([(5, 5), (1, 2)])

    def test_relative_width(self):
        # width 2 around 100 is relatively narrower than width 1 around 0
        a, _ = split(Box([(99, 101), (0, 1)]))
        assert a[1].hi == 0.5

    def test_point_box_rejected(self):
        with pytest.raises(ValueError):
            split(Box([(1, 1), (2, 2)]))

    def test_halves_cover(self):
        b = Box([(-3, 7), (0.5, 0.75)])
        lo, hi = split(b)
        assert lo.hull(hi) == b
        assert lo.volume() + hi.volume() == pytest.approx(b.volume())

    def test_irreducible(self):
        x = 1.0
        assert is_irreducible(Box([(x, math.nextafter(x, 2.0))]))
        assert not is_irreducible(Box([(0.0, 1.0)]))


class TestUpperBounding:
    def test_s3_follows_the_ray(self, circle):
        res = upper_bounding(circle, circle.domain, [-0.72, -0.70], Strategy.S3)
        assert len(res.proven) == 1 and res.attempts == 1
        x, y, f = (float(v) for v in ray_oracle())
        pb = res.proven[0]
        assert np.abs(np.asarray(pb.box.midpoint()) - [x, y]).max() <= 1e-9
        assert pb.upper == pytest.approx(f, abs=1e-9)
        # feasible but not optimal: -sqrt(2) is strictly below what the ray reaches
        assert pb.upper > -SQRT2 + 1e-4

    def test_s1_is_unproven(self, circle):
        res = upper_bounding(circle, circle.domain, None, Strategy.S1, nb_starts=5)
        assert res.proven == [] and res.attempts == 0
        assert res.unsafe_value is not None and math.isfinite(res.unsafe_value)

    def test_s5_far_from_feasible(self, circle):
        # g(0.5, 0.5) = -0.5, beyond what inflation can reach
        res = upper_bounding(circle, Box([(0, 1), (0, 1)]), [0.5, 0.5], Strategy.S5)
        assert res.proven == [] and res.attempts == 1
        assert any("proof-failed" in e for e in res.events)

    def test_s5_feasible_lp_point(self, circle):
        res = upper_bounding(circle, circle.domain, [0.6, 0.8], Strategy.S5)
        assert len(res.proven) == 1

    def test_lp_strategies_need_lp_point(self, circle):
        for s in (Strategy.S3, Strategy.S5):
            res = upper_bounding(circle, circle.domain, None, s)
            assert res.proven == [] and res.events == [f"{s.value}:no-lp-point"]

    @pytest.mark.parametrize("strategy", [Strategy.S2, Strategy.S4])
    def test_local_search_strategies_prove(self, circle, strategy):
        res = upper_bounding(circle, circle.domain, None, strategy, nb_starts=10, seed=1)
        assert len(res.proven) == 1
        assert res.proven[0].upper == pytest.approx(-SQRT2, abs=1e-2)

    def test_s3_correction_failure_is_logged(self):
        p = parse_problem("var x in [-10,10]; min x; subject x^2 + 1 = 0;")
        res = upper_bounding(p, p.domain, [0.0], Strategy.S3)
        assert res.proven == [] and res.events[0].startswith("S3:correction-failed")


class TestBranchAndBound:
    def test_circle(self, circle):
        r = branch_and_bound(circle, eps=1e-6, strategy="S3")
        assert r.status == OPTIMAL_STATUS
        assert r.L <= -SQRT2 <= r.U and r.U - r.L <= 1e-6
        assert r.proven and not r.unsafe
        assert r.U == r.certified_U == r.best.upper

    def test_square_root(self):
        p = parse_problem("var x in [-10,10]; min x; subject x^2 - 4 = 0;")
        r = branch_and_bound(p, eps=1e-6)
        assert r.status == OPTIMAL_STATUS
        assert r.L <= -2.0 <= r.U and r.U - r.L <= 1e-6

    def test_infeasible(self):
        p = parse_problem("var x in [-10,10]; min x; subject x^2 + 1 = 0;")
        r = branch_and_bound(p, eps=1e-6)
        assert r.status == INFEASIBLE_STATUS
        assert (r.L, r.U) == (math.inf, -math.inf)
        assert r.proven == []

    def test_budget(self, corpus):
        p = next(q for q in corpus if q.name == "sphere")
        r = branch_and_bound(p, config=SolverConfig(max_nodes=5))
        assert r.status == BUDGET_STATUS and r.nodes == 5
        assert r.L <= float(p.metadata["optimum"]) <= r.U

    def test_unconstrained(self, corpus):
        p = next(q for q in corpus if q.name == "shifted_bowl")
        r = branch_and_bound(p)
        assert r.status == OPTIMAL_STATUS and r.L <= 3.0 <= r.U

    def test_s1_is_flagged(self, circle):
        r = branch_and_bound(circle, strategy="S1")
        assert r.unsafe and r.proven == [] and r.proof_attempts == 0
        assert r.certified_U == math.inf

    def test_invalid_eps(self):
        with pytest.raises(ValueError):
            SolverConfig(eps=0.0)

    def test_optimal_status_invariant(self, corpus):
        for p in corpus:
            r = branch_and_bound(p, config=SolverConfig(max_nodes=3000))
            if r.status == OPTIMAL_STATUS:
                assert r.U - r.L <= r.eps and r.proven


def _audit(report, f_star):
    Ls = [rec.L for rec in report.log]
    Us = [rec.U for rec in report.log]
    assert all(b >= a for a, b in zip(Ls, Ls[1:]))
    assert all(b <= a for a, b in zip(Us, Us[1:]))
    assert all(L <= f_star for L in Ls)
    if not report.unsafe:
        assert all(U >= f_star for U in Us)


class TestProperties:
    @pytest.mark.parametrize("strategy", ["S2", "S3", "S4", "S5"])
    def test_bound_safety_and_monotonicity(self, corpus, strategy):
        for p in corpus:
            f_star = float(p.metadata["optimum"])
            r = branch_and_bound(p, config=SolverConfig(strategy=strategy, max_nodes=2000))
            _audit(r, f_star)
            assert r.L <= f_star <= r.U

    @pytest.mark.parametrize("name", ["square_root", "log_barrier", "active_bound", "circle", "disk", "hyperbola", "trig"])
    def test_covering_volume(self, corpus, name):
        p = next(q for q in corpus if q.name == name)
        assert p.n <= 2
        r = branch_and_bound(p, config=SolverConfig(audit_volume=True, max_nodes=500))
        V = r.initial_volume
        for rec in r.log:
            assert abs(rec.covered_volume - V) <= 1e-9 * V
        assert abs(r.open_volume + r.discarded_volume - V) <= 1e-9 * V

    @pytest.mark.parametrize("strategy", ["S1", "S2", "S3", "S4", "S5"])
    def test_determinism(self, corpus, strategy):
        p = next(q for q in corpus if q.name == "hyperbola")
        cfg = SolverConfig(strategy=strategy, seed=5, max_nodes=300)
        a, b = branch_and_bound(p, config=cfg), branch_and_bound(p, config=cfg)
        assert (a.status, a.L, a.U, a.nodes, a.proof_attempts, a.proof_successes) == (
            b.status, b.L, b.U, b.nodes, b.proof_attempts, b.proof_successes,
        )
        assert [(r.L, r.U, r.events) for r in a.log] == [(r.L, r.U, r.events) for r in b.log]
        assert [pb.box for pb in a.proven] == [pb.box for pb in b.proven]

    @pytest.mark.parametrize("strategy", ["S2", "S3", "S4", "S5"])
    def test_u_is_certified(self, corpus, strategy):
        for name in ("circle", "sphere", "plane_disk", "saddle_circle"):
            p = next(q for q in corpus if q.name == name)
            r = branch_and_bound(p, config=SolverConfig(strategy=strategy, max_nodes=2000))
            assert not r.unsafe
            assert r.U == r.best.upper
            for pb in r.proven:
                assert replay_certificate(pb.certificate, p)
            ups = [pb.upper for pb in r.proven]
            assert ups == sorted(ups, reverse=True)

    def test_different_seeds_may_differ_but_stay_safe(self, circle):
        for seed in range(3):
            r = branch_and_bound(circle, config=SolverConfig(strategy="S2", seed=seed))
            assert r.L <= -SQRT2 <= r.U
