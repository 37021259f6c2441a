from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest

from oracles.circle_newton import run as circle_oracle
from oracles.krawczyk_1d import run as krawczyk_oracle
from safebnb.expr import Var, eval_interval
from safebnb.interval import Box
from safebnb.problem import parse_problem
from safebnb.proof import (
    Certificate,
    InflationConfig,
    inflate_and_prove,
    krawczyk_existence,
    krawczyk_operator,
    replay_certificate,
)

Y = Var(0, "y")


class TestKrawczyk:
    def test_one_dimensional_oracle(self):
        eq = [Y * Y - 1]
        box = Box([(0.9, 1.1)])
        (K,) = krawczyk_operator(eq, box, [1.0])
        lo, hi = krawczyk_oracle()
        assert Fraction(K.lo) <= lo and hi <= Fraction(K.hi)
        assert K.lo >= 0.97 and K.hi <= 1.03
        assert float(lo) - K.lo <= 1e-12 and K.hi - float(hi) <= 1e-12
        assert krawczyk_existence(eq, box, [1.0])

    def test_no_real_zero(self):
        assert not krawczyk_existence([Y * Y + 1], Box([(-1, 1)]), [0.0])

    def test_linear_is_exact(self):
        (K,) = krawczyk_operator([Y - 3], Box([(2, 4)]), [3.0])
        assert K.lo == K.hi == 3.0
        assert krawczyk_existence([Y - 3], Box([(2, 4)]), [3.0])

    def test_center_outside_box(self):
        assert not krawczyk_existence([Y - 3], Box([(2, 4)]), [5.0])

    def test_zero_outside_box(self):
        assert not krawczyk_existence([Y - 3], Box([(3.5, 4)]), [3.75])

    def test_singular_midpoint_jacobian(self):
        assert not krawczyk_existence([Y * Y], Box([(-1, 1)]), [0.0])

    def test_non_square_rejected(self):
        X = Var(1, "x")
        with pytest.raises(ValueError):
            krawczyk_operator([X + Y], Box([(0, 1), (0, 1)]), [0.5, 0.5])

    def test_fixed_parameter_interval(self):
        # y - x = 0 with x in [0.49, 0.51] as a parameter, unknown y
        X = Var(1, "x")
        box = Box([(0.4, 0.6), (0.49, 0.51)])
        assert krawczyk_existence([Y - X], box, [0.5], unknowns=[0])

    def test_two_dimensional(self):
        X = Var(1, "x")
        eqs = [Y * Y + X * X - 1, Y - X]
        r = 0.5**0.5
        box = Box([(r - 1e-3, r + 1e-3), (r - 1e-3, r + 1e-3)])
        assert krawczyk_existence(eqs, box, [r, r])


@pytest.fixture(scope="module")
def corrected():
    x, y, _ = circle_oracle()[4]
    return np.array([x, y])


class TestInflate:
    def test_circle_from_corrected_point(self, circle, corrected):
        pb = inflate_and_prove(circle, corrected, circle.domain)
        assert pb is not None
        fx = Decimal(corrected[0]) + Decimal(corrected[1])
        assert int(fx * 10_000) == 14071
        # the refined box encloses the exact zero, within the corrector's 1e-12 of the point
        assert float(abs(Decimal(pb.objective_range.mid) - fx)) <= 1e-10
        assert np.abs(np.asarray(pb.box.midpoint()) - corrected).max() <= 1e-10
        assert pb.box.width() < 1e-12
        assert pb.objective_range == eval_interval(circle.objective, pb.box)

    def test_circle_from_rounded_point(self, circle):
        pb = inflate_and_prove(circle, [0.7739, 0.6332], circle.domain)
        assert pb is not None
        # y is fixed, so the zero inside the box is x = sqrt(1 - y^2)
        f = (1 - 0.6332**2) ** 0.5 + 0.6332
        assert pb.objective_range.lo <= f <= pb.objective_range.hi
        assert pb.objective_range.width < 1e-2

    def test_linear_proven_first_round(self):
        p = parse_problem("var x in [-5,5]; var y in [-5,5]; min y; subject x - 1 = 0;")
        pb = inflate_and_prove(p, [1.0, 2.0])
        assert pb is not None and pb.certificate.rounds == 1

    def test_infeasible_system(self):
        p = parse_problem("var x in [-10,10]; min x; subject x^2 + 1 = 0;")
        assert inflate_and_prove(p, [0.0]) is None

    def test_inequality_only_problem(self):
        p = parse_problem("var x in [-2,2]; var y in [-2,2]; min x; subject x^2 + y^2 - 1 <= 0;")
        pb = inflate_and_prove(p, [0.0, 0.0])
        assert pb is not None and pb.certificate.equations == ()
        assert eval_interval(p.inequalities[0], pb.box).hi <= 0.0

    def test_active_inequality_uses_slack(self):
        p = parse_problem("var x in [-2,2]; var y in [-2,2]; min x; subject x^2 + y^2 - 1 <= 0;")
        pb = inflate_and_prove(p, [-1.0, 0.0])
        assert pb is not None
        assert pb.certificate.active_set == (0,)
        assert len(pb.box) == 2

    def test_violated_inequality_fails(self):
        p = parse_problem("var x in [-3,3]; min x; subject x - 1 <= 0; subject 2 - x <= 0;")
        assert inflate_and_prove(p, [1.5]) is None

    def test_radii_increase(self, circle, monkeypatch):
        import safebnb.proof as proof_mod

        seen = []
        real = proof_mod.krawczyk_existence

        def spy(eqs, box, center, unknowns=None, max_condition=1e12):
            j = unknowns[0]
            seen.append(box[j].width)
            return False

        monkeypatch.setattr(proof_mod, "krawczyk_existence", spy)
        cfg = InflationConfig()
        assert inflate_and_prove(circle, [0.6, 0.8], config=cfg) is None
        monkeypatch.setattr(proof_mod, "krawczyk_existence", real)
        assert len(seen) == cfg.rounds
        assert all(b > a for a, b in zip(seen, seen[1:]))
        assert seen[0] == pytest.approx(2e-8, rel=1e-6)

    def test_first_radius_scales_with_residual(self, circle, monkeypatch):
        import safebnb.proof as proof_mod

        seen = []
        monkeypatch.setattr(
            proof_mod, "krawczyk_existence", lambda eqs, box, c, u=None, mc=1e12: seen.append(box[u[0]].width) or False
        )
        # residual 1e-4 gives r0 = 1e-3
        inflate_and_prove(circle, [0.6, (0.64 + 1e-4) ** 0.5], config=InflationConfig(rounds=1))
        assert seen[0] == pytest.approx(2e-3, rel=1e-3)


class TestCertificate:
    def test_round_trip_and_replay(self, circle):
        pb = inflate_and_prove(circle, [0.6, 0.8])
        d = json.loads(json.dumps(pb.certificate.to_dict()))
        cert = Certificate.from_dict(d)
        assert cert == pb.certificate
        assert replay_certificate(d)
        assert replay_certificate(cert, circle)

    def test_tampered_certificate_fails(self, circle):
        pb = inflate_and_prove(circle, [0.6, 0.8])
        d = pb.certificate.to_dict()
        d["equations"] = ["x^2 + y^2 + 1"]
        assert not replay_certificate(d)

    def test_sampled_witness(self, corpus):
        """Sampling each proven box finds a point with small residuals."""
        from safebnb.feasibility import constraint_residual, feasibility_correction

        rng = np.random.default_rng(4)
        checked = 0
        for p in corpus:
            if not p.constraints():
                continue
            x0 = rng.uniform(p.domain.lo, p.domain.hi)
            res = feasibility_correction(p, x0)
            if not res.converged:
                continue
            pb = inflate_and_prove(p, res.point)
            if pb is None:
                continue
            pts = [np.asarray(pb.box.midpoint())] + list(rng.uniform(pb.box.lo, pb.box.hi, (10_000, p.n)))
            best = min(constraint_residual(p, x) for x in pts)
            assert best <= 1e-6, p.name
            assert replay_certificate(pb.certificate, p)
            checked += 1
        assert checked >= 5
