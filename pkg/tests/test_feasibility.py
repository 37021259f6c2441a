from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import null_space

from oracles.circle_newton import run as circle_oracle
from safebnb.expr import eval_point
from safebnb.feasibility import (
    RankDeficientError,
    constraint_residual,
    feasibility_correction,
    moore_penrose_step,
    moore_penrose_step_normal,
    slack_augment,
)
from safebnb.problem import parse_problem


class TestSlackAugment:
    def test_active_inequality(self):
        p = parse_problem("var x in [-2,2]; min x; subject x - 1 <= 0;")
        system, z = slack_augment(p, [0.5], delta_active=0.6)
        assert system.active_set == (0,)
        assert system.num_vars == 2 and len(system.equations) == 1
        assert z[1] == pytest.approx(math.sqrt(0.5))
        assert system.residual(z)[0] == pytest.approx(0.0, abs=1e-15)

    def test_inactive_inequality(self):
        p = parse_problem("var x in [-2,2]; min x; subject x - 1 <= 0;")
        system, z = slack_augment(p, [0.0], delta_active=0.5)
        assert system.active_set == () and len(system.equations) == 0
        assert list(z) == [0.0]

    def test_no_inequalities(self, circle):
        system, z = slack_augment(circle, [0.3, 0.4])
        assert system.equations == tuple(circle.equalities)
        assert list(z) == [0.3, 0.4]

    def test_violated_inequality_gets_zero_slack(self):
        p = parse_problem("var x in [-2,2]; min x; subject x - 1 <= 0;")
        _, z = slack_augment(p, [1.5])
        assert z[1] == 0.0

    def test_default_threshold(self):
        p = parse_problem("var x in [-5,5]; min x; subject x - 1 <= 0;")
        # h = -0.05 is inside 0.1 * (1 + 0.05); h = -3 is not inside 0.4
        assert slack_augment(p, [0.95])[0].active_set == (0,)
        assert slack_augment(p, [-2.0])[0].active_set == ()


class TestMoorePenroseStep:
    def test_row_of_ones(self):
        d = moore_penrose_step([2.0], np.array([[1.0, 1.0]]))
        np.testing.assert_allclose(d, [1.0, 1.0], rtol=1e-15)

    def test_identity(self):
        d = moore_penrose_step([0.3, -7.0], np.eye(2))
        np.testing.assert_allclose(d, [0.3, -7.0], rtol=1e-15)

    def test_circle_step(self):
        J = np.array([[2.2, 1.8]])
        d = moore_penrose_step([1.02], J)
        expected = J[0] * (1.02 / (2.2**2 + 1.8**2))
        np.testing.assert_allclose(d, expected, rtol=1e-14)
        assert d[0] == pytest.approx(0.27772, abs=1e-5) and d[1] == pytest.approx(0.22723, abs=1e-5)
        assert J @ d == pytest.approx(1.02, rel=1e-14)
        assert d[0] * J[0, 1] - d[1] * J[0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            moore_penrose_step([1.0, 2.0], np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]))

    def test_overdetermined(self):
        with pytest.raises(RankDeficientError):
            moore_penrose_step([1.0, 2.0], np.array([[1.0], [2.0]]))

    def test_empty_system(self):
        assert list(moore_penrose_step([], np.zeros((0, 3)))) == [0.0, 0.0, 0.0]

    @pytest.mark.parametrize("seed", range(100))
    def test_minimum_norm_and_exactness(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, n + 1))
        J = rng.normal(size=(m, n))
        r = rng.normal(size=m)
        d = moore_penrose_step(r, J)
        N = null_space(J)
        for k in range(N.shape[1]):
            v = N[:, k] * rng.uniform(0.5, 3.0)
            assert abs(d @ v) <= 1e-8 * np.linalg.norm(d) * np.linalg.norm(v)
        assert np.abs(J @ d - r).max() <= 1e-8 * np.abs(r).max()
        np.testing.assert_allclose(d, moore_penrose_step_normal(r, J), rtol=1e-6, atol=1e-10)
        np.testing.assert_allclose(d, np.linalg.pinv(J) @ r, rtol=1e-6, atol=1e-10)


class TestCorrection:
    def test_circle_matches_oracle(self, circle):
        res = feasibility_correction(circle, [1.1, 0.9], tol=1e-10)
        oracle = circle_oracle()
        assert res.converged and res.iterations <= 5
        assert res.residual <= 1e-10
        # steps stay on the ray, so the limit is the nearest point of the circle
        assert np.linalg.norm(res.point - [1.1, 0.9]) == pytest.approx(math.hypot(1.1, 0.9) - 1.0, rel=1e-9)
        for t, r in enumerate(res.history):
            assert r == pytest.approx(oracle[t][2], rel=1e-6, abs=1e-15)
        np.testing.assert_allclose(res.point, oracle[res.iterations][:2], rtol=1e-12)

    def test_circle_quadratic_contraction(self, circle):
        res = feasibility_correction(circle, [1.1, 0.9], tol=1e-10)
        h = res.history
        ratios = [h[t + 1] / h[t] ** 2 for t in range(1, len(h) - 1) if h[t] > 0]
        assert ratios and max(ratios) <= 10.0

    def test_already_feasible(self, circle):
        x0 = [0.6, 0.8]
        res = feasibility_correction(circle, x0, tol=1e-10)
        assert res.converged and res.iterations == 0
        assert list(res.point) == x0

    def test_no_real_solution(self):
        p = parse_problem("var x in [-10,10]; min x; subject x^2 + 1 = 0;")
        res = feasibility_correction(p, [0.0], tol=1e-10)
        assert not res.converged

    def test_inequality_is_respected(self):
        p = parse_problem("var x in [-3,3]; var y in [-3,3]; min x; subject x^2 + y^2 - 1 <= 0;")
        res = feasibility_correction(p, [1.0, 0.5])
        assert res.converged
        assert eval_point(p.inequalities[0], res.point) <= 1e-10

    def test_point_clamped_to_box(self, circle):
        res = feasibility_correction(circle, [5.0, 5.0])
        assert circle.domain.contains_point(res.point)

    def test_residual_helper(self):
        p = parse_problem("var x in [-3,3]; min x; subject x - 1 = 0; subject x - 2 <= 0;")
        assert constraint_residual(p, [2.5]) == 1.5
        assert constraint_residual(p, [0.0]) == 1.0

    def test_proximity_on_random_quadratics(self):
        rng = np.random.default_rng(21)
        converged = 0
        for trial in range(100):
            n = int(rng.integers(2, 5))
            m = int(rng.integers(1, n))
            xs = rng.uniform(-1, 1, n)
            # sum_j a_ij (x_j - xs_j)^2 + b_i . (x - xs) = 0 passes through xs
            terms = []
            for _ in range(m):
                a = rng.uniform(0.2, 1.0, n)
                b = rng.normal(size=n)
                parts = [f"({float(a[j])!r})*(x{j} - ({float(xs[j])!r}))^2 + ({float(b[j])!r})*(x{j} - ({float(xs[j])!r}))" for j in range(n)]
                terms.append("subject " + " + ".join(parts) + " = 0;")
            text = "".join(f"var x{j} in [-5,5];" for j in range(n)) + "min x0;" + "".join(terms)
            p = parse_problem(text)
            d = rng.uniform(0.001, 0.1)
            u = rng.normal(size=n)
            seed = xs + d * u / np.linalg.norm(u)
            res = feasibility_correction(p, seed)
            assert res.converged, trial
            assert np.linalg.norm(res.point - seed) <= 10 * d, trial
            converged += 1
        assert converged == 100
