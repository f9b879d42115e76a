import math

import numpy as np
import pytest

from curvelab.errors import ArgumentError
from curvelab.intervals import IntervalSet, intersect_all
from curvelab.lorentz import (GridFunction, StepFunction,
                              check_convexity_interp, check_r_convexity,
                              check_weak_holder, lorentz_norm,
                              r_convexity_constant, random_step_function,
                              rearrangement, step_product, step_sum,
                              weak_norm_from_samples)
from curvelab.rng import generator

INF = math.inf


def two_level():
    # |f| = 1 on a length-2 set, 3 on a length-1 set
    return StepFunction.from_pieces([
        (IntervalSet.interval(0.0, 2.0), 1.0),
        (IntervalSet.interval(5.0, 6.0), 3.0),
    ])


class TestIntervalSet:
    def test_normalization_and_measure(self):
        s = IntervalSet([(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)])
        assert s.pairs() == [(0.0, 2.0), (3.0, 4.0)]
        assert s.measure == 3.0

    def test_intersect_translate(self):
        a = IntervalSet([(0.0, 2.0), (3.0, 4.0)])
        b = IntervalSet([(1.0, 3.5)])
        assert a.intersect(b).pairs() == [(1.0, 2.0), (3.0, 3.5)]
        assert a.translate(1.0).pairs() == [(1.0, 3.0), (4.0, 5.0)]
        assert intersect_all([a, b, IntervalSet.interval(1.5, 10.0)]).measure == 1.0

    def test_contains(self):
        s = IntervalSet([(0.0, 1.0)])
        assert s.contains(0.0) and not s.contains(1.0)


class TestRearrangement:
    def test_indicator_block(self):
        f = StepFunction.indicator(IntervalSet.interval(2.0, 5.0))
        r = rearrangement(f)
        assert r.support().pairs() == [(0.0, 3.0)]
        assert np.all(r.values == 1.0)

    def test_two_level(self):
        r = rearrangement(two_level())
        assert list(r.values) == [3.0, 1.0]
        assert r.support().pairs() == [(0.0, 3.0)]
        assert (r.starts[0], r.ends[0]) == (0.0, 1.0)

    def test_grid_identity_function(self):
        n = 1000
        g = GridFunction(0.0, 1.0 / n, (np.arange(n) + 0.5) / n)
        r = rearrangement(g)
        ss = np.linspace(1e-3, 0.999, 50)
        vals = r(ss)
        assert np.max(np.abs(vals - (1.0 - ss))) <= 1.0 / n

    def test_equimeasurability_exact(self):
        rng = generator(8)
        for _ in range(200):
            f = random_step_function(rng)
            r = rearrangement(f)
            for lam in np.abs(f.values):
                assert f.distribution(lam) == r.distribution(lam)
                assert f.distribution(0.99 * lam) == r.distribution(0.99 * lam)


class TestLorentzNorm:
    @pytest.mark.parametrize("p,q", [(0.5, 0.5), (1.0, 2.0), (2.0, INF), (7.0, 1.0)])
    def test_indicator(self, p, q):
        f = StepFunction.indicator(IntervalSet([(0.0, 1.5), (2.0, 3.5)]))
        assert lorentz_norm(f, (p, q)) == pytest.approx(3.0 ** (1.0 / p), rel=1e-14)

    def test_p_equals_q_is_lp(self):
        f = two_level()
        assert lorentz_norm(f, (2.0, 2.0)) ** 2 == pytest.approx(1 * 2 + 9 * 1, rel=1e-14)

    def test_weak_two_level(self):
        assert lorentz_norm(two_level(), (1.0, INF)) == pytest.approx(3.0, rel=1e-15)

    def test_scaling_exact(self):
        rng = generator(21)
        for _ in range(100):
            f = random_step_function(rng)
            c = float(rng.uniform(0.1, 10.0))
            for idx in ((1.5, 2.0), (0.7, INF)):
                assert lorentz_norm(f.scale_values(c), idx) == pytest.approx(
                    c * lorentz_norm(f, idx), rel=1e-13)

    def test_dilation_law(self):
        rng = generator(22)
        for _ in range(100):
            f = random_step_function(rng)
            lam = float(rng.uniform(0.2, 5.0))
            for p, q in ((2.0, 1.0), (0.5, INF)):
                assert lorentz_norm(f.dilate(lam), (p, q)) == pytest.approx(
                    lam ** (1.0 / p) * lorentz_norm(f, (p, q)), rel=1e-12)

    def test_weak_below_strong(self):
        rng = generator(23)
        for _ in range(200):
            f = random_step_function(rng)
            for p, q in ((1.5, 1.0), (2.0, 2.0), (0.8, 0.5)):
                assert lorentz_norm(f, (p, INF)) <= lorentz_norm(f, (p, q)) * (1 + 1e-12)


class TestWeakNormFromSamples:
    def test_single_cell(self):
        assert weak_norm_from_samples([(2.0, 3.0)], p=2.0) == pytest.approx(3.0 * 2.0 ** 0.5)

    def test_indicator(self):
        samples = [(0.5, 1.0)] * 6
        assert weak_norm_from_samples(samples, p=2.0) == pytest.approx(3.0 ** 0.5)

    def test_matches_lorentz_norm(self):
        rng = generator(24)
        for _ in range(1000):
            f = random_step_function(rng)
            samples = list(zip(f.measures, np.abs(f.values)))
            assert weak_norm_from_samples(samples, 1.3) == lorentz_norm(f, (1.3, INF))


class TestWeakHolder:
    def test_single_factor_equality(self):
        f = two_level()
        rep = check_weak_holder([f], r=0.5, ss=[1.0])
        assert rep.passed
        assert rep.lhs == pytest.approx(rep.rhs / (1.0 ** 2), rel=1e-13)

    def test_two_indicators(self):
        f = StepFunction.indicator(IntervalSet.interval(0.0, 1.0))
        rep = check_weak_holder([f, f], r=0.5, ss=[2.0, 2.0])
        assert rep.lhs == pytest.approx(1.0)
        assert rep.rhs == pytest.approx(4.0)
        assert rep.passed

    def test_exponent_constraint(self):
        f = two_level()
        with pytest.raises(ArgumentError):
            check_weak_holder([f, f], r=1.0, ss=[2.0, 3.0])

    def test_battery(self):
        rng = generator(31)
        for _ in range(1000):
            n = int(rng.integers(1, 5))
            hs = [random_step_function(rng) for _ in range(n)]
            ws = rng.uniform(0.3, 1.0, size=n)
            ss = (ws.sum() / ws).tolist()
            r = float(rng.uniform(0.2, 2.0))
            assert check_weak_holder(hs, r, ss).passed


class TestRConvexity:
    def test_single_summand(self):
        f = two_level()
        rep = check_r_convexity([f], r=0.5)
        assert rep.passed and rep.rhs == pytest.approx(9.0 * rep.lhs, rel=1e-13)

    def test_disjoint_indicators(self):
        # the sum is an indicator of measure 2, so the weak-(1/2) norm is 4
        f1 = StepFunction.indicator(IntervalSet.interval(0.0, 1.0))
        f2 = StepFunction.indicator(IntervalSet.interval(2.0, 3.0))
        rep = check_r_convexity([f1, f2], r=0.5)
        assert rep.lhs == pytest.approx(4.0)
        assert rep.rhs == pytest.approx(36.0)
        assert rep.passed

    def test_constant(self):
        assert r_convexity_constant(0.5) == pytest.approx(9.0)

    def test_invalid_r(self):
        with pytest.raises(ArgumentError):
            check_r_convexity([two_level()], r=1.0)

    def test_battery(self):
        rng = generator(32)
        for _ in range(1000):
            n = int(rng.integers(1, 17))
            hs = [random_step_function(rng, max_pieces=3) for _ in range(n)]
            r = float(rng.uniform(0.2, 0.95))
            assert check_r_convexity(hs, r).passed


class TestConvexityInterpolation:
    def test_indicator_ratio_one(self):
        f = StepFunction.indicator(IntervalSet.interval(0.0, 2.5))
        rep = check_convexity_interp(f, P=2.0, s=1.0)
        assert rep.ratio == pytest.approx(1.0, rel=1e-14)

    def test_two_level_exact(self):
        f = two_level()
        rep = check_convexity_interp(f, P=2.0, s=1.0)
        # ||f||_{2,1} = sum of layer increments: closed form from the blocks
        mags, cums = np.array([3.0, 1.0]), np.array([1.0, 3.0])
        prev = np.concatenate([[0.0], cums[:-1]])
        expected = np.sum(mags * (cums ** 0.5 - prev ** 0.5)) * (1.0 / 2.0) / (1.0 / 2.0)
        assert rep.lhs == pytest.approx(expected, rel=1e-12)
        assert rep.rhs_without_constant == pytest.approx(5.0 ** 0.5 * 3.0 ** 0.5, rel=1e-13)
        assert math.isfinite(rep.ratio)

    def test_battery_ratio_bounded(self):
        rng = generator(33)
        worst = 0.0
        for _ in range(1000):
            f = random_step_function(rng)
            for P in (1.5, 2.0, 7.0 / 3.0):
                for s in (0.5, 1.0):
                    rep = check_convexity_interp(f, P=P, s=s)
                    worst = max(worst, rep.ratio)
        assert math.isfinite(worst)
        assert worst < 10.0


class TestAlgebra:
    def test_sum_and_product_exact(self):
        f = two_level()
        g = StepFunction.from_pieces([(IntervalSet.interval(1.0, 5.5), 2.0)])
        s = step_sum([f, g])
        assert s(np.array([0.5]))[0] == 1.0
        assert s(np.array([1.5]))[0] == 3.0
        assert s(np.array([5.2]))[0] == 5.0
        p = step_product([f, g])
        assert p(np.array([0.5]))[0] == 0.0
        assert p(np.array([1.5]))[0] == 2.0
        assert p(np.array([5.2]))[0] == 6.0

    def test_grid_function_invariants(self):
        g = GridFunction(0.0, 0.25, np.array([1.0, -2.0, 0.5]))
        assert g.total_measure == pytest.approx(0.75)
        with pytest.raises(ArgumentError):
            GridFunction(0.0, -1.0, np.array([1.0]))
        with pytest.raises(ArgumentError):
            GridFunction(0.0, 1.0, np.array([np.nan]))
