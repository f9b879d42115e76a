import math
from fractions import Fraction

import numpy as np
import pytest

from curvelab.curves import (Curve, Offspring, OffspringSpec, affine_weight,
                             critical_exponents, cumulative_shifts,
                             exp_diagonal_factors, offspring,
                             offspring_weight_ratio,
                             power_triple_weight_constant,
                             strong_nondegeneracy,
                             strong_nondegeneracy_grid_min, torsion,
                             torsion_exact, vandermonde)
from curvelab.errors import (ArgumentError, DomainError, FormError,
                             UnsupportedDimension)
from curvelab.rng import generator


def test_moment_torsion_is_product_of_factorials():
    # derivative matrix is lower triangular with diagonal 1!, 2!, ..., d!
    c = Curve.moment(3)
    assert torsion(c, 0.7) == pytest.approx(12.0, rel=1e-13)
    assert torsion_exact(c, Fraction(7, 10)) == 12


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_moment_torsion_exact_all_dimensions(d):
    c = Curve.moment(d)
    expected = math.prod(math.factorial(k) for k in range(1, d + 1))
    assert torsion_exact(c, Fraction(1, 3)) == expected
    assert torsion_exact(c, Fraction(9, 10)) == expected


def test_exponential_torsion_closed_form():
    c = Curve.exponential((-1.0, 1.0, 2.0), domain=(0.0, 2.0))
    assert torsion(c, 0.0) == pytest.approx(2 * 3 * 1, rel=1e-12)
    # tau(t) = V(a) exp(t sum a) with sign
    t = 0.63
    assert torsion(c, t) == pytest.approx(6.0 * math.exp(2.0 * t), rel=1e-11)


def test_exponential_torsion_identity_battery():
    rng = generator(314)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        a = np.sort(rng.uniform(-2.0, 2.0, size=d))
        if np.any(np.abs(np.diff(a)) < 1e-3) or np.any(np.abs(a) < 1e-3):
            continue
        t = float(rng.uniform(0.0, 1.5))
        c = Curve.exponential(tuple(a), domain=(0.0, 2.0))
        expected = vandermonde(a) * math.exp(t * a.sum())
        assert torsion(c, t) == pytest.approx(expected, rel=1e-10)


def test_monomial_repeated_exponent_kills_torsion():
    c = Curve.monomial((1.0, 2.0, 2.0))
    assert torsion(c, 0.37) == pytest.approx(0.0, abs=1e-12)


def test_affine_weight_values():
    c = Curve.moment(3)
    assert affine_weight(c, 0.2) == pytest.approx(12 ** (1 / 6), rel=1e-13)
    pt = Curve.power_triple(2.0, 3.0, domain=(0.0, 2.0))
    assert affine_weight(pt, 1.0) == pytest.approx(12 ** (1 / 6), rel=1e-12)


def test_power_triple_weight_constant_battery():
    rng = generator(11)
    for _ in range(100):
        alpha = float(rng.uniform(1.05, 2.4))
        beta = float(rng.uniform(alpha + 0.1, 5.0))
        t = float(rng.uniform(0.2, 1.8))
        c = Curve.power_triple(alpha, beta, domain=(0.0, 2.0))
        expected = power_triple_weight_constant(alpha, beta) * t ** ((alpha + beta - 5.0) / 6.0)
        assert affine_weight(c, t) == pytest.approx(expected, rel=1e-12)


def test_balanced_power_triple_weight_is_constant():
    c = Curve.power_triple(1.5, 3.5, domain=(0.0, 2.0))
    w = [affine_weight(c, t) for t in (0.3, 0.9, 1.7)]
    assert max(w) - min(w) == pytest.approx(0.0, abs=1e-12)


def test_domain_validation():
    c = Curve.monomial((0.5, 2.0))
    with pytest.raises(DomainError):
        torsion(c, 0.0)  # singular derivative at 0
    m = Curve.moment(2)
    torsion(m, 0.0)  # left endpoint fine for the moment family
    with pytest.raises(DomainError):
        torsion(m, 1.5)


def test_unsupported_dimension():
    c = Curve.moment(2)
    big = Curve.monomial(tuple(range(1, 10)))
    with pytest.raises(UnsupportedDimension):
        torsion(big, 0.5)
    assert c.dimension == 2


def test_critical_exponents():
    p3, q3, line3 = critical_exponents(3)
    assert p3 == Fraction(7, 6) and q3 == Fraction(7)
    p2, q2, _ = critical_exponents(2)
    assert p2 == Fraction(4, 3) and q2 == Fraction(4)
    for d in range(2, 9):
        p, q, line = critical_exponents(d)
        assert Fraction(1) / p + Fraction(1) / q == 1
        assert line(q) == Fraction(d * (d + 1), 2) * q


def test_offspring_zero_shift():
    c = Curve.moment(3)
    off = offspring(OffspringSpec(c, (0.0, 0.0)))
    t = 0.4
    assert np.allclose(off.point(t), 3 * np.asarray(c.point(t)))
    assert off.torsion(t) == pytest.approx(27 * torsion(c, t), rel=1e-10)


def test_offspring_empty_domain():
    c = Curve.moment(3)
    with pytest.raises(DomainError):
        Offspring(OffspringSpec(c, (0.7, 0.5)))


def test_offspring_derivative_additivity_exact():
    c = Curve.exponential((-1.0, 0.5, 2.0), domain=(0.0, 3.0))
    h = (0.3, 0.7)
    off = offspring(OffspringSpec(c, h))
    kappa = cumulative_shifts(h)
    for j in (0, 1, 2, 3):
        expected = sum(np.asarray(c.derivative(j, 0.9 + k)) for k in kappa)
        assert np.array_equal(off.derivative(j, 0.9), expected)


def test_exponential_offspring_diagonal_factorization():
    rng = generator(27)
    for _ in range(200):
        d = int(rng.integers(2, 6))
        a = np.sort(rng.uniform(-2.0, 2.0, size=d))
        if np.any(np.abs(np.diff(a)) < 1e-3) or np.any(np.abs(a) < 1e-3):
            continue
        c = Curve.exponential(tuple(a), domain=(0.0, 6.0))
        h = rng.uniform(0.0, 1.0, size=d - 1)
        t = float(rng.uniform(0.1, 2.0))
        off = Offspring(OffspringSpec(c, tuple(h)))
        E = exp_diagonal_factors(c, h)
        assert np.allclose(off.point(t), np.asarray(c.point(t)) * E, rtol=1e-12)
        expected_tau = vandermonde(a) * math.exp(t * a.sum()) * np.prod(E)
        assert off.torsion(t) == pytest.approx(expected_tau, rel=1e-10)


def test_weight_quotient_at_zero_shift():
    for d in (2, 3, 4):
        rng = generator(d)
        a = np.sort(rng.uniform(-2.0, 2.0, size=d))
        a[np.abs(a) < 0.1] = 0.3
        a = np.sort(a + np.linspace(0, 1e-2, d))
        c = Curve.exponential(tuple(a), domain=(0.0, 4.0))
        q = offspring_weight_ratio(c, np.zeros(d - 1))
        assert q == pytest.approx(d ** (-2.0 / (d + 1)), rel=1e-9)


def test_weight_quotient_bounded_and_continuous():
    rng = generator(99)
    c = Curve.exponential((-1.5, -0.2, 0.8, 2.1), domain=(0.0, 12.0))
    q0 = offspring_weight_ratio(c, np.zeros(3))
    for scale in (1e-3, 1e-5):
        q = offspring_weight_ratio(c, scale * np.ones(3))
        assert abs(q - q0) < 10 * scale
    for _ in range(200):
        h = rng.uniform(0.0, 2.0, size=3)
        assert offspring_weight_ratio(c, h) <= 1.0 + 1e-12


def test_strong_nondegeneracy_moment():
    c = Curve.moment(3, domain=(0.0, 2.5))
    assert strong_nondegeneracy(c, 0.6, 1.9) == pytest.approx(12.0, rel=1e-12)


def test_strong_nondegeneracy_requires_graph_form():
    c = Curve.exponential((-1.0, 1.0, 2.0), domain=(0.0, 2.0))
    with pytest.raises(FormError):
        strong_nondegeneracy(c, 0.5, 0.5)


def test_power_triple_grid_min():
    alpha = 1.5
    c = Curve.power_triple(alpha, 5.0 - alpha, domain=(0.0, 2.5))
    got = strong_nondegeneracy_grid_min(c, 0.5, 2.0)
    c_alpha = abs(alpha * (5 - alpha) * (alpha - 1) * (4 - alpha))
    assert got / c_alpha == pytest.approx(5 - 2 * alpha, rel=1e-3)
    # the minimum sits on the diagonal s = t = 1
    assert strong_nondegeneracy(c, 1.0, 1.0) == pytest.approx(c_alpha * (5 - 2 * alpha), rel=1e-12)


def test_offspring_inherits_strong_nondegeneracy():
    alpha = 1.5
    c = Curve.power_triple(alpha, 5.0 - alpha, domain=(0.0, 4.0))
    delta = strong_nondegeneracy_grid_min(c, 0.5, 2.0)
    off = offspring(OffspringSpec(c, (0.4, 0.9)), scale=1.0 / 3.0)
    got = strong_nondegeneracy_grid_min(off, 0.5, 2.0)
    assert got >= delta * (1 - 1e-9)


def test_torsion_sign_constancy_per_family():
    cases = [
        Curve.moment(4),
        Curve.monomial((0.5, 1.7, 3.3)),
        Curve.exponential((-1.0, 0.5, 2.0), domain=(0.0, 2.0)),
        Curve.power_triple(1.3, 4.1),
    ]
    for c in cases:
        lo, hi = c.domain
        ts = np.linspace(lo + 1e-3 * (hi - lo), hi, 1000)
        signs = {np.sign(torsion(c, t)) for t in ts}
        assert len(signs) == 1, f"sign flipped for {c.family}"


def test_affine_invariance_torsion_and_weight():
    rng = generator(5)
    for d in (2, 3, 4):
        c = Curve.moment(d)
        t = 0.61
        M = rng.normal(size=(d, d))
        while abs(np.linalg.det(M)) < 0.1:
            M = rng.normal(size=(d, d))
        cols = np.column_stack([c.derivative(j, t) for j in range(1, d + 1)])
        tau_mapped = np.linalg.det(M @ cols)
        assert tau_mapped == pytest.approx(np.linalg.det(M) * torsion(c, t), rel=1e-8)
        w_mapped = abs(tau_mapped) ** (2.0 / (d * (d + 1)))
        expected = abs(np.linalg.det(M)) ** (2.0 / (d * (d + 1))) * affine_weight(c, t)
        assert w_mapped == pytest.approx(expected, rel=1e-8)


def test_monomial_exponential_reparametrization():
    # t = e^{-u} carries the monomial weight integral to the exponential one
    # up to the |det diag(1/a_i)|^{2/(d(d+1))} factor of the linear change
    a = (1.0, 2.0, 3.5)
    U = 1.2
    mono = Curve.monomial(a, domain=(0.0, 1.0))
    expc = Curve.exponential(tuple(-x for x in a), domain=(0.0, 2.0))
    us = np.linspace(0.0, U, 20001)
    w_mono = np.array([affine_weight(mono, math.exp(-u)) * math.exp(-u) for u in us])
    w_exp = np.array([affine_weight(expc, u) for u in us])
    det_factor = abs(np.prod([1.0 / x for x in a])) ** (2.0 / (3 * 4))
    lhs = np.trapezoid(w_mono, us) * det_factor
    rhs = np.trapezoid(w_exp, us)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_constructor_validation():
    with pytest.raises(ArgumentError):
        Curve.exponential((0.0, 1.0))
    with pytest.raises(ArgumentError):
        Curve.moment(1)
    with pytest.raises(ArgumentError):
        Curve.moment(3, domain=(1.0, 0.5))
