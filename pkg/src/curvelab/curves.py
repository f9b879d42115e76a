"""Curve families, torsion, affine arclength weight and offspring curves.

Four closed-form families are supported:

* ``moment``       -- (t, t^2, ..., t^d)
* ``monomial``     -- (t^{a_1}, ..., t^{a_d}) with real exponents
* ``exponential``  -- (a_1^{-1} e^{a_1 t}, ..., a_d^{-1} e^{a_d t})
* ``power_triple`` -- (t, t^alpha, t^beta) in R^3

Derivatives are closed-form per family (power rule / exponential rule);
torsion determinants are never built from finite differences because
Vandermonde-type columns lose digits fast under numerical differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import (ArgumentError, DegenerateInput, DomainError, FormError,
                     InternalConsistencyError, UnsupportedDimension)

MAX_DIMENSION = 8
_EXTENDED_PRECISION_DIM = 6  # determinants switch to 50-digit arithmetic here


def _det(matrix: np.ndarray) -> float:
    """Signed determinant with extended precision for large dimensions."""
    d = matrix.shape[0]
    if d > MAX_DIMENSION:
        raise UnsupportedDimension(f"determinants limited to d <= {MAX_DIMENSION}, got {d}")
    if d >= _EXTENDED_PRECISION_DIM:
        import mpmath

        with mpmath.workdps(50):
            return float(mpmath.det(mpmath.matrix(matrix.tolist())))
    return float(np.linalg.det(matrix))


def _det_exact(rows: list[list[Fraction]]) -> Fraction:
    """Fraction-division-free Bareiss determinant (exact)."""
    n = len(rows)
    m = [row[:] for row in rows]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class Curve:
    """A parametrized curve with closed-form derivatives up to order d.

    ``domain`` is the half-open interval (t_lo, t_hi]; the moment and
    exponential families additionally admit evaluation at t_lo itself
    since their derivatives stay finite there.
    """

    family: str
    coeffs: tuple[float, ...]
    domain: tuple[float, float]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def moment(d: int, domain: tuple[float, float] = (0.0, 1.0)) -> "Curve":
        if d < 2:
            raise ArgumentError("dimension must be >= 2")
        return Curve("moment", tuple(float(j) for j in range(1, d + 1)), _check_domain(domain))

    @staticmethod
    def monomial(exponents, domain: tuple[float, float] = (0.0, 1.0)) -> "Curve":
        exps = tuple(float(a) for a in exponents)
        if len(exps) < 2:
            raise ArgumentError("dimension must be >= 2")
        return Curve("monomial", exps, _check_domain(domain))

    @staticmethod
    def exponential(rates, domain: tuple[float, float] = (0.0, 1.0)) -> "Curve":
        rs = tuple(float(a) for a in rates)
        if len(rs) < 2:
            raise ArgumentError("dimension must be >= 2")
        if any(a == 0.0 for a in rs):
            raise ArgumentError("exponential rates must be nonzero")
        return Curve("exponential", rs, _check_domain(domain))

    @staticmethod
    def power_triple(alpha: float, beta: float, domain: tuple[float, float] = (0.0, 1.0)) -> "Curve":
        return Curve("power_triple", (1.0, float(alpha), float(beta)), _check_domain(domain))

    # -- basic queries -----------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.coeffs)

    def admits_left_endpoint(self) -> bool:
        # monomial derivatives blow up at t=0 when an exponent drops below
        # the derivative order, so those families keep the interval open
        if self.family in ("moment", "exponential"):
            return True
        return self.domain[0] > 0.0

    def check_time(self, t) -> None:
        lo, hi = self.domain
        t = np.asarray(t, dtype=float)
        ok_left = (t > lo) | ((t == lo) & self.admits_left_endpoint())
        if not bool(np.all(ok_left & (t <= hi))):
            raise DomainError(f"t outside domain ({lo}, {hi}] for family {self.family}")

    # -- evaluation --------------------------------------------------------

    def point(self, t):
        """Curve point(s); shape (..., d) for array input."""
        return self.derivative(0, t)

    def derivative(self, j: int, t):
        """j-th derivative of every component; j=0 is the point itself."""
        if j < 0:
            raise ArgumentError("derivative order must be >= 0")
        self.check_time(t)
        t = np.asarray(t, dtype=float)
        cols = []
        if self.family == "exponential":
            for a in self.coeffs:
                cols.append(a ** (j - 1) * np.exp(a * t))
        else:
            for a in self.coeffs:
                c = 1.0
                for l in range(j):
                    c *= a - l
                if c == 0.0:
                    cols.append(np.zeros_like(t))
                else:
                    with np.errstate(divide="ignore"):
                        cols.append(c * np.power(t, a - j))
        return np.stack(cols, axis=-1)

    def derivative_exact(self, j: int, t: Fraction) -> list[Fraction]:
        """Exact derivative column for integer-exponent power families."""
        if self.family == "exponential":
            raise ArgumentError("exact path needs polynomial components")
        t = Fraction(t)
        out = []
        for a in self.coeffs:
            if a != int(a):
                raise ArgumentError("exact path needs integer exponents")
            a = int(a)
            c = 1
            for l in range(j):
                c *= a - l
            if c == 0:
                out.append(Fraction(0))
            else:
                out.append(c * t ** (a - j))
        return out


def _check_domain(domain) -> tuple[float, float]:
    lo, hi = float(domain[0]), float(domain[1])
    if not (0.0 <= lo < hi):
        raise ArgumentError("domain must satisfy 0 <= t_lo < t_hi")
    return (lo, hi)


# ---------------------------------------------------------------------------
# torsion and affine arclength weight


def derivative_matrix(curve: Curve, t: float) -> np.ndarray:
    """Columns gamma'(t), ..., gamma^{(d)}(t)."""
    d = curve.dimension
    return np.column_stack([curve.derivative(j, t) for j in range(1, d + 1)])


def torsion(curve: Curve, t: float) -> float:
    """Signed determinant of the first d derivative columns."""
    d = curve.dimension
    if d > MAX_DIMENSION:
        raise UnsupportedDimension(f"d={d} exceeds the determinant limit {MAX_DIMENSION}")
    return _det(derivative_matrix(curve, t))


def torsion_exact(curve: Curve, t) -> Fraction:
    """Exact torsion for integer-exponent power curves at rational t."""
    curve.check_time(float(t))
    d = curve.dimension
    if d > MAX_DIMENSION:
        raise UnsupportedDimension(f"d={d} exceeds the determinant limit {MAX_DIMENSION}")
    t = Fraction(t)
    cols = [curve.derivative_exact(j, t) for j in range(1, d + 1)]
    rows = [[cols[j][i] for j in range(d)] for i in range(d)]
    return _det_exact(rows)


def affine_weight(curve: Curve, t: float) -> float:
    """|torsion|^{2/(d(d+1))}, the affine arclength density."""
    d = curve.dimension
    return abs(torsion(curve, t)) ** (2.0 / (d * (d + 1)))


def vandermonde(x) -> float:
    """Product of pairwise differences prod_{i<j} (x_j - x_i)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            out *= x[..., j] - x[..., i]
    return out


def power_triple_weight_constant(alpha: float, beta: float) -> float:
    """c with w(t) = c * t^{(alpha+beta-5)/6} for the curve (t, t^a, t^b)."""
    prod = alpha * beta * (alpha - 1.0) * (beta - 1.0) * (beta - alpha)
    return abs(prod) ** (1.0 / 6.0)


# ---------------------------------------------------------------------------
# critical exponents


def critical_exponents(d: int):
    """Return (p_d, q_d, critical-line map q -> p') as exact rationals."""
    if d < 2:
        raise ArgumentError("dimension must be >= 2")
    p = Fraction(d * d + d + 2, d * d + d)
    q = Fraction(d * d + d + 2, 2)
    line: Callable[[Fraction], Fraction] = lambda qq: Fraction(d * (d + 1), 2) * Fraction(qq)
    return p, q, line


# ---------------------------------------------------------------------------
# offspring curves


def cumulative_shifts(h) -> np.ndarray:
    """kappa(h): (0, h_1, h_1+h_2, ...), length d for d-1 shifts."""
    h = np.asarray(h, dtype=float)
    return np.concatenate([[0.0], np.cumsum(h)])


@dataclass(frozen=True)
class OffspringSpec:
    """Base curve plus d-1 nonnegative shifts."""

    base: Curve
    h: tuple[float, ...]

    def __post_init__(self):
        if len(self.h) != self.base.dimension - 1:
            raise ArgumentError("need d-1 shifts")
        if any(x < 0 for x in self.h):
            raise ArgumentError("shifts must be nonnegative")

    @property
    def kappa(self) -> np.ndarray:
        return cumulative_shifts(self.h)


class Offspring:
    """Evaluator for the sum-of-shifted-copies curve.

    ``scale=1`` gives the plain sum of the d translated copies of the
    base curve; ``scale=1/d`` keeps graph curves identity-parametrized.
    """

    def __init__(self, spec: OffspringSpec, scale: float = 1.0):
        self.spec = spec
        self.scale = float(scale)
        base = spec.base
        kappa = spec.kappa
        lo, hi = base.domain
        new_hi = hi - float(kappa[-1])
        if new_hi <= lo:
            raise DomainError("offspring domain is empty for these shifts")
        self.domain = (lo, new_hi)
        self.dimension = base.dimension

    def derivative(self, j: int, t):
        base, kappa = self.spec.base, self.spec.kappa
        t = np.asarray(t, dtype=float)
        total = base.derivative(j, t + kappa[0])
        for k in kappa[1:]:
            total = total + base.derivative(j, t + k)
        return self.scale * total

    def point(self, t):
        return self.derivative(0, t)

    def torsion(self, t: float) -> float:
        d = self.dimension
        return _det(np.column_stack([self.derivative(j, t) for j in range(1, d + 1)]))

    def weight_product(self, t: float) -> float:
        """H(t,h): product of base affine weights at the shifted times."""
        base, kappa = self.spec.base, self.spec.kappa
        return float(np.prod([affine_weight(base, t + k) for k in kappa]))


def offspring(spec: OffspringSpec, scale: float = 1.0) -> Offspring:
    return Offspring(spec, scale)


def exp_diagonal_factors(curve: Curve, h) -> np.ndarray:
    """The diagonal matrix entries sum_j exp(a_i * kappa_j(h))."""
    if curve.family != "exponential":
        raise ArgumentError("diagonal factorization requires the exponential family")
    kappa = cumulative_shifts(h)
    a = np.asarray(curve.coeffs)
    return np.exp(np.outer(a, kappa)).sum(axis=1)


def offspring_weight_ratio(curve: Curve, h, check_tol: float = 1e-10) -> float:
    """H(t,h)^{1/d} / w_h(t) for exponential curves (t-independent).

    The value is computed at two parameters and cross-checked; a relative
    disagreement beyond ``check_tol`` raises InternalConsistencyError.
    """
    if curve.family != "exponential":
        raise ArgumentError("weight quotient requires the exponential family")
    a = sorted(curve.coeffs)
    if any(x == y for x, y in zip(a, a[1:])):
        raise DegenerateInput("tied rates make the quotient degenerate")
    spec = OffspringSpec(curve, tuple(float(x) for x in np.atleast_1d(h)))
    off = Offspring(spec)
    lo, hi = off.domain
    ts = [lo + 0.25 * (hi - lo), lo + 0.75 * (hi - lo)]
    vals = []
    d = curve.dimension
    for t in ts:
        H = off.weight_product(t)
        w_h = abs(off.torsion(t)) ** (2.0 / (d * (d + 1)))
        vals.append(H ** (1.0 / d) / w_h)
    if abs(vals[0] - vals[1]) > check_tol * max(abs(vals[0]), abs(vals[1])):
        raise InternalConsistencyError(
            f"weight quotient depends on t: {vals[0]!r} vs {vals[1]!r}")
    return vals[0]


# ---------------------------------------------------------------------------
# strong nondegeneracy for graph curves in R^3


def _check_graph_form(curve) -> None:
    if curve.dimension != 3:
        raise FormError("strong nondegeneracy is defined for curves in R^3")
    lo, hi = curve.domain
    t = lo + 0.37 * (hi - lo)
    d1 = np.asarray(curve.derivative(1, t), dtype=float)
    d2 = np.asarray(curve.derivative(2, t), dtype=float)
    if abs(d1[0] - 1.0) > 1e-9 or abs(d2[0]) > 1e-9:
        raise FormError("first component must be the parameter itself")


def strong_nondegeneracy(curve, s: float, t: float) -> float:
    """Two-point second/third derivative determinant |y''(s)z'''(t) - y'''(t)z''(s)|.

    Accepts any curve-like object exposing ``derivative(j, t)`` whose first
    component is identity-parametrized, e.g. moment curves, power triples
    and their mean offspring.
    """
    _check_graph_form(curve)
    ys = np.asarray(curve.derivative(2, s), dtype=float)[1]
    zs = np.asarray(curve.derivative(2, s), dtype=float)[2]
    yt = np.asarray(curve.derivative(3, t), dtype=float)[1]
    zt = np.asarray(curve.derivative(3, t), dtype=float)[2]
    return abs(ys * zt - yt * zs)


def strong_nondegeneracy_grid_min(curve, grid_lo: float = 0.5, grid_hi: float = 2.0,
                                  n: int = 61) -> float:
    """Minimum of the two-point determinant over an n-by-n parameter grid."""
    ss = np.linspace(grid_lo, grid_hi, n)
    best = math.inf
    y2 = np.array([np.asarray(curve.derivative(2, s), dtype=float)[1] for s in ss])
    z2 = np.array([np.asarray(curve.derivative(2, s), dtype=float)[2] for s in ss])
    y3 = np.array([np.asarray(curve.derivative(3, t), dtype=float)[1] for t in ss])
    z3 = np.array([np.asarray(curve.derivative(3, t), dtype=float)[2] for t in ss])
    _check_graph_form(curve)
    vals = np.abs(np.outer(y2, z3) - np.outer(z2, y3))
    best = float(vals.min())
    return best
