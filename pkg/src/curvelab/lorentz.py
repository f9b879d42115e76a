"""Decreasing rearrangements, Lorentz quasi-norms and inequality checkers.

Everything here works on exactly-representable piecewise-constant
functions, so all norms evaluate in closed form: no quadrature enters.
Level sets use the strict inequality |f| > lambda; ties are resolved by
the right-continuous distribution function.  Infinite norms are returned
as ``math.inf`` rather than raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError
from .intervals import IntervalSet


class LorentzIndex(NamedTuple):
    p: float
    q: float  # math.inf selects the weak norm

    def validate(self):
        if not (0 < self.p < math.inf):
            raise ArgumentError("p must be finite and positive")
        if not (0 < self.q):
            raise ArgumentError("q must be positive")


class StepFunction:
    """Finitely many constant pieces on disjoint half-open intervals.

    Pieces are kept sorted by decreasing |value|; zero-valued pieces are
    dropped so the support is exactly the union of the stored intervals.
    """

    __slots__ = ("starts", "ends", "values")

    def __init__(self, starts, ends, values):
        starts = np.asarray(starts, dtype=float)
        ends = np.asarray(ends, dtype=float)
        values = np.asarray(values)
        keep = (ends > starts) & (values != 0)
        starts, ends, values = starts[keep], ends[keep], values[keep]
        order = np.argsort(-np.abs(values), kind="stable")
        self.starts = starts[order]
        self.ends = ends[order]
        self.values = values[order]

    @staticmethod
    def from_pieces(pieces) -> "StepFunction":
        """Build from (IntervalSet, value) pairs with disjoint supports."""
        starts, ends, values = [], [], []
        for iset, v in pieces:
            for a, b in iset.pairs():
                starts.append(a)
                ends.append(b)
                values.append(v)
        return StepFunction(starts, ends, values)

    @staticmethod
    def indicator(iset: IntervalSet) -> "StepFunction":
        return StepFunction.from_pieces([(iset, 1.0)])

    # -- queries -----------------------------------------------------------

    def support(self) -> IntervalSet:
        return IntervalSet(zip(self.starts, self.ends))

    @property
    def measures(self) -> np.ndarray:
        return self.ends - self.starts

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=self.values.dtype if len(self.values) else float)
        for a, b, v in zip(self.starts, self.ends, self.values):
            out = np.where((t >= a) & (t < b), v, out)
        return out

    def distribution(self, lam: float) -> float:
        """Measure of {|f| > lam}; summed in decreasing-value order."""
        mags = np.abs(self.values)
        return float(np.sum(self.measures[mags > lam]))

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if len(self.values) else 0.0

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values) * self.measures))

    # -- algebra -----------------------------------------------------------

    def scale_values(self, c) -> "StepFunction":
        return StepFunction(self.starts, self.ends, self.values * c)

    def dilate(self, lam: float) -> "StepFunction":
        """Replace f(.) by f(./lam): the support dilates by lam."""
        if lam <= 0:
            raise ArgumentError("dilation factor must be positive")
        return StepFunction(self.starts * lam, self.ends * lam, self.values)

    def translate(self, dt: float) -> "StepFunction":
        return StepFunction(self.starts + dt, self.ends + dt, self.values)


def _elementary_partition(fns):
    cuts = np.unique(np.concatenate([np.concatenate([f.starts, f.ends])
                                     for f in fns if len(f.starts)] or [np.array([])]))
    if len(cuts) < 2:
        return np.array([]), np.array([])
    return cuts[:-1], cuts[1:]


def step_sum(fns) -> StepFunction:
    """Exact pointwise sum of finitely many step functions."""
    fns = list(fns)
    lo, hi = _elementary_partition(fns)
    if len(lo) == 0:
        return StepFunction([], [], [])
    mid = 0.5 * (lo + hi)
    total = np.zeros(len(mid), dtype=complex)
    for f in fns:
        total = total + f(mid)
    if np.allclose(total.imag, 0):
        total = total.real
    return StepFunction(lo, hi, total)


def step_product(fns) -> StepFunction:
    """Exact pointwise product of finitely many step functions."""
    fns = list(fns)
    lo, hi = _elementary_partition(fns)
    if len(lo) == 0:
        return StepFunction([], [], [])
    mid = 0.5 * (lo + hi)
    total = np.ones(len(mid), dtype=complex)
    for f in fns:
        total = total * f(mid)
    if np.allclose(total.imag, 0):
        total = total.real
    return StepFunction(lo, hi, total)


@dataclass(frozen=True)
class GridFunction:
    """Samples on a uniform grid; each cell carries measure = spacing."""

    origin: float
    spacing: float
    values: np.ndarray

    def __post_init__(self):
        if self.spacing <= 0:
            raise ArgumentError("spacing must be positive")
        v = np.asarray(self.values)
        if not np.all(np.isfinite(v if not np.iscomplexobj(v) else np.abs(v))):
            raise ArgumentError("samples must be finite")
        object.__setattr__(self, "values", v)

    @property
    def total_measure(self) -> float:
        return self.spacing * len(self.values)

    def to_step(self) -> StepFunction:
        n = len(self.values)
        edges = self.origin + self.spacing * np.arange(n + 1)
        return StepFunction(edges[:-1], edges[1:], self.values)


def _as_step(f) -> StepFunction:
    if isinstance(f, GridFunction):
        return f.to_step()
    if isinstance(f, StepFunction):
        return f
    raise ArgumentError(f"expected StepFunction or GridFunction, got {type(f)!r}")


# ---------------------------------------------------------------------------
# rearrangement and norms


def rearrangement(f) -> StepFunction:
    """Nonincreasing rearrangement f* as a step function on (0, infinity)."""
    f = _as_step(f)
    mags = np.abs(f.values)
    order = np.argsort(-mags, kind="stable")
    mags = mags[order]
    meas = f.measures[order]
    edges = np.concatenate([[0.0], np.cumsum(meas)])
    return StepFunction(edges[:-1], edges[1:], mags)


def _sorted_layers(f):
    """(magnitudes desc, cumulative measures) of the nonzero pieces."""
    f = _as_step(f)
    mags = np.abs(f.values)
    order = np.argsort(-mags, kind="stable")
    mags = mags[order]
    cum = np.cumsum(f.measures[order])
    return mags, cum


def lorentz_norm(f, index) -> float:
    """Lorentz (p, q) quasi-norm, exact for piecewise-constant input."""
    idx = LorentzIndex(*index)
    idx.validate()
    mags, cum = _sorted_layers(f)
    if len(mags) == 0:
        return 0.0
    if math.isinf(idx.q):
        return float(np.max(mags * cum ** (1.0 / idx.p)))
    e = idx.q / idx.p
    prev = np.concatenate([[0.0], cum[:-1]])
    total = float(np.sum(mags ** idx.q * (cum ** e - prev ** e)))
    return total ** (1.0 / idx.q)


def weak_norm_from_samples(samples, p: float) -> float:
    """Weak-p norm of step data given as (measure, magnitude) pairs.

    The supremum over thresholds is attained approaching each distinct
    magnitude from below, i.e. on the closed superlevel sets.
    """
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        return 0.0
    meas, mags = arr[:, 0], np.abs(arr[:, 1])
    if np.any(meas <= 0):
        raise ArgumentError("measures must be positive")
    order = np.argsort(-mags, kind="stable")
    mags = mags[order]
    cum = np.cumsum(meas[order])
    return float(np.max(mags * cum ** (1.0 / p)))


# ---------------------------------------------------------------------------
# inequality checkers


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    passed: bool


def check_weak_holder(hs, r: float, ss) -> InequalityReport:
    """Weak Hoelder: ||prod h_i||_{r,inf} <= n^{1/r} prod ||h_i||_{r s_i,inf}."""
    hs = [_as_step(h) for h in hs]
    ss = list(ss)
    if len(hs) != len(ss) or not hs:
        raise ArgumentError("need one exponent per factor")
    if r <= 0 or any(s <= 0 for s in ss):
        raise ArgumentError("exponents must be positive")
    if abs(sum(1.0 / s for s in ss) - 1.0) > 1e-12:
        raise ArgumentError("exponents must satisfy sum 1/s_i = 1")
    lhs = lorentz_norm(step_product(hs), (r, math.inf))
    n = len(hs)
    rhs = n ** (1.0 / r)
    for h, s in zip(hs, ss):
        rhs *= lorentz_norm(h, (r * s, math.inf))
    return InequalityReport(lhs, rhs, lhs <= rhs * (1 + 1e-12))


def r_convexity_constant(r: float) -> float:
    return ((2.0 - r) / (1.0 - r)) ** (1.0 / r)


def check_r_convexity(hs, r: float) -> InequalityReport:
    """r-convexity of weak-r: ||sum h||_{r,inf} <= C_r (sum ||h||^r)^{1/r}."""
    if not (0 < r < 1):
        raise ArgumentError("r must lie in (0, 1)")
    hs = [_as_step(h) for h in hs]
    if not hs:
        raise ArgumentError("need at least one summand")
    lhs = lorentz_norm(step_sum(hs), (r, math.inf))
    rhs = r_convexity_constant(r) * sum(
        lorentz_norm(h, (r, math.inf)) ** r for h in hs) ** (1.0 / r)
    return InequalityReport(lhs, rhs, lhs <= rhs * (1 + 1e-12))


@dataclass(frozen=True)
class ConvexityReport:
    lhs: float
    rhs_without_constant: float
    ratio: float


def check_convexity_interp(G, P: float, s: float) -> ConvexityReport:
    """Ratio ||G||_{P,s} / (||G||_1^{1/P} ||G||_inf^{1-1/P})."""
    if P <= 1:
        raise ArgumentError("P must exceed 1")
    G = _as_step(G)
    lhs = lorentz_norm(G, (P, s))
    denom = G.l1_norm() ** (1.0 / P) * G.sup_norm() ** (1.0 - 1.0 / P)
    ratio = 0.0 if denom == 0 else lhs / denom
    return ConvexityReport(lhs, denom, ratio)


# ---------------------------------------------------------------------------
# randomized battery helper


def random_step_function(rng, max_pieces: int = 6, span: float = 10.0,
                         value_scale: float = 1.0) -> StepFunction:
    """A random step function with disjoint pieces, for inequality batteries."""
    k = int(rng.integers(1, max_pieces + 1))
    edges = np.sort(rng.uniform(0.0, span, size=2 * k))
    starts, ends = edges[0::2], edges[1::2]
    values = value_scale * rng.lognormal(mean=0.0, sigma=1.0, size=k)
    signs = rng.choice([-1.0, 1.0], size=k)
    return StepFunction(starts, ends, values * signs)
