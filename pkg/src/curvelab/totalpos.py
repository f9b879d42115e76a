"""Total positivity of exponential matrices and offspring Jacobian bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curves import (Curve, OffspringSpec, Offspring, cumulative_shifts,
                     strong_nondegeneracy_grid_min, vandermonde)
from .errors import (ArgumentError, DegenerateInput, DomainError,
                     HypothesisViolated, RangeError)
from .rng import generator
from .vandermonde import shift_vandermonde

_MAX_LOG = 700.0


@dataclass(frozen=True)
class ExpMatrixSpec:
    """Nodes for the matrix (e^{a_i s_j}); both vectors strictly increasing."""

    a: tuple[float, ...]
    s: tuple[float, ...]

    def __post_init__(self):
        if len(self.a) != len(self.s) or len(self.a) < 1:
            raise ArgumentError("a and s must have equal positive length")
        for v in (self.a, self.s):
            if any(x >= y for x, y in zip(v, v[1:])) is True or \
               any(not (x < y) for x, y in zip(v, v[1:])):
                raise DegenerateInput("nodes must be strictly increasing")


def tp_ratio(spec: ExpMatrixSpec) -> float:
    """det(e^{a_i s_j}) over the difference products and the rank-one factor.

    The rows and columns are factored by their smallest exponentials
    before the determinant so that only the spread (a_d-a_1)(s_d-s_1)
    must fit the double range.
    """
    a = np.asarray(spec.a, dtype=float)
    s = np.asarray(spec.s, dtype=float)
    d = len(a)
    if d > 8:
        raise ArgumentError("dimension capped at 8")
    if d == 1:
        return 1.0
    spread = (a[-1] - a[0]) * (s[-1] - s[0])
    if spread > _MAX_LOG:
        raise RangeError("node spread overflows the double range")
    M = np.exp(np.outer(a - a[0], s - s[0]))
    sign, logdet = np.linalg.slogdet(M)
    if sign == 0.0:
        return 0.0
    log_diffs = 0.0
    for v in (a, s):
        for i in range(d):
            for j in range(i + 1, d):
                log_diffs += math.log(v[j] - v[i])
    shift = s[0] * a.sum() + a[0] * s.sum() - d * a[0] * s[0]
    log_val = logdet + shift - a.sum() * s.sum() / d - log_diffs
    if log_val > _MAX_LOG:
        raise RangeError("normalized ratio overflows the double range")
    return float(sign * math.exp(log_val))


def tp_ratio_batch(A: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Vectorized tp_ratio over rows of sorted node matrices."""
    A = np.asarray(A, dtype=float)
    S = np.asarray(S, dtype=float)
    m, d = A.shape
    M = np.exp((A - A[:, :1])[:, :, None] * (S - S[:, :1])[:, None, :])
    sign, logdet = np.linalg.slogdet(M)
    log_diffs = np.zeros(m)
    for V in (A, S):
        for i in range(d):
            for j in range(i + 1, d):
                log_diffs += np.log(V[:, j] - V[:, i])
    shift = S[:, 0] * A.sum(axis=1) + A[:, 0] * S.sum(axis=1) - d * A[:, 0] * S[:, 0]
    log_val = logdet + shift - A.sum(axis=1) * S.sum(axis=1) / d - log_diffs
    return sign * np.exp(log_val)


def tp_floor_battery(d: int, trials: int, seed: int, low: float = -3.0,
                     high: float = 3.0) -> dict:
    """Empirical minimum of the normalized determinant over random nodes."""
    rng = generator(seed)
    A = np.sort(rng.uniform(low, high, size=(trials, d)), axis=1)
    S = np.sort(rng.uniform(low, high, size=(trials, d)), axis=1)
    vals = tp_ratio_batch(A, S)
    return {"d": d, "trials": trials, "seed": seed,
            "min": float(vals.min()), "all_positive": bool(np.all(vals > 0))}


# ---------------------------------------------------------------------------
# offspring Jacobians


def offspring_jacobian(curve: Curve, t: float, h) -> float:
    """Determinant of the derivative of (t, h) -> sum_j gamma(t + kappa_j(h)).

    Column reduction shows this equals det(gamma'(t+kappa_1), ...,
    gamma'(t+kappa_d)); the raw partial-derivative matrix is used here and
    the reduction is an identity the tests confirm.
    """
    h = np.atleast_1d(np.asarray(h, dtype=float))
    spec = OffspringSpec(curve, tuple(h))
    kappa = spec.kappa
    lo, hi = curve.domain
    if not (lo < t + kappa[0] and t + kappa[-1] <= hi):
        raise DomainError("offspring parameter outside the base domain")
    d = curve.dimension
    shifted = [np.asarray(curve.derivative(1, t + k), dtype=float) for k in kappa]
    cols = [sum(shifted[j] for j in range(0, d))]
    for i in range(1, d):
        cols.append(sum(shifted[j] for j in range(i, d)))
    return float(np.linalg.det(np.column_stack(cols)))


def shifted_tangent_determinant(curve: Curve, times) -> float:
    """det(gamma'(t_1), ..., gamma'(t_d)) at arbitrary ordered times."""
    times = np.asarray(times, dtype=float)
    cols = [np.asarray(curve.derivative(1, t), dtype=float) for t in times]
    return float(np.linalg.det(np.column_stack(cols)))


def jacobian_weight_floor(curve: Curve, trials: int, seed: int,
                          h_high: float | None = None) -> dict:
    """Empirical floor of J / (v(h) H^{(d+1)/2}) for an exponential curve."""
    if curve.family != "exponential":
        raise ArgumentError("the weight-product bound applies to exponential curves")
    d = curve.dimension
    lo, hi = curve.domain
    if h_high is None:
        h_high = 0.5 * (hi - lo) / (d - 1)
    rng = generator(seed)
    ratios = np.empty(trials)
    for i in range(trials):
        h = rng.uniform(1e-3, h_high, size=d - 1)
        kap_last = float(np.sum(h))
        t = rng.uniform(lo + 1e-6, hi - kap_last - 1e-6)
        J = offspring_jacobian(curve, t, h)
        off = Offspring(OffspringSpec(curve, tuple(h)))
        H = off.weight_product(t)
        ratios[i] = J / (shift_vandermonde(h) * H ** ((d + 1) / 2.0))
    return {"floor": float(ratios.min()), "max": float(ratios.max()),
            "trials": trials, "seed": seed}


# The generalized mean value theorem for d=3 graph curves carries the
# factorial normalization 1/(0! 1! 2!) = 1/2: the moment curve attains
# det(gamma'(t_i)) = (Delta/2) V exactly, so the checkable bound is
# J >= (delta/2) V.
MEAN_VALUE_FACTOR_D3 = 0.5


def check_jacobian_vandermonde_bound(curve, trials: int, seed: int,
                                     delta: float | None = None,
                                     sample_lo: float | None = None,
                                     sample_hi: float | None = None) -> dict:
    """Verify det(gamma'(t_i)) >= (delta/2) V_3(t) on random ordered triples."""
    if curve.dimension != 3:
        raise ArgumentError("the Vandermonde bound check is for d=3")
    lo, hi = curve.domain
    lo = sample_lo if sample_lo is not None else lo + 0.05 * (hi - lo)
    hi = sample_hi if sample_hi is not None else hi
    if delta is None:
        delta = strong_nondegeneracy_grid_min(curve, lo, hi)
    rng = generator(seed)
    worst = math.inf
    ok = True
    for _ in range(trials):
        times = np.sort(rng.uniform(lo, hi, size=3))
        if times[0] == times[1] or times[1] == times[2]:
            continue
        V = vandermonde(times)
        J = abs(shifted_tangent_determinant(curve, times))
        bound = MEAN_VALUE_FACTOR_D3 * delta * V
        ratio = math.inf if bound == 0 else J / bound
        worst = min(worst, ratio)
        if J < bound * (1 - 1e-9):
            ok = False
    return {"passed": ok, "worst_ratio": worst, "delta": delta,
            "trials": trials, "seed": seed}


def injectivity_probe(curve: Curve, trials: int, seed: int,
                      image_tol: float = 1e-9, param_tol: float = 1e-4) -> dict:
    """Search for near-collisions of the mean map on ordered triples.

    Raises HypothesisViolated when the third derivative of the last
    component changes sign on the domain.
    """
    if curve.dimension != 3:
        raise ArgumentError("the probe applies to curves in R^3")
    lo, hi = curve.domain
    probe_lo = lo if curve.admits_left_endpoint() else lo + 1e-6 * (hi - lo)
    ts = np.linspace(probe_lo + 1e-9, hi, 512)
    z3 = np.array([curve.derivative(3, t)[2] for t in ts])
    if np.any(z3 == 0) or (np.min(np.sign(z3)) != np.max(np.sign(z3))):
        raise HypothesisViolated("z''' changes sign on the domain")
    rng = generator(seed)
    T = np.sort(rng.uniform(lo + 1e-6, hi, size=(trials, 3)), axis=1)
    images = (curve.point(T[:, 0]) + curve.point(T[:, 1]) + curve.point(T[:, 2])) / 3.0
    tree = cKDTree(images)
    dist, idx = tree.query(images, k=2)
    nn_dist = dist[:, 1]
    param_dist = np.abs(T - T[idx[:, 1]]).max(axis=1)
    far = param_dist > param_tol
    collisions = int(np.sum(far & (nn_dist < image_tol)))
    nearest = float(nn_dist[far].min()) if np.any(far) else math.inf
    return {"collisions": collisions, "nearest_far_pair_distance": nearest,
            "points": trials, "seed": seed}
