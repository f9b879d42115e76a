"""Oscillation-adaptive panel quadrature for extension-operator integrals.

Panels are sized so the first-order phase variation per panel stays below
pi/2, then each panel gets an order-12 Gauss-Legendre rule.  Near
stationary points the panels shrink geometrically down to a relative
width floor of 2^-40.  One halving pass supplies the error estimate; the
refined value is returned.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curves import Curve
from .errors import ArgumentError, BudgetExceeded, NoCriticalPoint

GL_ORDER = 12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
DEFAULT_PANEL_CAP = 2 ** 22
_PANEL_SAFETY = 1.15
_WIDTH_FLOOR_REL = 2.0 ** -40


@dataclass(frozen=True)
class OscResult:
    """Value of an oscillatory integral plus a refinement-based error bar."""

    value: complex
    abs_error_estimate: float
    panels_used: int


# ---------------------------------------------------------------------------
# densities


def smoothstep(x):
    """C-infinity ramp: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    out[x >= 1.0] = 1.0
    mid = (x > 0.0) & (x < 1.0)
    xm = x[mid]
    with np.errstate(over="ignore", divide="ignore"):
        a = np.exp(-1.0 / xm)
        b = np.exp(-1.0 / (1.0 - xm))
    out[mid] = a / (a + b)
    return out


def bump_profile(u):
    """The cutoff chi: supported in (-1/8, 1/8), equal to 1 on [-1/10, 1/10]."""
    u = np.asarray(u, dtype=float)
    return smoothstep((0.125 - np.abs(u)) / (0.125 - 0.1))


class Density:
    """Base class: an integrable density with known support segments."""

    def segments(self):
        raise NotImplementedError

    def support(self):
        segs = self.segments()
        return (min(a for a, _ in segs), max(b for _, b in segs))

    def __call__(self, t):
        raise NotImplementedError


class BumpDensity(Density):
    """amplitude * chi(scale * (t - center)) with the standard profile.

    Support is (center - 1/(8 scale), center + 1/(8 scale)); the plateau
    where the value equals ``amplitude`` covers the middle four fifths.
    """

    def __init__(self, center: float = 0.0, scale: float = 1.0, amplitude: float = 1.0):
        if scale <= 0:
            raise ArgumentError("scale must be positive")
        self.center = float(center)
        self.scale = float(scale)
        self.amplitude = float(amplitude)

    def segments(self):
        half = 0.125 / self.scale
        return [(self.center - half, self.center + half)]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * bump_profile(self.scale * (t - self.center))


class GridDensity(Density):
    """Cell-constant density backed by a uniform grid of samples."""

    def __init__(self, origin: float, spacing: float, values):
        from .lorentz import GridFunction

        self.grid = GridFunction(origin, spacing, np.asarray(values, dtype=complex))

    def segments(self):
        g = self.grid
        n = len(g.values)
        edges = g.origin + g.spacing * np.arange(n + 1)
        return [(edges[i], edges[i + 1]) for i in range(n)]

    def __call__(self, t):
        g = self.grid
        t = np.asarray(t, dtype=float)
        idx = np.floor((t - g.origin) / g.spacing).astype(int)
        ok = (idx >= 0) & (idx < len(g.values))
        out = np.zeros(t.shape, dtype=complex)
        out[ok] = g.values[idx[ok]]
        return out


class SumDensity(Density):
    """Sum of densities with pairwise-disjoint supports."""

    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise ArgumentError("need at least one part")

    def segments(self):
        segs = []
        for p in self.parts:
            segs.extend(p.segments())
        return sorted(segs)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for p in self.parts:
            out = out + p(t)
        return out


# ---------------------------------------------------------------------------
# panel construction


def build_panels(speed_fn, a: float, b: float, cap: int = DEFAULT_PANEL_CAP):
    """Partition [a, b] so that max|phase'| * width <= pi/2 on each panel.

    Returns (edges, capped).  ``capped`` is True when the budget ran out
    before the rule was satisfied everywhere; the returned partition is
    then the best one within budget.
    """
    if b <= a:
        raise ArgumentError("empty panel interval")
    floor = (b - a) * _WIDTH_FLOOR_REL
    lo = np.array([a])
    hi = np.array([b])
    done = []
    total_done = 0
    offs = np.linspace(0.0, 1.0, 9)
    for _ in range(64):
        if len(lo) == 0:
            break
        widths = hi - lo
        ts = (lo[:, None] + widths[:, None] * offs[None, :]).ravel()
        speeds = np.asarray(speed_fn(ts), dtype=float).reshape(len(lo), 9)
        smax = speeds.max(axis=1)
        need = np.ceil(smax * widths * _PANEL_SAFETY / (0.5 * math.pi)).astype(np.int64)
        need = np.maximum(need, 1)
        ok = (need <= 1) | (widths <= floor)
        done.append((lo[ok], hi[ok]))
        total_done += int(ok.sum())
        lo, hi, need = lo[~ok], hi[~ok], need[~ok]
        if len(lo) == 0:
            break
        split = np.minimum(need, 8)
        if total_done + int(split.sum()) > cap:
            done.append((lo, hi))
            return _assemble_edges(done), True
        reps = np.repeat(np.arange(len(lo)), split)
        frac_hi = np.concatenate([np.arange(1, k + 1) / k for k in split])
        frac_lo = np.concatenate([np.arange(0, k) / k for k in split])
        widths = hi - lo
        new_lo = lo[reps] + widths[reps] * frac_lo
        new_hi = lo[reps] + widths[reps] * frac_hi
        lo, hi = new_lo, new_hi
    if len(lo):
        done.append((lo, hi))
    return _assemble_edges(done), False


def _assemble_edges(done):
    los = np.concatenate([d[0] for d in done])
    his = np.concatenate([d[1] for d in done])
    return np.unique(np.concatenate([los, his]))


def _halve(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    return np.sort(np.concatenate([edges, mids]))


def gl_nodes_weights(edges: np.ndarray):
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    weights = (half[:, None] * _GL_W[None, :]).ravel()
    return nodes, weights


def _integrate(integrand, edges: np.ndarray) -> complex:
    nodes, weights = gl_nodes_weights(edges)
    return complex(np.sum(weights * integrand(nodes)))


# ---------------------------------------------------------------------------
# the extension operator


def _check_support(curve: Curve, f: Density):
    lo, hi = curve.domain
    s_lo, s_hi = f.support()
    if s_lo < lo - 1e-15 or s_hi > hi + 1e-15:
        raise ArgumentError("density support must lie inside the curve domain")


def extension(curve: Curve, f: Density, xi, tol: float = 1e-8,
              cap: int = DEFAULT_PANEL_CAP) -> OscResult:
    """E f(xi) = integral of f(t) exp(-i <xi, gamma(t)>) dt.

    The returned value carries one extra refinement; the error estimate
    is the difference between the last two refinement levels.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (curve.dimension,) or not np.all(np.isfinite(xi)):
        raise ArgumentError("xi must be a finite vector matching the curve dimension")
    _check_support(curve, f)

    def speed(t):
        return np.abs(curve.derivative(1, t) @ xi)

    def integrand(t):
        return f(t) * np.exp(-1j * (curve.point(t) @ xi))

    return _adaptive(integrand, speed, f.segments(), tol, cap)


def _adaptive(integrand, speed, segments, tol, cap) -> OscResult:
    all_edges = []
    capped = False
    for a, b in segments:
        edges, seg_capped = build_panels(speed, a, b, cap=cap)
        capped = capped or seg_capped
        all_edges.append(edges)
    value = sum(_integrate(integrand, e) for e in all_edges)
    panels = sum(len(e) - 1 for e in all_edges)
    if capped:
        raise BudgetExceeded(
            f"panel budget {cap} exhausted",
            partial=OscResult(value, math.inf, panels))
    err = math.inf
    for _ in range(4):
        refined = [_halve(e) for e in all_edges]
        new_value = sum(_integrate(integrand, e) for e in refined)
        err = abs(new_value - value)
        value = new_value
        all_edges = refined
        panels = sum(len(e) - 1 for e in all_edges)
        if err <= tol or panels * 2 > cap:
            break
    return OscResult(value, err, panels)


def extension_batch(curve: Curve, f: Density, xis,
                    cap: int = DEFAULT_PANEL_CAP, max_block: int = 2 ** 24):
    """Evaluate the extension at many frequencies on one shared panel grid.

    The grid is sized for the fastest phase in the batch, so every row
    meets the panel rule.  Returns (values, error_estimates, panels_used).
    """
    xis = np.asarray(xis, dtype=float)
    if xis.ndim != 2 or xis.shape[1] != curve.dimension:
        raise ArgumentError("xis must have shape (m, d)")
    if not np.all(np.isfinite(xis)):
        raise ArgumentError("frequencies must be finite")
    _check_support(curve, f)

    def speed(t):
        d1 = curve.derivative(1, np.asarray(t))
        return np.abs(xis @ d1.T).max(axis=0)

    edges_per_seg = []
    for a, b in f.segments():
        edges, capped = build_panels(speed, a, b, cap=cap)
        if capped:
            raise BudgetExceeded(f"panel budget {cap} exhausted in batch grid")
        edges_per_seg.append(edges)

    def run(edge_list):
        m = len(xis)
        vals = np.zeros(m, dtype=complex)
        for edges in edge_list:
            nodes, weights = gl_nodes_weights(edges)
            wf = weights * f(nodes)
            gamma = curve.point(nodes)
            chunk = max(1, max_block // max(len(nodes), 1))
            for i in range(0, m, chunk):
                block = xis[i:i + chunk] @ gamma.T
                vals[i:i + chunk] += np.exp(-1j * block) @ wf
        return vals

    coarse = run(edges_per_seg)
    refined_edges = [_halve(e) for e in edges_per_seg]
    fine = run(refined_edges)
    errors = np.abs(fine - coarse)
    panels = sum(len(e) - 1 for e in refined_edges)
    return fine, errors, panels


# ---------------------------------------------------------------------------
# stationary-phase constants


_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_lanczos(x: float) -> float:
    """Gamma(x) for x > 0 via the Lanczos approximation (g=7)."""
    if x <= 0:
        raise ArgumentError("argument must be positive")
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma_lanczos(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def stationary_phase_constant(k: int) -> complex:
    """The leading coefficient of the s^k phase asymptotics.

    Real (2/k) Gamma(1/k) sin((k-1)pi/(2k)) for odd k and the complex
    (2/k) Gamma(1/k) exp(i pi/(2k)) for even k.
    """
    if k < 2 or int(k) != k:
        raise ArgumentError("k must be an integer >= 2")
    k = int(k)
    g = gamma_lanczos(1.0 / k)
    if k % 2 == 1:
        return complex((2.0 / k) * g * math.sin((k - 1) * math.pi / (2.0 * k)), 0.0)
    return (2.0 / k) * g * cmath.exp(1j * math.pi / (2.0 * k))


# ---------------------------------------------------------------------------
# the model oscillatory integral


def polynomial_phase_integral(eta: Density, lam: float, x, k: int, g=None,
                              eps: float = 0.01, tol: float = 1e-10,
                              cap: int = DEFAULT_PANEL_CAP) -> OscResult:
    """integral of eta(s) exp(i lam (sum x_j s^j + s^k + g(s) s^{k+1})) ds.

    The shift sizes must obey |x_j| <= eps * lam^{(j-k)/k}; violating that
    hypothesis raises ArgumentError, which is how experiment code enforces
    the window in which the asymptotics apply.
    """
    if lam <= 2:
        raise ArgumentError("lam must exceed 2")
    if k < 2 or int(k) != k:
        raise ArgumentError("k must be an integer >= 2")
    x = [float(v) for v in x]
    if len(x) != k - 2:
        raise ArgumentError(f"need {k - 2} shift coefficients for k={k}")
    for j, v in enumerate(x, start=1):
        if abs(v) > eps * lam ** ((j - k) / k) * (1 + 1e-12):
            raise ArgumentError(f"|x_{j}| exceeds eps * lam^({j}-{k})/{k}")

    def phase(s):
        s = np.asarray(s, dtype=float)
        acc = np.zeros(s.shape)
        for j, v in enumerate(x, start=1):
            acc += v * s ** j
        acc += s ** k
        if g is not None:
            acc += np.asarray(g(s), dtype=float) * s ** (k + 1)
        return lam * acc

    delta = 1e-7

    def speed(s):
        s = np.asarray(s, dtype=float)
        return np.abs(phase(s + delta) - phase(s - delta)) / (2 * delta)

    def integrand(s):
        return eta(s) * np.exp(1j * phase(s))

    return _adaptive(integrand, speed, eta.segments(), tol, cap)


# ---------------------------------------------------------------------------
# stationary parameter


DOMINANCE_RATIO = 0.25


def dominated(xi, ratio: float = DOMINANCE_RATIO) -> bool:
    """Whether the last coordinate dominates: |xi'| <= ratio * |xi_d|."""
    xi = np.asarray(xi, dtype=float)
    return bool(np.linalg.norm(xi[:-1]) <= ratio * abs(xi[-1]))


def critical_time(curve: Curve, xi, tol: float = 1e-12) -> float:
    """Root of <gamma^{(d-1)}(t), xi> = 0 via bisection plus Newton polish.

    Uniqueness of the root is only guaranteed when the last coordinate
    dominates (see ``dominated``); otherwise the first bracketed root in
    the domain is returned.
    """
    xi = np.asarray(xi, dtype=float)
    d = curve.dimension
    if xi.shape != (d,) or not np.all(np.isfinite(xi)):
        raise ArgumentError("xi must be a finite d-vector")
    lo, hi = curve.domain
    if not curve.admits_left_endpoint():
        lo = lo + 1e-12 * (hi - lo)

    def fn(t):
        return curve.derivative(d - 1, t) @ xi

    ts = np.linspace(lo, hi, 513)
    vals = fn(ts)
    zero = np.where(vals == 0.0)[0]
    if len(zero):
        return float(ts[zero[0]])
    signs = np.sign(vals)
    flips = np.where(signs[:-1] * signs[1:] < 0)[0]
    if len(flips) == 0:
        raise NoCriticalPoint("no sign change of the stationarity equation in the domain")
    a, b = float(ts[flips[0]]), float(ts[flips[0] + 1])
    fa = fn(a)
    for _ in range(100):
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0.0 or (b - a) < tol:
            a = b = m
            break
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    root = 0.5 * (a + b)
    for _ in range(3):
        fr = float(fn(root))
        dfr = float(curve.derivative(d, root) @ xi)
        if dfr == 0.0:
            break
        step = fr / dfr
        cand = root - step
        if not (lo <= cand <= hi):
            break
        root = cand
        if abs(step) < tol:
            break
    return float(root)
