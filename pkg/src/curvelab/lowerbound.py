"""Sharpness experiments: dyadic bump sums and frequency-shell sampling.

The moment curve is renormalized so that gamma^(j)(0) = e_j; since the
normalizer is the diagonal map xi_j -> xi_j / j!, the wrapper applies it
to frequencies once and reuses the raw curve everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curves import Curve, critical_exponents
from .errors import ArgumentError, BudgetExceeded, InternalConsistencyError
from .lorentz import StepFunction, lorentz_norm
from .quadrature import (BumpDensity, SumDensity, critical_time,
                         extension_batch)
from .rng import generator
from .vandermonde import MCEstimate


class MomentFrame:
    """Moment curve together with the e_j-normalizing frequency map."""

    def __init__(self, d: int = 3, domain=(0.0, 1.0)):
        self.curve = Curve.moment(d, domain)
        self.d = d
        self.scale = np.array([1.0 / math.factorial(j) for j in range(1, d + 1)])

    def raw_frequency(self, xi):
        return np.asarray(xi, dtype=float) * self.scale

    def pairing(self, j: int, t, xi):
        """<gamma_norm^(j)(t), xi> for the normalized curve."""
        return np.asarray(self.curve.derivative(j, t), dtype=float) @ self.raw_frequency(xi)

    def critical_time(self, xi) -> float:
        return critical_time(self.curve, self.raw_frequency(xi))

    def extension_batch(self, f, xis, cap=None):
        kwargs = {} if cap is None else {"cap": cap}
        raw = np.asarray(xis, dtype=float) * self.scale[None, :]
        return extension_batch(self.curve, f, raw, **kwargs)


# ---------------------------------------------------------------------------
# the bump family


@dataclass(frozen=True)
class BumpFamily:
    """Bumps u_n(t) = 2^{n/q_d} chi(2^n (t - 2^{-n})), n = N+1 .. 2N."""

    N: int
    d: int = 3

    def __post_init__(self):
        if self.N < 2:
            raise ArgumentError("N must be at least 2")

    @property
    def q(self) -> Fraction:
        return critical_exponents(self.d)[1]

    @property
    def levels(self):
        return range(self.N + 1, 2 * self.N + 1)

    def bump(self, n: int) -> BumpDensity:
        return BumpDensity(center=2.0 ** -n, scale=2.0 ** n,
                           amplitude=2.0 ** (n / float(self.q)))

    def density(self) -> SumDensity:
        """f_N as a closed-form evaluator; verifies support disjointness."""
        parts = [self.bump(n) for n in self.levels]
        segs = sorted(seg for p in parts for seg in p.segments())
        for (a1, b1), (a2, b2) in zip(segs, segs[1:]):
            if b1 > a2:
                raise InternalConsistencyError("bump supports overlap")
        return SumDensity(parts)

    def to_step(self, cells_per_bump: int = 2048) -> StepFunction:
        """Cell-constant discretization, one private grid per bump."""
        starts, ends, values = [], [], []
        for n in self.levels:
            b = self.bump(n)
            (lo, hi), = b.segments()
            edges = np.linspace(lo, hi, cells_per_bump + 1)
            mids = 0.5 * (edges[:-1] + edges[1:])
            starts.append(edges[:-1])
            ends.append(edges[1:])
            values.append(np.asarray(b(mids), dtype=float))
        return StepFunction(np.concatenate(starts), np.concatenate(ends),
                            np.concatenate(values))

    def lorentz_norm(self, r: float, cells_per_bump: int = 2048) -> float:
        """Exact Lorentz (q_d, r) norm of the discretized sum.

        The discretization error is controlled by a doubling pass; the
        finer value is returned.
        """
        q = float(self.q)
        coarse = lorentz_norm(self.to_step(cells_per_bump), (q, r))
        fine = lorentz_norm(self.to_step(2 * cells_per_bump), (q, r))
        if abs(fine - coarse) > 1e-2 * max(fine, coarse):
            raise InternalConsistencyError("discretization not converged")
        return fine


# ---------------------------------------------------------------------------
# frequency shells


@dataclass(frozen=True)
class FrequencyShell:
    """Frequencies whose stationary time sits near 2^{-n}, with flat
    lower-order pairings and dominant last coordinate."""

    n: int
    beta: float
    eps: float = 0.01
    dominance: float = 0.25
    d: int = 3

    @property
    def lam(self) -> float:
        q = float(critical_exponents(self.d)[1])
        return 2.0 ** (self.n * self.d / q) * self.beta ** (-self.d)

    def window(self):
        return (0.9 * 2.0 ** -self.n, 1.1 * 2.0 ** -self.n)

    def membership(self, frame: MomentFrame, xi) -> bool:
        xi = np.asarray(xi, dtype=float)
        if np.linalg.norm(xi[:-1]) > self.dominance * abs(xi[-1]):
            return False
        if not (self.lam <= abs(xi[-1]) <= 2.0 * self.lam):
            return False
        try:
            tcr = frame.critical_time(xi)
        except Exception:
            return False
        w_lo, w_hi = self.window()
        if not (w_lo < tcr < w_hi):
            return False
        for j in range(1, self.d - 1):
            if abs(frame.pairing(j, tcr, xi)) > self.eps * self.lam ** (j / self.d):
                return False
        return True


@dataclass
class ShellSample:
    shell: FrequencyShell
    xis: np.ndarray
    accept_rate: float
    measure: MCEstimate
    proposals: int = field(default=0)


def sample_shell(shell: FrequencyShell, frame: MomentFrame, count: int,
                 seed: int, max_batches: int = 64) -> ShellSample:
    """Rejection-sample shell members from a padded analytic proposal box.

    The proposal parametrizes xi by (flatness s, stationary time t, xi_3)
    with Jacobian |xi_3|, so the accepted-mass average times the box
    volume is an unbiased estimate of the shell measure.
    """
    if shell.d != 3 or frame.d != 3:
        raise ArgumentError("the shell sampler is specialized to d=3")
    lam, eps = shell.lam, shell.eps
    w_lo, w_hi = shell.window()
    pad = 0.08
    t_lo, t_hi = w_lo * (1 - pad), w_hi * (1 + pad)
    s_hi = 1.1 * eps * lam ** (1.0 / 3.0)
    u_lo, u_hi = 0.98 * lam, 2.04 * lam
    box_volume = 2.0 * (t_hi - t_lo) * (2.0 * s_hi) * (u_hi - u_lo)

    accepted = []
    weighted = []
    total = 0
    for batch_index in range(max_batches):
        rng = generator(seed, batch_index)
        m = max(4 * count, 1024)
        sign = rng.choice([-1.0, 1.0], size=m)
        u = rng.uniform(u_lo, u_hi, size=m)
        tc = rng.uniform(t_lo, t_hi, size=m)
        s = rng.uniform(-s_hi, s_hi, size=m)
        xi3 = sign * u
        xi2 = -tc * xi3
        xi1 = s + 0.5 * tc ** 2 * xi3
        xis = np.column_stack([xi1, xi2, xi3])
        ok = np.fromiter((shell.membership(frame, x) for x in xis),
                         dtype=bool, count=m)
        weighted.append(np.abs(xi3) * ok)
        accepted.append(xis[ok])
        total += m
        if sum(len(a) for a in accepted) >= count:
            break
    got = np.concatenate(accepted) if accepted else np.empty((0, 3))
    rate = len(got) / total
    if len(got) < count:
        if rate < 1e-6:
            raise BudgetExceeded(f"shell acceptance rate {rate:.2e} too small")
        raise BudgetExceeded(f"only {len(got)} of {count} shell points accepted")
    wvals = np.concatenate(weighted)
    mean = float(wvals.mean()) * box_volume
    hw = 1.96 * float(wvals.std(ddof=1)) / math.sqrt(total) * box_volume
    return ShellSample(shell, got[:count], rate,
                       MCEstimate(mean, hw, total, seed), proposals=total)


# ---------------------------------------------------------------------------
# the growth experiment


def _pairwise_consistent(estimates) -> bool:
    for i in range(len(estimates)):
        for j in range(i + 1, len(estimates)):
            a, b = estimates[i], estimates[j]
            if abs(a.mean - b.mean) > (a.half_width + b.half_width):
                return False
    return True


def growth_experiment(N_values=(2, 3, 4, 5), count: int = 128, seed: int = 0,
                      beta_log2_margin: int = 4, eps: float = 0.01,
                      quad_tol: float = 0.01, cap: int = None) -> dict:
    """Measure the weak-norm growth of the extension of the bump sums.

    For each N the shells are sampled, the extension of f_N is evaluated
    on the union, and the weak-norm lower bound
    ``threshold * (sampled shell mass above threshold)^{1/q}`` is formed.
    The acceptance threshold multiplier is calibrated once, at the
    smallest N, to half the empirical median of |E f_N| / beta.
    """
    frame = MomentFrame(3)
    q = float(critical_exponents(3)[1])
    N_values = sorted(N_values)
    rows = []
    diagnostics = {"membership_ok": True, "disjoint_ok": True,
                   "measure_consistent": True, "per_N": {}}
    c_thresh = None
    for N in N_values:
        fam = BumpFamily(N)
        beta = 2.0 ** -(2 * N + beta_log2_margin)
        shells = []
        for shell_index, n in enumerate(fam.levels):
            shell = FrequencyShell(n=n, beta=beta, eps=eps)
            shells.append(sample_shell(shell, frame, count,
                                       seed=seed + 1000 * N + shell_index))
        # post-hoc membership and pairwise-disjointness checks
        for smp in shells:
            for xi in smp.xis[: min(16, count)]:
                if not smp.shell.membership(frame, xi):
                    diagnostics["membership_ok"] = False
            for other in shells:
                if other.shell.n == smp.shell.n:
                    continue
                for xi in smp.xis[: min(16, count)]:
                    if other.shell.membership(frame, xi):
                        diagnostics["disjoint_ok"] = False
        if not _pairwise_consistent([s.measure for s in shells]):
            diagnostics["measure_consistent"] = False

        # extension of every bump at every shell's sample
        E = {}
        for smp in shells:
            vals = np.zeros(len(smp.xis), dtype=complex)
            per_bump = {}
            for k in fam.levels:
                vk, errs, _ = frame.extension_batch(fam.bump(k), smp.xis, cap=cap)
                if errs.max() > quad_tol * max(beta, float(np.abs(vk).max())):
                    raise InternalConsistencyError(
                        f"quadrature error {errs.max():.2e} too large for bump {k}")
                per_bump[k] = vk
                vals += vk
            E[smp.shell.n] = (vals, per_bump)

        diag_cv = []
        cross_ratio = []
        for smp in shells:
            n = smp.shell.n
            vals, per_bump = E[n]
            diag = np.abs(per_bump[n])
            diag_cv.append(float(diag.std() / diag.mean()))
            diag_median = float(np.median(diag))
            for k in fam.levels:
                if k != n:
                    cross_ratio.append(
                        float(np.median(np.abs(per_bump[k]))) / diag_median)
        if c_thresh is None:
            med = np.median(np.concatenate([np.abs(E[s.shell.n][0]) for s in shells]))
            c_thresh = 0.5 * float(med) / beta
        mass = 0.0
        for smp in shells:
            vals, _ = E[smp.shell.n]
            frac = float(np.mean(np.abs(vals) >= c_thresh * beta))
            mass += smp.measure.mean * frac
        weak_lb = c_thresh * beta * mass ** (1.0 / q)
        rows.append({
            "N": N, "beta": beta, "threshold": c_thresh * beta,
            "shell_mass": mass, "weak_norm_lb": weak_lb,
            "diag_cv_max": max(diag_cv), "cross_ratio_max":
                max(cross_ratio) if cross_ratio else 0.0,
            "accept_rate_min": min(s.accept_rate for s in shells),
        })
        diagnostics["per_N"][N] = {
            "measures": [(s.measure.mean, s.measure.half_width) for s in shells],
        }
    return {"rows": rows, "threshold_multiplier": c_thresh,
            "diagnostics": diagnostics}
