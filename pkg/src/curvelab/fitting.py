"""Log-log least squares for exponent fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


@dataclass(frozen=True)
class FitResult:
    slope: float
    stderr: float
    r_squared: float
    intercept: float


def fit_exponent(pairs) -> FitResult:
    """Ordinary least squares of log y against log x.

    Needs at least three strictly positive pairs.  A perfect power law
    yields stderr 0 and r^2 = 1; constant data yields slope 0.
    """
    pts = [(float(x), float(y)) for x, y in pairs]
    if len(pts) < 3:
        raise ArgumentError("need at least three points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ArgumentError("points must be strictly positive")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    n = len(pts)
    mx, my = lx.mean(), ly.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    if sxx == 0.0:
        raise ArgumentError("x values must not be all equal")
    slope = float(np.sum((lx - mx) * (ly - my)) / sxx)
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((ly - my) ** 2))
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else 0.0
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope, stderr, r2, intercept)
