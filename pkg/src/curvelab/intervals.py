"""Finite unions of disjoint half-open intervals with exact measure arithmetic."""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError


class IntervalSet:
    """A finite union of disjoint half-open intervals [a, b).

    Stored as parallel sorted arrays of starts and ends; construction
    normalizes overlapping or touching input intervals.
    """

    __slots__ = ("starts", "ends")

    def __init__(self, pairs=()):
        pairs = [(float(a), float(b)) for a, b in pairs if float(b) > float(a)]
        pairs.sort()
        starts, ends = [], []
        for a, b in pairs:
            if starts and a <= ends[-1]:
                ends[-1] = max(ends[-1], b)
            else:
                starts.append(a)
                ends.append(b)
        self.starts = np.asarray(starts, dtype=float)
        self.ends = np.asarray(ends, dtype=float)

    @staticmethod
    def interval(a: float, b: float) -> "IntervalSet":
        return IntervalSet([(a, b)])

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet()

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.starts)

    def __bool__(self) -> bool:
        return len(self.starts) > 0

    def pairs(self):
        return list(zip(self.starts.tolist(), self.ends.tolist()))

    @property
    def measure(self) -> float:
        return float(np.sum(self.ends - self.starts))

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.starts, t, side="right") - 1
        ok = idx >= 0
        inside = np.zeros(t.shape, dtype=bool)
        valid = np.where(ok)
        if len(self.starts):
            inside[valid] = t[valid] < self.ends[idx[valid]]
        return inside

    # -- arithmetic --------------------------------------------------------

    def translate(self, dt: float) -> "IntervalSet":
        out = IntervalSet()
        out.starts = self.starts + dt
        out.ends = self.ends + dt
        return out

    def scale(self, s: float) -> "IntervalSet":
        if s <= 0:
            raise ArgumentError("scale factor must be positive")
        out = IntervalSet()
        out.starts = self.starts * s
        out.ends = self.ends * s
        return out

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.pairs() + other.pairs())

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a_s, a_e = self.starts, self.ends
        b_s, b_e = other.starts, other.ends
        while i < len(a_s) and j < len(b_s):
            lo = max(a_s[i], b_s[j])
            hi = min(a_e[i], b_e[j])
            if hi > lo:
                out.append((lo, hi))
            if a_e[i] < b_e[j]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntervalSet)
                and np.array_equal(self.starts, other.starts)
                and np.array_equal(self.ends, other.ends))

    def __repr__(self) -> str:
        return "IntervalSet(%s)" % ", ".join(f"[{a}, {b})" for a, b in self.pairs())


def intersect_all(sets) -> IntervalSet:
    sets = list(sets)
    if not sets:
        return IntervalSet()
    acc = sets[0]
    for s in sets[1:]:
        acc = acc.intersect(s)
        if not acc:
            break
    return acc
