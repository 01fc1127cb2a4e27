"""Partial-sum traces and finite-prefix heuristics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import kernels
from .verdicts import MINUS, OSC, PLUS, UNKNOWN, Verdict

# Exact traces keep one big integer per prefix; beyond this the common
# denominator has tens of thousands of digits and floats take over.
EXACT_DEPTH_LIMIT = 20_000


@dataclass
class PartialSumTrace:
    """S(j) = sum of a_n over n in A with n <= j, for j = 1..depth.

    Exact traces store integer numerators over one common denominator;
    float traces store compensated sums.
    """

    depth: int
    in_a: np.ndarray
    terms: np.ndarray
    float_sums: np.ndarray
    numerators: list | None = None
    denominator: int | None = None
    label: str = ""
    scaled: list | None = field(default=None, repr=False)
    _extrema: tuple | None = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return self.numerators is not None

    def S(self, j: int):
        """S(j) for 1 <= j <= depth; S(0) = 0."""
        if j == 0:
            return Fraction(0) if self.exact else 0.0
        if self.exact:
            return Fraction(self.numerators[j - 1], self.denominator)
        return float(self.float_sums[j - 1])

    @property
    def final(self):
        return self.S(self.depth)

    def sums(self) -> list:
        if self.exact:
            return [Fraction(t, self.denominator) for t in self.numerators]
        return self.float_sums.tolist()

    @property
    def extrema(self) -> tuple:
        """(min, argmin, max, argmax) with 1-based indices."""
        if self._extrema is None:
            s = self.float_sums
            i, k = int(np.argmin(s)), int(np.argmax(s))
            self._extrema = (float(s[i]), i + 1, float(s[k]), k + 1)
        return self._extrema

    def running_max(self) -> np.ndarray:
        return np.maximum.accumulate(self.float_sums)

    def running_min(self) -> np.ndarray:
        return np.minimum.accumulate(self.float_sums)

    def crossings(self, threshold: float, margin: float = 0.0) -> list:
        return crossings(self.float_sums, threshold, margin)

    def checkpoint_values(self, checkpoints) -> list:
        return [self.S(j) for j in checkpoints]

    def increments_match(self) -> bool:
        """S(j) - S(j-1) equals a_j inside A and 0 outside."""
        if self.exact:
            prev = 0
            for j, t in enumerate(self.numerators):
                d = t - prev
                prev = t
                want = self.scaled[j] if self.in_a[j] else 0
                if d != want:
                    return False
            return True
        d = np.diff(np.concatenate(([0.0], self.float_sums)))
        want = np.where(self.in_a, self.terms, 0.0)
        return bool(np.allclose(d, want, rtol=0, atol=1e-12))

    def write_csv(self, path, every: int | None = None, checkpoints=None):
        """Header ``j,in_A,term,S``; all rows, every k-th row, or chosen checkpoints."""
        rows = _row_indices(self.depth, every, checkpoints)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j", "in_A", "term", "S"])
            for j in rows:
                if self.exact:
                    term, total = Fraction(self.scaled[j - 1], self.denominator), self.S(j)
                    w.writerow([j, int(bool(self.in_a[j - 1])), str(term), str(total)])
                else:
                    w.writerow([j, int(bool(self.in_a[j - 1])), repr(float(self.terms[j - 1])),
                                repr(self.S(j))])

    def to_json(self, checkpoints=None) -> dict:
        cps = [c for c in (checkpoints or decade_checkpoints(self.depth)) if c <= self.depth]
        lo, ilo, hi, ihi = self.extrema
        return {
            "label": self.label,
            "depth": self.depth,
            "exact": self.exact,
            "final": str(self.final) if self.exact else float(self.final),
            "min": lo, "argmin": ilo, "max": hi, "argmax": ihi,
            "checkpoints": {str(c): float(self.S(c)) for c in cps},
        }


def _row_indices(depth, every, checkpoints):
    if checkpoints is not None:
        return [c for c in checkpoints if 1 <= c <= depth]
    if every:
        rows = list(range(every, depth + 1, every))
        if not rows or rows[-1] != depth:
            rows.append(depth)
        return rows
    return range(1, depth + 1)


def partial_sum_trace(stream, A, depth: int, exact: bool | None = None) -> PartialSumTrace:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    in_a = np.asarray(A.mask(depth), dtype=bool)
    terms = np.asarray(stream.values(depth))
    if exact is None:
        exact = stream.exact and depth <= EXACT_DEPTH_LIMIT
    if exact:
        nums, d = stream.scaled_terms(depth)
        out, s = [], 0
        for t, inside in zip(nums, in_a.tolist()):
            if inside:
                s += t
            out.append(s)
        # int / int true division is correctly rounded for any size
        floats = np.array([t / d for t in out], dtype=np.float64)
        return PartialSumTrace(depth, in_a, terms, floats, out, d, stream.label, scaled=nums)
    sums = kernels.cumsum(np.where(in_a, terms, 0.0))
    return PartialSumTrace(depth, in_a, terms, sums, label=stream.label)


def trace_from_sums(sums, in_a, terms, label="") -> PartialSumTrace:
    sums = np.asarray(sums, dtype=np.float64)
    return PartialSumTrace(sums.shape[0], np.asarray(in_a, dtype=bool), np.asarray(terms), sums, label=label)


# --------------------------------------------------------------------------
# empirical heuristics
# --------------------------------------------------------------------------

def decade_checkpoints(depth: int) -> list[int]:
    out, c = [], 10
    while c <= depth:
        out.append(c)
        c *= 10
    return out


@dataclass(frozen=True)
class TrendPolicy:
    threshold: float = 2.0
    margin: float = 0.5
    checkpoints: tuple | None = None

    def checkpoints_for(self, depth: int) -> list[int]:
        cps = self.checkpoints if self.checkpoints is not None else decade_checkpoints(depth)
        return [c for c in cps if c <= depth]


def crossings(sums, threshold: float, margin: float = 0.0) -> list:
    """Hysteresis crossings of +threshold (direction +1) and -threshold (-1).

    After an upward crossing of +T the detector re-arms only once the sum has
    dropped below T - margin again (and symmetrically for -T).
    """
    s = np.asarray(sums, dtype=np.float64)
    events = []
    for sign in (+1, -1):
        v = sign * s
        state = np.where(v > threshold, 1, np.where(v < threshold - margin, -1, 0))
        nz = np.flatnonzero(state)
        vals = state[nz]
        change = np.ones(vals.shape[0], dtype=bool)
        change[1:] = vals[1:] != vals[:-1]
        for i in nz[change & (vals == 1)].tolist():
            events.append((sign * threshold, i + 1, sign))
    events.sort(key=lambda e: e[1])
    return events


def _one_sided(s, cps_vals, T, margin, events, sign) -> bool:
    v = sign * s
    if not v[-1] > T:
        return False
    ups = [e[1] for e in events if e[2] == sign]
    if not ups:
        return False
    if np.min(v[ups[-1] - 1:]) < T - margin:
        return False
    vals = [sign * x for x in cps_vals]
    return len(vals) >= 2 and all(b > a for a, b in zip(vals, vals[1:]))


def empirical_verdict(trace: PartialSumTrace, policy: TrendPolicy = TrendPolicy()) -> Verdict:
    """Finite-prefix classification; never claims convergence."""
    s = trace.float_sums
    T, margin = policy.threshold, policy.margin
    events = crossings(s, T, margin)
    signs = [e[2] for e in events]
    if any(a != b for a, b in zip(signs, signs[1:])):
        return OSC
    cps_vals = [float(trace.S(c)) for c in policy.checkpoints_for(trace.depth)]
    if _one_sided(s, cps_vals, T, margin, events, +1):
        return PLUS
    if _one_sided(s, cps_vals, T, margin, events, -1):
        return MINUS
    return UNKNOWN


def growth_verdict(trace: PartialSumTrace, checkpoints=None, ratio: float = 0.5):
    """Decide a one-signed subseries from the shape of its growth.

    Harmonic-type divergence adds a roughly constant amount per decade, while
    a p-series with p > 1 adds a geometrically shrinking amount.  Returns
    PlusInfinity / MinusInfinity when the last per-decade increment is at
    least ``ratio`` times the previous one, None when the increments shrink
    (the caller treats that as presumed absolute convergence).
    """
    cps = checkpoints or decade_checkpoints(trace.depth)
    cps = [c for c in cps if c <= trace.depth]
    if len(cps) < 3:
        raise ValueError("growth_verdict needs at least three checkpoints")
    vals = [float(trace.S(c)) for c in cps]
    inc = [b - a for a, b in zip(vals, vals[1:])]
    last, prev = inc[-1], inc[-2]
    if last == 0 or prev == 0 or (last > 0) != (prev > 0):
        return None
    if abs(last) >= ratio * abs(prev):
        return PLUS if last > 0 else MINUS
    return None


def envelope_start(trace: PartialSumTrace, eps: float):
    """Least N with -2 eps < S(j) < 3 eps for all N <= j <= depth, or None."""
    s = trace.float_sums
    bad = np.flatnonzero((s <= -2 * eps) | (s >= 3 * eps))
    if bad.size == 0:
        return 1
    n = int(bad[-1]) + 2
    return n if n <= trace.depth else None


def harmonic_reference(k: int) -> float:
    """H_k via the asymptotic expansion; used only in diagnostics."""
    return math.log(k) + 0.5772156649015329 + 1 / (2 * k) - 1 / (12 * k * k)
