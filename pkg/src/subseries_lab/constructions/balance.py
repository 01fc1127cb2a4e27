"""Splitting a divergent one-signed-tame set into two divergent halves, and
the greedy rule that balances a divergent set against its complement."""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

from .. import kernels
from ..errors import DepthExhausted, PreconditionViolated
from ..series.indexsets import ALL, IndexSet, difference
from ..series.oracle import Provenance
from ..series.streams import PeriodicStream
from ..series.traces import PartialSumTrace
from ..series.verdicts import MINUS, PLUS

DEFAULT_DEPTH = 1_000_000
# blocks this short are re-checked with exact rationals when a float or
# mpmath comparison lands within the tie tolerance
EXACT_BLOCK_LIMIT = 4_000
_TIE = 1e-9


# --------------------------------------------------------------------------
# closed-form prefix sums of |a_n| over a residue-class set
# --------------------------------------------------------------------------

class _ResidueWeights:
    """sum_{n <= K, n in A} |a_n| for a periodic stream on a periodic set."""

    def __init__(self, stream: PeriodicStream, modulus: int, residues):
        L = math.lcm(modulus, stream.period)
        self.L = L
        self.weights = []
        for r in range(1, L + 1):
            if r % modulus not in residues:
                continue
            c = stream.coefficients[r % stream.period]
            if c != 0:
                self.weights.append((r, abs(c), stream.powers[r % stream.period]))
        self.divergent = any(k == 1 for _, _, k in self.weights)

    def F(self, K: int):
        """Prefix sum at the current mpmath precision."""
        L = mpmath.mpf(self.L)
        total = mpmath.mpf(0)
        for r, c, k in self.weights:
            if K < r:
                continue
            T = (K - r) // self.L
            x = mpmath.mpf(r) / L
            if k == 1:
                part = (mpmath.digamma(T + 1 + x) - mpmath.digamma(x)) / L
            else:
                part = (mpmath.zeta(k, x) - mpmath.zeta(k, T + 1 + x)) / L ** k
            total += mpmath.mpf(c.numerator) / c.denominator * part
        return total


def _exact_block_sum(stream, A, lo: int, hi: int) -> Fraction:
    return sum((abs(Fraction(stream.term(n))) for n in range(lo + 1, hi + 1) if A.contains(n)), Fraction(0))


def _analytic_next(w: _ResidueWeights, stream, A, prev: int) -> int:
    """Least k > prev with sum over A n (prev, k] of |a_n| > 1."""
    def excess(k):
        with mpmath.workdps(2 * len(str(k)) + 40):
            return w.F(k) - w.F(prev) - 1

    hi = max(prev + 1, 2 * prev)
    while excess(hi) <= 0:
        hi *= 2
    lo = prev  # excess(lo) <= 0 (empty block at lo == prev)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    k = hi
    if k - prev <= EXACT_BLOCK_LIMIT:
        e_k, e_prev = excess(k), excess(k - 1)
        if abs(e_k) < _TIE or abs(e_prev) < _TIE:
            k = _exact_scan(stream, A, prev, limit=None)
    return k


def _exact_scan(stream, A, prev: int, limit: int | None) -> int:
    s, n = Fraction(0), prev
    while limit is None or n < limit:
        n += 1
        if A.contains(n):
            s += abs(Fraction(stream.term(n)))
            if s > 1:
                return n
    raise DepthExhausted(f"no cutpoint after {prev} within depth {limit}")


class BalanceSchedule:
    """Cutpoints k_1 < k_2 < ... with k_m least such that the block
    A n (k_{m-1}, k_m] has absolute sum > 1.

    Blocks are numbered from 1; the B half consists of the even-numbered
    blocks (k_{2m-1}, k_{2m}], the rest of the odd-numbered ones.
    """

    def __init__(self, A: IndexSet, stream, depth_cap: int = DEFAULT_DEPTH):
        self.A = A
        self.stream = stream
        self.depth_cap = depth_cap
        self.cutpoints: list[int] = []
        self._scanned = 0  # generic path: indices <= _scanned fully examined
        res = A.residues()
        self._weights = None
        if isinstance(stream, PeriodicStream) and res is not None:
            w = _ResidueWeights(stream, *res)
            if not w.divergent:
                raise PreconditionViolated(
                    f"{stream.label} is absolutely convergent on {A.describe()}: no infinite schedule")
            self._weights = w

    @property
    def method(self) -> str:
        return "closed-form" if self._weights is not None else "materialized"

    # ------------------------------------------------------------------
    def _generic_extend(self, depth: int, count: int | None) -> None:
        prev = self.cutpoints[-1] if self.cutpoints else 0
        if depth <= self._scanned:
            return
        a = np.abs(np.asarray(self.stream.values(depth)))
        w = np.where(self.A.mask(depth), a, 0.0)
        while True:
            want = (count - len(self.cutpoints)) if count is not None else depth
            restart = False
            for k in kernels.cutpoints(w, prev, want, 1.0).tolist():
                if k < 0:
                    break
                kv = self._verify_generic(prev, int(k), w)
                self.cutpoints.append(kv)
                prev = kv
                if count is not None and len(self.cutpoints) >= count:
                    return
                if kv != k:
                    restart = True
                    break
            if not restart:
                break
        self._scanned = depth

    def _verify_generic(self, prev, k, w) -> int:
        if not self.stream.exact or k - prev > EXACT_BLOCK_LIMIT:
            return k
        s = float(np.sum(w[prev:k]))
        if abs(s - 1) < _TIE or abs(s - w[k - 1] - 1) < _TIE:
            return _exact_scan(self.stream, self.A, prev, limit=self.depth_cap)
        return k

    def extend_to_count(self, count: int) -> None:
        while len(self.cutpoints) < count:
            if self._weights is not None:
                prev = self.cutpoints[-1] if self.cutpoints else 0
                self.cutpoints.append(_analytic_next(self._weights, self.stream, self.A, prev))
                continue
            if self._scanned >= self.depth_cap:
                raise DepthExhausted(
                    f"only {len(self.cutpoints)} of {count} cutpoints for {self.stream.label} on "
                    f"{self.A.describe()} within depth {self.depth_cap}")
            target = min(self.depth_cap, max(2 * self._scanned, 1024))
            self._generic_extend(target, count)

    def extend_past(self, n: int) -> None:
        """Make the block number of every index <= n known."""
        if self._weights is not None:
            while not self.cutpoints or self.cutpoints[-1] < n:
                prev = self.cutpoints[-1] if self.cutpoints else 0
                self.cutpoints.append(_analytic_next(self._weights, self.stream, self.A, prev))
            return
        if (self.cutpoints and self.cutpoints[-1] >= n) or self._scanned >= n:
            return
        self._generic_extend(n, None)

    def block_numbers(self, depth: int) -> np.ndarray:
        """Block number m of each index 1..depth (k_{m-1} < n <= k_m)."""
        self.extend_past(depth)
        n = np.arange(1, depth + 1)
        return np.searchsorted(np.array(self.cutpoints, dtype=np.int64), n, side="left") + 1

    def block_of(self, n: int) -> int:
        self.extend_past(n)
        return bisect.bisect_left(self.cutpoints, n) + 1

    def block_abs_sum(self, m: int):
        """Absolute sum over block m (mpmath value on the closed-form path)."""
        self.extend_to_count(m)
        lo = self.cutpoints[m - 2] if m > 1 else 0
        hi = self.cutpoints[m - 1]
        if self._weights is not None:
            with mpmath.workdps(2 * len(str(hi)) + 40):
                return self._weights.F(hi) - self._weights.F(lo)
        if hi - lo <= EXACT_BLOCK_LIMIT and self.stream.exact:
            return _exact_block_sum(self.stream, self.A, lo, hi)
        a = np.abs(np.asarray(self.stream.values(hi)))[lo:hi]
        return float(kernels.cumsum(np.where(self.A.mask(hi)[lo:hi], a, 0.0))[-1])

    def intervals(self, parity: int) -> list[tuple[int, int]]:
        """Computed blocks (k_{m-1}, k_m] with m % 2 == parity."""
        out, prev = [], 0
        for m, k in enumerate(self.cutpoints, start=1):
            if m % 2 == parity:
                out.append((prev, k))
            prev = k
        return out

    def to_json(self) -> dict:
        return {
            "set": self.A.describe(),
            "stream": self.stream.label,
            "method": self.method,
            "cutpoints": [str(k) for k in self.cutpoints],
        }


class ScheduleSet(IndexSet):
    """A intersected with the blocks of one parity, continued lazily."""

    def __init__(self, schedule: BalanceSchedule, parity: int, name: str | None = None):
        self.schedule = schedule
        self.parity = parity % 2
        self.name = name

    def key(self):
        s = self.schedule
        return ("schedule", s.A.key(), s.stream.label, self.parity)

    def mask(self, depth):
        m = self.schedule.block_numbers(depth)
        return self.schedule.A.mask(depth) & (m % 2 == self.parity)

    def contains(self, n):
        return self.schedule.A.contains(n) and self.schedule.block_of(n) % 2 == self.parity

    def subset_hint(self):
        return [self.schedule.A]

    def disjoint_hint(self, other) -> bool:
        return (isinstance(other, ScheduleSet) and other.schedule is self.schedule
                and other.parity != self.parity)

    def describe(self):
        if self.name:
            return self.name
        half = "even" if self.parity == 0 else "odd"
        return f"{self.schedule.A.describe()}[{half} blocks of {self.schedule.stream.label}]"


class BalanceSplit(NamedTuple):
    B: ScheduleSet
    rest: ScheduleSet
    schedule: BalanceSchedule


def balance_split(A: IndexSet, stream, blocks: int = 4, depth_cap: int = DEFAULT_DEPTH,
                  oracle=None, names=("B", None)) -> BalanceSplit:
    """B = union of even-numbered blocks inside A, rest = A \\ B.

    Both halves inherit the infinite verdict of A (the absolute block sums
    exceed 1 and A's terms share one sign apart from an absolutely
    convergent part).
    """
    if blocks < 2:
        raise ValueError("blocks must be >= 2")
    verdict = None
    if oracle is not None:
        verdict = oracle.verdict(stream, A)
        if not verdict.is_infinite:
            raise PreconditionViolated(
                f"{stream.label} on {A.describe()} is {verdict.value}, not +-infinity")
    sched = BalanceSchedule(A, stream, depth_cap)
    sched.extend_to_count(blocks)
    B = ScheduleSet(sched, 0, names[0])
    rest = ScheduleSet(sched, 1, names[1])
    if oracle is not None:
        for part in (B, rest):
            oracle.declare(stream, part, verdict, Provenance.PROPAGATED, "balance-split", (A.fingerprint,))
    return BalanceSplit(B, rest, sched)


# --------------------------------------------------------------------------
# greedy balancing
# --------------------------------------------------------------------------

class GreedySet(IndexSet):
    """B: j in B iff j not in A and the strict prefix sum over C u B before j is > 0.

    ``sign = -1`` runs the rule on the negated stream (the mirror case).
    """

    def __init__(self, C: IndexSet, A: IndexSet, stream, sign: int = 1, name: str | None = None):
        self.C, self.A, self.stream, self.sign = C, A, stream, sign
        self.name = name
        self._cache = None

    def key(self):
        return ("greedy", self.C.key(), self.A.key(), self.stream.label, self.sign)

    def run(self, depth: int):
        """(in_b, inclusive sums of C u B in the original stream) up to depth."""
        if self._cache is None or self._cache[0].shape[0] < depth:
            terms = self.sign * np.asarray(self.stream.values(depth))
            in_b, sums = kernels.greedy(terms, self.C.mask(depth), self.A.mask(depth))
            self._cache = (in_b, self.sign * sums)
        in_b, sums = self._cache
        return in_b[:depth], sums[:depth]

    def mask(self, depth):
        return self.run(depth)[0].copy()

    def subset_hint(self):
        return [difference(ALL, self.A)]

    def describe(self):
        return self.name or f"greedy({self.C.describe()} vs {self.A.describe()}, {self.stream.label})"


class GreedyResult(NamedTuple):
    B: GreedySet
    trace: PartialSumTrace
    sign: int


def greedy_balance(C: IndexSet, A: IndexSet, stream, depth: int, oracle=None,
                   mirror: bool | None = None, name: str | None = None) -> GreedyResult:
    """Materialize the greedy rule to ``depth`` and return the trace of C u B.

    The rule compares the strict prefix (indices < j) with 0; the trace is
    inclusive (S(j) covers indices <= j).
    """
    mc, ma = C.mask(depth), A.mask(depth)
    bad = np.flatnonzero(mc & ~ma)
    if bad.size:
        raise PreconditionViolated(f"C is not contained in A: index {int(bad[0]) + 1}")
    sign = -1 if mirror else 1
    if oracle is not None:
        va = oracle.verdict(stream, A)
        vc = oracle.verdict(stream, difference(ALL, A))
        if (va, vc) == (PLUS, MINUS):
            sign = 1
        elif (va, vc) == (MINUS, PLUS):
            sign = -1
        else:
            raise PreconditionViolated(
                f"need opposite infinite verdicts on A and its complement, got {va.value}, {vc.value}")
    B = GreedySet(C, A, stream, sign, name)
    in_b, sums = B.run(depth)
    terms = np.asarray(stream.values(depth))
    trace = PartialSumTrace(depth, mc | in_b, terms, sums, label=stream.label)
    return GreedyResult(B, trace, sign)


def replay_greedy(terms, in_c, in_a) -> np.ndarray:
    """Scalar restatement of the rule with its own compensated running sum."""
    out, s, c = [], 0.0, 0.0
    for t, ic, ia in zip(np.asarray(terms, dtype=float).tolist(), list(in_c), list(in_a)):
        b = (not ia) and (s + c) > 0.0
        out.append(b)
        if ic or b:
            x = s + t
            c += (s - x) + t if abs(s) >= abs(t) else (t - x) + s
            s = x
    return np.array(out, dtype=bool)


def rule_violations(in_b, in_a, inclusive_sums) -> np.ndarray:
    """1-based indices j where (j in B) != (j not in A and S(j-1) > 0)."""
    prev = np.concatenate(([0.0], np.asarray(inclusive_sums)[:-1]))
    want = ~np.asarray(in_a) & (prev > 0)
    return np.flatnonzero(want != np.asarray(in_b)) + 1
