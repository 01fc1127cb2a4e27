"""Four conditionally convergent series that no single index set sends to infinity.

The integers are cut into consecutive blocks I_1, I_2, ... of even lengths
b_m.  Inside a block every series has constant magnitude and alternates in
sign with the parity of n, so any subseries sum over a block depends only on
how many odd and even positions were picked.  All arithmetic here is exact
and works block by block; indices are only materialized for small blocks.
"""

from __future__ import annotations

import bisect
import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import OutOfRange
from .series.streams import FunctionStream
from .series.verdicts import COND


class RecurrenceMode(str, enum.Enum):
    PAPER = "paper"    # b_{m+1} >= m^3 (1 + b_1 + ... + b_m)
    STRICT = "strict"  # b_{m+1} >= (m+1)^3 (1 + b_1 + ... + b_m)


def _least_even_at_least(x: int) -> int:
    return x if x % 2 == 0 else x + 1


@dataclass(frozen=True)
class BlockTable:
    mode: RecurrenceMode
    lengths: tuple

    @property
    def M(self) -> int:
        return len(self.lengths)

    @property
    def ends(self) -> tuple:
        out, s = [], 0
        for b in self.lengths:
            s += b
            out.append(s)
        return tuple(out)

    @property
    def total(self) -> int:
        return sum(self.lengths)

    def b(self, m: int) -> int:
        return self.lengths[m - 1]

    def interval(self, m: int) -> tuple[int, int]:
        """I_m as the half-open range (lo, hi]."""
        if not 1 <= m <= self.M:
            raise OutOfRange(f"block {m} outside 1..{self.M}")
        ends = self.ends
        return (ends[m - 2] if m > 1 else 0), ends[m - 1]

    def block_of(self, n: int) -> int:
        if not 1 <= n <= self.total:
            raise OutOfRange(f"index {n} outside the table range 1..{self.total}")
        return bisect.bisect_left(self.ends, n) + 1

    def to_json(self) -> dict:
        return {"mode": self.mode.value, "b": [str(b) for b in self.lengths]}


def b_sequence(M: int, mode=RecurrenceMode.PAPER) -> BlockTable:
    """Minimal even block lengths satisfying the chosen recurrence."""
    mode = RecurrenceMode(mode)
    if M < 1:
        raise ValueError("M must be >= 1")
    b = [2]
    while len(b) < M:
        m = len(b)
        factor = m if mode is RecurrenceMode.PAPER else m + 1
        b.append(_least_even_at_least(factor ** 3 * (1 + sum(b))))
    return BlockTable(mode, tuple(b))


def cx_term(i: int, n: int, table: BlockTable) -> Fraction:
    if i not in (1, 2, 3, 4):
        raise ValueError("series index must be 1..4")
    m = table.block_of(n)
    sign = 1 if n % 2 else -1
    odd_block = m % 2 == 1
    if i == 1:
        return Fraction(sign, m)
    if i == 2:
        return Fraction(sign if odd_block else -sign, m)
    if i == 3:
        return Fraction(sign, table.b(m)) if odd_block else Fraction(0)
    return Fraction(0) if odd_block else Fraction(sign, table.b(m))


# --------------------------------------------------------------------------
# selections and block sums
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockSelection:
    """Per-block (odd picks, even picks), optionally with explicit indices."""

    counts: tuple
    indices: tuple | None = None

    @classmethod
    def from_indices(cls, indices, table: BlockTable) -> "BlockSelection":
        counts = [[0, 0] for _ in range(table.M)]
        idx = sorted(set(int(n) for n in indices))
        for n in idx:
            counts[table.block_of(n) - 1][0 if n % 2 else 1] += 1
        return cls(tuple(tuple(c) for c in counts), tuple(idx))

    def validate(self, table: BlockTable) -> None:
        if len(self.counts) > table.M:
            raise OutOfRange("selection has more blocks than the table")
        for m, (o, e) in enumerate(self.counts, start=1):
            half = table.b(m) // 2
            if not (0 <= o <= half and 0 <= e <= half):
                raise ValueError(f"block {m}: picks ({o}, {e}) exceed b_m/2 = {half}")

    def picks(self, m: int) -> tuple[int, int]:
        return self.counts[m - 1] if m <= len(self.counts) else (0, 0)

    def to_json(self) -> dict:
        return {"counts": [[str(o), str(e)] for o, e in self.counts]}


def delta(m: int, sel: BlockSelection) -> int:
    o, e = sel.picks(m)
    return o - e


def block_sum(i: int, m: int, sel: BlockSelection, table: BlockTable) -> Fraction:
    d = delta(m, sel)
    odd_block = m % 2 == 1
    if i == 1:
        return Fraction(d, m)
    if i == 2:
        return Fraction(d if odd_block else -d, m)
    if i == 3:
        return Fraction(d, table.b(m)) if odd_block else Fraction(0)
    if i == 4:
        return Fraction(0) if odd_block else Fraction(d, table.b(m))
    raise ValueError("series index must be 1..4")


def block_sum_bruteforce(i: int, m: int, sel: BlockSelection, table: BlockTable) -> Fraction:
    """Term-by-term sum over the explicit indices of block m."""
    if sel.indices is None:
        raise ValueError("selection carries no explicit indices")
    lo, hi = table.interval(m)
    return sum((cx_term(i, n, table) for n in sel.indices if lo < n <= hi), Fraction(0))


def witness_odds(M: int, table: BlockTable | None = None) -> BlockSelection:
    """All odd positions of every block (the set of odd integers)."""
    table = table or b_sequence(M)
    return BlockSelection(tuple((table.b(m) // 2, 0) for m in range(1, M + 1)))


def empty_selection(M: int) -> BlockSelection:
    return BlockSelection(tuple((0, 0) for _ in range(M)))


def random_selection(table: BlockTable, rng: random.Random, M: int | None = None) -> BlockSelection:
    M = M or table.M
    counts = []
    for m in range(1, M + 1):
        half = table.b(m) // 2
        counts.append((rng.randint(0, half), rng.randint(0, half)))
    return BlockSelection(tuple(counts))


def random_explicit_selection(table: BlockTable, rng: random.Random, M: int) -> BlockSelection:
    lo, hi = 0, table.ends[M - 1]
    return BlockSelection.from_indices([n for n in range(lo + 1, hi + 1) if rng.random() < 0.5], table)


def boundary_sums(sel: BlockSelection, i: int, M: int, table: BlockTable) -> list[Fraction]:
    out, s = [], Fraction(0)
    for m in range(1, M + 1):
        s += block_sum(i, m, sel, table)
        out.append(s)
    return out


@dataclass(frozen=True)
class Crossing:
    block: int
    boundary_sum: Fraction
    level: Fraction
    direction: int  # +1 upward, -1 downward

    def to_json(self) -> dict:
        return {"block": self.block, "boundary_sum": str(self.boundary_sum),
                "level": str(self.level), "direction": self.direction}


@dataclass(frozen=True)
class OscillationReport:
    series: int
    threshold: Fraction
    boundary_sums: tuple
    crossings: tuple

    def crossed(self, level, direction=None) -> list:
        level = Fraction(level)
        return [c for c in self.crossings if c.level == level and (direction is None or c.direction == direction)]

    @property
    def oscillates(self) -> bool:
        return bool(self.crossed(self.threshold, +1)) and bool(self.crossed(-self.threshold, -1))

    def to_json(self) -> dict:
        return {
            "series": self.series,
            "threshold": str(self.threshold),
            "boundary_sums": [str(s) for s in self.boundary_sums],
            "crossings": [c.to_json() for c in self.crossings],
            "oscillates": self.oscillates,
        }


def oscillation_report(sel: BlockSelection, i: int, M: int, threshold, table: BlockTable) -> OscillationReport:
    """Block-boundary cumulative sums and every crossing of +-threshold.

    A crossing is attributed to block m when the boundary sums before and
    after I_m lie strictly on opposite sides of the level (sums move
    monotonically inside a block only for one-parity selections, so this
    records boundary evidence, which is what the divergence argument uses).
    """
    T = Fraction(threshold)
    if T <= 0:
        raise ValueError("threshold must be positive")
    sums = boundary_sums(sel, i, M, table)
    events = []
    prev = Fraction(0)
    for m, s in enumerate(sums, start=1):
        for level in (T, -T):
            if prev <= level < s:
                events.append(Crossing(m, s, level, +1))
            elif prev >= level > s:
                events.append(Crossing(m, s, level, -1))
        prev = s
    return OscillationReport(i, T, tuple(sums), tuple(events))


def dominance_check(sel: BlockSelection, M: int, table: BlockTable) -> list[dict]:
    """At each block where Delta(m) > b_m / m^2, compare the series-2 block sum
    with everything that came before it.

    Returns one record per such block: the block sum, the bound
    sum_{j<m} b_j / j on the earlier cumulative sum, whether the block sum
    dominates it, and the sign of the resulting boundary sum.
    """
    out = []
    sums = boundary_sums(sel, 2, M, table)
    for m in range(2, M + 1):
        d, b = delta(m, sel), table.b(m)
        if not Fraction(d) > Fraction(b, m * m):
            continue
        bs = block_sum(2, m, sel, table)
        before = sum((Fraction(table.b(j), j) for j in range(1, m)), Fraction(0))
        out.append({
            "block": m,
            "block_sum": bs,
            "earlier_bound": before,
            "dominates": abs(bs) > before,
            "boundary_sum": sums[m - 1],
            "chain_holds": Fraction(b, m * m) >= m * (1 + sum(table.lengths[: m - 1])),
        })
    return out


# --------------------------------------------------------------------------
# catalog streams cx1..cx4
# --------------------------------------------------------------------------

CATALOG_BLOCKS = 6  # paper recurrence: covers indices up to 14,455,350


@lru_cache(maxsize=None)
def catalog_table() -> BlockTable:
    return b_sequence(CATALOG_BLOCKS, RecurrenceMode.PAPER)


def cx_values(i: int, depth: int, table: BlockTable) -> np.ndarray:
    if depth > table.total:
        raise OutOfRange(f"depth {depth} exceeds the table range {table.total}")
    n = np.arange(1, depth + 1)
    m = np.searchsorted(np.array(table.ends), n, side="left") + 1
    sign = np.where(n % 2 == 1, 1.0, -1.0)
    odd_block = m % 2 == 1
    b = np.array(table.lengths, dtype=np.float64)[m - 1]
    if i == 1:
        return sign / m
    if i == 2:
        return np.where(odd_block, sign, -sign) / m
    if i == 3:
        return np.where(odd_block, sign / b, 0.0)
    return np.where(odd_block, 0.0, sign / b)


def catalog_stream(i: int) -> FunctionStream:
    table = catalog_table()
    return FunctionStream(f"cx{i}", lambda n, i=i: cx_term(i, n, table),
                          exact=True, declared=COND,
                          vectorized=lambda d, i=i: cx_values(i, d, table))
