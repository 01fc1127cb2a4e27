"""Subseries verdicts and their extended-real algebra."""

import enum


class Verdict(str, enum.Enum):
    PLUS_INFINITY = "PlusInfinity"
    MINUS_INFINITY = "MinusInfinity"
    ABSOLUTELY_CONVERGENT = "AbsolutelyConvergent"
    CONDITIONALLY_CONVERGENT = "ConditionallyConvergent"
    OSCILLATES = "Oscillates"
    UNKNOWN = "Unknown"

    @property
    def is_infinite(self) -> bool:
        return self in (Verdict.PLUS_INFINITY, Verdict.MINUS_INFINITY)

    @property
    def is_finite(self) -> bool:
        return self in (Verdict.ABSOLUTELY_CONVERGENT, Verdict.CONDITIONALLY_CONVERGENT)

    @property
    def short(self) -> str:
        return _SHORT[self]


_SHORT = {
    Verdict.PLUS_INFINITY: "+inf",
    Verdict.MINUS_INFINITY: "-inf",
    Verdict.ABSOLUTELY_CONVERGENT: "abs",
    Verdict.CONDITIONALLY_CONVERGENT: "cond",
    Verdict.OSCILLATES: "osc",
    Verdict.UNKNOWN: "?",
}

PLUS = Verdict.PLUS_INFINITY
MINUS = Verdict.MINUS_INFINITY
ABS = Verdict.ABSOLUTELY_CONVERGENT
COND = Verdict.CONDITIONALLY_CONVERGENT
OSC = Verdict.OSCILLATES
UNKNOWN = Verdict.UNKNOWN


def negate(v: Verdict) -> Verdict:
    if v is PLUS:
        return MINUS
    if v is MINUS:
        return PLUS
    return v


def verdict_union(v1: Verdict, v2: Verdict) -> Verdict:
    """Sum of two subseries over disjoint (or jointly tame) index sets.

    ``+inf + -inf`` is not well defined and yields Unknown, as does anything
    involving Unknown or Oscillates.
    """
    if v1 in (UNKNOWN, OSC) or v2 in (UNKNOWN, OSC):
        return UNKNOWN
    if v1.is_infinite and v2.is_infinite:
        return v1 if v1 is v2 else UNKNOWN
    if v1.is_infinite:
        return v1
    if v2.is_infinite:
        return v2
    if v1 is ABS and v2 is ABS:
        return ABS
    return COND


def verdict_difference(whole: Verdict, removed: Verdict) -> Verdict:
    """``sum over C minus D`` from ``sum over C u D`` and ``sum over D``."""
    return verdict_union(whole, negate(removed))


def one_signed(v: Verdict, positive: bool) -> bool:
    """Whether ``v`` is a legal verdict for a part whose terms share one sign."""
    return v is ABS or v is (PLUS if positive else MINUS)
