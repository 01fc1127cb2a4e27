"""Term streams: deterministic sequences a_1, a_2, ... with optional analytics."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Callable

import numpy as np

from .verdicts import ABS, COND, MINUS, PLUS, Verdict, negate


class TermStream:
    """Base class.  Subclasses provide ``term`` and usually ``values``.

    ``term(n)`` must be pure.  ``exact`` says whether it returns Fractions.
    """

    exact = True
    period = None  # set by streams whose sign pattern is periodic

    def __init__(self, label: str, declared: Verdict | None = None):
        self.label = label
        self.declared = declared
        self._values = None
        self._scaled = None

    def term(self, n: int):
        raise NotImplementedError

    def _compute_values(self, depth: int) -> np.ndarray:
        return np.array([float(self.term(n)) for n in range(1, depth + 1)], dtype=np.float64)

    def values(self, depth: int) -> np.ndarray:
        """Float terms a_1..a_depth (read-only; position i holds a_{i+1})."""
        if self._values is None or self._values.shape[0] < depth:
            arr = self._compute_values(depth)
            arr.flags.writeable = False
            self._values = arr
        return self._values[:depth]

    def scaled_terms(self, depth: int) -> tuple[list[int], int]:
        """Integers ``t_n`` and a common denominator ``D`` with a_n = t_n / D."""
        if self._scaled is None or len(self._scaled[0]) < depth:
            terms = [Fraction(self.term(n)) for n in range(1, depth + 1)]
            d = 1
            for t in terms:
                d = math.lcm(d, t.denominator)
            self._scaled = ([t.numerator * (d // t.denominator) for t in terms], d)
        nums, d = self._scaled
        return nums[:depth], d

    def analytic_verdict(self, modulus: int, residues: frozenset):
        """Verdict over a residue-class set, or None when not known in closed form."""
        return None

    def negated(self) -> "TermStream":
        return NegatedStream(self)

    def __repr__(self):
        return f"{type(self).__name__}({self.label!r})"


class PeriodicStream(TermStream):
    """a_n = c_r / n^k_r with r = n mod P.

    The closed-form verdict over any residue-class set follows from the
    classical fact that sum c_n / n with periodic c converges iff the mean of
    c over one period vanishes; terms with k >= 2 converge absolutely.
    """

    def __init__(self, label, coefficients, powers=None, declared=None):
        coefficients = tuple(Fraction(c) for c in coefficients)
        if powers is None:
            powers = (1,) * len(coefficients)
        powers = tuple(int(k) for k in powers)
        if len(powers) != len(coefficients) or not coefficients:
            raise ValueError("coefficients and powers must have equal nonzero length")
        if any(k < 1 for k in powers):
            raise ValueError("powers must be >= 1 so that terms tend to zero")
        self.coefficients = coefficients
        self.powers = powers
        self.period = len(coefficients)
        super().__init__(label, None)
        whole = self.analytic_verdict(1, frozenset({0}))
        if whole is not COND and whole is not ABS:
            raise ValueError(f"stream {label!r} diverges ({whole.value}); expected a convergent series")
        self.declared = declared or whole

    def term(self, n: int) -> Fraction:
        r = n % self.period
        return self.coefficients[r] / Fraction(n) ** self.powers[r]

    def sign(self, n: int) -> int:
        c = self.coefficients[n % self.period]
        return (c > 0) - (c < 0)

    def _compute_values(self, depth: int) -> np.ndarray:
        n = np.arange(1, depth + 1, dtype=np.float64)
        r = np.arange(1, depth + 1) % self.period
        c = np.array([float(x) for x in self.coefficients])[r]
        k = np.array(self.powers, dtype=np.float64)[r]
        return c / n ** k

    def analytic_verdict(self, modulus: int, residues: frozenset) -> Verdict:
        L = math.lcm(modulus, self.period)
        mean = Fraction(0)
        divergent = False
        for r in range(L):
            if r % modulus not in residues:
                continue
            c = self.coefficients[r % self.period]
            if c != 0 and self.powers[r % self.period] == 1:
                divergent = True
                mean += c
        if not divergent:
            return ABS
        if mean > 0:
            return PLUS
        if mean < 0:
            return MINUS
        return COND

    def negated(self) -> "PeriodicStream":
        label = self.label[1:] if self.label.startswith("-") else "-" + self.label
        return PeriodicStream(label, [-c for c in self.coefficients], self.powers)

    def describe(self) -> str:
        parts = []
        for r, (c, k) in enumerate(zip(self.coefficients, self.powers)):
            parts.append(f"n%{self.period}=={r}: {c}/n^{k}")
        return "; ".join(parts)


class FunctionStream(TermStream):
    def __init__(self, label: str, fn: Callable[[int], object], exact: bool = True,
                 declared: Verdict | None = None, vectorized=None):
        super().__init__(label, declared)
        self._fn = fn
        self.exact = exact
        self._vectorized = vectorized

    def term(self, n: int):
        return self._fn(n)

    def _compute_values(self, depth: int) -> np.ndarray:
        if self._vectorized is not None:
            return np.asarray(self._vectorized(depth), dtype=np.float64)
        return super()._compute_values(depth)


class NegatedStream(TermStream):
    def __init__(self, base: TermStream):
        label = base.label[1:] if base.label.startswith("-") else "-" + base.label
        super().__init__(label, negate(base.declared) if base.declared else None)
        self.base = base
        self.exact = base.exact

    def term(self, n: int):
        return -self.base.term(n)

    def _compute_values(self, depth: int) -> np.ndarray:
        return -np.asarray(self.base.values(depth))

    def negated(self) -> TermStream:
        return self.base


# --------------------------------------------------------------------------
# closed-form term grammar:  [coef*][(-1)^n | (-1)^(n+s)] / n[^k]
# --------------------------------------------------------------------------

_PARITY = re.compile(r"^\(-1\)\^(?:n|\(n\s*([+-]\s*\d+)\))$")
_NUMBER = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_term(expr: str, label: str | None = None) -> PeriodicStream:
    """Parse ``coefficient * (+-1)^n / n^k`` patterns into a PeriodicStream.

    Examples: ``(-1)^(n+1)/n``, ``-2*(-1)^n/n^2``, ``3/n^2``.
    """
    text = expr.replace(" ", "")
    m = re.match(r"^(.*)/n(?:\^(\d+))?$", text)
    if not m:
        raise ValueError(f"cannot parse term {expr!r}: expected '.../n' or '.../n^k'")
    numerator, power = m.group(1), int(m.group(2) or 1)
    coef = Fraction(1)
    parity = None
    if numerator.startswith("-") and not _NUMBER.match(numerator.split("*")[0]):
        coef, numerator = -coef, numerator[1:]
    elif numerator.startswith("+"):
        numerator = numerator[1:]
    for factor in filter(None, numerator.split("*")):
        pm = _PARITY.match(factor)
        if pm:
            if parity is not None:
                raise ValueError(f"repeated (-1)^n factor in {expr!r}")
            parity = int((pm.group(1) or "0").replace(" ", ""))
        elif _NUMBER.match(factor):
            coef *= Fraction(factor)
        else:
            raise ValueError(f"cannot parse factor {factor!r} in {expr!r}")
    if parity is None:
        coefficients = [coef]
    else:
        # (-1)^(n+s): residue r = n mod 2
        coefficients = [coef * (-1) ** ((r + parity) % 2) for r in (0, 1)]
    return PeriodicStream(label or expr, coefficients, [power] * len(coefficients))
