"""Verdict bookkeeping: which subseries facts are assumed and which are derived."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import UnresolvableVerdict
from .indexsets import (ALL, Difference, Intersection, Residues, Union, is_subset, pairwise_disjoint)
from .traces import TrendPolicy, empirical_verdict, partial_sum_trace
from .verdicts import ABS, UNKNOWN, Verdict, negate, verdict_difference, verdict_union


class Provenance(str, enum.Enum):
    DECLARED = "Declared"
    PROPAGATED = "Propagated"
    EMPIRICAL = "Empirical"


@dataclass(frozen=True)
class OracleEntry:
    verdict: Verdict
    provenance: Provenance
    rule: str
    operands: tuple = ()

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "provenance": self.provenance.value,
            "rule": self.rule,
            "operands": list(self.operands),
        }


@dataclass(frozen=True)
class EmpiricalConfig:
    depth: int = 1_000_000
    policy: TrendPolicy = TrendPolicy()


def negated_label(label: str) -> str:
    return label[1:] if label.startswith("-") else "-" + label


class VerdictOracle:
    """Resolves ``(stream, index set)`` to a verdict.

    Order: stored entries, negation of a stored entry, finite sets, stream
    annotations and closed forms (Declared), structural rules (Propagated),
    and finally finite-prefix evidence if an EmpiricalConfig was supplied.
    Empirical evidence never produces a convergence verdict.
    """

    def __init__(self, empirical: EmpiricalConfig | None = None):
        self.entries: dict[tuple, OracleEntry] = {}
        self.empirical = empirical
        self._active: set = set()
        self._sets: dict = {}  # fingerprint -> IndexSet for every key seen

    @staticmethod
    def key(stream, A) -> tuple:
        return (stream.label, A.fingerprint)

    def declare(self, stream, A, verdict: Verdict, provenance=Provenance.DECLARED,
                rule: str = "declared", operands=()) -> OracleEntry:
        entry = OracleEntry(Verdict(verdict), Provenance(provenance), rule, tuple(operands))
        self.entries[self.key(stream, A)] = entry
        self._sets[A.fingerprint] = A
        return entry

    def lookup(self, stream, A):
        return self.entries.get(self.key(stream, A))

    def verdict(self, stream, A) -> Verdict:
        return self.resolve(stream, A).verdict

    def try_verdict(self, stream, A) -> Verdict:
        try:
            return self.resolve(stream, A).verdict
        except UnresolvableVerdict:
            return UNKNOWN

    def resolve(self, stream, A) -> OracleEntry:
        k = self.key(stream, A)
        hit = self.entries.get(k)
        if hit is not None:
            return hit
        if k in self._active:
            raise UnresolvableVerdict(f"circular derivation for {stream.label} on {A.describe()}")
        self._active.add(k)
        self._sets.setdefault(A.fingerprint, A)
        try:
            entry = self._derive(stream, A)
        finally:
            self._active.discard(k)
        if entry is None:
            raise UnresolvableVerdict(f"no declaration or rule resolves {stream.label} on {A.describe()}")
        self.entries[k] = entry
        return entry

    # ------------------------------------------------------------------
    def _derive(self, stream, A):
        mirror = self.entries.get((negated_label(stream.label), A.fingerprint))
        if mirror is not None:
            return OracleEntry(negate(mirror.verdict), mirror.provenance, "negation",
                               (negated_label(stream.label),))
        base = getattr(stream, "base", None)
        if base is not None:
            try:
                e = self.resolve(base, A)
            except UnresolvableVerdict:
                e = None
            if e is not None:
                return OracleEntry(negate(e.verdict), e.provenance, "negation", (base.label,))
        if A.is_finite:
            return OracleEntry(ABS, Provenance.PROPAGATED, "finite-set")
        if A == ALL and stream.declared is not None:
            return OracleEntry(stream.declared, Provenance.DECLARED, "stream-annotation")
        res = A.residues()
        if res is not None:
            v = stream.analytic_verdict(*res)
            if v is not None:
                return OracleEntry(v, Provenance.DECLARED, "periodic-closed-form")
        entry = self._propagate(stream, A)
        if entry is not None:
            return entry
        if self.empirical is not None:
            tr = partial_sum_trace(stream, A, self.empirical.depth, exact=False)
            v = empirical_verdict(tr, self.empirical.policy)
            if v is not UNKNOWN:
                return OracleEntry(v, Provenance.EMPIRICAL, "trend-policy",
                                   (f"depth={self.empirical.depth}",))
        return None

    def _try(self, stream, A):
        try:
            return self.resolve(stream, A)
        except UnresolvableVerdict:
            return None

    def _propagate(self, stream, A):
        if isinstance(A, Union) and pairwise_disjoint(A.children):
            parts = [self._try(stream, c) for c in A.children]
            if all(p is not None for p in parts):
                v = parts[0].verdict
                for p in parts[1:]:
                    v = verdict_union(v, p.verdict)
                if v is not UNKNOWN:
                    return OracleEntry(v, Provenance.PROPAGATED, "disjoint-union",
                                       tuple(c.fingerprint for c in A.children))
        if isinstance(A, Difference) and is_subset(A.right, A.left):
            whole, removed = self._try(stream, A.left), self._try(stream, A.right)
            if whole is not None and removed is not None:
                v = verdict_difference(whole.verdict, removed.verdict)
                if v is not UNKNOWN:
                    return OracleEntry(v, Provenance.PROPAGATED, "difference",
                                       (A.left.fingerprint, A.right.fingerprint))
        for sup in supersets(A):
            e = self._try(stream, sup)
            if e is not None and e.verdict is ABS:
                return OracleEntry(ABS, Provenance.PROPAGATED, "subset-of-absolute", (sup.fingerprint,))
        if A.residues() is not None:
            return self._propagate_residues(stream, A)
        return None

    def _known_supersets(self, stream, A):
        """Stored residue-class supersets of ``A`` for this stream, with ALL first."""
        out = []
        if stream.declared is not None:
            out.append((ALL, OracleEntry(stream.declared, Provenance.DECLARED, "stream-annotation")))
        for (label, fp), e in list(self.entries.items()):
            W = self._sets.get(fp)
            if label != stream.label or W is None or W == A or W.residues() is None:
                continue
            if is_subset(A, W):
                out.append((W, e))
        return out

    def _propagate_residues(self, stream, A):
        known = self._known_supersets(stream, A)
        for W, e in known:
            if e.verdict is ABS:
                return OracleEntry(ABS, Provenance.PROPAGATED, "subset-of-absolute", (W.fingerprint,))
        a_mod, a_cls = A.residues()
        for W, e in known:
            w_mod, w_cls = W.residues()
            m = math.lcm(a_mod, w_mod)
            rest = [r for r in range(m) if r % w_mod in w_cls and r % a_mod not in a_cls]
            R = Residues(m, rest)
            r = self._try(stream, R)
            if r is None:
                continue
            v = verdict_difference(e.verdict, r.verdict)
            if v is not UNKNOWN:
                return OracleEntry(v, Provenance.PROPAGATED, "difference", (W.fingerprint, R.fingerprint))
        return None


def supersets(A) -> list:
    """Structurally evident proper supersets of ``A`` (not necessarily all)."""
    out = []
    hint = getattr(A, "subset_hint", None)
    if hint is not None:
        out.extend(hint())
    if isinstance(A, Intersection):
        out += [A.left, A.right]
        out += [Intersection(s, A.right) for s in _direct(A.left)]
        out += [Intersection(A.left, s) for s in _direct(A.right)]
    elif isinstance(A, Difference):
        out.append(A.left)
    return list(dict.fromkeys(out))


def _direct(A) -> list:
    hint = getattr(A, "subset_hint", None)
    out = list(hint()) if hint is not None else []
    if isinstance(A, Intersection):
        out += [A.left, A.right]
    elif isinstance(A, Difference):
        out.append(A.left)
    return out
