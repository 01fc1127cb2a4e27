"""Symbolic subsets of the positive integers.

Every expression can be materialized to a boolean mask of any depth (position
``i`` stands for the integer ``i + 1``) and answers ``contains(n)``.  Sets
built only from residue classes and sign cells of periodic streams also
expose ``residues()``, which lets the oracle use closed-form verdicts.
"""

from __future__ import annotations

import hashlib
import math
from functools import reduce

import numpy as np


class IndexSet:
    def key(self) -> tuple:
        raise NotImplementedError

    def mask(self, depth: int) -> np.ndarray:
        raise NotImplementedError

    def contains(self, n: int) -> bool:
        return bool(self.mask(n)[n - 1])

    def residues(self):
        """``(modulus, frozenset of residues)`` when the set is periodic, else None."""
        return None

    @property
    def is_finite(self) -> bool:
        return False

    def describe(self) -> str:
        return repr(self)

    @property
    def fingerprint(self) -> str:
        return hashlib.sha1(repr(self.key()).encode()).hexdigest()[:16]

    def indices(self, depth: int) -> np.ndarray:
        return np.flatnonzero(self.mask(depth)) + 1

    def to_json(self) -> dict:
        return {"description": self.describe(), "fingerprint": self.fingerprint}

    def __or__(self, other: "IndexSet") -> "IndexSet":
        return union(self, other)

    def __and__(self, other: "IndexSet") -> "IndexSet":
        return intersection(self, other)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        return difference(self, other)

    def __eq__(self, other):
        return isinstance(other, IndexSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return self.describe()


class _All(IndexSet):
    def key(self):
        return ("all",)

    def mask(self, depth):
        return np.ones(depth, dtype=bool)

    def contains(self, n):
        return True

    def residues(self):
        return 1, frozenset({0})

    def describe(self):
        return "All"


class _Empty(IndexSet):
    def key(self):
        return ("empty",)

    def mask(self, depth):
        return np.zeros(depth, dtype=bool)

    def contains(self, n):
        return False

    def residues(self):
        return 1, frozenset()

    @property
    def is_finite(self):
        return True

    def describe(self):
        return "Empty"


ALL = _All()
EMPTY_SET = _Empty()


class Residues(IndexSet):
    """Predicate ``n mod modulus in residues``."""

    def __init__(self, modulus: int, residues, name: str | None = None):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        modulus = int(modulus)
        classes = frozenset(int(r) % modulus for r in residues)
        # reduce to the least period so equal sets share one key
        for d in range(1, modulus + 1):
            if modulus % d == 0 and all(((r + d) % modulus) in classes for r in classes):
                modulus, classes = d, frozenset(r % d for r in classes)
                break
        self.modulus = modulus
        self.classes = classes
        self.name = name

    def key(self):
        return ("res", self.modulus, tuple(sorted(self.classes)))

    def mask(self, depth):
        r = np.arange(1, depth + 1) % self.modulus
        return np.isin(r, sorted(self.classes))

    def contains(self, n):
        return n % self.modulus in self.classes

    def residues(self):
        return self.modulus, self.classes

    def describe(self):
        if self.name:
            return self.name
        rs = ",".join(str(r) for r in sorted(self.classes))
        return f"{{n = {rs} mod {self.modulus}}}"


def odds() -> Residues:
    return Residues(2, {1}, "odds")


def evens() -> Residues:
    return Residues(2, {0}, "evens")


class SignCell(IndexSet):
    """Indices where stream i is positive iff ``pattern[i]``; zero counts as non-positive."""

    def __init__(self, pattern, streams):
        pattern = tuple(bool(x) for x in pattern)
        if len(pattern) != len(streams):
            raise ValueError("pattern and streams differ in length")
        self.pattern = pattern
        self.streams = tuple(streams)

    @property
    def pattern_string(self) -> str:
        return "".join("+" if s else "-" for s in self.pattern)

    def key(self):
        return ("cell", self.pattern, tuple(s.label for s in self.streams))

    def mask(self, depth):
        out = np.ones(depth, dtype=bool)
        for want, s in zip(self.pattern, self.streams):
            out &= (np.asarray(s.values(depth)) > 0) == want
        return out

    def contains(self, n):
        return all((s.term(n) > 0) == want for want, s in zip(self.pattern, self.streams))

    def residues(self):
        periods = [getattr(s, "period", None) for s in self.streams]
        if any(p is None or not hasattr(s, "sign") for p, s in zip(periods, self.streams)):
            return None
        L = reduce(math.lcm, periods, 1)
        rs = frozenset(
            r for r in range(L)
            if all((s.sign(r) > 0) == want for want, s in zip(self.pattern, self.streams))
        )
        return L, rs

    def describe(self):
        return f"A^{self.pattern_string}"


def positive_part(stream) -> SignCell:
    return SignCell((True,), (stream,))


def nonpositive_part(stream) -> SignCell:
    return SignCell((False,), (stream,))


class ExplicitBlocks(IndexSet):
    """Finite union of half-open intervals ``(lo, hi]``."""

    def __init__(self, intervals, name: str | None = None):
        ivs = sorted((int(a), int(b)) for a, b in intervals if int(b) > int(a))
        merged = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        self.intervals = tuple(merged)
        self.name = name

    def key(self):
        return ("blocks", self.intervals)

    def mask(self, depth):
        out = np.zeros(depth, dtype=bool)
        for a, b in self.intervals:
            if a >= depth:
                break
            out[a:min(b, depth)] = True
        return out

    def contains(self, n):
        return any(a < n <= b for a, b in self.intervals)

    @property
    def is_finite(self):
        return True

    def residues(self):
        return (1, frozenset()) if not self.intervals else None

    def describe(self):
        if self.name:
            return self.name
        return "U".join(f"({a},{b}]" for a, b in self.intervals) or "Empty"


class Union(IndexSet):
    def __init__(self, children):
        self.children = tuple(children)

    def key(self):
        return ("union", tuple(sorted((c.key() for c in self.children), key=repr)))

    def mask(self, depth):
        out = np.zeros(depth, dtype=bool)
        for c in self.children:
            out |= c.mask(depth)
        return out

    def contains(self, n):
        return any(c.contains(n) for c in self.children)

    def residues(self):
        parts = [c.residues() for c in self.children]
        if any(p is None for p in parts):
            return None
        L = reduce(math.lcm, (p[0] for p in parts), 1)
        return L, frozenset(r for r in range(L) if any(r % m in rs for m, rs in parts))

    @property
    def is_finite(self):
        return all(c.is_finite for c in self.children)

    def describe(self):
        return "(" + " u ".join(c.describe() for c in self.children) + ")"


class Intersection(IndexSet):
    def __init__(self, left: IndexSet, right: IndexSet):
        self.left, self.right = left, right

    def key(self):
        return ("inter", tuple(sorted((self.left.key(), self.right.key()), key=repr)))

    def mask(self, depth):
        return self.left.mask(depth) & self.right.mask(depth)

    def contains(self, n):
        return self.left.contains(n) and self.right.contains(n)

    def residues(self):
        a, b = self.left.residues(), self.right.residues()
        if a is None or b is None:
            return None
        L = math.lcm(a[0], b[0])
        return L, frozenset(r for r in range(L) if r % a[0] in a[1] and r % b[0] in b[1])

    @property
    def is_finite(self):
        return self.left.is_finite or self.right.is_finite

    def describe(self):
        return f"({self.left.describe()} n {self.right.describe()})"


class Difference(IndexSet):
    def __init__(self, left: IndexSet, right: IndexSet):
        self.left, self.right = left, right

    def key(self):
        return ("diff", self.left.key(), self.right.key())

    def mask(self, depth):
        return self.left.mask(depth) & ~self.right.mask(depth)

    def contains(self, n):
        return self.left.contains(n) and not self.right.contains(n)

    def residues(self):
        a, b = self.left.residues(), self.right.residues()
        if a is None or b is None:
            return None
        L = math.lcm(a[0], b[0])
        return L, frozenset(r for r in range(L) if r % a[0] in a[1] and r % b[0] not in b[1])

    @property
    def is_finite(self):
        return self.left.is_finite

    def describe(self):
        return f"({self.left.describe()} \\ {self.right.describe()})"


# --------------------------------------------------------------------------
# smart constructors
# --------------------------------------------------------------------------

def union(*sets: IndexSet) -> IndexSet:
    flat = []
    for s in sets:
        if isinstance(s, Union):
            flat.extend(s.children)
        elif s is not EMPTY_SET and s != EMPTY_SET:
            flat.append(s)
    uniq = list(dict.fromkeys(flat))
    if not uniq:
        return EMPTY_SET
    if len(uniq) == 1:
        return uniq[0]
    if any(s == ALL for s in uniq):
        return ALL
    return Union(uniq)


def intersection(a: IndexSet, b: IndexSet) -> IndexSet:
    if a == EMPTY_SET or b == EMPTY_SET:
        return EMPTY_SET
    if a == ALL:
        return b
    if b == ALL or a == b:
        return a
    return Intersection(a, b)


def difference(a: IndexSet, b: IndexSet) -> IndexSet:
    if a == EMPTY_SET or b == ALL or a == b:
        return EMPTY_SET
    if b == EMPTY_SET:
        return a
    return Difference(a, b)


# --------------------------------------------------------------------------
# structural reasoning used by the oracle
# --------------------------------------------------------------------------

def _residue_subset(a, b) -> bool:
    L = math.lcm(a[0], b[0])
    return all(r % b[0] in b[1] for r in range(L) if r % a[0] in a[1])


def is_subset(a: IndexSet, b: IndexSet, _depth: int = 0) -> bool:
    """Sound (incomplete) structural test for ``a`` contained in ``b``."""
    if a == b or a == EMPTY_SET or b == ALL:
        return True
    if _depth > 6:
        return False
    ra, rb = a.residues(), b.residues()
    if ra is not None and rb is not None:
        return _residue_subset(ra, rb)
    d = _depth + 1
    hint = getattr(a, "subset_hint", None)
    if hint is not None and any(is_subset(h, b, d) for h in hint()):
        return True
    if isinstance(a, Union):
        return all(is_subset(c, b, d) for c in a.children)
    if isinstance(a, Intersection) and (is_subset(a.left, b, d) or is_subset(a.right, b, d)):
        return True
    if isinstance(b, Intersection):
        return is_subset(a, b.left, d) and is_subset(a, b.right, d)
    if isinstance(a, Difference) and is_subset(a.left, b, d):
        return True
    if isinstance(b, Difference):
        return is_subset(a, b.left, d) and are_disjoint(a, b.right, d)
    if isinstance(b, Union) and any(is_subset(a, c, d) for c in b.children):
        return True
    return False


def are_disjoint(a: IndexSet, b: IndexSet, _depth: int = 0) -> bool:
    """Sound (incomplete) structural test for ``a`` and ``b`` being disjoint."""
    if a == EMPTY_SET or b == EMPTY_SET:
        return True
    if _depth > 6:
        return False
    ra, rb = a.residues(), b.residues()
    if ra is not None and rb is not None:
        L = math.lcm(ra[0], rb[0])
        return not any(r % ra[0] in ra[1] and r % rb[0] in rb[1] for r in range(L))
    d = _depth + 1
    if isinstance(a, SignCell) and isinstance(b, SignCell):
        la = {s.label: w for s, w in zip(a.streams, a.pattern)}
        if any(la.get(s.label, w) != w for s, w in zip(b.streams, b.pattern)):
            return True
    for x, y in ((a, b), (b, a)):
        hint = getattr(x, "disjoint_hint", None)
        if hint is not None and hint(y):
            return True
        sup = getattr(x, "subset_hint", None)
        if sup is not None and any(are_disjoint(h, y, d) for h in sup()):
            return True
        if isinstance(x, Union) and all(are_disjoint(c, y, d) for c in x.children):
            return True
        if isinstance(x, Intersection) and (are_disjoint(x.left, y, d) or are_disjoint(x.right, y, d)):
            return True
        if isinstance(x, Difference) and (are_disjoint(x.left, y, d) or is_subset(y, x.right, d)):
            return True
    return False


def pairwise_disjoint(sets) -> bool:
    sets = list(sets)
    return all(are_disjoint(sets[i], sets[j]) for i in range(len(sets)) for j in range(i + 1, len(sets)))
