"""Partial functions {1,2,3} -> {p,n} and the families they form.

A partial function is a 6-bit code, two bits per coordinate (0 absent,
1 ``p``, 2 ``n``).  The 26 functions are enumerated in a fixed order
(domains by size then sorted coordinates; values ``p`` before ``n``) and a
family is a 26-bit mask over that order, bit ``i`` set iff the ``i``-th
function is a member.  Canonical forms are smallest masks under the
48-element symmetry group.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from . import kernels

P = "p"
N = "n"
COORDS = (1, 2, 3)
_VAL_BITS = {P: 1, N: 2}
_BIT_VALS = {1: P, 2: N}


class _Empty:
    """The empty function.  Produced by ``phi`` but never stored in a Family."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def __str__(self):
        return "{}"

    def __bool__(self):
        return False


EMPTY = _Empty()


@dataclass(frozen=True)
class PartialFunction:
    code: int

    def __post_init__(self):
        if not 0 < self.code < 64:
            raise ValueError(f"bad partial-function code {self.code}")
        for x in COORDS:
            if (self.code >> (2 * (x - 1))) & 3 == 3:
                raise ValueError(f"bad partial-function code {self.code}")

    @classmethod
    def from_mapping(cls, mapping) -> "PartialFunction":
        code = 0
        for x, v in dict(mapping).items():
            if x not in COORDS or v not in _VAL_BITS:
                raise ValueError(f"bad assignment {x}:{v}")
            code |= _VAL_BITS[v] << (2 * (x - 1))
        return cls(code)

    @classmethod
    def parse(cls, text: str) -> "PartialFunction":
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError(f"expected '{{x:v,...}}', got {text!r}")
        pairs = {}
        for item in filter(None, (s.strip() for s in body[1:-1].split(","))):
            x, v = item.split(":")
            x = int(x)
            if x in pairs:
                raise ValueError(f"coordinate {x} assigned twice in {text!r}")
            pairs[x] = v.strip()
        return cls.from_mapping(pairs)

    def get(self, x: int):
        return _BIT_VALS.get((self.code >> (2 * (x - 1))) & 3)

    def items(self) -> tuple:
        return tuple((x, self.get(x)) for x in COORDS if self.get(x) is not None)

    @property
    def domain(self) -> frozenset:
        return frozenset(x for x, _ in self.items())

    @property
    def is_total(self) -> bool:
        return len(self.domain) == 3

    @property
    def index(self) -> int:
        return _INDEX[self.code]

    def compatible(self, other: "PartialFunction") -> bool:
        return are_compatible(self, other)

    def union(self, other: "PartialFunction") -> "PartialFunction":
        if not are_compatible(self, other):
            raise ValueError(f"{self} and {other} are incompatible")
        return PartialFunction(self.code | other.code)

    def __str__(self):
        return "{" + ",".join(f"{x}:{v}" for x, v in self.items()) + "}"

    def __repr__(self):
        return f"PartialFunction({self})"


def _enumerate() -> list[PartialFunction]:
    out = []
    for size in (1, 2, 3):
        for dom in itertools.combinations(COORDS, size):
            for vals in itertools.product((P, N), repeat=size):
                out.append(PartialFunction.from_mapping(dict(zip(dom, vals))))
    return out


ALL_FUNCTIONS: tuple[PartialFunction, ...] = tuple(_enumerate())
_INDEX = {f.code: i for i, f in enumerate(ALL_FUNCTIONS)}
N_FUNCTIONS = len(ALL_FUNCTIONS)
N_NONTOTAL = sum(1 for f in ALL_FUNCTIONS if not f.is_total)
TOTAL_MASK = sum(1 << i for i, f in enumerate(ALL_FUNCTIONS) if f.is_total)


def all_partial_functions() -> list[PartialFunction]:
    return list(ALL_FUNCTIONS)


def are_compatible(f: PartialFunction, g: PartialFunction) -> bool:
    for x in COORDS:
        a, b = f.get(x), g.get(x)
        if a is not None and b is not None and a != b:
            return False
    return True


@dataclass(frozen=True)
class Family:
    mask: int = 0

    @classmethod
    def of(cls, functions: Iterable) -> "Family":
        mask = 0
        for f in functions:
            if isinstance(f, str):
                f = PartialFunction.parse(f)
            if f is EMPTY:
                raise ValueError("the empty function cannot be a family member")
            mask |= 1 << f.index
        return cls(mask)

    @classmethod
    def parse(cls, text: str) -> "Family":
        body = text.strip()
        if body.startswith("[") or (body.startswith("{{") and body.endswith("}}")):
            body = body[1:-1]
        parts = [p + "}" for p in body.split("}") if p.strip(" ,")]
        return cls.of(p.strip(" ,") for p in parts)

    @property
    def members(self) -> tuple[PartialFunction, ...]:
        return tuple(f for i, f in enumerate(ALL_FUNCTIONS) if self.mask >> i & 1)

    def __iter__(self) -> Iterator[PartialFunction]:
        return iter(self.members)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, f) -> bool:
        if f is EMPTY:
            return False
        return bool(self.mask >> f.index & 1)

    def __or__(self, other: "Family") -> "Family":
        return Family(self.mask | other.mask)

    def add(self, f: PartialFunction) -> "Family":
        return Family(self.mask | (1 << f.index))

    def sorted_strings(self) -> list[str]:
        return [str(f) for f in self.members]

    def __str__(self):
        return "[" + ", ".join(self.sorted_strings()) + "]"


def is_full(F: Family) -> bool:
    for x in COORDS:
        for v in (P, N):
            if not any(f.get(x) == v for f in F):
                return False
    return True


def is_union_closed(F: Family) -> bool:
    members = F.members
    for f, g in itertools.combinations(members, 2):
        if are_compatible(f, g) and f.union(g) not in F:
            return False
    return True


def has_total(F: Family) -> bool:
    return bool(F.mask & TOTAL_MASK)


# --------------------------------------------------------------------------
# symmetries
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Symmetry:
    """``g(x) = tau_x(f(perm(x)))``.

    ``perm[x-1]`` is the coordinate of ``f`` read by coordinate ``x`` of the
    image, and ``flips[x-1]`` swaps ``p``/``n`` on that coordinate.
    """

    perm: tuple = (1, 2, 3)
    flips: tuple = (False, False, False)

    def __post_init__(self):
        if sorted(self.perm) != [1, 2, 3] or len(self.flips) != 3:
            raise ValueError(f"bad symmetry {self.perm} {self.flips}")

    @classmethod
    def identity(cls) -> "Symmetry":
        return cls()

    def apply_function(self, f: PartialFunction) -> PartialFunction:
        out = {}
        for x in COORDS:
            v = f.get(self.perm[x - 1])
            if v is not None:
                if self.flips[x - 1]:
                    v = N if v == P else P
                out[x] = v
        return PartialFunction.from_mapping(out)

    def then(self, other: "Symmetry") -> "Symmetry":
        """The symmetry applying ``self`` first and ``other`` second."""
        perm = tuple(self.perm[other.perm[x - 1] - 1] for x in COORDS)
        flips = tuple(other.flips[x - 1] ^ self.flips[other.perm[x - 1] - 1] for x in COORDS)
        return Symmetry(perm, flips)

    def inverse(self) -> "Symmetry":
        inv = [0, 0, 0]
        for x in COORDS:
            inv[self.perm[x - 1] - 1] = x
        flips = tuple(self.flips[inv[x - 1] - 1] for x in COORDS)
        return Symmetry(tuple(inv), flips)

    @property
    def index(self) -> int:
        return _SYM_INDEX[self]

    def describe(self) -> str:
        parts = []
        for x in COORDS:
            sign = "-" if self.flips[x - 1] else "+"
            parts.append(f"{x}<-{sign}{self.perm[x - 1]}")
        return ",".join(parts)

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "flips": list(self.flips)}


ALL_SYMMETRIES: tuple[Symmetry, ...] = tuple(
    Symmetry(perm, flips)
    for perm in itertools.permutations(COORDS)
    for flips in itertools.product((False, True), repeat=3)
)
_SYM_INDEX = {s: i for i, s in enumerate(ALL_SYMMETRIES)}

# _ACTION[s][i] is the enumeration index of the image of function i under s
_ACTION = np.array(
    [[s.apply_function(f).index for f in ALL_FUNCTIONS] for s in ALL_SYMMETRIES],
    dtype=np.int64,
)


def _image_mask(s_index: int, mask: int) -> int:
    row = _ACTION[s_index]
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << int(row[i])
        mask >>= 1
        i += 1
    return out


def apply_symmetry(s: Symmetry, F: Family) -> Family:
    return Family(_image_mask(s.index, F.mask))


def orbit(F: Family) -> set[int]:
    return {_image_mask(k, F.mask) for k in range(len(ALL_SYMMETRIES))}


def canonical_form(F: Family) -> Family:
    return Family(min(orbit(F)))


def canonical_symmetry(F: Family) -> tuple[Family, Symmetry]:
    """Canonical form together with the first symmetry reaching it."""
    best, best_s = None, None
    for k, s in enumerate(ALL_SYMMETRIES):
        m = _image_mask(k, F.mask)
        if best is None or m < best:
            best, best_s = m, s
    return Family(best), best_s


def find_relabeling(source: Family, target: Family):
    """First symmetry mapping ``source`` onto ``target``, or None."""
    for k, s in enumerate(ALL_SYMMETRIES):
        if _image_mask(k, source.mask) == target.mask:
            return s
    return None


# --------------------------------------------------------------------------
# the pictured families and classification
# --------------------------------------------------------------------------

def _pf(text: str) -> PartialFunction:
    return PartialFunction.parse(text)


# Case 1 picture: f, g, h pairwise incompatible with distinct 2-element domains
TYPE1_ROLES = {"f": _pf("{1:p,2:n}"), "g": _pf("{1:n,3:p}"), "h": _pf("{2:p,3:n}")}
# Case 2 picture: coordinate 1 is shared; c1, c2 are the optional singletons
TYPE2_ROLES = {
    "e": _pf("{1:p,2:p}"),
    "f": _pf("{1:p,2:n}"),
    "g": _pf("{1:n,3:p}"),
    "h": _pf("{1:n,3:n}"),
    "c1": _pf("{1:p}"),
    "c2": _pf("{1:n}"),
}


def type1_picture() -> Family:
    return Family.of(TYPE1_ROLES.values())


def type2_picture(c1: bool = False, c2: bool = False) -> Family:
    roles = ["e", "f", "g", "h"] + (["c1"] if c1 else []) + (["c2"] if c2 else [])
    return Family.of(TYPE2_ROLES[r] for r in roles)


class FamilyType(str, enum.Enum):
    TYPE1 = "Type1"
    TYPE2_0 = "Type2_0"
    TYPE2_1 = "Type2_1"
    TYPE2_2 = "Type2_2"
    HAS_TOTAL = "HasTotal"
    NOT_FULL_UNION_CLOSED = "NotFullUnionClosed"

    @property
    def is_type2(self) -> bool:
        return self in (FamilyType.TYPE2_0, FamilyType.TYPE2_1, FamilyType.TYPE2_2)


@lru_cache(maxsize=None)
def _picture_classes() -> dict[int, FamilyType]:
    return {
        canonical_form(type1_picture()).mask: FamilyType.TYPE1,
        canonical_form(type2_picture()).mask: FamilyType.TYPE2_0,
        canonical_form(type2_picture(c1=True)).mask: FamilyType.TYPE2_1,
        canonical_form(type2_picture(c1=True, c2=True)).mask: FamilyType.TYPE2_2,
    }


def classify(F: Family) -> FamilyType:
    if has_total(F):
        return FamilyType.HAS_TOTAL
    if not (is_full(F) and is_union_closed(F)):
        return FamilyType.NOT_FULL_UNION_CLOSED
    kind = _picture_classes().get(canonical_form(F).mask)
    if kind is None:
        raise RuntimeError(f"full union-closed family {F} matches no known class")
    return kind


def picture_variants(kind: FamilyType) -> list[Family]:
    """Pictured families of the given type (both single-singleton variants)."""
    if kind is FamilyType.TYPE1:
        return [type1_picture()]
    if kind is FamilyType.TYPE2_0:
        return [type2_picture()]
    if kind is FamilyType.TYPE2_1:
        return [type2_picture(c1=True), type2_picture(c2=True)]
    if kind is FamilyType.TYPE2_2:
        return [type2_picture(c1=True, c2=True)]
    raise ValueError(f"no picture for {kind}")


def relabeling_to_picture(F: Family, kind: FamilyType | None = None):
    """Return ``(picture, s)`` with ``apply_symmetry(s, picture) == F``."""
    kind = kind or classify(F)
    for pic in picture_variants(kind):
        s = find_relabeling(pic, F)
        if s is not None:
            return pic, s
    raise RuntimeError(f"{F} is not equivalent to a {kind.value} picture")


# --------------------------------------------------------------------------
# exhaustive sweep over the 2^18 total-free families
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _sweep_tables():
    pi, pj, pk = [], [], []
    for i, j in itertools.combinations(range(N_NONTOTAL), 2):
        f, g = ALL_FUNCTIONS[i], ALL_FUNCTIONS[j]
        if not are_compatible(f, g):
            continue
        u = f.union(g)
        pi.append(i)
        pj.append(j)
        pk.append(-1 if u.is_total else u.index)
    covers = []
    for x in COORDS:
        for v in (P, N):
            covers.append(sum(1 << i for i in range(N_NONTOTAL) if ALL_FUNCTIONS[i].get(x) == v))
    as_arr = lambda a: np.array(a, dtype=np.int64)  # noqa: E731
    return as_arr(pi), as_arr(pj), as_arr(pk), as_arr(covers)


def sweep_total_free():
    """``(union_closed, full)`` boolean arrays indexed by 18-bit masks."""
    pi, pj, pk, covers = _sweep_tables()
    uc, full = kernels.fn32_sweep(N_NONTOTAL, pi, pj, pk, covers)
    return np.asarray(uc, dtype=bool), np.asarray(full, dtype=bool)


@dataclass(frozen=True)
class FamilyClass:
    representative: Family
    family_type: FamilyType
    orbit_size: int

    def to_json(self) -> dict:
        return {
            "type": self.family_type.value,
            "members": self.representative.sorted_strings(),
            "member_count": len(self.representative),
            "orbit_size": self.orbit_size,
        }


@lru_cache(maxsize=None)
def _enumerate_classes() -> tuple[tuple[FamilyClass, ...], int]:
    uc, full = sweep_total_free()
    qualifying = np.flatnonzero(uc & full)
    seen: dict[int, int] = {}
    for m in qualifying.tolist():
        c = min(orbit(Family(int(m))))
        seen[c] = seen.get(c, 0) + 1
    classes = []
    for c in sorted(seen, key=lambda c: (bin(c).count("1"), c)):
        rep = Family(c)
        classes.append(FamilyClass(rep, classify(rep), len(orbit(rep))))
    return tuple(classes), int(qualifying.size)


def enumerate_classes() -> list[FamilyClass]:
    return list(_enumerate_classes()[0])


def qualifying_count() -> int:
    """Number of full, union-closed, total-free families before grouping."""
    return _enumerate_classes()[1]
