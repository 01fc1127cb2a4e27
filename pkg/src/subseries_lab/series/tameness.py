"""Sign cells, tameness, and the phi map onto Fn(3,2)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import UnresolvableVerdict
from ..fn32 import EMPTY, N, P, Family, PartialFunction
from .indexsets import IndexSet, SignCell, intersection, nonpositive_part, positive_part, union
from .verdicts import ABS, MINUS, PLUS, UNKNOWN, Verdict, verdict_union

PROBE_DEPTH = 10_000


def sign_partition(streams, depth: int | None = None) -> dict:
    """All 2^k sign cells, keyed by pattern tuples (True = positive)."""
    streams = list(streams)
    if not 1 <= len(streams) <= 4:
        raise ValueError("sign_partition takes between 1 and 4 streams")
    return {pat: SignCell(pat, streams) for pat in itertools.product((True, False), repeat=len(streams))}


def is_nonempty(cell: IndexSet, depth: int = PROBE_DEPTH) -> bool:
    res = cell.residues()
    if res is not None:
        return bool(res[1])
    return bool(cell.mask(depth).any())


def nonempty_cells(cells: dict, depth: int = PROBE_DEPTH) -> dict:
    return {p: c for p, c in cells.items() if is_nonempty(c, depth)}


def pattern_string(pattern) -> str:
    return "".join("+" if s else "-" for s in pattern)


def is_tame(A: IndexSet, stream, oracle) -> bool:
    """True iff the positive or the non-positive part of A is absolutely convergent."""
    parts = (intersection(A, positive_part(stream)), intersection(A, nonpositive_part(stream)))
    known = []
    for part in parts:
        try:
            v = oracle.verdict(stream, part)
        except UnresolvableVerdict:
            continue
        if v is ABS:
            return True
        known.append(v)
    if len(known) == 2:
        return False
    raise UnresolvableVerdict(f"cannot decide tameness of {A.describe()} for {stream.label}")


def verdict_to_value(v: Verdict):
    if v is PLUS:
        return P
    if v is MINUS:
        return N
    return None


def phi_from_verdicts(verdicts) -> PartialFunction:
    mapping = {i + 1: verdict_to_value(v) for i, v in enumerate(verdicts)}
    mapping = {k: v for k, v in mapping.items() if v is not None}
    return PartialFunction.from_mapping(mapping) if mapping else EMPTY


def phi(A: IndexSet, streams, oracle):
    """Coordinate i maps to p / n when A sends stream i to +inf / -inf."""
    return phi_from_verdicts([oracle.verdict(s, A) for s in streams])


@dataclass(frozen=True)
class CellUnion:
    patterns: tuple
    expr: IndexSet
    verdicts: tuple
    tame: tuple
    phi: object

    @property
    def is_tame(self) -> bool:
        return all(self.tame)

    def to_json(self) -> dict:
        return {
            "cells": [pattern_string(p) for p in self.patterns],
            "verdicts": [v.value for v in self.verdicts],
            "tame": list(self.tame),
            "phi": str(self.phi),
            "total": bool(self.phi) and self.phi.is_total,
        }


def _fold(vs):
    out = ABS
    for v in vs:
        out = verdict_union(out, v)
    return out


def cell_unions(cells: dict, streams, oracle, depth: int = PROBE_DEPTH) -> list:
    """Every nonempty union of nonempty cells with verdicts and tameness.

    Cell verdicts come from the oracle; union verdicts fold them with the
    disjoint-union rule.  When a fold is undefined (+inf and -inf together)
    the oracle is asked about the union directly.
    """
    streams = list(streams)
    live = nonempty_cells(cells, depth)
    pats = list(live)
    table = {p: [oracle.verdict(s, live[p]) for s in streams] for p in pats}
    out = []
    for r in range(1, len(pats) + 1):
        for combo in itertools.combinations(pats, r):
            expr = union(*(live[p] for p in combo))
            verdicts, tame = [], []
            for i, s in enumerate(streams):
                v = _fold(table[p][i] for p in combo)
                if v is UNKNOWN:
                    v = oracle.try_verdict(s, expr)
                verdicts.append(v)
                pos = _fold(table[p][i] for p in combo if p[i])
                neg = _fold(table[p][i] for p in combo if not p[i])
                tame.append(pos is ABS or neg is ABS)
            out.append(CellUnion(combo, expr, tuple(verdicts), tuple(tame), phi_from_verdicts(verdicts)))
    return out


def tame_cell_unions(cells: dict, streams, oracle, depth: int = PROBE_DEPTH) -> list:
    return [u for u in cell_unions(cells, streams, oracle, depth) if u.is_tame]


def tame_phi_family(cells: dict, streams, oracle, depth: int = PROBE_DEPTH) -> Family:
    """phi of every tame union of cells, dropping the empty function."""
    return Family.of(u.phi for u in tame_cell_unions(cells, streams, oracle, depth) if u.phi)


def closure_family(cell_phis) -> Family:
    """Close the nonempty cell phis under unions of compatible members."""
    members = {f for f in cell_phis if f}
    changed = True
    while changed:
        changed = False
        for f, g in itertools.combinations(list(members), 2):
            if f.compatible(g):
                h = f.union(g)
                if h not in members:
                    members.add(h)
                    changed = True
    return Family.of(members)
