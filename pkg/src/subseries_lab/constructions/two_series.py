"""A single index set sending two conditionally convergent series to infinity."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InstanceContradiction
from ..series.indexsets import IndexSet, union
from ..series.oracle import Provenance
from ..series.tameness import pattern_string
from ..series.verdicts import ABS, MINUS, PLUS, verdict_union

PP, PM, MP, MM = (True, True), (True, False), (False, True), (False, False)


@dataclass(frozen=True)
class TwoSeriesResult:
    A: IndexSet
    cells: tuple
    verdicts: tuple
    early_exit: bool

    def to_json(self) -> dict:
        return {
            "A": self.A.describe(),
            "cells": [pattern_string(p) for p in self.cells],
            "verdicts": [v.value for v in self.verdicts],
            "early_exit": self.early_exit,
        }


def _check_claim(table: dict) -> None:
    """Within each row and column one part diverges; a non-divergent part is absolute."""
    groups = [
        (0, (PP, PM), PLUS), (0, (MP, MM), MINUS),
        (1, (PP, MP), PLUS), (1, (PM, MM), MINUS),
    ]
    for i, pats, inf in groups:
        vs = [table[p][i] for p in pats]
        if any(v not in (inf, ABS) for v in vs) or inf not in vs:
            raise InstanceContradiction(
                f"series {i + 1} on cells {[pattern_string(p) for p in pats]} has verdicts "
                f"{[v.value for v in vs]}; expected one {inf.value} and otherwise absolute convergence")


def two_series_select(cells: dict, streams, oracle) -> TwoSeriesResult:
    a, b = streams
    table = {p: (oracle.verdict(a, cells[p]), oracle.verdict(b, cells[p])) for p in (PP, PM, MP, MM)}
    for p in (PP, PM, MP, MM):
        va, vb = table[p]
        if va.is_infinite and vb.is_infinite:
            return TwoSeriesResult(cells[p], (p,), (va, vb), True)
    _check_claim(table)
    A = union(cells[PP], cells[PM])
    va = verdict_union(table[PP][0], table[PM][0])
    vb = verdict_union(table[PP][1], table[PM][1])
    if not (va.is_infinite and vb.is_infinite):
        raise InstanceContradiction(
            f"A^++ u A^+- gives ({va.value}, {vb.value}); the cell verdicts are inconsistent")
    for s, v in ((a, va), (b, vb)):
        oracle.declare(s, A, v, Provenance.PROPAGATED, "disjoint-union",
                       (cells[PP].fingerprint, cells[PM].fingerprint))
    return TwoSeriesResult(A, (PP, PM), (va, vb), False)
