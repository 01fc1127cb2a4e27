"""The case analysis that sends three conditionally convergent series to infinity.

All reasoning happens on the *picture streams*: the instance streams
permuted and sign-flipped by the relabeling that carries the canonical
picture family onto the instance family.  Index sets are shared between
the two views, so the chosen set needs no translation; only verdicts are
mapped back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InstanceContradiction, SubseriesError
from ..fn32 import (EMPTY, N, P, Family, FamilyType, PartialFunction, Symmetry, TYPE1_ROLES,
                    TYPE2_ROLES, classify, relabeling_to_picture)
from ..series.indexsets import ALL, EMPTY_SET, IndexSet, difference, intersection, union
from ..series.oracle import Provenance, VerdictOracle
from ..series.tameness import (cell_unions, nonempty_cells, pattern_string, phi_from_verdicts,
                               sign_partition)
from ..series.traces import TrendPolicy, empirical_verdict, growth_verdict, partial_sum_trace
from ..series.verdicts import (ABS, COND, MINUS, PLUS, Verdict, negate, verdict_difference,
                               verdict_union)
from .balance import DEFAULT_DEPTH, balance_split, greedy_balance

SCHEMA_VERSION = 1
CASES = ("TotalFunction", "Case1", "Case2A", "Case2B", "Case2C")


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    """``verdict`` of picture series ``series`` over the set named ``target``."""

    target: str
    series: int
    verdict: Verdict
    rule: str
    operands: tuple = ()  # (set name, series, verdict) triples
    numeric: bool = False
    note: str = ""

    @property
    def claim(self) -> str:
        return f"sum over {self.target} of a{self.series} is {self.verdict.value}"

    def to_json(self) -> dict:
        return {
            "claim": self.claim,
            "target": self.target,
            "series": self.series,
            "verdict": self.verdict.value,
            "rule": self.rule,
            "operands": [[n, i, v.value] for n, i, v in self.operands],
            "numeric": self.numeric,
            "note": self.note,
        }


LEAF_RULES = {"periodic-closed-form", "stream-annotation", "declared", "finite-set",
              "disjoint-union-of-cells", "greedy-balance", "empirical-growth",
              "presumed-absolute", "negation"}


def _role_value(f, i):
    v = f.get(i)
    return PLUS if v == P else MINUS if v == N else ABS


def validate_certificate(steps, picture: Family | None = None) -> list[str]:
    """Re-check every step; return a list of problems (empty when valid)."""
    known: dict = {}
    problems = []
    for k, st in enumerate(steps):
        ops = st.operands
        for name, i, v in ops:
            if known.get((name, i), v) is not v:
                problems.append(f"step {k}: operand {name}/a{i} disagrees with an earlier step")
        vs = [v for _, _, v in ops]
        ok = True
        if st.rule == "disjoint-union":
            acc = vs[0] if vs else ABS
            for v in vs[1:]:
                acc = verdict_union(acc, v)
            ok = len(vs) >= 2 and acc is st.verdict
        elif st.rule == "difference":
            ok = len(vs) == 2 and verdict_difference(vs[0], vs[1]) is st.verdict
        elif st.rule == "subset-of-absolute":
            ok = len(vs) == 1 and vs[0] is ABS and st.verdict is ABS
        elif st.rule == "balance-split":
            ok = len(vs) == 1 and vs[0].is_infinite and vs[0] is st.verdict
        elif st.rule == "unique-member":
            ok = False
            if picture is not None and len(ops) == 1 and vs[0].is_infinite:
                _, j, v = ops[0]
                want = P if v is PLUS else N
                matches = [f for f in picture if f.get(j) == want]
                ok = bool(matches) and all(_role_value(f, st.series) is st.verdict for f in matches)
        elif st.rule in LEAF_RULES:
            ok = True
        else:
            ok = False
        if not ok:
            problems.append(f"step {k} ({st.rule}): {st.claim} does not follow from its operands")
        known[(st.target, st.series)] = st.verdict
    return problems


# --------------------------------------------------------------------------
# partitions
# --------------------------------------------------------------------------

@dataclass
class LabeledPartition:
    parts: dict
    junk: IndexSet
    junk_into: str
    cell_labels: dict
    targets: dict

    def to_json(self) -> dict:
        return {
            "parts": {k: v.describe() for k, v in self.parts.items()},
            "junk": self.junk.describe(),
            "junk_into": self.junk_into,
            "cells": {pattern_string(p): lab for p, lab in self.cell_labels.items()},
            "targets": {k: str(v) for k, v in self.targets.items()},
        }


def picture_streams(streams, s: Symmetry) -> list:
    """pic[j] = +-inst[x] where perm(x) = j, negated when x is flipped."""
    out = [None, None, None]
    for x in (1, 2, 3):
        j = s.perm[x - 1]
        st = streams[x - 1]
        out[j - 1] = st.negated() if s.flips[x - 1] else st
    return out


def build_labeled_partition(cells, streams, oracle, family_type: FamilyType, relabeling: Symmetry,
                            depth: int | None = None) -> LabeledPartition:
    """Group the sign cells by the picture role of their phi.

    ``streams`` are the instance streams; ``relabeling`` carries the picture
    onto the instance family.  The junk cells (empty phi) go to F for Type 1
    and to E for Type 2, as do the c1 cells; c2 cells go to G.
    """
    pic = picture_streams(streams, relabeling)
    live = nonempty_cells(cells, depth) if depth else nonempty_cells(cells)
    if family_type is FamilyType.TYPE1:
        roles = {str(TYPE1_ROLES[r]): r.upper() for r in ("f", "g", "h")}
        labels, junk_into = ("F", "G", "H"), "F"
        targets = {r.upper(): TYPE1_ROLES[r] for r in ("f", "g", "h")}
    elif family_type.is_type2:
        roles = {str(TYPE2_ROLES[r]): lab for r, lab in
                 (("e", "E"), ("c1", "E"), ("f", "F"), ("g", "G"), ("c2", "G"), ("h", "H"))}
        labels, junk_into = ("E", "F", "G", "H"), "E"
        targets = {r.upper(): TYPE2_ROLES[r] for r in ("e", "f", "g", "h")}
    else:
        raise ValueError(f"no labeled partition for {family_type.value}")
    groups = {lab: [] for lab in labels}
    junk, cell_labels, has_role = [], {}, set()
    for pat, cell in live.items():
        f = phi_from_verdicts([oracle.verdict(s, cell) for s in pic])
        if not f:
            junk.append(cell)
            cell_labels[pat] = "J"
            continue
        lab = roles.get(str(f))
        if lab is None:
            raise InstanceContradiction(f"cell {pattern_string(pat)} has phi {f}, not in the picture")
        groups[lab].append(cell)
        cell_labels[pat] = lab
        for r, g in targets.items():
            if g == f:
                has_role.add(r)
    missing = [r for r in targets if r not in has_role]
    if missing:
        raise InstanceContradiction(f"no cell realizes the picture role(s) {missing}")
    J = union(*junk) if junk else EMPTY_SET
    groups[junk_into].extend(junk)
    parts = {lab: union(*groups[lab]) for lab in labels}
    return LabeledPartition(parts, J, junk_into, cell_labels, targets)


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

@dataclass
class CaseReport:
    family_type: FamilyType | None = None
    case: str | None = None
    chosen_set: IndexSet | None = None
    certificate: list = field(default_factory=list)
    relabeling: Symmetry | None = None
    instance_family: Family | None = None
    picture_family: Family | None = None
    partition: LabeledPartition | None = None
    picture_verdicts: tuple = ()
    instance_verdicts: tuple = ()
    notes: list = field(default_factory=list)
    evidence: dict = field(default_factory=dict)
    named_sets: dict = field(default_factory=dict)
    completed: bool = False

    @property
    def numeric_steps(self) -> int:
        return sum(1 for s in self.certificate if s.numeric)

    def validate(self) -> list[str]:
        return validate_certificate(self.certificate, self.picture_family)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "completed": self.completed,
            "family_type": self.family_type.value if self.family_type else None,
            "case": self.case,
            "relabeling": ({**self.relabeling.to_json(), "describe": self.relabeling.describe()}
                           if self.relabeling else None),
            "instance_family": self.instance_family.sorted_strings() if self.instance_family else None,
            "picture_family": self.picture_family.sorted_strings() if self.picture_family else None,
            "partition": self.partition.to_json() if self.partition else None,
            "chosen_set": self.chosen_set.to_json() if self.chosen_set is not None else None,
            "sets": {k: v.describe() for k, v in self.named_sets.items()},
            "certificate": [s.to_json() for s in self.certificate],
            "numeric_steps": self.numeric_steps,
            "picture_verdicts": [v.value for v in self.picture_verdicts],
            "instance_verdicts": [v.value for v in self.instance_verdicts],
            "notes": list(self.notes),
            "evidence": self.evidence,
        }


def instance_verdicts(picture_verdicts, s: Symmetry) -> tuple:
    """Verdict of instance stream x from that of picture stream perm(x)."""
    out = []
    for x in (1, 2, 3):
        v = picture_verdicts[s.perm[x - 1] - 1]
        out.append(negate(v) if s.flips[x - 1] else v)
    return tuple(out)


class _Chain:
    """Accumulates steps and mirrors them into the oracle."""

    def __init__(self, report: CaseReport, oracle: VerdictOracle, pic):
        self.report, self.oracle, self.pic = report, oracle, pic
        self.sets = report.named_sets

    def name(self, label: str, A: IndexSet) -> IndexSet:
        self.sets[label] = A
        return A

    def leaf(self, label: str, i: int) -> Verdict:
        e = self.oracle.resolve(self.pic[i - 1], self.sets[label])
        rule = e.rule if e.rule in LEAF_RULES else "disjoint-union-of-cells"
        self._add(Step(label, i, e.verdict, rule, (), e.provenance is Provenance.EMPIRICAL))
        return e.verdict

    def derive(self, label: str, i: int, verdict: Verdict, rule: str, operands, numeric=False, note=""):
        ops = tuple((n, j, self.get(n, j)) for n, j in operands)
        self._add(Step(label, i, verdict, rule, ops, numeric, note))
        return verdict

    def combine(self, label: str, i: int, rule: str, operands):
        vs = [self.get(n, j) for n, j in operands]
        if rule == "difference":
            v = verdict_difference(vs[0], vs[1])
        else:
            v = vs[0]
            for w in vs[1:]:
                v = verdict_union(v, w)
        return self.derive(label, i, v, rule, operands)

    def get(self, label: str, i: int) -> Verdict:
        for st in reversed(self.report.certificate):
            if st.target == label and st.series == i:
                return st.verdict
        return self.leaf(label, i)

    def _add(self, st: Step):
        self.report.certificate.append(st)
        if st.target in self.sets:
            prov = Provenance.EMPIRICAL if st.numeric else Provenance.PROPAGATED
            if self.oracle.lookup(self.pic[st.series - 1], self.sets[st.target]) is None:
                self.oracle.declare(self.pic[st.series - 1], self.sets[st.target], st.verdict, prov, st.rule)


def _unique_member(ch: _Chain, label: str, by: int, series):
    for i in series:
        v = ch.get(label, by)
        want = P if v is PLUS else N
        f = next(g for g in ch.report.picture_family if g.get(by) == want)
        ch.derive(label, i, _role_value(f, i), "unique-member", [(label, by)])


# --------------------------------------------------------------------------
# the selector
# --------------------------------------------------------------------------

def three_series_select(streams, oracle: VerdictOracle | None = None, depth: int = DEFAULT_DEPTH,
                        blocks: int = 4, policy: TrendPolicy | None = None,
                        evidence_depth: int | None = None, growth_ratio: float = 0.5) -> CaseReport:
    """Run the full case analysis and return a CaseReport.

    ``depth`` caps every materialized construction.  If ``evidence_depth``
    is given, the chosen set is traced to that depth for each stream and
    classified by ``policy``.  On failure the partially filled report is
    attached to the raised error as ``partial_report``.
    """
    streams = list(streams)
    if len(streams) != 3:
        raise ValueError("three_series_select takes exactly three streams")
    oracle = oracle or VerdictOracle()
    report = CaseReport()
    try:
        _select(streams, oracle, depth, blocks, report, growth_ratio)
        if evidence_depth:
            attach_evidence(report, streams, evidence_depth, policy or TrendPolicy())
        report.completed = True
    except SubseriesError as exc:
        exc.partial_report = report
        raise
    return report


def _select(streams, oracle, depth, blocks, report, growth_ratio):
    cells = sign_partition(streams)
    unions = cell_unions(cells, streams, oracle)
    tame = [u for u in unions if u.is_tame]
    for u in tame:
        if u.phi and u.phi.is_total:
            report.case = "TotalFunction"
            report.family_type = FamilyType.HAS_TOTAL
            report.chosen_set = u.expr
            report.relabeling = Symmetry()
            report.named_sets["A"] = u.expr
            for i, v in enumerate(u.verdicts, start=1):
                report.certificate.append(Step("A", i, v, "disjoint-union-of-cells"))
            report.picture_verdicts = report.instance_verdicts = u.verdicts
            report.instance_family = Family.of(x.phi for x in tame if x.phi)
            return
    family = Family.of(u.phi for u in tame if u.phi)
    report.instance_family = family
    kind = classify(family)
    report.family_type = kind
    if kind is FamilyType.NOT_FULL_UNION_CLOSED:
        raise InstanceContradiction(f"tame phi family {family} is not full and union-closed")
    picture, s = relabeling_to_picture(family, kind)
    report.picture_family, report.relabeling = picture, s
    pic = picture_streams(streams, s)
    part = build_labeled_partition(cells, streams, oracle, kind, s)
    report.partition = part
    ch = _Chain(report, oracle, pic)
    for lab, A in part.parts.items():
        ch.name(lab, A)
    ch.name("N", ALL)
    if kind is FamilyType.TYPE1:
        _case1(ch, pic, oracle, depth, blocks)
    else:
        _case2(ch, pic, oracle, depth, blocks, growth_ratio)
    report.instance_verdicts = instance_verdicts(report.picture_verdicts, s)
    bad = [v for v in report.picture_verdicts if not v.is_infinite]
    if bad:
        raise InstanceContradiction(f"final verdicts {[v.value for v in report.picture_verdicts]} are not all infinite")


def _case1(ch: _Chain, pic, oracle, depth, blocks):
    rep = ch.report
    rep.case = "Case1"
    S = ch.sets
    F, G, H = S["F"], S["G"], S["H"]
    ch.name("F u G", union(F, G))
    ch.leaf("N", 1)
    ch.combine("F u G", 1, "difference", [("N", 1), ("H", 1)])
    split = balance_split(F, pic[0], blocks=blocks, depth_cap=depth, oracle=oracle, names=("B", "F \\ B"))
    B, rest = ch.name("B", split.B), ch.name("F \\ B", split.rest)
    rep.evidence["schedule"] = split.schedule.to_json()
    ch.derive("B", 1, ch.get("F", 1), "balance-split", [("F", 1)])
    ch.derive("F \\ B", 1, ch.get("F", 1), "balance-split", [("F", 1)])
    A = ch.name("B u G", union(B, G))
    ch.combine("B u G", 1, "difference", [("F u G", 1), ("F \\ B", 1)])
    _unique_member(ch, "B", 1, [2])
    ch.combine("B u G", 2, "disjoint-union", [("B", 2), ("G", 2)])
    ch.derive("B", 3, ABS, "subset-of-absolute", [("F", 3)])
    ch.combine("B u G", 3, "disjoint-union", [("B", 3), ("G", 3)])
    rep.chosen_set = A
    rep.picture_verdicts = tuple(ch.get("B u G", i) for i in (1, 2, 3))


def _growth(stream, A, depth, ratio):
    tr = partial_sum_trace(stream, A, depth, exact=False)
    return growth_verdict(tr, ratio=ratio), tr


def _case2(ch: _Chain, pic, oracle, depth, blocks, ratio):
    rep = ch.report
    S = ch.sets
    E, F, G, H = S["E"], S["F"], S["G"], S["H"]
    EF = ch.name("E u F", union(E, F))
    ch.name("G u H", union(G, H))
    ch.combine("E u F", 1, "disjoint-union", [("E", 1), ("F", 1)])
    ch.combine("G u H", 1, "disjoint-union", [("G", 1), ("H", 1)])
    g = greedy_balance(E, EF, pic[0], depth, oracle=oracle, name="C")
    C = ch.name("C", g.B)
    ch.name("E u C", union(E, C))
    rep.evidence["greedy"] = {
        "depth": depth,
        "final": float(g.trace.final),
        "sign": g.sign,
        "size_of_C": int(g.B.mask(depth).sum()),
    }
    rep.notes.append("The set produced by the greedy rule is called C here; its statements "
                     "about the third series are read as statements about C throughout.")
    ch.derive("E u C", 1, COND, "greedy-balance", [("E u F", 1), ("G u H", 1), ("E", 1)],
              note="rule materialized to depth; E alone diverges, so convergence is conditional")
    CG = ch.name("C n G", intersection(C, G))
    CH = ch.name("C n H", intersection(C, H))
    vg, tg = _growth(pic[2], CG, depth, ratio)
    vh, th = _growth(pic[2], CH, depth, ratio)
    rep.evidence["subcase"] = {
        "C n G": {"a3_final": float(tg.final), "growth": vg.value if vg else "shrinking"},
        "C n H": {"a3_final": float(th.final), "growth": vh.value if vh else "shrinking"},
        "ratio": ratio,
    }
    if vg is None and vh is None:
        _case2a(ch, oracle, depth)
    elif vg is not None and vh is not None:
        _case2c(ch, vg, vh)
    else:
        _case2b(ch, pic, oracle, depth, blocks, vg if vg is not None else vh)


def _case2a(ch: _Chain, oracle, depth):
    rep = ch.report
    rep.case = "Case2A"
    S = ch.sets
    E, C, G = S["E"], S["C"], S["G"]
    ch.derive("C", 3, ABS, "presumed-absolute", [], numeric=True,
              note="both sign parts of C grow like a convergent series at the checkpoints")
    ch.name("G n C", intersection(G, C))
    ch.derive("G n C", 3, ABS, "subset-of-absolute", [("C", 3)])
    ch.name("G \\ C", difference(G, C))
    ch.combine("G \\ C", 3, "difference", [("G", 3), ("G n C", 3)])
    _unique_member(ch, "G \\ C", 3, [1])
    A = ch.name("E u C u G", union(E, C, G))
    ch.combine("E u C u G", 1, "disjoint-union", [("E u C", 1), ("G \\ C", 1)])
    ch.name("G u C", union(G, C))
    ch.leaf("G u H", 2)
    ch.derive("G u C", 2, ABS, "subset-of-absolute", [("G u H", 2)])
    ch.combine("E u C u G", 2, "disjoint-union", [("E", 2), ("G u C", 2)])
    ch.combine("E u C", 3, "disjoint-union", [("E", 3), ("C", 3)])
    ch.combine("E u C u G", 3, "disjoint-union", [("E u C", 3), ("G \\ C", 3)])
    rep.chosen_set = A
    rep.picture_verdicts = tuple(ch.get("E u C u G", i) for i in (1, 2, 3))


def _case2b(ch: _Chain, pic, oracle, depth, blocks, v3):
    rep = ch.report
    rep.case = "Case2B"
    S = ch.sets
    E, C = S["E"], S["C"]
    ch.derive("C", 3, v3, "empirical-growth", [], numeric=True,
              note="exactly one sign part of C grows like a divergent series")
    split = balance_split(C, pic[2], blocks=blocks, depth_cap=depth, oracle=oracle, names=("B", "C \\ B"))
    ch.name("B", split.B)
    ch.name("C \\ B", split.rest)
    rep.evidence["schedule"] = split.schedule.to_json()
    ch.derive("B", 3, v3, "balance-split", [("C", 3)])
    ch.derive("C \\ B", 3, v3, "balance-split", [("C", 3)])
    _unique_member(ch, "C \\ B", 3, [1])
    _unique_member(ch, "B", 3, [2])
    A = ch.name("E u B", union(E, split.B))
    ch.combine("E u B", 1, "difference", [("E u C", 1), ("C \\ B", 1)])
    ch.combine("E u B", 2, "disjoint-union", [("E", 2), ("B", 2)])
    ch.combine("E u B", 3, "disjoint-union", [("E", 3), ("B", 3)])
    rep.chosen_set = A
    rep.picture_verdicts = tuple(ch.get("E u B", i) for i in (1, 2, 3))


def _case2c(ch: _Chain, vg, vh):
    rep = ch.report
    rep.case = "Case2C"
    S = ch.sets
    E, CG = S["E"], S["C n G"]
    ch.derive("C n G", 3, vg, "empirical-growth", [], numeric=True)
    ch.derive("C n H", 3, vh, "empirical-growth", [], numeric=True)
    _unique_member(ch, "C n G", 3, [1, 2])
    _unique_member(ch, "C n H", 3, [1])
    A = ch.name("E u (C n G)", union(E, CG))
    ch.combine("E u (C n G)", 1, "difference", [("E u C", 1), ("C n H", 1)])
    ch.combine("E u (C n G)", 2, "disjoint-union", [("E", 2), ("C n G", 2)])
    ch.combine("E u (C n G)", 3, "disjoint-union", [("E", 3), ("C n G", 3)])
    rep.chosen_set = A
    rep.picture_verdicts = tuple(ch.get("E u (C n G)", i) for i in (1, 2, 3))


def attach_evidence(report: CaseReport, streams, depth: int, policy: TrendPolicy) -> list:
    """Trace the chosen set for each instance stream and classify the traces."""
    traces, out = [], []
    for s in streams:
        tr = partial_sum_trace(s, report.chosen_set, depth, exact=False)
        traces.append(tr)
        cps = policy.checkpoints_for(depth)
        out.append({
            "stream": s.label,
            "verdict": empirical_verdict(tr, policy).value,
            "final": float(tr.final),
            "checkpoints": {str(c): float(tr.S(c)) for c in cps},
        })
    report.evidence["traces"] = {"depth": depth, "threshold": policy.threshold,
                                 "margin": policy.margin, "per_stream": out}
    report._traces = traces
    return traces
