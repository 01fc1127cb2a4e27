import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subseries_lab import kernels
from subseries_lab.errors import UnresolvableVerdict
from subseries_lab.fn32 import EMPTY, Family, FamilyType, PartialFunction, classify, is_full, is_union_closed
from subseries_lab.series import (ABS, ALL, COND, EMPTY_SET, MINUS, OSC, PLUS, UNKNOWN, ExplicitBlocks,
                                  FunctionStream, Residues, TrendPolicy, Verdict, VerdictOracle, are_disjoint,
                                  difference, empirical_verdict, evens, get_instance, get_stream, intersection,
                                  is_subset, is_tame, odds, parse_term, partial_sum_trace, phi,
                                  sign_partition, tame_phi_family, union, verdict_union)
from subseries_lab.series.oracle import Provenance
from subseries_lab.series.tameness import cell_unions, nonempty_cells
from subseries_lab.series.traces import crossings, decade_checkpoints, growth_verdict, trace_from_sums
from subseries_lab.series.verdicts import negate, verdict_difference

pf = PartialFunction.parse
FINITE = [ABS, COND]
TAGS = list(Verdict)


# ---------------------------------------------------------------- streams

def test_parse_term_forms():
    s = parse_term("(-1)^(n+1)/n")
    assert [s.term(n) for n in (1, 2, 3)] == [1, Fraction(-1, 2), Fraction(1, 3)]
    s = parse_term("-2*(-1)^n/n^2")
    assert s.term(1) == 2 and s.term(2) == Fraction(-1, 2)
    assert parse_term("3/n^2").term(3) == Fraction(1, 3)
    with pytest.raises(ValueError):
        parse_term("1/log(n)")


def test_catalog_streams():
    alt = get_stream("altharm")
    assert alt.term(1) == 1 and alt.term(2) == Fraction(-1, 2)
    assert get_stream("-altharm").term(1) == -1
    assert np.allclose(get_stream("intro2").values(4), [1, 0, -1 / 3, 0])
    with pytest.raises(KeyError):
        get_stream("nonsense")


def test_values_are_read_only():
    v = get_stream("altharm").values(10)
    with pytest.raises(ValueError):
        v[0] = 3.0


def test_negated_round_trip():
    alt = get_stream("altharm")
    assert alt.negated().negated().label == alt.label
    f = FunctionStream("sq", lambda n: Fraction(1, n * n))
    assert f.negated().term(2) == Fraction(-1, 4)
    assert f.negated().negated() is f


# ------------------------------------------------------------- index sets

def test_index_set_membership():
    s = Residues(4, [1, 3])
    assert s == odds()
    assert list(s.indices(8)) == [1, 3, 5, 7]
    assert not s.contains(4)
    assert ALL.mask(5).all() and not EMPTY_SET.mask(5).any()
    b = ExplicitBlocks([(0, 3), (10, 12)])
    assert list(b.indices(20)) == [1, 2, 3, 11, 12]
    assert b.is_finite


def test_index_set_algebra():
    u = union(odds(), evens())
    assert u.mask(50).all()
    assert not intersection(odds(), evens()).mask(50).any()
    d = difference(ALL, Residues(3, [0]))
    assert list(d.indices(7)) == [1, 2, 4, 5, 7]
    assert is_subset(Residues(4, [1]), odds())
    assert are_disjoint(odds(), evens())
    assert not are_disjoint(odds(), Residues(3, [0]))


def test_fingerprint_is_structural():
    assert union(odds(), Residues(4, [0])).fingerprint == union(odds(), Residues(4, [0])).fingerprint
    assert odds().fingerprint != evens().fingerprint


# ------------------------------------------------------------ partitions

def test_sign_partition_intro_is_mod4():
    cells = nonempty_cells(sign_partition(get_instance("intro")))
    assert len(cells) == 4
    got = sorted(tuple(sorted(c.residues()[1])) + (c.residues()[0],) for c in cells.values())
    assert got == [(0, 4), (1, 4), (2, 4), (3, 4)]


def test_sign_partition_single_positive_stream():
    cells = nonempty_cells(sign_partition([parse_term("1/n^2")]))
    assert len(cells) == 1
    (c,) = cells.values()
    assert c.mask(100).all()


def test_sign_partition_opposite_pair():
    cells = nonempty_cells(sign_partition([get_stream("altharm"), get_stream("-altharm")]))
    assert set(cells) == {(True, False), (False, True)}
    assert list(cells[(True, False)].indices(6)) == [1, 3, 5]
    assert list(cells[(False, True)].indices(6)) == [2, 4, 6]


def test_sign_partition_arity():
    with pytest.raises(ValueError):
        sign_partition([])
    with pytest.raises(ValueError):
        sign_partition([get_stream("altharm")] * 5)


@pytest.mark.parametrize("name", ["intro", "type1", "type1junk", "opposite", "cx"])
def test_cells_partition_prefix(name):
    cells = sign_partition(get_instance(name))
    depth = 5000
    masks = np.array([c.mask(depth) for c in cells.values()])
    assert (masks.sum(axis=0) == 1).all()


def test_zero_terms_are_nonpositive():
    cells = sign_partition([get_stream("intro2")])
    assert cells[(False,)].contains(2)


# ----------------------------------------------------------------- traces

def test_trace_basics():
    alt = get_stream("altharm")
    tr = partial_sum_trace(alt, ALL, 2)
    assert tr.exact and tr.sums() == [1, Fraction(1, 2)]
    tr = partial_sum_trace(alt, EMPTY_SET, 50)
    assert all(s == 0 for s in tr.sums())


def test_trace_odds_harmonic():
    tr = partial_sum_trace(get_stream("altharm"), odds(), 10**6)
    assert 7.1 <= tr.final <= 7.8
    expected = 0.5 * math.log(10**6) + 0.5 * (0.5772156649015329 + math.log(2))
    assert abs(tr.final - expected) < 1e-5


def test_trace_increments_and_extrema():
    tr = partial_sum_trace(get_stream("intro1"), Residues(4, [1, 2]), 3000)
    assert tr.increments_match()
    lo, ilo, hi, ihi = tr.extrema
    assert hi == tr.float_sums.max() and lo == tr.float_sums.min()
    assert tr.running_max()[-1] == hi


def test_trace_csv(tmp_path):
    tr = partial_sum_trace(get_stream("altharm"), odds(), 20)
    p = tmp_path / "t.csv"
    tr.write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "j,in_A,term,S"
    assert lines[1] == "1,1,1,1"
    assert lines[2] == "2,0,-1/2,1"
    assert len(lines) == 21
    tr.write_csv(p, checkpoints=[10, 20])
    assert len(p.read_text().splitlines()) == 3


def test_exact_and_float_paths_agree():
    s = get_stream("intro3")
    A = Residues(4, [2, 3])
    a = partial_sum_trace(s, A, 5000, exact=True)
    b = partial_sum_trace(s, A, 5000, exact=False)
    assert np.allclose(a.float_sums, b.float_sums, atol=1e-12)


def test_cumsum_backends_agree():
    x = np.random.default_rng(1).normal(size=20000) / np.arange(1, 20001)
    a = kernels.cumsum_numpy(x)
    if kernels.cumsum_numba is not None:
        assert np.allclose(a, kernels.cumsum_numba(x), atol=1e-13)
    assert np.allclose(a, np.cumsum(x), atol=1e-10)


# ---------------------------------------------------------------- verdicts

def test_verdict_union_table():
    assert verdict_union(PLUS, ABS) is PLUS
    assert verdict_union(PLUS, COND) is PLUS
    assert verdict_union(MINUS, COND) is MINUS
    assert verdict_union(ABS, ABS) is ABS
    assert verdict_union(ABS, COND) is COND
    assert verdict_union(PLUS, MINUS) is UNKNOWN
    assert verdict_union(PLUS, PLUS) is PLUS
    assert verdict_union(OSC, ABS) is UNKNOWN
    assert verdict_union(UNKNOWN, PLUS) is UNKNOWN


def test_verdict_difference():
    assert verdict_difference(COND, PLUS) is MINUS
    assert verdict_difference(COND, MINUS) is PLUS
    assert verdict_difference(PLUS, ABS) is PLUS
    assert verdict_difference(PLUS, PLUS) is UNKNOWN


@given(st.sampled_from(TAGS), st.sampled_from(TAGS))
def test_verdict_union_commutative(a, b):
    assert verdict_union(a, b) is verdict_union(b, a)


@given(st.sampled_from([PLUS, MINUS, ABS, COND]))
def test_abs_is_identity(a):
    assert verdict_union(ABS, a) is a


@given(st.sampled_from(TAGS))
def test_negate_involution(a):
    assert negate(negate(a)) is a


# ------------------------------------------------------------- oracle

def test_oracle_periodic_closed_form():
    o = VerdictOracle()
    alt = get_stream("altharm")
    assert o.verdict(alt, odds()) is PLUS
    assert o.verdict(alt, evens()) is MINUS
    assert o.verdict(alt, ALL) is COND
    assert o.resolve(alt, odds()).provenance is Provenance.DECLARED


def test_oracle_declared_beats_everything():
    o = VerdictOracle()
    s = FunctionStream("opaque", lambda n: Fraction(1, n * n), declared=ABS)
    assert o.verdict(s, ALL) is ABS
    o.declare(s, odds(), ABS)
    assert o.verdict(s, Residues(4, [1])) is ABS  # subset of absolute
    assert o.resolve(s, Residues(4, [1])).rule == "subset-of-absolute"


def test_oracle_unresolvable():
    o = VerdictOracle()
    s = FunctionStream("opaque", lambda n: Fraction(1, n * n))
    with pytest.raises(UnresolvableVerdict):
        o.resolve(s, odds())


def test_oracle_propagates_difference():
    o = VerdictOracle()
    s = FunctionStream("opaque", lambda n: Fraction((-1) ** (n + 1), n))
    o.declare(s, ALL, COND)
    o.declare(s, odds(), PLUS)
    e = o.resolve(s, evens())
    assert e.verdict is MINUS and e.provenance is Provenance.PROPAGATED


def test_oracle_mirror():
    o = VerdictOracle()
    s = FunctionStream("opaque", lambda n: Fraction(1, n))
    o.declare(s, odds(), PLUS)
    assert o.verdict(s.negated(), odds()) is MINUS


# ------------------------------------------------------------- tameness

def test_tameness_examples():
    o = VerdictOracle()
    alt = get_stream("altharm")
    assert is_tame(odds(), alt, o)
    assert not is_tame(ALL, alt, o)
    assert is_tame(Residues(4, [1]), alt, o)


def test_phi_intro_cells():
    st_ = get_instance("intro")
    o = VerdictOracle()
    assert phi(Residues(4, [1]), st_, o) == pf("{1:p,2:p}")
    assert phi(Residues(4, [2]), st_, o) == pf("{1:n,3:p}")
    assert phi(EMPTY_SET, st_, o) is EMPTY


def test_tame_phi_family_intro():
    st_ = get_instance("intro")
    F = tame_phi_family(sign_partition(st_), st_, VerdictOracle())
    assert F == Family.of(["{1:p,2:p}", "{1:p,2:n}", "{1:n,3:p}", "{1:n,3:n}"])
    assert classify(F) is FamilyType.TYPE2_0


@pytest.mark.parametrize("name,kind", [("intro", FamilyType.TYPE2_0), ("type1", FamilyType.TYPE1),
                                       ("type1junk", FamilyType.TYPE1)])
def test_tame_phi_family_is_full_union_closed(name, kind):
    st_ = get_instance(name)
    F = tame_phi_family(sign_partition(st_), st_, VerdictOracle())
    assert is_full(F) and is_union_closed(F)
    assert classify(F) is kind


def test_no_total_union_intro():
    st_ = get_instance("intro")
    unions = cell_unions(sign_partition(st_), st_, VerdictOracle())
    assert len(unions) == 15
    assert not any(u.phi and u.phi.is_total for u in unions)


def test_phi_of_tame_union_is_union():
    st_ = get_instance("intro")
    o = VerdictOracle()
    cells = nonempty_cells(sign_partition(st_))
    for u in cell_unions(sign_partition(st_), st_, o):
        if not u.is_tame or len(u.patterns) != 2:
            continue
        f, g = (phi(cells[p], st_, o) for p in u.patterns)
        if f and g and f.compatible(g):
            assert u.phi == f.union(g)


# ------------------------------------------------------- empirical policy

def test_empirical_verdicts():
    tr = partial_sum_trace(parse_term("(-1)^(n+1)/n"), odds(), 10**6, exact=False)
    assert empirical_verdict(tr, TrendPolicy(threshold=2.0)) is PLUS
    neg = partial_sum_trace(get_stream("-altharm"), odds(), 10**6, exact=False)
    assert empirical_verdict(neg, TrendPolicy(threshold=2.0)) is MINUS
    zero = trace_from_sums(np.zeros(1000), np.zeros(1000, bool), np.zeros(1000))
    assert empirical_verdict(zero) is UNKNOWN


def test_empirical_never_claims_convergence():
    tr = partial_sum_trace(get_stream("altharm"), ALL, 10**5, exact=False)
    assert empirical_verdict(tr) is UNKNOWN


def test_empirical_oscillation():
    s = np.concatenate([np.linspace(0, 3, 100), np.linspace(3, -3, 100), np.linspace(-3, 3, 100)])
    tr = trace_from_sums(s, np.ones(300, bool), np.diff(np.concatenate(([0.0], s))))
    assert empirical_verdict(tr, TrendPolicy(threshold=2.0, margin=0.5)) is OSC


def test_crossings_hysteresis():
    s = np.array([0, 1.9, 2.1, 1.8, 2.2, -2.1, 0.0])
    ev = crossings(s, 2.0, 0.5)
    assert [(lvl, d) for lvl, _, d in ev] == [(2.0, 1), (-2.0, -1)]


def test_growth_verdict():
    tr = partial_sum_trace(get_stream("altharm"), odds(), 10**5, exact=False)
    assert growth_verdict(tr) is PLUS
    tr = partial_sum_trace(parse_term("1/n^2"), ALL, 10**5, exact=False)
    assert growth_verdict(tr) is None


def test_decade_checkpoints():
    assert decade_checkpoints(10**6) == [10, 100, 1000, 10**4, 10**5, 10**6]


# ----------------------------------------------------------- additivity

streams_st = st.sampled_from(["altharm", "intro1", "intro2", "intro3", "type1a", "eg1a", "cx2"])


@settings(max_examples=25, deadline=None)
@given(streams_st, st.integers(min_value=0, max_value=2**31))
def test_trace_additivity(name, seed):
    rng = np.random.default_rng(seed)
    depth = 3000
    lab = rng.integers(0, 3, size=depth)
    idx_a = np.flatnonzero(lab == 1) + 1
    idx_b = np.flatnonzero(lab == 2) + 1
    A = ExplicitBlocks([(int(i) - 1, int(i)) for i in idx_a])
    B = ExplicitBlocks([(int(i) - 1, int(i)) for i in idx_b])
    s = get_stream(name)
    ta, tb, tu = (partial_sum_trace(s, X, depth) for X in (A, B, union(A, B)))
    if ta.exact:
        assert all(x + y == z for x, y, z in zip(ta.sums(), tb.sums(), tu.sums()))
    else:
        assert np.allclose(ta.float_sums + tb.float_sums, tu.float_sums, atol=1e-12, rtol=0)
