import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subseries_lab import kernels
from subseries_lab.fn32 import (ALL_FUNCTIONS, ALL_SYMMETRIES, EMPTY, N_NONTOTAL, TOTAL_MASK, Family,
                                FamilyType, PartialFunction, Symmetry, all_partial_functions,
                                apply_symmetry, are_compatible, canonical_form, classify,
                                enumerate_classes, find_relabeling, has_total, is_full,
                                is_union_closed, qualifying_count, relabeling_to_picture,
                                sweep_total_free, type1_picture, type2_picture)

pf = PartialFunction.parse
T1 = Family.of(["{1:p,2:n}", "{2:p,3:n}", "{3:p,1:n}"])
T2 = Family.of(["{2:p,1:p}", "{2:n,1:p}", "{3:p,1:n}", "{3:n,1:n}"])
SINGLETONS = Family.of([f"{{{x}:{v}}}" for x in (1, 2, 3) for v in "pn"])

families = st.integers(min_value=0, max_value=(1 << 26) - 1).map(Family)
symmetries = st.sampled_from(ALL_SYMMETRIES)


def brute_union_closed(F):
    members = set(F.members)
    for f in members:
        for g in members:
            if are_compatible(f, g):
                u = PartialFunction.from_mapping({**dict(f.items()), **dict(g.items())})
                if u not in members:
                    return False
    return True


def test_enumeration_counts():
    fs = all_partial_functions()
    assert len(fs) == 26
    assert len(set(fs)) == 26
    assert pf("{1:p}") in fs
    assert pf("{1:p,2:p,3:p}") in fs
    assert sum(1 for f in fs if not f.is_total) == N_NONTOTAL == 18


def test_enumeration_order_is_size_then_coords_then_p_first():
    keys = [(len(f.domain), tuple(sorted(f.domain))) for f in ALL_FUNCTIONS]
    assert keys == sorted(keys)
    assert str(ALL_FUNCTIONS[0]) == "{1:p}" and str(ALL_FUNCTIONS[1]) == "{1:n}"


def test_parse_round_trip():
    for f in ALL_FUNCTIONS:
        assert pf(str(f)) == f
    assert pf("{2:n, 1:p}") == pf("{1:p,2:n}")
    with pytest.raises(ValueError):
        pf("{1:q}")


def test_compatibility():
    assert are_compatible(pf("{1:p}"), pf("{2:n}"))
    assert not are_compatible(pf("{1:p,2:p}"), pf("{2:n,3:n}"))
    f = pf("{1:p,3:n}")
    assert are_compatible(f, f)


def test_fullness():
    assert is_full(SINGLETONS)
    assert not is_full(Family())
    assert is_full(T1)


def test_union_closedness():
    assert not is_union_closed(Family.of(["{1:p}", "{2:p}"]))
    assert is_union_closed(Family.of(["{1:p}", "{2:p}", "{1:p,2:p}"]))
    assert is_union_closed(T1)


def test_has_total():
    assert has_total(Family.of(["{1:p,2:p,3:p}"]))
    assert not has_total(T1)
    assert not has_total(Family())


def test_classify_pictures():
    assert classify(T1) is FamilyType.TYPE1
    assert classify(T2) is FamilyType.TYPE2_0
    assert classify(SINGLETONS) is FamilyType.NOT_FULL_UNION_CLOSED
    assert classify(type2_picture(c1=True)) is FamilyType.TYPE2_1
    assert classify(type2_picture(c2=True)) is FamilyType.TYPE2_1
    assert classify(type2_picture(c1=True, c2=True)) is FamilyType.TYPE2_2


def test_two_type1_pictures_are_relabelings():
    assert type1_picture() == T1
    other = Family.of(["{1:p,2:p}", "{2:n,3:n}", "{1:n,3:p}"])
    assert other != T1
    s = find_relabeling(other, T1)
    assert s is not None and apply_symmetry(s, other) == T1
    assert canonical_form(other) == canonical_form(T1)
    assert canonical_form(T1) != canonical_form(T2)


def test_symmetry_group():
    assert len(set(ALL_SYMMETRIES)) == 48
    for s in ALL_SYMMETRIES:
        assert s.then(s.inverse()) == Symmetry.identity()
        assert s.inverse().then(s) == Symmetry.identity()
    closure = {a.then(b) for a in ALL_SYMMETRIES for b in ALL_SYMMETRIES}
    assert closure == set(ALL_SYMMETRIES)


def test_symmetry_formula():
    # g(x) = tau_x(f(perm(x)))
    s = Symmetry((2, 3, 1), (True, False, False))
    f = pf("{1:p,2:n}")
    assert s.apply_function(f) == pf("{1:p,3:p}")


def test_classes():
    classes = enumerate_classes()
    assert len(classes) == 4
    assert sorted(len(c.representative) for c in classes) == [3, 4, 5, 6]
    assert {c.family_type for c in classes} == {FamilyType.TYPE1, FamilyType.TYPE2_0,
                                                FamilyType.TYPE2_1, FamilyType.TYPE2_2}
    assert qualifying_count() == sum(c.orbit_size for c in classes) == 32
    for c in classes:
        assert canonical_form(c.representative) == c.representative


def test_type1_representative_shape():
    rep = next(c.representative for c in enumerate_classes() if c.family_type is FamilyType.TYPE1)
    assert all(len(f.domain) == 2 for f in rep)
    assert not any(are_compatible(f, g) for f, g in itertools.combinations(rep.members, 2))


def test_adding_total_gives_has_total():
    for c in enumerate_classes():
        for f in ALL_FUNCTIONS:
            if f.is_total:
                assert classify(c.representative.add(f)) is FamilyType.HAS_TOTAL


def test_sweep_matches_definitions_on_samples():
    uc, full = sweep_total_free()
    rng = random.Random(7)
    for m in [0, 1, (1 << 18) - 1] + [rng.randrange(1 << 18) for _ in range(400)]:
        F = Family(m)
        assert uc[m] == is_union_closed(F)
        assert full[m] == is_full(F)


def test_sweep_backends_agree():
    from subseries_lab.fn32 import _sweep_tables
    if kernels.fn32_sweep_numba is None:
        pytest.skip("numba not installed")
    args = (N_NONTOTAL, *_sweep_tables())
    a = kernels.fn32_sweep_numpy(*args)
    b = kernels.fn32_sweep_numba(*args)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_relabeling_to_picture():
    for c in enumerate_classes():
        for s in ALL_SYMMETRIES[::7]:
            F = apply_symmetry(s, c.representative)
            pic, r = relabeling_to_picture(F)
            assert apply_symmetry(r, pic) == F


def test_empty_function_not_a_member():
    with pytest.raises(ValueError):
        Family.of([EMPTY])
    assert EMPTY not in SINGLETONS


@settings(max_examples=200, deadline=None)
@given(families, symmetries)
def test_properties_preserved_by_symmetry(F, s):
    G = apply_symmetry(s, F)
    assert len(G) == len(F)
    assert is_full(G) == is_full(F)
    assert is_union_closed(G) == is_union_closed(F)
    assert has_total(G) == has_total(F)
    assert canonical_form(G) == canonical_form(F)
    assert apply_symmetry(s.inverse(), G) == F


@settings(max_examples=200, deadline=None)
@given(families)
def test_canonical_form_idempotent(F):
    C = canonical_form(F)
    assert canonical_form(C) == C
    assert C.mask <= F.mask


@settings(max_examples=300, deadline=None)
@given(families)
def test_union_closed_matches_brute_force(F):
    assert is_union_closed(F) == brute_union_closed(F)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=(1 << 18) - 1), symmetries)
def test_classify_invariant(m, s):
    F = Family(m)
    assert classify(apply_symmetry(s, F)) is classify(F)


def test_total_mask():
    assert bin(TOTAL_MASK).count("1") == 8
