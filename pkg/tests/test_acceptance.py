"""Acceptance checks.  Each test prints one PASS/FAIL line before asserting.

Run with ``pytest -s tests/test_acceptance.py`` to see the report lines.
"""
import random
import time
from fractions import Fraction

import mpmath
import numpy as np

from subseries_lab import counterexample as cx
from subseries_lab import fn32
from subseries_lab.cli import main
from subseries_lab.constructions import balance_split, greedy_balance, replay_greedy, three_series_select
from subseries_lab.constructions.three_series import attach_evidence, validate_certificate
from subseries_lab.series import (ExplicitBlocks, Residues, STREAM_NAMES, TrendPolicy, VerdictOracle,
                                  empirical_verdict, evens, get_instance, get_stream, odds,
                                  partial_sum_trace, sign_partition, tame_phi_family, union)
from subseries_lab.series.tameness import cell_unions
from subseries_lab.series.traces import envelope_start

EPS = 0.01
FINAL_TOL = 0.05
T_TREND = 1.5


def report(n, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    return ok


# 1 ----------------------------------------------------------------------

def test_c1_fn32_classes(capsys):
    import json
    t = time.perf_counter()
    main(["enumerate-fn32"])
    doc = json.loads(capsys.readouterr().out)
    dt = time.perf_counter() - t
    counts = sorted(c["member_count"] for c in doc["classes"])
    rng = random.Random(2024)
    invariant = True
    for _ in range(1000):
        F = fn32.Family(rng.randrange(1 << 26))
        k = fn32.classify(F)
        if any(fn32.classify(fn32.apply_symmetry(s, F)) is not k for s in fn32.ALL_SYMMETRIES):
            invariant = False
            break
    ok = len(doc["classes"]) == 4 and counts == [3, 4, 5, 6] and dt < 10 and invariant
    with capsys.disabled():
        report(1, ok, f"classes={len(doc['classes'])} sizes={counts} sweep={dt:.2f}s invariant={invariant}")
    assert ok


# 2 ----------------------------------------------------------------------

def test_c2_mod4_example():
    t = time.perf_counter()
    streams = get_instance("intro")
    o = VerdictOracle()
    cells = sign_partition(streams)
    unions = cell_unions(cells, streams, o)
    none_total = all(not (u.phi and u.phi.is_total) for u in unions)
    fam = tame_phi_family(cells, streams, o)
    dt = time.perf_counter() - t
    shared = set.intersection(*(set(f.domain) for f in fam))
    ok = (len(unions) == 15 and none_total and len(fam) == 4
          and fn32.classify(fam) is fn32.FamilyType.TYPE2_0 and shared == {1} and dt < 1)
    report(2, ok, f"unions={len(unions)} no_total={none_total} family={len(fam)} shared={sorted(shared)} "
                  f"time={dt:.3f}s")
    assert ok


# 3 ----------------------------------------------------------------------

def test_c3_greedy_balance():
    depth = 10**6
    par = get_stream("parity")
    t = time.perf_counter()
    g = greedy_balance(evens(), evens(), par, depth)
    dt = time.perf_counter() - t
    in_b = g.B.mask(depth)
    replay = replay_greedy(par.values(depth), evens().mask(depth), evens().mask(depth))
    pointwise = bool(np.array_equal(replay, in_b))
    N = envelope_start(g.trace, EPS)
    final = float(g.trace.final)
    ok = pointwise and N is not None and abs(final) < FINAL_TOL and dt < 30
    report(3, ok, f"replay={pointwise} envelope_N={N} final={final:.6f} (need |S|<{FINAL_TOL}) time={dt:.2f}s")
    assert ok


# 4 ----------------------------------------------------------------------

def _odd_harmonic(K: int):
    """sum of 1/n over odd n <= K, via digamma."""
    if K < 1:
        return mpmath.mpf(0)
    T = (K - 1) // 2
    return (mpmath.digamma(T + mpmath.mpf(3) / 2) - mpmath.digamma(mpmath.mpf(1) / 2)) / 2


def _odd_block(lo, hi):
    if hi - lo <= 4000:
        return Fraction(sum(Fraction(1, n) for n in range(lo + 1, hi + 1) if n % 2))
    with mpmath.workdps(3 * len(str(hi)) + 60):
        return _odd_harmonic(hi) - _odd_harmonic(lo)


def test_c4_balance_split():
    alt = get_stream("altharm")
    sp = balance_split(odds(), alt, blocks=40, oracle=VerdictOracle())
    ks = sp.schedule.cutpoints[:40]
    big, minimal, prev = True, True, 0
    sums = []
    for m, k in enumerate(ks, start=1):
        s = _odd_block(prev, k)
        sums.append(s)
        big &= bool(s > 1)
        minimal &= bool(_odd_block(prev, k - 1) <= 1)
        prev = k
    b_total = sum(float(s) for m, s in enumerate(sums, start=1) if m % 2 == 0)
    rest_total = sum(float(s) for m, s in enumerate(sums, start=1) if m % 2 == 1)
    ok = len(ks) == 40 and big and minimal and b_total > 10 and rest_total > 10
    report(4, ok, f"blocks={len(ks)} all>1={big} minimal={minimal} B={b_total:.3f} rest={rest_total:.3f} "
                  f"k_40 has {len(str(ks[-1]))} digits")
    assert ok


# 5 ----------------------------------------------------------------------

def test_c5_three_series_intro():
    streams = get_instance("intro")
    rep = three_series_select(streams)
    cert_ok = rep.validate() == [] and validate_certificate(rep.certificate, rep.picture_family) == []
    depth = 10**6
    cps = (10**4, 10**5, 10**6)
    policy = TrendPolicy(threshold=T_TREND, margin=0.5, checkpoints=cps)
    traces = attach_evidence(rep, streams, depth, policy)
    verdicts = [empirical_verdict(tr, policy) for tr in traces]
    increasing = all(
        all(abs(float(tr.S(b))) > abs(float(tr.S(a))) for a, b in zip(cps, cps[1:])) for tr in traces)
    finals = [round(float(tr.final), 4) for tr in traces]
    ok = cert_ok and all(v.is_infinite for v in verdicts) and increasing
    report(5, ok, f"case={rep.case} certificate={cert_ok} verdicts={[v.value for v in verdicts]} "
                  f"finals={finals} T={T_TREND} increasing={increasing}")
    assert ok


def test_c5_type1_symbolic():
    rep = three_series_select(get_instance("type1"))
    ok = rep.case == "Case1" and rep.numeric_steps == 0 and rep.validate() == [] \
        and all(v.is_infinite for v in rep.instance_verdicts)
    report(5, ok, f"type1 case={rep.case} numeric_steps={rep.numeric_steps}")
    assert ok


# 6 ----------------------------------------------------------------------

def _minimal_even_oracle(M, factor):
    """Independent restatement: b_1 = 2, b_{m+1} least even >= factor(m)^3 (1 + b_1 + ... + b_m)."""
    out = [2]
    for m in range(1, M):
        need = factor(m) ** 3 * (1 + sum(out))
        out.append(need + (need % 2))
    return tuple(out)


def test_c6_block_tables():
    paper = cx.b_sequence(5, "paper").lengths
    strict = cx.b_sequence(4, "strict").lengths
    ok = (paper == (2, 4, 56, 1702, 112960) == _minimal_even_oracle(5, lambda m: m)
          and strict == (2, 24, 730, 48448) == _minimal_even_oracle(4, lambda m: m + 1))
    report(6, ok, f"paper={paper} strict={strict}")
    assert ok


# 7 ----------------------------------------------------------------------

def test_c7_oscillation():
    t0 = time.perf_counter()
    t = cx.b_sequence(4, "paper")
    odd = cx.witness_odds(4, t)
    rep = cx.oscillation_report(odd, 2, 4, 1, t)
    want = (Fraction(1), Fraction(0), Fraction(28, 3), Fraction(-2441, 12))
    up = rep.crossed(1, +1) or []
    down = rep.crossed(-1, -1) or []
    plus_down = [c for c in rep.crossings if c.level == 1 and c.direction == -1]
    s3 = cx.boundary_sums(odd, 3, 4, t)
    s4 = cx.boundary_sums(odd, 4, 4, t)
    exact = all(isinstance(x, Fraction) for x in (*rep.boundary_sums, *s3, *s4))
    # two full swings need six blocks: count crossings of each level in either direction
    t6 = cx.b_sequence(6, "paper")
    rep6 = cx.oscillation_report(cx.witness_odds(6, t6), 2, 6, 1, t6)
    twice = all(sum(c.level == lv for c in rep6.crossings) >= 2 for lv in (1, -1))
    dt = time.perf_counter() - t0
    ok = (tuple(rep.boundary_sums) == want and len(up) + len(plus_down) >= 2 and len(down) >= 1
          and twice and s3[-1] == 1 and s4[-1] == 1 and exact and dt < 1)
    report(7, ok, f"sums={[str(x) for x in rep.boundary_sums]} crossings_of_+1={len(up) + len(plus_down)} "
                  f"crossings_of_-1={len(down)} twice_each_by_M6={twice} s3={s3[-1]} s4={s4[-1]} time={dt:.3f}s")
    assert ok


# 8 ----------------------------------------------------------------------

def _random_disjoint_pair(rng, depth):
    kind = rng.randrange(3)
    if kind == 0:
        M = rng.randrange(2, 13)
        res = list(range(M))
        rng.shuffle(res)
        cut = rng.randrange(1, M)
        return Residues(M, res[:cut]), Residues(M, res[cut:rng.randrange(cut, M) + 1] or res[cut:])
    if kind == 1:
        pts = sorted(rng.sample(range(depth + 1), 8))
        iv = list(zip(pts[::2], pts[1::2]))
        return ExplicitBlocks(iv[::2]), ExplicitBlocks(iv[1::2])
    lab = [rng.randrange(3) for _ in range(depth)]
    a = [(i, i + 1) for i, x in enumerate(lab) if x == 1]
    b = [(i, i + 1) for i, x in enumerate(lab) if x == 2]
    return ExplicitBlocks(a), ExplicitBlocks(b)


def test_c8_trace_additivity():
    depth = 10**4
    rng = random.Random(8)
    bad = 0
    exact_count = 0
    for _ in range(200):
        s = get_stream(rng.choice(STREAM_NAMES))
        A, B = _random_disjoint_pair(rng, depth)
        ta, tb, tu = (partial_sum_trace(s, X, depth) for X in (A, B, union(A, B)))
        if ta.exact and tb.exact and tu.exact:
            exact_count += 1
            # one common denominator per stream, so exact equality reduces to the integer numerators
            if ta.denominator == tb.denominator == tu.denominator:
                good = all(x + y == z for x, y, z in zip(ta.numerators, tb.numerators, tu.numerators))
            else:
                good = all(x + y == z for x, y, z in zip(ta.sums(), tb.sums(), tu.sums()))
        else:
            good = np.allclose(ta.float_sums + tb.float_sums, tu.float_sums, atol=1e-12, rtol=0)
        bad += not good
    ok = bad == 0
    report(8, ok, f"pairs=200 exact={exact_count} failures={bad}")
    assert ok


# 9 ----------------------------------------------------------------------

def _closure_oracle():
    """Materialize the compatible-union closure of every total-free family."""
    pairs = []
    for i in range(fn32.N_NONTOTAL):
        for j in range(i + 1, fn32.N_NONTOTAL):
            f, g = fn32.ALL_FUNCTIONS[i], fn32.ALL_FUNCTIONS[j]
            if fn32.are_compatible(f, g):
                u = f.union(g)
                pairs.append((i, j, 18 if u.is_total else fn32.ALL_FUNCTIONS.index(u)))
    masks = np.arange(1 << 18, dtype=np.int64)
    closure = masks.copy()
    while True:
        nxt = closure.copy()
        for i, j, k in pairs:
            both = ((nxt >> i) & 1) & ((nxt >> j) & 1)
            nxt |= both << k
        if np.array_equal(nxt, closure):
            break
        closure = nxt
    return closure == masks


def test_c9_bruteforce_oracles():
    t = cx.b_sequence(3, "paper")
    rng = random.Random(9)
    sums_ok = True
    for _ in range(20):
        sel = cx.random_explicit_selection(t, rng, 3)
        for i in range(1, 5):
            for m in range(1, 4):
                sums_ok &= cx.block_sum(i, m, sel, t) == cx.block_sum_bruteforce(i, m, sel, t)
    oracle = _closure_oracle()
    uc, _ = fn32.sweep_total_free()
    sweep_ok = bool(np.array_equal(uc, oracle))
    direct_ok = all(fn32.is_union_closed(fn32.Family(int(m))) == bool(oracle[m]) for m in range(1 << 18))
    ok = sums_ok and sweep_ok and direct_ok
    report(9, ok, f"block_sums={sums_ok} sweep_vs_closure={sweep_ok} is_union_closed_vs_closure={direct_ok} "
                  f"closed={int(oracle.sum())}")
    assert ok
