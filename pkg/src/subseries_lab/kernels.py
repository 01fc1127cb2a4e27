"""Hot numeric loops, each with a numba twin and a pure-numpy fallback.

Public names (``cumsum``, ``greedy``, ``cutpoints``, ``fn32_sweep``) are bound
to the backend chosen at import time; the ``*_numpy`` and ``*_numba``
variants stay importable so tests and the benchmark can compare them.
"""

import numpy as np

from ._accel import USE_NUMBA, jit


# --------------------------------------------------------------------------
# compensated prefix sums
# --------------------------------------------------------------------------

def _cumsum_loop(x):
    out = np.empty(x.shape[0])
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


def cumsum_numpy(x):
    """Prefix sums with a vectorized two-sum correction.

    ``np.cumsum`` is sequential, so the rounding error of every step can be
    recovered exactly from the naive prefix and added back in a second pass.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    s = np.cumsum(x)
    prev = np.empty_like(s)
    prev[0] = 0.0
    prev[1:] = s[:-1]
    bp = s - prev
    err = (prev - (s - bp)) + (x - bp)
    return s + np.cumsum(err)


# --------------------------------------------------------------------------
# greedy balancing rule
# --------------------------------------------------------------------------

def _greedy_loop(terms, in_c, in_a):
    n = terms.shape[0]
    in_b = np.zeros(n, dtype=np.bool_)
    sums = np.empty(n)
    s = 0.0
    c = 0.0
    for i in range(n):
        # s + c is the strict prefix over C u B of indices before i
        take = in_c[i]
        if not take and not in_a[i] and s + c > 0.0:
            take = True
            in_b[i] = True
        if take:
            v = terms[i]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        sums[i] = s + c
    return in_b, sums


def greedy_numpy(terms, in_c, in_a):
    """Pure-Python replay of the greedy rule over plain lists.

    The rule is inherently sequential, so the fallback is a scalar loop; it
    runs on lists because indexing numpy scalars is several times slower.
    """
    tl = np.asarray(terms, dtype=np.float64).tolist()
    cl = np.asarray(in_c, dtype=bool).tolist()
    al = np.asarray(in_a, dtype=bool).tolist()
    n = len(tl)
    in_b = [False] * n
    sums = [0.0] * n
    s = 0.0
    c = 0.0
    for i in range(n):
        take = cl[i]
        if not take and not al[i] and s + c > 0.0:
            take = True
            in_b[i] = True
        if take:
            v = tl[i]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        sums[i] = s + c
    return np.array(in_b, dtype=bool), np.array(sums, dtype=np.float64)


# --------------------------------------------------------------------------
# block cutpoints: least k with  sum_{(k_prev, k]} w > threshold
# --------------------------------------------------------------------------

def _cutpoints_loop(w, start, count, threshold):
    out = np.full(count, -1, dtype=np.int64)
    found = 0
    s = 0.0
    c = 0.0
    i = start
    n = w.shape[0]
    while i < n and found < count:
        v = w[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        if s + c > threshold:
            # cutpoints are 1-based: position i holds index i + 1
            out[found] = i + 1
            found += 1
            s = 0.0
            c = 0.0
        i += 1
    return out


def cutpoints_numpy(w, start, count, threshold):
    w = np.asarray(w, dtype=np.float64)
    out = np.full(count, -1, dtype=np.int64)
    if start >= w.shape[0]:
        return out
    cum = cumsum_numpy(w[start:])
    base = 0.0
    for found in range(count):
        k = int(np.searchsorted(cum, base + threshold, side="right"))
        # guard: the searchsorted target can round across the tie
        while k < cum.shape[0] and not (cum[k] - base > threshold):
            k += 1
        if k >= cum.shape[0]:
            break
        out[found] = start + k + 1
        base = cum[k]
    return out


# --------------------------------------------------------------------------
# Fn(3,2) sweep over all subsets of the non-total functions
# --------------------------------------------------------------------------

def _sweep_loop(n_bits, pi, pj, pk, covers):
    total = 1 << n_bits
    uc = np.ones(total, dtype=np.bool_)
    full = np.ones(total, dtype=np.bool_)
    for m in range(total):
        for c in range(covers.shape[0]):
            if (m & covers[c]) == 0:
                full[m] = False
                break
        for t in range(pi.shape[0]):
            if (m >> pi[t]) & 1 and (m >> pj[t]) & 1:
                if pk[t] < 0 or not ((m >> pk[t]) & 1):
                    uc[m] = False
                    break
    return uc, full


def fn32_sweep_numpy(n_bits, pi, pj, pk, covers):
    masks = np.arange(1 << n_bits, dtype=np.int64)
    full = np.ones(masks.shape[0], dtype=bool)
    for cov in np.asarray(covers):
        full &= (masks & int(cov)) != 0
    uc = np.ones(masks.shape[0], dtype=bool)
    for i, j, k in zip(pi, pj, pk):
        both = ((masks >> int(i)) & 1).astype(bool) & ((masks >> int(j)) & 1).astype(bool)
        if k < 0:
            uc &= ~both
        else:
            uc &= ~both | ((masks >> int(k)) & 1).astype(bool)
    return uc, full


cumsum_numba = jit(_cumsum_loop)
greedy_numba = jit(_greedy_loop)
cutpoints_numba = jit(_cutpoints_loop)
fn32_sweep_numba = jit(_sweep_loop)

if USE_NUMBA:
    def cumsum(x):
        return cumsum_numba(np.ascontiguousarray(x, dtype=np.float64))

    def greedy(terms, in_c, in_a):
        return greedy_numba(np.ascontiguousarray(terms, dtype=np.float64),
                            np.ascontiguousarray(in_c, dtype=np.bool_),
                            np.ascontiguousarray(in_a, dtype=np.bool_))

    def cutpoints(w, start, count, threshold):
        return cutpoints_numba(np.ascontiguousarray(w, dtype=np.float64),
                               int(start), int(count), float(threshold))

    def fn32_sweep(n_bits, pi, pj, pk, covers):
        return fn32_sweep_numba(int(n_bits),
                                np.asarray(pi, dtype=np.int64),
                                np.asarray(pj, dtype=np.int64),
                                np.asarray(pk, dtype=np.int64),
                                np.asarray(covers, dtype=np.int64))
else:
    cumsum = cumsum_numpy
    greedy = greedy_numpy
    cutpoints = cutpoints_numpy
    fn32_sweep = fn32_sweep_numpy
