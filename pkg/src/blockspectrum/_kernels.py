"""Numba kernels for the exhaustive minimal-change enumeration.

One kernel call enumerates the sub-lattice of M-subsets sharing a fixed
smallest removed index, maintaining the removal energy incrementally (O(M) per
element move) and a bounded best-K buffer keyed by (energy, lexicographic
configuration).  Configurations are tracked as two 64-bit mask words, so block
counts up to 128 fit.

All float accumulation is plain IEEE in a fixed order (no fastmath), which is
what makes results bit-identical across runs and thread counts.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Incremental energies are re-anchored with a from-scratch evaluation at least
# this often, bounding float drift along long move chains.
REANCHOR_INTERVAL = 100_000

# Near-ties are retained beyond the best-K buffer within this multiple of the
# degeneracy tolerance of the current K-th energy, so that degenerate-band
# ordering can be resolved globally at merge time.  64x covers chained
# near-degeneracies well beyond anything a re-anchored walk can produce.
RETENTION_FACTOR = 64.0

_ONE = np.uint64(1)


@njit(cache=True, nogil=True, inline="always")
def _lex_less(a0, a1, b0, b1):
    # Ascending index sequences compare lexicographically: the config owning
    # the lowest differing index is the smaller one.
    d0 = a0 ^ b0
    if d0 != np.uint64(0):
        lsb = d0 & (~d0 + _ONE)
        return (a0 & lsb) != np.uint64(0)
    d1 = a1 ^ b1
    if d1 != np.uint64(0):
        lsb = d1 & (~d1 + _ONE)
        return (a1 & lsb) != np.uint64(0)
    return False


@njit(cache=True, nogil=True, inline="always")
def _key_less(ea, a0, a1, eb, b0, b1):
    if ea != eb:
        return ea < eb
    return _lex_less(a0, a1, b0, b1)


@njit(cache=True, nogil=True, inline="always")
def _mask_indices(m0, m1, n_total, out):
    cnt = 0
    for i in range(n_total):
        if i < 64:
            hit = (m0 >> np.uint64(i)) & _ONE
        else:
            hit = (m1 >> np.uint64(i - 64)) & _ONE
        if hit != np.uint64(0):
            out[cnt] = i
            cnt += 1
    return cnt


@njit(cache=True, nogil=True, inline="always")
def _scratch_energy(h, m0, m1, n_total, buf):
    # Fixed double-ascending summation order; matches the reference evaluator.
    cnt = _mask_indices(m0, m1, n_total, buf)
    e = 0.0
    for a in range(cnt):
        i = buf[a]
        for b in range(cnt):
            e += h[i, buf[b]]
    return e


@njit(cache=True, nogil=True)
def _extras_consider(e, c0, c1, ceiling, tol, ex_e, ex_m0, ex_m1, ex_n):
    tol_eff = tol if tol >= 0.0 else 1e-10 * max(1.0, abs(ceiling))
    margin = RETENTION_FACTOR * tol_eff
    if e <= ceiling or e - ceiling > margin:
        return ex_n
    cap = ex_e.shape[0]
    if ex_n < cap:
        ex_e[ex_n] = e
        ex_m0[ex_n] = c0
        ex_m1[ex_n] = c1
        return ex_n + 1
    # Full: drop entries that drifted beyond the (shrinking) retention window.
    w = 0
    for i in range(ex_n):
        if ex_e[i] - ceiling <= margin:
            ex_e[w] = ex_e[i]
            ex_m0[w] = ex_m0[i]
            ex_m1[w] = ex_m1[i]
            w += 1
    ex_n = w
    if ex_n < cap:
        ex_e[ex_n] = e
        ex_m0[ex_n] = c0
        ex_m1[ex_n] = c1
        return ex_n + 1
    # Still full (pathologically dense near-ties): replace the worst entry.
    worst = 0
    for i in range(1, ex_n):
        if _key_less(ex_e[worst], ex_m0[worst], ex_m1[worst], ex_e[i], ex_m0[i], ex_m1[i]):
            worst = i
    if _key_less(e, c0, c1, ex_e[worst], ex_m0[worst], ex_m1[worst]):
        ex_e[worst] = e
        ex_m0[worst] = c0
        ex_m1[worst] = c1
    return ex_n


@njit(cache=True, nogil=True)
def _topk_consider(e, c0, c1, tk_e, tk_m0, tk_m1, tk_n, ex_e, ex_m0, ex_m1, ex_n, tol):
    kcap = tk_e.shape[0]
    if tk_n < kcap:
        pos = tk_n
        while pos > 0 and _key_less(e, c0, c1, tk_e[pos - 1], tk_m0[pos - 1], tk_m1[pos - 1]):
            tk_e[pos] = tk_e[pos - 1]
            tk_m0[pos] = tk_m0[pos - 1]
            tk_m1[pos] = tk_m1[pos - 1]
            pos -= 1
        tk_e[pos] = e
        tk_m0[pos] = c0
        tk_m1[pos] = c1
        return tk_n + 1, ex_n
    last = kcap - 1
    if _key_less(e, c0, c1, tk_e[last], tk_m0[last], tk_m1[last]):
        ev_e = tk_e[last]
        ev0 = tk_m0[last]
        ev1 = tk_m1[last]
        pos = last
        while pos > 0 and _key_less(e, c0, c1, tk_e[pos - 1], tk_m0[pos - 1], tk_m1[pos - 1]):
            tk_e[pos] = tk_e[pos - 1]
            tk_m0[pos] = tk_m0[pos - 1]
            tk_m1[pos] = tk_m1[pos - 1]
            pos -= 1
        tk_e[pos] = e
        tk_m0[pos] = c0
        tk_m1[pos] = c1
        # The displaced entry may still sit inside the degenerate retention
        # window of the new ceiling; keep it for the global merge if so.
        ex_n = _extras_consider(ev_e, ev0, ev1, tk_e[last], tol, ex_e, ex_m0, ex_m1, ex_n)
        return tk_n, ex_n
    ex_n = _extras_consider(e, c0, c1, tk_e[last], tol, ex_e, ex_m0, ex_m1, ex_n)
    return tk_n, ex_n


@njit(cache=True, nogil=True)
def partition_topk(h, first, m, tol, drift_check,
                   tk_e, tk_m0, tk_m1, ex_e, ex_m0, ex_m1):
    """Walk all M-subsets whose smallest element is ``first``; collect best K.

    The walk is the classic reflected construction: subsets of an n-element
    universe at cardinality k are those avoiding the top element (recursed
    forward) followed by those containing it (recursed in reverse), which makes
    consecutive visited subsets differ by a single exchange.

    Returns (tk_n, ex_n, visits, max_drift, max_abs_energy); the last two are
    only meaningful when ``drift_check`` is set.
    """
    n_total = h.shape[0]
    nsub = n_total - first - 1
    msub = m - 1

    cur = np.empty(m, np.int64)
    cur[0] = first
    cnt = 1
    e_run = h[first, first]
    m0 = np.uint64(0)
    m1 = np.uint64(0)
    if first < 64:
        m0 = _ONE << np.uint64(first)
    else:
        m1 = _ONE << np.uint64(first - 64)

    idxbuf = np.empty(m, np.int64)
    tk_n = 0
    ex_n = 0
    visits = 0
    max_drift = 0.0
    max_abs_e = 0.0

    # Explicit stack for the (n, k, direction, phase) recursion.
    cap = nsub + 2
    sn = np.empty(cap, np.int64)
    sk = np.empty(cap, np.int64)
    sf = np.empty(cap, np.uint8)
    sp = np.empty(cap, np.uint8)
    sn[0] = nsub
    sk[0] = msub
    sf[0] = 1
    sp[0] = 0
    top = 1

    while top > 0:
        t = top - 1
        n_f = sn[t]
        k_f = sk[t]
        fwd = sf[t]
        ph = sp[t]
        el = first + n_f  # element this frame introduces (largest of its universe)

        if ph == 0:
            if k_f == 0 or k_f == n_f:
                if k_f == n_f and k_f > 0:
                    for off in range(n_f):
                        a = first + 1 + off
                        de = h[a, a]
                        for u in range(cnt):
                            de += 2.0 * h[cur[u], a]
                        e_run += de
                        cur[cnt] = a
                        cnt += 1
                        if a < 64:
                            m0 |= _ONE << np.uint64(a)
                        else:
                            m1 |= _ONE << np.uint64(a - 64)
                # ---- visit ----
                visits += 1
                if drift_check:
                    es = _scratch_energy(h, m0, m1, n_total, idxbuf)
                    d = abs(e_run - es)
                    if d > max_drift:
                        max_drift = d
                    if abs(es) > max_abs_e:
                        max_abs_e = abs(es)
                if visits == 1 or visits % REANCHOR_INTERVAL == 0:
                    e_run = _scratch_energy(h, m0, m1, n_total, idxbuf)
                tk_n, ex_n = _topk_consider(e_run, m0, m1, tk_e, tk_m0, tk_m1, tk_n,
                                            ex_e, ex_m0, ex_m1, ex_n, tol)
                # ---------------
                if k_f == n_f and k_f > 0:
                    for off in range(n_f - 1, -1, -1):
                        a = first + 1 + off
                        pos = 0
                        for u in range(cnt):
                            if cur[u] == a:
                                pos = u
                                break
                        de = h[a, a]
                        for u in range(cnt):
                            if u != pos:
                                de += 2.0 * h[cur[u], a]
                        e_run -= de
                        cur[pos] = cur[cnt - 1]
                        cnt -= 1
                        if a < 64:
                            m0 &= ~(_ONE << np.uint64(a))
                        else:
                            m1 &= ~(_ONE << np.uint64(a - 64))
                top -= 1
            else:
                sp[t] = 1
                if fwd == 1:
                    sn[top] = n_f - 1
                    sk[top] = k_f
                    sf[top] = 1
                    sp[top] = 0
                    top += 1
                else:
                    de = h[el, el]
                    for u in range(cnt):
                        de += 2.0 * h[cur[u], el]
                    e_run += de
                    cur[cnt] = el
                    cnt += 1
                    if el < 64:
                        m0 |= _ONE << np.uint64(el)
                    else:
                        m1 |= _ONE << np.uint64(el - 64)
                    sn[top] = n_f - 1
                    sk[top] = k_f - 1
                    sf[top] = 1
                    sp[top] = 0
                    top += 1
        elif ph == 1:
            sp[t] = 2
            if fwd == 1:
                de = h[el, el]
                for u in range(cnt):
                    de += 2.0 * h[cur[u], el]
                e_run += de
                cur[cnt] = el
                cnt += 1
                if el < 64:
                    m0 |= _ONE << np.uint64(el)
                else:
                    m1 |= _ONE << np.uint64(el - 64)
                sn[top] = n_f - 1
                sk[top] = k_f - 1
                sf[top] = 0
                sp[top] = 0
                top += 1
            else:
                pos = 0
                for u in range(cnt):
                    if cur[u] == el:
                        pos = u
                        break
                de = h[el, el]
                for u in range(cnt):
                    if u != pos:
                        de += 2.0 * h[cur[u], el]
                e_run -= de
                cur[pos] = cur[cnt - 1]
                cnt -= 1
                if el < 64:
                    m0 &= ~(_ONE << np.uint64(el))
                else:
                    m1 &= ~(_ONE << np.uint64(el - 64))
                sn[top] = n_f - 1
                sk[top] = k_f
                sf[top] = 0
                sp[top] = 0
                top += 1
        else:
            if fwd == 1:
                pos = 0
                for u in range(cnt):
                    if cur[u] == el:
                        pos = u
                        break
                de = h[el, el]
                for u in range(cnt):
                    if u != pos:
                        de += 2.0 * h[cur[u], el]
                e_run -= de
                cur[pos] = cur[cnt - 1]
                cnt -= 1
                if el < 64:
                    m0 &= ~(_ONE << np.uint64(el))
                else:
                    m1 &= ~(_ONE << np.uint64(el - 64))
            top -= 1

    return tk_n, ex_n, visits, max_drift, max_abs_e
