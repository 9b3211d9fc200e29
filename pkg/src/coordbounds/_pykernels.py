"""Pure-Python (numpy) implementations of the hot kernels.

These mirror the compiled kernels in coordbounds._ckernels; the backend module
selects whichever is available. Both operate entirely on integer count bounds
and log2 quantities prepared by the caller, and both enumerate in the same
lexicographic order so their outputs agree to floating-point tolerance.
"""

import math

import numpy as np

NEG_INF = float("-inf")

backend_name = "pure"


def _normalize_cells(lo, hi, log2_base, s_max):
    """Drop cells pinned to zero; detect cells no count can satisfy."""
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    lb = np.asarray(log2_base, dtype=np.float64)
    keep, feasible = [], True
    for v in range(len(lo)):
        if lo[v] > hi[v]:
            feasible = False
            continue
        if lb[v] == NEG_INF or hi[v] == 0:
            if lo[v] > 0:
                feasible = False
            continue
        keep.append(v)
    return lo[keep], hi[keep], lb[keep], feasible


def row_logmass_table(s_max, lo, hi, log2_base, lgfact):
    """Aggregate type-class log-probabilities of one conditional row.

    For each total s in 0..s_max, returns log2 of the summed multinomial mass
    of all count rows (k_v) with lo[v] <= k_v <= hi[v] and sum k_v = s, under
    the per-symbol log2 probabilities log2_base. Entries with no admissible
    row are -inf.
    """
    out = np.full(s_max + 1, NEG_INF)
    lo, hi, lb, feasible = _normalize_cells(lo, hi, log2_base, s_max)
    if not feasible:
        return out
    k = len(lo)
    if k == 0:
        if 0 <= s_max:
            out[0] = 0.0
        return out

    buckets = np.full(s_max + 1, NEG_INF)
    last_lo, last_hi = int(lo[-1]), int(hi[-1])
    lb_last = lb[-1]

    prefix_lo_tail = np.concatenate([np.cumsum(lo[::-1])[::-1], [0]])

    def sweep(idx, psum, pacc):
        if psum + prefix_lo_tail[idx] > s_max:
            return
        if idx == k - 1:
            top = min(last_hi, s_max - psum)
            if top < last_lo:
                return
            ks = np.arange(last_lo, top + 1)
            vals = pacc + ks * lb_last - lgfact[ks]
            sl = slice(psum + last_lo, psum + top + 1)
            buckets[sl] = np.logaddexp2(buckets[sl], vals)
            return
        for c in range(int(lo[idx]), int(hi[idx]) + 1):
            sweep(idx + 1, psum + c, pacc + c * lb[idx] - lgfact[c])

    sweep(0, 0, 0.0)
    mask = buckets > NEG_INF
    out[mask] = buckets[mask] + lgfact[: s_max + 1][mask]
    return out


def type_sweep(n, log2_base, s_tables, lgfact):
    """Per-type quantities over all compositions of n into len(log2_base) parts.

    Enumerates count vectors (c_0, ..., c_{k-1}) summing to n in lexicographic
    order and returns two parallel arrays: the log2 multinomial mass of each
    type under log2_base, and the log2 success probability obtained by summing
    the per-symbol row tables s_tables[i][c_i].
    """
    lb = np.asarray(log2_base, dtype=np.float64)
    s_tables = np.asarray(s_tables, dtype=np.float64)
    k = len(lb)
    if k == 0:
        raise ValueError("need at least one symbol")
    total = math.comb(n + k - 1, k - 1)
    log2_lam = np.empty(total)
    log2_pi = np.empty(total)

    if k == 1:
        log2_lam[0] = n * lb[0]
        log2_pi[0] = s_tables[0][n]
        return log2_lam, log2_pi

    base_lam = lgfact[n]
    pos = 0

    def sweep(idx, remaining, lam_acc, pi_acc):
        nonlocal pos
        if idx == k - 2:
            c = np.arange(remaining + 1)
            rest = remaining - c
            lam = lam_acc + c * lb[idx] - lgfact[c] + rest * lb[idx + 1] - lgfact[rest]
            pi = pi_acc + s_tables[idx][c] + s_tables[idx + 1][rest]
            log2_lam[pos : pos + remaining + 1] = lam
            log2_pi[pos : pos + remaining + 1] = pi
            pos += remaining + 1
            return
        for c in range(remaining + 1):
            sweep(
                idx + 1,
                remaining - c,
                lam_acc + c * lb[idx] - lgfact[c],
                pi_acc + s_tables[idx][c],
            )

    sweep(0, n, base_lam, 0.0)
    return log2_lam, log2_pi
