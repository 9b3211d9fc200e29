# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract and enumeration order as _pykernels."""

import math

import numpy as np

from libc.math cimport exp2, log2, INFINITY

backend_name = "compiled"


def row_logmass_table(int s_max, lo_in, hi_in, log2_base_in, lgfact_in):
    """Aggregate type-class log-probabilities of one conditional row.

    See coordbounds._pykernels.row_logmass_table.
    """
    cdef double NEG_INF = -INFINITY
    out_arr = np.full(s_max + 1, NEG_INF)

    lo_full = np.ascontiguousarray(lo_in, dtype=np.int64)
    hi_full = np.ascontiguousarray(hi_in, dtype=np.int64)
    lb_full = np.ascontiguousarray(log2_base_in, dtype=np.float64)

    keep = []
    cdef Py_ssize_t v
    for v in range(lo_full.shape[0]):
        if lo_full[v] > hi_full[v]:
            return out_arr  # empty count interval: no admissible row at any total
        if lb_full[v] == NEG_INF or hi_full[v] == 0:
            if lo_full[v] > 0:
                return out_arr  # impossible cell: no admissible row at any total
            continue
        keep.append(v)

    cdef Py_ssize_t k = len(keep)
    if k == 0:
        out_arr[0] = 0.0
        return out_arr

    lo_arr = lo_full[keep]
    hi_arr = hi_full[keep]
    lb_arr = lb_full[keep]

    cdef long long[:] lo = lo_arr
    cdef long long[:] hi = hi_arr
    cdef double[:] lb = lb_arr
    cdef double[:] lgf = np.ascontiguousarray(lgfact_in, dtype=np.float64)
    cdef double[:] out = out_arr

    bmax_arr = np.full(s_max + 1, NEG_INF)
    bacc_arr = np.zeros(s_max + 1)
    cdef double[:] bmax = bmax_arr
    cdef double[:] bacc = bacc_arr

    digits_arr = lo_arr.copy()
    cdef long long[:] digits = digits_arr

    cdef long long s
    cdef double l
    cdef Py_ssize_t i, j
    cdef bint done = False
    while not done:
        s = 0
        l = 0.0
        for i in range(k):
            s += digits[i]
            l += digits[i] * lb[i] - lgf[digits[i]]
        if s <= s_max:
            if l > bmax[s]:
                bacc[s] = bacc[s] * exp2(bmax[s] - l) + 1.0
                bmax[s] = l
            else:
                bacc[s] += exp2(l - bmax[s])
        # odometer increment, rightmost digit fastest
        j = k - 1
        while True:
            digits[j] += 1
            if digits[j] <= hi[j]:
                break
            digits[j] = lo[j]
            j -= 1
            if j < 0:
                done = True
                break

    for s in range(s_max + 1):
        if bacc[s] > 0.0:
            out[s] = lgf[s] + bmax[s] + log2(bacc[s])
    return out_arr


def type_sweep(int n, log2_base_in, s_tables_in, lgfact_in):
    """Per-type mass and success log-probabilities over all compositions of n.

    See coordbounds._pykernels.type_sweep.
    """
    lb_arr = np.ascontiguousarray(log2_base_in, dtype=np.float64)
    cdef double[:] lb = lb_arr
    cdef double[:, :] s_tab = np.ascontiguousarray(s_tables_in, dtype=np.float64)
    cdef double[:] lgf = np.ascontiguousarray(lgfact_in, dtype=np.float64)

    cdef Py_ssize_t k = lb_arr.shape[0]
    if k == 0:
        raise ValueError("need at least one symbol")
    total = math.comb(n + k - 1, k - 1)
    lam_arr = np.empty(total)
    pi_arr = np.empty(total)
    cdef double[:] lam_out = lam_arr
    cdef double[:] pi_out = pi_arr

    if k == 1:
        lam_out[0] = n * lb[0]
        pi_out[0] = s_tab[0, n]
        return lam_arr, pi_arr

    cdef double lgf_n = lgf[n]
    cdef long long[:] d = np.zeros(k - 1, dtype=np.int64)
    cdef long long[:] psum = np.zeros(k - 1, dtype=np.int64)
    cdef double[:] lam_pref = np.zeros(k - 1)
    cdef double[:] pi_pref = np.zeros(k - 1)

    cdef Py_ssize_t j, t
    cdef long long prev_ps, rest
    cdef double prev_lam, prev_pi
    cdef Py_ssize_t pos = 0

    for t in range(k - 1):
        psum[t] = 0
        lam_pref[t] = (lam_pref[t - 1] if t > 0 else lgf_n) - lgf[0]
        pi_pref[t] = (pi_pref[t - 1] if t > 0 else 0.0) + s_tab[t, 0]

    cdef bint done = False
    while not done:
        rest = n - psum[k - 2]
        lam_out[pos] = lam_pref[k - 2] + rest * lb[k - 1] - lgf[rest]
        pi_out[pos] = pi_pref[k - 2] + s_tab[k - 1, rest]
        pos += 1
        j = k - 2
        while True:
            prev_ps = psum[j - 1] if j > 0 else 0
            if prev_ps + d[j] + 1 <= n:
                d[j] += 1
                for t in range(j, k - 1):
                    if t > j:
                        d[t] = 0
                    prev_ps = psum[t - 1] if t > 0 else 0
                    prev_lam = lam_pref[t - 1] if t > 0 else lgf_n
                    prev_pi = pi_pref[t - 1] if t > 0 else 0.0
                    psum[t] = prev_ps + d[t]
                    lam_pref[t] = prev_lam + d[t] * lb[t] - lgf[d[t]]
                    pi_pref[t] = prev_pi + s_tab[t, d[t]]
                break
            d[j] = 0
            j -= 1
            if j < 0:
                done = True
                break
    return lam_arr, pi_arr
