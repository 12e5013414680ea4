# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend for the GF(p) column reduction (see _reduction_py for
the reference semantics). Row indices per column must be sorted ascending."""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy

import numpy as np


cdef inline long long powmod(long long b, long long e, long long p) nogil:
    cdef long long acc = 1
    b %= p
    while e:
        if e & 1:
            acc = acc * b % p
        b = b * b % p
        e >>= 1
    return acc


def rank_reduction(nrows, indptr, indices, data, p, skip=None, entry_limit=None):
    """Rank of a sparse integer matrix mod p; returns (rank, pivot_rows)."""
    cdef long long[::1] iptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int[::1] idx = np.ascontiguousarray(indices, dtype=np.int32)
    cdef long long[::1] dat = np.ascontiguousarray(data, dtype=np.int64)
    cdef unsigned char[::1] skp
    cdef bint have_skip = skip is not None
    if have_skip:
        skp = np.ascontiguousarray(skip, dtype=np.uint8)
    cdef long long pp = p
    cdef long long nr = nrows
    cdef long long ncols = iptr.shape[0] - 1
    cdef long long limit = entry_limit if entry_limit is not None else (1 << 62)
    if nr == 0 or ncols == 0:
        return 0, np.empty(0, dtype=np.int32)

    cdef int** orow = <int**>malloc(nr * sizeof(int*))
    cdef long long** oval = <long long**>malloc(nr * sizeof(long long*))
    cdef int* olen = <int*>malloc(nr * sizeof(int))
    if orow == NULL or oval == NULL or olen == NULL:
        free(orow); free(oval); free(olen)
        raise MemoryError("owner tables")
    cdef long long i
    for i in range(nr):
        orow[i] = NULL
    out_pivots = np.empty(min(nr, ncols), dtype=np.int32)
    cdef int[::1] piv = out_pivots

    cdef int cap_a = 1024, cap_b = 1024
    cdef int* arow = <int*>malloc(cap_a * sizeof(int))
    cdef long long* aval = <long long*>malloc(cap_a * sizeof(long long))
    cdef int* brow = <int*>malloc(cap_b * sizeof(int))
    cdef long long* bval = <long long*>malloc(cap_b * sizeof(long long))

    cdef long long rank = 0, stored = 0
    cdef long long j, t, lo, hi
    cdef int alen, blen, low, need, ai, oi, olength
    cdef int* crow
    cdef long long* cval
    cdef long long v, mult, fv
    cdef int* swap_r
    cdef long long* swap_v

    try:
        if arow == NULL or aval == NULL or brow == NULL or bval == NULL:
            raise MemoryError("column buffers")
        for j in range(ncols):
            if have_skip and skp[j]:
                continue
            lo = iptr[j]; hi = iptr[j + 1]
            need = <int>(hi - lo)
            if need > cap_a:
                while cap_a < need:
                    cap_a *= 2
                arow = <int*>realloc(arow, cap_a * sizeof(int))
                aval = <long long*>realloc(aval, cap_a * sizeof(long long))
                if arow == NULL or aval == NULL:
                    raise MemoryError("column buffers")
            alen = 0
            for t in range(lo, hi):
                v = dat[t] % pp
                if v < 0:
                    v += pp
                if v:
                    arow[alen] = idx[t]
                    aval[alen] = v
                    alen += 1
            while alen > 0:
                low = arow[alen - 1]
                if orow[low] == NULL:
                    orow[low] = <int*>malloc(alen * sizeof(int))
                    oval[low] = <long long*>malloc(alen * sizeof(long long))
                    if orow[low] == NULL or oval[low] == NULL:
                        raise MemoryError("pivot storage")
                    memcpy(orow[low], arow, alen * sizeof(int))
                    memcpy(oval[low], aval, alen * sizeof(long long))
                    olen[low] = alen
                    piv[rank] = low
                    rank += 1
                    stored += alen
                    if stored > limit:
                        raise MemoryError("reduction exceeded entry limit")
                    break
                crow = orow[low]; cval = oval[low]; olength = olen[low]
                mult = aval[alen - 1] * powmod(cval[olength - 1], pp - 2, pp) % pp
                need = alen + olength
                if need > cap_b:
                    while cap_b < need:
                        cap_b *= 2
                    brow = <int*>realloc(brow, cap_b * sizeof(int))
                    bval = <long long*>realloc(bval, cap_b * sizeof(long long))
                    if brow == NULL or bval == NULL:
                        raise MemoryError("column buffers")
                # merge: current - mult * owner
                blen = 0
                ai = 0
                oi = 0
                while ai < alen or oi < olength:
                    if oi == olength or (ai < alen and arow[ai] < crow[oi]):
                        brow[blen] = arow[ai]; bval[blen] = aval[ai]
                        blen += 1; ai += 1
                    elif ai == alen or crow[oi] < arow[ai]:
                        fv = (pp - mult * cval[oi] % pp) % pp
                        if fv:
                            brow[blen] = crow[oi]; bval[blen] = fv
                            blen += 1
                        oi += 1
                    else:
                        fv = (aval[ai] - mult * cval[oi]) % pp
                        if fv < 0:
                            fv += pp
                        if fv:
                            brow[blen] = arow[ai]; bval[blen] = fv
                            blen += 1
                        ai += 1; oi += 1
                swap_r = arow; arow = brow; brow = swap_r
                swap_v = aval; aval = bval; bval = swap_v
                alen = blen
                ai = cap_a; cap_a = cap_b; cap_b = ai
        return int(rank), np.asarray(out_pivots[:rank]).copy()
    finally:
        for i in range(nr):
            if orow[i] != NULL:
                free(orow[i]); free(oval[i])
        free(orow); free(oval); free(olen)
        free(arow); free(aval); free(brow); free(bval)
