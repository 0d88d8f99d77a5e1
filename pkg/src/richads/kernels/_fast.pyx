# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python kernels.

Semantics are documented once in pure.py; this module must match it
exactly. Arithmetic runs on int64 with __int128 cross-multiplications,
which cannot overflow for inputs the dispatcher lets through (magnitudes
below 2**62).
"""

from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef long long i128 "__int128"

BACKEND_NAME = "fast"

# dispatcher refuses this backend when any magnitude reaches the bound
MAX_MAGNITUDE = 1 << 62


cdef inline bint _bpb_before(long long v1, long long w1, long long v2, long long w2) noexcept nogil:
    # strict: v1/w1 > v2/w2
    return (<i128> v1) * (<i128> w2) > (<i128> v2) * (<i128> w1)


cdef long long* _copy(list values, int m) except NULL:
    cdef long long* out = <long long*> malloc(m * sizeof(long long))
    if out == NULL:
        raise MemoryError()
    cdef int i
    for i in range(m):
        out[i] = values[i]
    return out


cdef void _sort_by_bpb(int* idx, long long* val, long long* spc, int m) noexcept nogil:
    # stable insertion sort, descending bang-per-buck
    cdef int i, j, cur
    for i in range(1, m):
        cur = idx[i]
        j = i - 1
        while j >= 0 and _bpb_before(val[cur], spc[cur], val[idx[j]], spc[idx[j]]):
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = cur


cdef void _sort_by_value(int* idx, long long* val, int m) noexcept nogil:
    # stable insertion sort, descending value
    cdef int i, j, cur
    for i in range(1, m):
        cur = idx[i]
        j = i - 1
        while j >= 0 and val[cur] > val[idx[j]]:
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = cur


def space_auction(list adv, list val, list spc, int n_adv, object total_obj, bint stop_on_misfit):
    cdef int m = len(val)
    cdef long long total = total_obj
    cdef long long* cval = NULL
    cdef long long* cspc = NULL
    cdef long long* cheld_spc = NULL
    cdef int* cadv = NULL
    cdef int* cheld = NULL
    cdef int* idx = NULL
    cdef int i, k, a
    cdef long long rem, inc, space_a
    cdef int frac_adv = -1
    cdef long long frac_num = 0
    cdef long long frac_den = 1
    try:
        cval = _copy(val, m)
        cspc = _copy(spc, m)
        cadv = <int*> malloc(m * sizeof(int))
        idx = <int*> malloc(m * sizeof(int))
        cheld = <int*> malloc(n_adv * sizeof(int))
        cheld_spc = <long long*> malloc(n_adv * sizeof(long long))
        if cadv == NULL or idx == NULL or cheld == NULL or cheld_spc == NULL:
            raise MemoryError()
        for i in range(m):
            cadv[i] = adv[i]
            idx[i] = i
        for i in range(n_adv):
            cheld[i] = -1
            cheld_spc[i] = 0
        _sort_by_bpb(idx, cval, cspc, m)

        rem = total
        for k in range(m):
            if rem == 0:
                break
            i = idx[k]
            a = cadv[i]
            if cspc[i] <= cheld_spc[a]:
                continue
            inc = cspc[i] - cheld_spc[a]
            if inc <= rem:
                cheld[a] = i
                cheld_spc[a] = cspc[i]
                rem -= inc
            elif stop_on_misfit:
                space_a = cheld_spc[a] + rem
                frac_adv = a
                frac_num = space_a
                frac_den = cspc[i]
                cheld[a] = i
                cheld_spc[a] = space_a
                rem = 0
                break
        held = [cheld[i] for i in range(n_adv)]
        held_spc = [cheld_spc[i] for i in range(n_adv)]
        return held, held_spc, frac_adv, frac_num, frac_den
    finally:
        free(cval)
        free(cspc)
        free(cadv)
        free(idx)
        free(cheld)
        free(cheld_spc)


def best_fit(list adv, list val, list spc, int n_adv, list caps):
    cdef int m = len(val)
    cdef long long* cval = NULL
    cdef long long* cspc = NULL
    cdef long long* ccaps = NULL
    cdef long long* best_val = NULL
    cdef int* cadv = NULL
    cdef int* cbest = NULL
    cdef int i, a
    try:
        cval = _copy(val, m)
        cspc = _copy(spc, m)
        ccaps = _copy(caps, n_adv)
        cadv = <int*> malloc(m * sizeof(int))
        cbest = <int*> malloc(n_adv * sizeof(int))
        best_val = <long long*> malloc(n_adv * sizeof(long long))
        if cadv == NULL or cbest == NULL or best_val == NULL:
            raise MemoryError()
        for i in range(m):
            cadv[i] = adv[i]
        for i in range(n_adv):
            cbest[i] = -1
            best_val[i] = 0
        for i in range(m):
            a = cadv[i]
            if ccaps[a] <= 0 or cspc[i] > ccaps[a]:
                continue
            if cbest[a] < 0 or cval[i] > best_val[a]:
                cbest[a] = i
                best_val[a] = cval[i]
        return [cbest[i] for i in range(n_adv)]
    finally:
        free(cval)
        free(cspc)
        free(ccaps)
        free(cadv)
        free(cbest)
        free(best_val)


def value_greedy(list adv, list val, list spc, int n_adv, object total_obj, int limit):
    cdef int m = len(val)
    cdef long long total = total_obj
    cdef long long* cval = NULL
    cdef long long* cspc = NULL
    cdef int* cadv = NULL
    cdef int* idx = NULL
    cdef int* cheld = NULL
    cdef int k, i, a, placed
    cdef long long rem
    try:
        cval = _copy(val, m)
        cspc = _copy(spc, m)
        cadv = <int*> malloc(m * sizeof(int))
        idx = <int*> malloc(m * sizeof(int))
        cheld = <int*> malloc(n_adv * sizeof(int))
        if cadv == NULL or idx == NULL or cheld == NULL:
            raise MemoryError()
        for i in range(m):
            cadv[i] = adv[i]
            idx[i] = i
        for i in range(n_adv):
            cheld[i] = -1
        _sort_by_value(idx, cval, m)

        rem = total
        placed = 0
        for k in range(m):
            if placed >= limit:
                break
            i = idx[k]
            a = cadv[i]
            if cheld[a] >= 0:
                continue
            if cspc[i] <= rem:
                cheld[a] = i
                rem -= cspc[i]
                placed += 1
        return [cheld[i] for i in range(n_adv)]
    finally:
        free(cval)
        free(cspc)
        free(cadv)
        free(idx)
        free(cheld)
