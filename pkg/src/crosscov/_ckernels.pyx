# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled combinatorial kernels; same contracts as ``_kernels_py``."""
import numpy as np

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy


cdef long long _catalan(int m):
    cdef long long c = 1
    cdef int i
    for i in range(m):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c


cdef struct NCState:
    int n
    signed char *row
    int *stack
    signed char *out
    long long nout


cdef void _nc_dfs(NCState *st, int i, int nblocks, int depth):
    # open blocks live on a stack ordered by id; joining one closes those above it
    cdef int s, saved
    if i == st.n:
        memcpy(st.out + st.nout * st.n, st.row, st.n)
        st.nout += 1
        return
    for s in range(depth):
        st.row[i] = <signed char>st.stack[s]
        _nc_dfs(st, i + 1, nblocks, s + 1)
    saved = st.stack[depth]
    st.stack[depth] = nblocks
    st.row[i] = <signed char>nblocks
    _nc_dfs(st, i + 1, nblocks + 1, depth + 1)
    st.stack[depth] = saved


def nc_rgs(int n):
    cdef long long total = _catalan(n)
    out = np.zeros((total, n), dtype=np.int8)
    if n == 0:
        return out
    cdef signed char[:, ::1] view = out
    cdef NCState st
    st.n = n
    st.nout = 0
    st.out = &view[0, 0]
    st.row = <signed char *>malloc(n)
    st.stack = <int *>malloc((n + 1) * sizeof(int))
    try:
        _nc_dfs(&st, 0, 0, 0)
    finally:
        free(st.row)
        free(st.stack)
    return out


cdef struct PairState:
    int n
    signed char *row
    signed char *out
    long long nout


cdef void _pair_dfs(PairState *st, int *open_stack, int depth, int i):
    # scan left to right; an element either opens a pair or closes the top one
    cdef int top
    if i == st.n:
        if depth == 0:
            memcpy(st.out + st.nout * st.n, st.row, st.n)
            st.nout += 1
        return
    if depth > 0:
        top = open_stack[depth - 1]
        st.row[i] = <signed char>top
        st.row[top] = <signed char>i
        _pair_dfs(st, open_stack, depth - 1, i + 1)
        open_stack[depth - 1] = top
    if depth < st.n - i:
        open_stack[depth] = i
        _pair_dfs(st, open_stack, depth + 1, i + 1)


def nc2_partners(int two_k):
    cdef long long total = _catalan(two_k // 2)
    out = np.zeros((total, two_k), dtype=np.int8)
    if two_k == 0:
        return out
    cdef signed char[:, ::1] view = out
    cdef PairState st
    cdef int *open_stack = <int *>malloc((two_k + 1) * sizeof(int))
    st.n = two_k
    st.nout = 0
    st.out = &view[0, 0]
    st.row = <signed char *>malloc(two_k)
    try:
        _pair_dfs(&st, open_stack, 0, 0)
    finally:
        free(st.row)
        free(open_stack)
    # rows come out in "close first" order; callers expect lex order
    order = np.lexsort(out.T[::-1])
    return np.ascontiguousarray(out[order])


def mobius_to_top(rgs_in):
    cdef const signed char[:, ::1] rgs = np.ascontiguousarray(rgs_in, dtype=np.int8)
    cdef Py_ssize_t count = rgs.shape[0], n = rgs.shape[1]
    mu_arr = np.zeros(count, dtype=np.int64)
    if count == 0:
        return mu_arr
    cdef long long[::1] mu = mu_arr
    nb_arr = (np.asarray(rgs).max(axis=1) + 1).astype(np.int64) if n else np.zeros(count, dtype=np.int64)
    cdef long long[::1] nb = nb_arr
    order_arr = np.argsort(nb_arr, kind="stable").astype(np.intp)
    cdef Py_ssize_t[::1] order = order_arr
    cdef Py_ssize_t *rep = <Py_ssize_t *>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *firstpos = <Py_ssize_t *>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t a, b, i, s, r
    cdef long long acc
    cdef bint le, any_coarser
    try:
        for a in range(count):
            s = order[a]
            for i in range(n):
                firstpos[i] = -1
            for i in range(n):
                if firstpos[rgs[s, i]] < 0:
                    firstpos[rgs[s, i]] = i
                rep[i] = firstpos[rgs[s, i]]
            acc = 0
            any_coarser = False
            # coarser rows precede s in ``order``
            for b in range(a):
                r = order[b]
                if nb[r] >= nb[s]:
                    break
                le = True
                for i in range(n):
                    if rgs[r, i] != rgs[r, rep[i]]:
                        le = False
                        break
                if le:
                    acc += mu[r]
                    any_coarser = True
            mu[s] = -acc if any_coarser else 1
    finally:
        free(rep)
        free(firstpos)
    return mu_arr


def cc_tally(rgs_in, labels_in, etas_in, int nlabels):
    cdef const signed char[:, ::1] rgs = np.ascontiguousarray(rgs_in, dtype=np.int8)
    cdef const long[::1] labels = np.ascontiguousarray(labels_in, dtype=np.int_)
    cdef const long[::1] etas = np.ascontiguousarray(etas_in, dtype=np.int_)
    cdef Py_ssize_t count = rgs.shape[0], n = rgs.shape[1]
    cdef long long base = n + 1
    cdef Py_ssize_t *first = <Py_ssize_t *>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *last = <Py_ssize_t *>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef long *lab = <long *>malloc((n + 1) * sizeof(long))
    cdef long *size = <long *>malloc((n + 1) * sizeof(long))
    cdef long *teq = <long *>malloc((n + 1) * sizeof(long))
    cdef long *exps = <long *>malloc((2 * nlabels + 1) * sizeof(long))
    cdef Py_ssize_t r, i, b, nb
    cdef long long key
    cdef bint ok
    tally = {}
    try:
        for r in range(count):
            nb = 0
            ok = True
            for i in range(n):
                b = rgs[r, i]
                if b == nb:
                    first[b] = i
                    last[b] = i
                    lab[b] = labels[i]
                    size[b] = 1
                    teq[b] = 0
                    nb += 1
                else:
                    if labels[i] != lab[b]:
                        ok = False
                        break
                    if etas[i] == etas[last[b]]:
                        teq[b] += 1
                    last[b] = i
                    size[b] += 1
            if not ok:
                continue
            for i in range(2 * nlabels):
                exps[i] = 0
            for b in range(nb):
                exps[lab[b]] += size[b] - 1
                exps[nlabels + lab[b]] += teq[b] + (etas[first[b]] == etas[last[b]])
            key = 0
            for i in range(2 * nlabels - 1, -1, -1):
                key = key * base + exps[i]
            tally[key] = tally.get(key, 0) + 1
    finally:
        free(first)
        free(last)
        free(lab)
        free(size)
        free(teq)
        free(exps)
    return tally


def pair_tally(partners_in, labels_in, etas_in, int nlabels):
    cdef const signed char[:, ::1] partners = np.ascontiguousarray(partners_in, dtype=np.int8)
    cdef const long[::1] labels = np.ascontiguousarray(labels_in, dtype=np.int_)
    cdef const long[::1] etas = np.ascontiguousarray(etas_in, dtype=np.int_)
    cdef Py_ssize_t count = partners.shape[0], n = partners.shape[1]
    cdef long long base = n + 1
    cdef long *exps = <long *>malloc((nlabels + 1) * sizeof(long))
    cdef Py_ssize_t r, i, j
    cdef long long key
    cdef bint ok
    tally = {}
    try:
        for r in range(count):
            for i in range(nlabels):
                exps[i] = 0
            ok = True
            for i in range(n):
                j = partners[r, i]
                if i < j:
                    if labels[i] != labels[j]:
                        ok = False
                        break
                    if etas[i] == etas[j]:
                        exps[labels[i]] += 1
            if not ok:
                continue
            key = 0
            for i in range(nlabels - 1, -1, -1):
                key = key * base + exps[i]
            tally[key] = tally.get(key, 0) + 1
    finally:
        free(exps)
    return tally
