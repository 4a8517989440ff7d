# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan/walk kernels.

Semantics are pinned by fitscape._kernels.numpy_backend: same canonical slot
order, same splitmix64 rotation, same draw-modulo-degree walk rule. Outputs
must be bit-identical to the fallback.
"""

from libc.stdlib cimport free, malloc
from libc.math cimport INFINITY

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint64_t u64
ctypedef cnp.uint8_t u8
ctypedef cnp.float64_t f64


cdef inline u64 _splitmix64(u64 x) noexcept nogil:
    cdef u64 z = x + <u64>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline int _collect_neighbors(i64 i, const i64* radices, const i64* place,
                                   const u8* kinds, Py_ssize_t n_opts,
                                   i64* buf) noexcept nogil:
    """Fill buf with the neighbors of i in canonical slot order."""
    cdef Py_ssize_t o
    cdef i64 p, r, d, delta, target
    cdef int deg = 0
    for o in range(n_opts):
        p = place[o]
        r = radices[o]
        d = (i // p) % r
        if kinds[o] == 0:
            for delta in range(1, r):
                target = (d + delta) % r
                buf[deg] = i + (target - d) * p
                deg += 1
        else:
            if d > 0:
                buf[deg] = i - p
                deg += 1
            if d < r - 1:
                buf[deg] = i + p
                deg += 1
    return deg


def scan_best(const f64[::1] g, const i64[::1] radices, const i64[::1] place,
              const u8[::1] kinds):
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t n_opts = radices.shape[0]
    succ_arr = np.empty(n, dtype=np.int64)
    cls_arr = np.empty(n, dtype=np.uint8)
    cdef i64[::1] succ = succ_arr
    cdef u8[::1] cls = cls_arr
    cdef Py_ssize_t i, o
    cdef i64 p, r, d, delta, target, nbr, best_id
    cdef f64 g0, gn, best_g
    cdef bint any_better, any_equal
    with nogil:
        for i in range(n):
            g0 = g[i]
            any_better = False
            any_equal = False
            best_g = -INFINITY
            best_id = n
            for o in range(n_opts):
                p = place[o]
                r = radices[o]
                d = (i // p) % r
                if kinds[o] == 0:
                    for delta in range(1, r):
                        target = (d + delta) % r
                        nbr = i + (target - d) * p
                        gn = g[nbr]
                        if gn > g0:
                            any_better = True
                            if gn > best_g or (gn == best_g and nbr < best_id):
                                best_g = gn
                                best_id = nbr
                        elif gn == g0:
                            any_equal = True
                else:
                    if d > 0:
                        nbr = i - p
                        gn = g[nbr]
                        if gn > g0:
                            any_better = True
                            if gn > best_g or (gn == best_g and nbr < best_id):
                                best_g = gn
                                best_id = nbr
                        elif gn == g0:
                            any_equal = True
                    if d < r - 1:
                        nbr = i + p
                        gn = g[nbr]
                        if gn > g0:
                            any_better = True
                            if gn > best_g or (gn == best_g and nbr < best_id):
                                best_g = gn
                                best_id = nbr
                        elif gn == g0:
                            any_equal = True
            if any_better:
                succ[i] = best_id
                cls[i] = 0
            else:
                succ[i] = i
                cls[i] = 1 if any_equal else 2
    return succ_arr, cls_arr


def scan_first(const f64[::1] g, const i64[::1] radices, const i64[::1] place,
               const u8[::1] kinds, u64 seed):
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t n_opts = radices.shape[0]
    cdef Py_ssize_t o
    cdef i64 max_deg = 0
    for o in range(n_opts):
        max_deg += radices[o] - 1 if kinds[o] == 0 else 2
    succ_arr = np.empty(n, dtype=np.int64)
    cls_arr = np.empty(n, dtype=np.uint8)
    cdef i64[::1] succ = succ_arr
    cdef u8[::1] cls = cls_arr
    cdef i64* buf = <i64*>malloc(max_deg * sizeof(i64))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef int deg, j, k, p_off, idx
    cdef i64 key
    cdef u64 rot
    cdef f64 g0
    cdef bint any_better, any_equal
    with nogil:
        for i in range(n):
            deg = _collect_neighbors(i, &radices[0], &place[0], &kinds[0], n_opts, buf)
            # insertion sort: ascending neighbor ids
            for j in range(1, deg):
                key = buf[j]
                k = j - 1
                while k >= 0 and buf[k] > key:
                    buf[k + 1] = buf[k]
                    k -= 1
                buf[k + 1] = key
            g0 = g[i]
            any_better = False
            any_equal = False
            for j in range(deg):
                if g[buf[j]] > g0:
                    any_better = True
                elif g[buf[j]] == g0:
                    any_equal = True
            if not any_better:
                succ[i] = i
                cls[i] = 1 if any_equal else 2
                continue
            cls[i] = 0
            rot = _splitmix64((<u64>i) ^ seed) % <u64>deg
            for p_off in range(deg):
                idx = <int>((rot + <u64>p_off) % <u64>deg)
                if g[buf[idx]] > g0:
                    succ[i] = buf[idx]
                    break
    free(buf)
    return succ_arr, cls_arr


def walk_paths(const i64[::1] radices, const i64[::1] place, const u8[::1] kinds,
               const i64[::1] starts, const u64[:, ::1] draws):
    cdef Py_ssize_t n_walks = starts.shape[0]
    cdef Py_ssize_t length = draws.shape[1]
    cdef Py_ssize_t n_opts = radices.shape[0]
    paths_arr = np.empty((n_walks, length + 1), dtype=np.int64)
    cdef i64[:, ::1] paths = paths_arr
    cdef Py_ssize_t w, t, o
    cdef i64 cur, p, r, d, delta, target
    cdef u64 j
    cdef int deg
    cdef bint done
    with nogil:
        for w in range(n_walks):
            cur = starts[w]
            paths[w, 0] = cur
            for t in range(length):
                deg = 0
                for o in range(n_opts):
                    if kinds[o] == 0:
                        deg += radices[o] - 1
                    else:
                        d = (cur // place[o]) % radices[o]
                        if d > 0:
                            deg += 1
                        if d < radices[o] - 1:
                            deg += 1
                j = draws[w, t] % <u64>deg
                done = False
                for o in range(n_opts):
                    if done:
                        break
                    p = place[o]
                    r = radices[o]
                    d = (cur // p) % r
                    if kinds[o] == 0:
                        if j < <u64>(r - 1):
                            target = (d + <i64>j + 1) % r
                            cur = cur + (target - d) * p
                            done = True
                        else:
                            j -= <u64>(r - 1)
                    else:
                        if d > 0:
                            if j == 0:
                                cur = cur - p
                                done = True
                                continue
                            j -= 1
                        if not done and d < r - 1:
                            if j == 0:
                                cur = cur + p
                                done = True
                            else:
                                j -= 1
                paths[w, t + 1] = cur
    return paths_arr
