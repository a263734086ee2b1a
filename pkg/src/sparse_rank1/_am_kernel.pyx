# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled l0 alternating-maximization sweep loop.

Semantically identical to ``_am_fallback.am_l0_loop``; exists because the AM
loop is called tens of thousands of times on small tensors by the brute-force
oracle and the deflation pipeline, where interpreter overhead dominates.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef void _back_contract(const double* src, Py_ssize_t length, Py_ssize_t n,
                         const double* x, double* dst) noexcept nogil:
    # src viewed column-major as (length/n, n); contracts the trailing mode.
    cdef Py_ssize_t P = length // n
    cdef Py_ssize_t p, k, base
    cdef double xk
    for p in range(P):
        dst[p] = 0.0
    for k in range(n):
        xk = x[k]
        if xk == 0.0:
            continue
        base = P * k
        for p in range(P):
            dst[p] += src[base + p] * xk


cdef void _front_contract(const double* src, Py_ssize_t length, Py_ssize_t n,
                          const double* x, double* dst) noexcept nogil:
    # src viewed column-major as (n, length/n); contracts the leading mode.
    cdef Py_ssize_t Q = length // n
    cdef Py_ssize_t q, i, base
    cdef double acc
    for q in range(Q):
        base = n * q
        acc = 0.0
        for i in range(n):
            acc += src[base + i] * x[i]
        dst[q] = acc


cdef double _truncate_normalize(double* g, Py_ssize_t n, Py_ssize_t r,
                                unsigned char* mask) noexcept nogil:
    # Marks the top-r magnitudes (ties to the smaller index), zeroes the rest
    # of g and normalizes it in place.  Returns the pre-normalization norm;
    # 0 means g was entirely zero and is left untouched.
    cdef Py_ssize_t i, cnt, best
    cdef double mag, bestmag, norm2, norm
    for i in range(n):
        mask[i] = 0
    for cnt in range(r):
        best = -1
        bestmag = 0.0
        for i in range(n):
            if not mask[i]:
                mag = fabs(g[i])
                if mag > bestmag:
                    bestmag = mag
                    best = i
        if best < 0:
            break
        mask[best] = 1
    norm2 = 0.0
    for i in range(n):
        if mask[i]:
            norm2 += g[i] * g[i]
        else:
            g[i] = 0.0
    if norm2 == 0.0:
        return 0.0
    norm = sqrt(norm2)
    for i in range(n):
        if mask[i]:
            g[i] /= norm
    return norm


def am_l0_loop(flat, shape, r, init, double tol, int max_sweeps):
    """Run l0 AM sweeps; returns (factors, objectives, sweeps_used, converged)."""
    cdef cnp.ndarray[double, ndim=1] data = np.ascontiguousarray(flat, dtype=np.float64)
    cdef Py_ssize_t d = len(shape)
    cdef Py_ssize_t total = data.shape[0]
    cdef Py_ssize_t[::1] dims = np.asarray(shape, dtype=np.intp)
    cdef Py_ssize_t[::1] caps = np.asarray(r, dtype=np.intp)
    cdef Py_ssize_t nmax = max(shape)

    factor_arrays = [np.array(f, dtype=np.float64) for f in init]
    cdef double[::1] fstore = np.concatenate(factor_arrays)
    cdef Py_ssize_t[::1] offs = np.concatenate(
        ([0], np.cumsum(np.asarray(shape, dtype=np.intp)))
    ).astype(np.intp)
    cdef double[::1] old = np.empty(offs[d], dtype=np.float64)
    cdef double[::1] bufa = np.empty(total, dtype=np.float64)
    cdef double[::1] bufb = np.empty(max(total // min(shape), 1), dtype=np.float64)
    cdef double[::1] grad = np.empty(nmax, dtype=np.float64)
    cdef unsigned char[::1] mask = np.empty(nmax, dtype=np.uint8)

    objectives = []
    cdef bint converged = False
    cdef int sweeps = 0
    cdef Py_ssize_t i, j, k, length, sweep
    cdef double norm, obj, delta, dsum, diff
    cdef const double* src
    cdef double* a = &bufa[0]
    cdef double* b = &bufb[0]
    cdef double* cur

    for sweep in range(max_sweeps):
        sweeps += 1
        for i in range(offs[d]):
            old[i] = fstore[i]
        obj = 0.0
        for j in range(d):
            # gradient for mode j: peel trailing modes, then leading ones
            src = &data[0]
            length = total
            cur = a
            for k in range(d - 1, j, -1):
                _back_contract(src, length, dims[k], &fstore[offs[k]], cur)
                length //= dims[k]
                src = cur
                cur = b if cur == a else a
            for k in range(j):
                _front_contract(src, length, dims[k], &fstore[offs[k]], cur)
                length //= dims[k]
                src = cur
                cur = b if cur == a else a
            for i in range(dims[j]):
                grad[i] = src[i]
            norm = _truncate_normalize(&grad[0], dims[j], caps[j], &mask[0])
            if norm > 0.0:
                for i in range(dims[j]):
                    fstore[offs[j] + i] = grad[i]
            if j == d - 1:
                obj = 0.0
                for i in range(dims[j]):
                    obj += src[i] * fstore[offs[j] + i]
        objectives.append(obj)
        delta = 0.0
        for j in range(d):
            dsum = 0.0
            for i in range(dims[j]):
                diff = fstore[offs[j] + i] - old[offs[j] + i]
                dsum += diff * diff
            dsum = sqrt(dsum)
            if dsum > delta:
                delta = dsum
        if delta <= tol:
            converged = True
            break

    out = [
        np.asarray(fstore[offs[j] : offs[j + 1]]).copy() for j in range(d)
    ]
    return out, np.asarray(objectives), sweeps, converged
