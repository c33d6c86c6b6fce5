# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: dense bivariate evaluation, Bernstein branch-and-bound
range enclosure, and the direct nonuniform DFT oracle.

Contracts match affdec._kernels_py exactly; the benchmark suite compares both.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, fmin, fmax

cnp.import_array()

BACKEND_NAME = "compiled"

DEF MAXDEG = 32


def eval2_many(cnp.ndarray e1_in, cnp.ndarray e2_in, cnp.ndarray c_in,
               x_in, y_in):
    """Evaluate sum_t c[t] * x**e1[t] * y**e2[t] at paired points."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] e1 = np.ascontiguousarray(e1_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] e2 = np.ascontiguousarray(e2_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    xa = np.ascontiguousarray(x_in, dtype=np.float64)
    shape = xa.shape
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = xa.ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.ascontiguousarray(y_in, dtype=np.float64).ravel()
    cdef Py_ssize_t npts = x.shape[0], nterms = c.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(npts, dtype=np.float64)
    cdef double xp[MAXDEG + 1]
    cdef double yp[MAXDEG + 1]
    cdef Py_ssize_t i, t, k
    cdef long d1 = 0, d2 = 0
    cdef double acc
    for t in range(nterms):
        if e1[t] > d1:
            d1 = e1[t]
        if e2[t] > d2:
            d2 = e2[t]
    if d1 > MAXDEG or d2 > MAXDEG:
        raise ValueError("degree exceeds compiled kernel limit")
    for i in range(npts):
        xp[0] = 1.0
        yp[0] = 1.0
        for k in range(1, d1 + 1):
            xp[k] = xp[k - 1] * x[i]
        for k in range(1, d2 + 1):
            yp[k] = yp[k - 1] * y[i]
        acc = 0.0
        for t in range(nterms):
            acc += c[t] * xp[e1[t]] * yp[e2[t]]
        out[i] = acc
    return out.reshape(shape)


cdef void _split_axis0(double* b, double* left, double* right,
                       Py_ssize_t n1, Py_ssize_t m1) noexcept nogil:
    # de Casteljau subdivision at t = 1/2 along the first axis
    cdef Py_ssize_t i, j, r
    cdef double work[(MAXDEG + 1) * (MAXDEG + 1)]
    for i in range(n1 * m1):
        work[i] = b[i]
    for j in range(m1):
        left[j] = work[j]
        right[(n1 - 1) * m1 + j] = work[(n1 - 1) * m1 + j]
    for r in range(1, n1):
        for i in range(n1 - r):
            for j in range(m1):
                work[i * m1 + j] = 0.5 * (work[i * m1 + j] + work[(i + 1) * m1 + j])
        for j in range(m1):
            left[r * m1 + j] = work[j]
            right[(n1 - 1 - r) * m1 + j] = work[(n1 - 1 - r) * m1 + j]


cdef void _split_axis1(double* b, double* left, double* right,
                       Py_ssize_t n1, Py_ssize_t m1) noexcept nogil:
    cdef Py_ssize_t i, j, r
    cdef double work[(MAXDEG + 1) * (MAXDEG + 1)]
    for i in range(n1 * m1):
        work[i] = b[i]
    for i in range(n1):
        left[i * m1] = work[i * m1]
        right[i * m1 + m1 - 1] = work[i * m1 + m1 - 1]
    for r in range(1, m1):
        for i in range(n1):
            for j in range(m1 - r):
                work[i * m1 + j] = 0.5 * (work[i * m1 + j] + work[i * m1 + j + 1])
        for i in range(n1):
            left[i * m1 + r] = work[i * m1]
            right[i * m1 + m1 - 1 - r] = work[i * m1 + m1 - 1 - r]


cdef inline double _coef_min(double* b, Py_ssize_t sz) noexcept nogil:
    cdef double v = b[0]
    cdef Py_ssize_t i
    for i in range(1, sz):
        if b[i] < v:
            v = b[i]
    return v


cdef inline double _corner_min(double* b, Py_ssize_t n1, Py_ssize_t m1) noexcept nogil:
    cdef double v = b[0]
    v = fmin(v, b[m1 - 1])
    v = fmin(v, b[(n1 - 1) * m1])
    v = fmin(v, b[n1 * m1 - 1])
    return v


def _bernstein_2d(cnp.ndarray a_in):
    """Power-basis coefficients on [0,1]^2 -> Bernstein coefficient matrix."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0] - 1, m = a.shape[1] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] binn = _pascal(max(n, m) + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b = np.zeros((n + 1, m + 1))
    cdef Py_ssize_t i, j, k, l
    cdef double s
    for i in range(n + 1):
        for j in range(m + 1):
            s = 0.0
            for k in range(i + 1):
                for l in range(j + 1):
                    s += (binn[i, k] / binn[n, k]) * (binn[j, l] / binn[m, l]) * a[k, l]
            b[i, j] = s
    return b


def _pascal(Py_ssize_t n1):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] m = np.zeros((n1, n1))
    cdef Py_ssize_t i, k
    for i in range(n1):
        m[i, 0] = 1.0
        for k in range(1, i + 1):
            m[i, k] = m[i - 1, k - 1] + m[i - 1, k]
    return m


def enclose01(a_in, double tol, long max_boxes):
    """Certified range enclosure on [0,1]^2; see _kernels_py.enclose01."""
    a = np.ascontiguousarray(a_in, dtype=np.float64)
    lo, used1, ok1 = _min01(a, tol, max_boxes)
    hi_neg, used2, ok2 = _min01(-a, tol, max_boxes)
    return lo, -hi_neg, used1 + used2, ok1 and ok2


def _min01(a_in, double tol, long max_boxes):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] b0 = _bernstein_2d(a_in)
    cdef Py_ssize_t n1 = b0.shape[0], m1 = b0.shape[1]
    cdef Py_ssize_t sz = n1 * m1
    if sz > (MAXDEG + 1) * (MAXDEG + 1):
        raise ValueError("degree exceeds compiled kernel limit")
    cdef long cap = max_boxes + 8
    # node pool: coefficient blocks, heap of (lower bound, node id), depth tags
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pool = np.empty((cap, sz))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hkey = np.empty(cap)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hid = np.empty(cap, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] depth = np.empty(cap, dtype=np.int32)
    cdef double* pl = <double*> pool.data
    cdef double* hk = <double*> hkey.data
    cdef cnp.int64_t* hi_ = <cnp.int64_t*> hid.data
    cdef cnp.int32_t* dp = <cnp.int32_t*> depth.data
    cdef Py_ssize_t i
    for i in range(sz):
        pl[i] = (<double*> b0.data)[i]
    cdef double best_ub = _corner_min(pl, n1, m1)
    cdef long heap_n = 0, nodes = 1, used = 1
    cdef double lb = best_ub
    cdef long nid, d, axis, ca, cb
    cdef bint converged = 1, empty = 0
    _heap_push(hk, hi_, &heap_n, _coef_min(pl, sz), 0)
    dp[0] = 0
    with nogil:
        while True:
            if heap_n == 0:
                empty = 1
                break
            lb = hk[0]
            nid = hi_[0]
            _heap_pop(hk, hi_, &heap_n)
            if best_ub - lb <= tol:
                break
            if used >= max_boxes or nodes + 2 >= cap:
                converged = 0
                for i in range(heap_n):
                    lb = fmin(lb, hk[i])
                break
            d = dp[nid]
            if m1 == 1:
                axis = 0
            elif n1 == 1:
                axis = 1
            else:
                axis = d % 2
            ca = nodes
            cb = nodes + 1
            nodes += 2
            if axis == 0:
                _split_axis0(pl + nid * sz, pl + ca * sz, pl + cb * sz, n1, m1)
            else:
                _split_axis1(pl + nid * sz, pl + ca * sz, pl + cb * sz, n1, m1)
            dp[ca] = d + 1
            dp[cb] = d + 1
            best_ub = fmin(best_ub, _corner_min(pl + ca * sz, n1, m1))
            best_ub = fmin(best_ub, _corner_min(pl + cb * sz, n1, m1))
            _heap_push(hk, hi_, &heap_n, _coef_min(pl + ca * sz, sz), ca)
            _heap_push(hk, hi_, &heap_n, _coef_min(pl + cb * sz, sz), cb)
            used += 2
    if empty:
        return best_ub, used, True
    return lb, used, bool(converged)


cdef void _heap_push(double* key, cnp.int64_t* idx, long* n, double k, long v) noexcept nogil:
    cdef long i = n[0], parent
    key[i] = k
    idx[i] = v
    n[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if key[parent] <= key[i]:
            break
        key[parent], key[i] = key[i], key[parent]
        idx[parent], idx[i] = idx[i], idx[parent]
        i = parent
    return


cdef void _heap_pop(double* key, cnp.int64_t* idx, long* n) noexcept nogil:
    cdef long i = 0, child
    n[0] -= 1
    key[0] = key[n[0]]
    idx[0] = idx[n[0]]
    while True:
        child = 2 * i + 1
        if child >= n[0]:
            break
        if child + 1 < n[0] and key[child + 1] < key[child]:
            child += 1
        if key[i] <= key[child]:
            break
        key[i], key[child] = key[child], key[i]
        idx[i], idx[child] = idx[child], idx[i]
        i = child
    return


def dft3_points(freq_in, amp_in, pts_in, long chunk=512):
    """Direct summation F(x) = sum_j amp[j] exp(2 pi i x . freq[j]) at points."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] freq = np.ascontiguousarray(freq_in, dtype=np.float64)
    amp_c = np.ascontiguousarray(amp_in, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] amp = amp_c.view(np.float64).reshape(-1, 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t npts = pts.shape[0], nf = freq.shape[0]
    out_c = np.zeros(npts, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = out_c.view(np.float64).reshape(-1, 2)
    cdef Py_ssize_t i, j
    cdef double ph, tw = 2.0 * np.pi
    cdef double ar, ai, c_, s_
    with nogil:
        for i in range(npts):
            ar = 0.0
            ai = 0.0
            for j in range(nf):
                ph = tw * (pts[i, 0] * freq[j, 0] + pts[i, 1] * freq[j, 1]
                           + pts[i, 2] * freq[j, 2])
                c_ = cos(ph)
                s_ = sin(ph)
                ar += amp[j, 0] * c_ - amp[j, 1] * s_
                ai += amp[j, 0] * s_ + amp[j, 1] * c_
            out[i, 0] = ar
            out[i, 1] = ai
    return out_c


def dft3_grid_direct(freq_in, amp_in, xs_in, ys_in, zs_in):
    """Direct-summation synthesis on a tensor grid (oracle path, O(M n^3))."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] freq = np.ascontiguousarray(freq_in, dtype=np.float64)
    amp_c = np.ascontiguousarray(amp_in, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] amp = amp_c.view(np.float64).reshape(-1, 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ys = np.ascontiguousarray(ys_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zs = np.ascontiguousarray(zs_in, dtype=np.float64)
    cdef Py_ssize_t nx = xs.shape[0], ny = ys.shape[0], nz = zs.shape[0]
    cdef Py_ssize_t nf = freq.shape[0]
    out_c = np.zeros((nx, ny, nz), dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] out = out_c.view(np.float64).reshape(nx, ny, nz, 2)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ex = np.empty((nx, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ey = np.empty((ny, 2))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ez = np.empty((nz, 2))
    cdef Py_ssize_t j, ix, iy, iz
    cdef double tw = 2.0 * np.pi, ph
    cdef double axr, axi, xyr, xyi
    with nogil:
        for j in range(nf):
            for ix in range(nx):
                ph = tw * xs[ix] * freq[j, 0]
                ex[ix, 0] = cos(ph)
                ex[ix, 1] = sin(ph)
            for iy in range(ny):
                ph = tw * ys[iy] * freq[j, 1]
                ey[iy, 0] = cos(ph)
                ey[iy, 1] = sin(ph)
            for iz in range(nz):
                ph = tw * zs[iz] * freq[j, 2]
                ez[iz, 0] = cos(ph)
                ez[iz, 1] = sin(ph)
            for ix in range(nx):
                axr = amp[j, 0] * ex[ix, 0] - amp[j, 1] * ex[ix, 1]
                axi = amp[j, 0] * ex[ix, 1] + amp[j, 1] * ex[ix, 0]
                for iy in range(ny):
                    xyr = axr * ey[iy, 0] - axi * ey[iy, 1]
                    xyi = axr * ey[iy, 1] + axi * ey[iy, 0]
                    for iz in range(nz):
                        out[ix, iy, iz, 0] += xyr * ez[iz, 0] - xyi * ez[iz, 1]
                        out[ix, iy, iz, 1] += xyr * ez[iz, 1] + xyi * ez[iz, 0]
    return out_c
