# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled NL-means kernel; same per-pixel arithmetic order as ``_nlmeans_py``.

Inner loops run over contiguous pixel rows with the tap index outermost, so
the compiler can vectorise them without reassociating any sum.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


cdef void _offset_pass(
    const double* pad, int PW, int dy, int dx, int x0, int ny, int nx, int rp,
    const double* g, double* dbuf, double* rows, double* dist,
) noexcept nogil:
    cdef int npatch = 2 * rp + 1
    cdef int wide = nx + 2 * rp
    cdef int r, c, k
    cdef const double* pa
    cdef const double* pb
    cdef double* out
    cdef double t, gk
    # horizontal pass over the squared differences
    for r in range(ny + 2 * rp):
        pa = pad + r * PW + x0
        pb = pad + (dy + r) * PW + x0 + dx
        for c in range(wide):
            t = pa[c] - pb[c]
            dbuf[c] = t * t
        out = rows + r * nx
        gk = g[0]
        for c in range(nx):
            out[c] = gk * dbuf[c]
        for k in range(1, npatch):
            gk = g[k]
            for c in range(nx):
                out[c] = out[c] + gk * dbuf[c + k]
    # vertical pass
    for r in range(ny):
        out = dist + r * nx
        gk = g[0]
        pa = rows + r * nx
        for c in range(nx):
            out[c] = gk * pa[c]
        for k in range(1, npatch):
            gk = g[k]
            pa = rows + (r + k) * nx
            for c in range(nx):
                out[c] = out[c] + gk * pa[c]


def nlmeans_kernel(img, int search_radius, int patch_radius, double h, kernel1d):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] src = np.ascontiguousarray(img, dtype=np.float64)
    cdef double[::1] g = np.ascontiguousarray(kernel1d, dtype=np.float64)
    cdef int H = src.shape[0]
    cdef int W = src.shape[1]
    cdef int rs = search_radius
    cdef int rp = patch_radius
    cdef double inv_h2 = 1.0 / (h * h)

    cdef double[:, ::1] pad = np.pad(src, rp, mode="symmetric")
    cdef double[:, ::1] v = src
    cdef double[:, ::1] num = src.copy()
    cdef double[:, ::1] den = np.ones((H, W))
    cdef double[::1] rows = np.empty((H + 2 * rp) * W)
    cdef double[::1] dist = np.empty(H * W)
    cdef double[::1] dbuf = np.empty(W + 2 * rp)

    cdef int PW = W + 2 * rp
    cdef int dy, dx, x0, x1, ny, nx, r, c
    cdef double* d
    cdef double* na
    cdef double* da
    cdef double* nb
    cdef double* db
    cdef const double* va
    cdef const double* vb

    with nogil:
        for dy in range(0, rs + 1):
            ny = H - dy
            if ny <= 0:
                continue
            for dx in range(-rs, rs + 1):
                if dy == 0 and dx <= 0:
                    continue
                x0 = -dx if dx < 0 else 0
                x1 = W - dx if dx > 0 else W
                if x0 >= x1:
                    continue
                nx = x1 - x0
                _offset_pass(&pad[0, 0], PW, dy, dx, x0, ny, nx, rp, &g[0], &dbuf[0], &rows[0], &dist[0])
                for r in range(ny):
                    d = &dist[r * nx]
                    for c in range(nx):
                        d[c] = exp(-d[c] * inv_h2)
                    # scatter to both pixels of each pair
                    na = &num[r, x0]
                    da = &den[r, x0]
                    nb = &num[dy + r, x0 + dx]
                    db = &den[dy + r, x0 + dx]
                    va = &v[r, x0]
                    vb = &v[dy + r, x0 + dx]
                    for c in range(nx):
                        na[c] += d[c] * vb[c]
                        da[c] += d[c]
                    for c in range(nx):
                        nb[c] += d[c] * va[c]
                        db[c] += d[c]

    return np.asarray(num) / np.asarray(den)
