# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled local Lax-Friedrichs evolution kernels (1-D, 2-D and 3-D grids).

The per-point dissipation coefficient in dimension i is
max(|p_i + forward difference|, |p_i + backward difference|); the caller
chooses dt from the a-priori gradient bound so the scheme stays monotone.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def evolve(w, V, p, double dx, double dt, int n_steps):
    """Same contract as the numpy backend: forward-Euler LLF time stepping."""
    w = np.array(w, dtype=np.float64, copy=True)
    V = np.ascontiguousarray(V, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if w.ndim == 1:
        return _evolve_1d(w, V, p[0], dx, dt, n_steps)
    if w.ndim == 2:
        return _evolve_2d(w, V, p[0], p[1], dx, dt, n_steps)
    if w.ndim == 3:
        return _evolve_3d(w, V, p[0], p[1], p[2], dx, dt, n_steps)
    raise ValueError("grid solver supports 1, 2 or 3 dimensions")


cdef inline double _flux(double pq_f, double pq_b) nogil:
    # 0.5*(p + avg grad)^2 - 0.5*sigma*(fwd - bwd) with sigma = max(|p+f|, |p+b|)
    cdef double avg = 0.5 * (pq_f + pq_b)
    cdef double sig = pq_f if pq_f > -pq_f else -pq_f
    cdef double sb = pq_b if pq_b > -pq_b else -pq_b
    if sb > sig:
        sig = sb
    return 0.5 * avg * avg - 0.5 * sig * (pq_f - pq_b)


cdef _evolve_1d(cnp.ndarray[cnp.float64_t, ndim=1] w,
                cnp.ndarray[cnp.float64_t, ndim=1] V,
                double p0, double dx, double dt, int n_steps):
    cdef int N = w.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wn = np.empty_like(w)
    cdef int step, i, im, ip
    cdef double fwd, bwd
    for step in range(n_steps):
        for i in range(N):
            im = i - 1 if i > 0 else N - 1
            ip = i + 1 if i < N - 1 else 0
            fwd = (w[ip] - w[i]) / dx
            bwd = (w[i] - w[im]) / dx
            wn[i] = w[i] - dt * (_flux(p0 + fwd, p0 + bwd) + V[i])
        w, wn = wn, w
    return np.asarray(w)


cdef _evolve_2d(cnp.ndarray[cnp.float64_t, ndim=2] w,
                cnp.ndarray[cnp.float64_t, ndim=2] V,
                double p0, double p1, double dx, double dt, int n_steps):
    cdef int N0 = w.shape[0], N1 = w.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] wn = np.empty_like(w)
    cdef int step, i, j, im, ip, jm, jp
    cdef double fx, bx, fy, by
    for step in range(n_steps):
        for i in range(N0):
            im = i - 1 if i > 0 else N0 - 1
            ip = i + 1 if i < N0 - 1 else 0
            for j in range(N1):
                jm = j - 1 if j > 0 else N1 - 1
                jp = j + 1 if j < N1 - 1 else 0
                fx = (w[ip, j] - w[i, j]) / dx
                bx = (w[i, j] - w[im, j]) / dx
                fy = (w[i, jp] - w[i, j]) / dx
                by = (w[i, j] - w[i, jm]) / dx
                wn[i, j] = w[i, j] - dt * (_flux(p0 + fx, p0 + bx)
                                           + _flux(p1 + fy, p1 + by)
                                           + V[i, j])
        w, wn = wn, w
    return np.asarray(w)


cdef _evolve_3d(cnp.ndarray[cnp.float64_t, ndim=3] w,
                cnp.ndarray[cnp.float64_t, ndim=3] V,
                double p0, double p1, double p2,
                double dx, double dt, int n_steps):
    cdef int N0 = w.shape[0], N1 = w.shape[1], N2 = w.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] wn = np.empty_like(w)
    cdef int step, i, j, k, im, ip, jm, jp, km, kp
    cdef double fx, bx, fy, by, fz, bz
    for step in range(n_steps):
        for i in range(N0):
            im = i - 1 if i > 0 else N0 - 1
            ip = i + 1 if i < N0 - 1 else 0
            for j in range(N1):
                jm = j - 1 if j > 0 else N1 - 1
                jp = j + 1 if j < N1 - 1 else 0
                for k in range(N2):
                    km = k - 1 if k > 0 else N2 - 1
                    kp = k + 1 if k < N2 - 1 else 0
                    fx = (w[ip, j, k] - w[i, j, k]) / dx
                    bx = (w[i, j, k] - w[im, j, k]) / dx
                    fy = (w[i, jp, k] - w[i, j, k]) / dx
                    by = (w[i, j, k] - w[i, jm, k]) / dx
                    fz = (w[i, j, kp] - w[i, j, k]) / dx
                    bz = (w[i, j, k] - w[i, j, km]) / dx
                    wn[i, j, k] = w[i, j, k] - dt * (
                        _flux(p0 + fx, p0 + bx)
                        + _flux(p1 + fy, p1 + by)
                        + _flux(p2 + fz, p2 + bz)
                        + V[i, j, k])
        w, wn = wn, w
    return np.asarray(w)
