# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled O(d**2) kernels for the per-time-point work of a scan."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def phase_rotate(const double complex[:, ::1] rt, const double[::1] lam_a,
                 const double[::1] lam_b, double t):
    cdef Py_ssize_t na = rt.shape[0], nb = rt.shape[1], i, j
    if lam_a.shape[0] != na or lam_b.shape[0] != nb:
        raise ValueError("eigenvalue lengths do not match matrix shape")
    out = np.empty((na, nb), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef double[::1] cb = np.empty(nb), sb = np.empty(nb)
    cdef double ca, sa, pr, pi, xr, xi
    # explicit real arithmetic: C complex '*' goes through the NaN-safe __muldc3
    with nogil:
        for j in range(nb):
            cb[j] = cos(lam_b[j] * t)
            sb[j] = sin(lam_b[j] * t)
        for i in range(na):
            ca = cos(lam_a[i] * t)
            sa = -sin(lam_a[i] * t)
            for j in range(nb):
                pr = ca * cb[j] - sa * sb[j]
                pi = ca * sb[j] + sa * cb[j]
                xr = rt[i, j].real
                xi = rt[i, j].imag
                o[i, j].real = xr * pr - xi * pi
                o[i, j].imag = xr * pi + xi * pr
    return out


def coherence_sums(const double complex[:, ::1] rho, const cnp.int64_t[::1] popcount,
                   int n_spins):
    cdef Py_ssize_t d = rho.shape[0], p, q
    cdef cnp.int64_t base
    cdef double re, im
    if rho.shape[1] != d or popcount.shape[0] != d:
        raise ValueError("rho and popcount shapes disagree")
    orders = np.zeros(2 * n_spins + 1, dtype=np.float64)
    cdef double[::1] acc = orders
    cdef double diag = 0.0
    with nogil:
        for p in range(d):
            base = n_spins - popcount[p]
            for q in range(d):
                if q != p:
                    re = rho[p, q].real
                    im = rho[p, q].imag
                    acc[base + popcount[q]] += re * re + im * im
            re = rho[p, p].real
            im = rho[p, p].imag
            diag += re * re + im * im
    return orders, diag
