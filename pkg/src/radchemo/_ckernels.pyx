# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Thomas solve and the RK4 radial shooting integrator."""
import numpy as np
from libc.math cimport exp, ceil, INFINITY


def thomas(double[::1] a, double[::1] b, double[::1] c, double[::1] d):
    cdef Py_ssize_t m = b.shape[0], i
    cdef double w, piv
    cdef double[::1] cp = np.empty(m)
    x_arr = np.empty(m)
    cdef double[::1] x = x_arr
    piv = b[0]
    if piv == 0.0:
        raise ZeroDivisionError("zero pivot in row 0")
    cp[0] = c[0] / piv
    x[0] = d[0] / piv
    for i in range(1, m):
        piv = b[i] - a[i] * cp[i - 1]
        if piv == 0.0:
            raise ZeroDivisionError(f"zero pivot in row {i}")
        cp[i] = c[i] / piv
        x[i] = (d[i] - a[i] * x[i - 1]) / piv
    for i in range(m - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x_arr


cdef inline double _acc(double r, double v, double p, double alpha, double nm1) nogil:
    return alpha * v * exp(v) - nm1 * p / r


def shoot(double alpha, int n, double s, double r0, double[::1] rb, double hmax):
    cdef Py_ssize_t k, j, nsub
    cdef double nm1 = n - 1.0
    cdef double r = r0, v, p, H, r_next
    cdef double k1v, k1p, k2v, k2p, k3v, k3p, k4v, k4p
    cdef Py_ssize_t m = rb.shape[0]
    v_arr = np.empty(m)
    p_arr = np.empty(m)
    cdef double[::1] vo = v_arr
    cdef double[::1] po = p_arr
    cdef double g = alpha * s * exp(s) / n
    v = s + 0.5 * g * r0 * r0
    p = g * r0
    for k in range(m):
        if not v < 700.0:
            vo[k] = INFINITY
            po[k] = INFINITY
            continue
        r_next = rb[k]
        if r_next > r:
            nsub = <Py_ssize_t>ceil((r_next - r) / hmax)
            H = (r_next - r) / nsub
            for j in range(nsub):
                k1v = p
                k1p = _acc(r, v, p, alpha, nm1)
                k2v = p + 0.5 * H * k1p
                k2p = _acc(r + 0.5 * H, v + 0.5 * H * k1v, k2v, alpha, nm1)
                k3v = p + 0.5 * H * k2p
                k3p = _acc(r + 0.5 * H, v + 0.5 * H * k2v, k3v, alpha, nm1)
                k4v = p + H * k3p
                k4p = _acc(r + H, v + H * k3v, k4v, alpha, nm1)
                v += H * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
                p += H * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
                r += H
                if not v < 700.0:
                    break
            r = r_next
        vo[k] = v
        po[k] = p
    return v_arr, p_arr
