# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
from libc.math cimport exp, log, fabs, pow, M_PI, NAN

cdef double EXP_MAX = 700.0

cdef enum:
    ANOMALY = 1
    SINGULAR = 2
    AT_LIMIT = 4


cdef inline double _window(double n, double s, double g, double n_e, double sigma) nogil:
    cdef double z
    if n <= 0.0 or n >= 1.0:
        return 0.0
    z = (n - n_e) / sigma
    return pow(4.0 * n * (1.0 - n), s) * (1.0 - g * exp(-(z * z)))


def window(double n, double s, double g, double n_e, double sigma):
    return _window(n, s, g, n_e, sigma)


cdef inline double _log_abs(double b, double x, double c, int *neg, int *zero) nogil:
    cdef double arg
    if b == 0.0:
        arg = c
    elif x > EXP_MAX:
        neg[0] = b < 0.0
        zero[0] = 0
        return x + log(fabs(b)) + log(fabs(1.0 + c * exp(-x) / b))
    else:
        arg = b * exp(x) + c
    neg[0] = arg < 0.0
    zero[0] = arg == 0.0
    return log(fabs(arg))


def impedance_arrays(phi_in, n_b_in, double f0, double p, double alpha, double limit_eps):
    cdef double[::1] phi = np.ascontiguousarray(phi_in, dtype=np.float64)
    cdef double[::1] n_b = np.ascontiguousarray(n_b_in, dtype=np.float64)
    cdef Py_ssize_t size = phi.shape[0]
    out1r = np.empty(size)
    out1i = np.zeros(size)
    out2r = np.empty(size)
    out2i = np.zeros(size)
    out_st = np.zeros(size, dtype=np.uint8)
    cdef double[::1] z1re = out1r
    cdef double[::1] z1im = out1i
    cdef double[::1] z2re = out2r
    cdef double[::1] z2im = out2i
    cdef unsigned char[::1] status = out_st

    cdef double b = alpha - 1.0
    cdef double c = (p - 1.0) * alpha
    cdef double half = 1.0 / (2.0 * (p - 1.0))
    cdef double a0 = p * alpha - 1.0
    cdef double scale = 0.0
    cdef double ph, nb, k, l1, l2
    cdef int neg1, neg2, zero1, zero2
    cdef Py_ssize_t j
    if a0 != 0.0:
        scale = p * b / ((p - 1.0) * a0)

    with nogil:
        for j in range(size):
            ph = phi[j]
            nb = n_b[j]
            if ph == 0.0 or fabs(f0 * ph) < limit_eps:
                if a0 == 0.0:
                    z1re[j] = NAN
                    z2re[j] = NAN
                    status[j] = SINGULAR | AT_LIMIT
                else:
                    z1re[j] = -scale * (nb - 1.0) - half
                    z2re[j] = scale * nb - half
                    status[j] = AT_LIMIT
                continue
            l1 = _log_abs(b, f0 * (nb - 1.0) * ph, c, &neg1, &zero1)
            l2 = _log_abs(b, f0 * nb * ph, c, &neg2, &zero2)
            k = p / (f0 * (p - 1.0) * ph)
            z1re[j] = -k * l1 - half
            z2re[j] = k * l2 - half
            if neg1:
                z1im[j] = -k * M_PI
            if neg2:
                z2im[j] = k * M_PI
            if neg1 != neg2:
                status[j] |= ANOMALY
            if zero1 or zero2:
                status[j] |= SINGULAR
    return out1r, out1i, out2r, out2i, out_st


def current_driven_loop(v_in, double dt, double n_b0, double mobility,
                        double rho1, double rho2,
                        double s, double g, double n_e, double sigma):
    cdef double[::1] v = np.ascontiguousarray(v_in, dtype=np.float64)
    cdef Py_ssize_t size = v.shape[0]
    out_n = np.empty(size)
    out_i = np.empty(size)
    cdef double[::1] n_b = out_n
    cdef double[::1] cur = out_i
    cdef double n = n_b0
    cdef double i_prev = 0.0
    cdef double r
    cdef Py_ssize_t k
    with nogil:
        for k in range(size):
            if k > 0:
                n += mobility * i_prev * _window(n, s, g, n_e, sigma) * dt
                if n < 0.0:
                    n = 0.0
                elif n > 1.0:
                    n = 1.0
            r = rho1 * n + rho2 * (1.0 - n)
            i_prev = v[k] / r
            n_b[k] = n
            cur[k] = i_prev
    return out_n, out_i


def walk_boundary(current_in, double dt, double n_b0, double mobility,
                  double s, double g, double n_e, double sigma):
    cdef double[::1] current = np.ascontiguousarray(current_in, dtype=np.float64)
    cdef Py_ssize_t size = current.shape[0]
    out_n = np.empty(size + 1)
    cdef double[::1] n_b = out_n
    cdef double n = n_b0
    cdef Py_ssize_t k
    n_b[0] = n
    with nogil:
        for k in range(size):
            n += mobility * current[k] * _window(n, s, g, n_e, sigma) * dt
            if n < 0.0:
                n = 0.0
            elif n > 1.0:
                n = 1.0
            n_b[k + 1] = n
    return out_n
