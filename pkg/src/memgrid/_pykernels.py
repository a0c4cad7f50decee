"""Pure-Python/numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is unavailable or ``MEMGRID_PURE_PYTHON`` is set.
"""

import math

import numpy as np

ANOMALY = 1
SINGULAR = 2
AT_LIMIT = 4

# exp() overflows just above 709
_EXP_MAX = 700.0


def window(n, s, g, n_e, sigma):
    if n <= 0.0 or n >= 1.0:
        return 0.0
    return (4.0 * n * (1.0 - n)) ** s * (1.0 - g * math.exp(-(((n - n_e) / sigma) ** 2)))


def _log_abs(b, x, c):
    """ln|b*exp(x) + c| and the sign flag, elementwise; x is an array."""
    big = x > _EXP_MAX
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        arg = b * np.exp(np.where(big, 0.0, x)) + c
        out = np.log(np.abs(arg))
        neg = arg < 0.0
        zero = arg == 0.0
        if big.any():
            xb = x[big]
            tail = np.log(np.abs(1.0 + c * np.exp(-xb) / b))
            out[big] = xb + math.log(abs(b)) + tail
            neg[big] = b < 0.0
            zero[big] = False
    return out, neg, zero


def impedance_arrays(phi, n_b, f0, p, alpha, limit_eps):
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    n_b = np.ascontiguousarray(n_b, dtype=np.float64)
    b = alpha - 1.0
    c = (p - 1.0) * alpha
    half = 1.0 / (2.0 * (p - 1.0))
    size = phi.shape[0]
    z1re = np.empty(size)
    z1im = np.zeros(size)
    z2re = np.empty(size)
    z2im = np.zeros(size)
    status = np.zeros(size, dtype=np.uint8)

    lim = (phi == 0.0) | (np.abs(f0 * phi) < limit_eps)
    direct = ~lim

    if direct.any():
        ph = phi[direct]
        nb = n_b[direct]
        if b == 0.0:
            l1 = np.full(ph.shape, math.log(abs(c)) if c != 0.0 else -np.inf)
            l2 = l1.copy()
            neg1 = np.full(ph.shape, c < 0.0)
            neg2 = neg1.copy()
            zero1 = np.full(ph.shape, c == 0.0)
            zero2 = zero1.copy()
        else:
            l1, neg1, zero1 = _log_abs(b, f0 * (nb - 1.0) * ph, c)
            l2, neg2, zero2 = _log_abs(b, f0 * nb * ph, c)
        k = p / (f0 * (p - 1.0) * ph)
        z1re[direct] = -k * l1 - half
        z2re[direct] = k * l2 - half
        z1im[direct] = np.where(neg1, -k * math.pi, 0.0)
        z2im[direct] = np.where(neg2, k * math.pi, 0.0)
        st = np.where(neg1 != neg2, ANOMALY, 0) | np.where(zero1 | zero2, SINGULAR, 0)
        status[direct] = st.astype(np.uint8)

    if lim.any():
        nb = n_b[lim]
        a0 = p * alpha - 1.0
        if a0 == 0.0:
            z1re[lim] = np.nan
            z2re[lim] = np.nan
            status[lim] = SINGULAR | AT_LIMIT
        else:
            scale = p * b / ((p - 1.0) * a0)
            z1re[lim] = -scale * (nb - 1.0) - half
            z2re[lim] = scale * nb - half
            status[lim] = AT_LIMIT
    return z1re, z1im, z2re, z2im, status


def current_driven_loop(v, dt, n_b0, mobility, rho1, rho2, s, g, n_e, sigma):
    size = len(v)
    n_b = np.empty(size)
    cur = np.empty(size)
    n = n_b0
    i_prev = 0.0
    for k in range(size):
        if k > 0:
            n += mobility * i_prev * window(n, s, g, n_e, sigma) * dt
            n = min(1.0, max(0.0, n))
        r = rho1 * n + rho2 * (1.0 - n)
        i_prev = v[k] / r
        n_b[k] = n
        cur[k] = i_prev
    return n_b, cur


def walk_boundary(current, dt, n_b0, mobility, s, g, n_e, sigma):
    size = len(current)
    n_b = np.empty(size + 1)
    n = n_b0
    n_b[0] = n
    for k in range(size):
        n += mobility * current[k] * window(n, s, g, n_e, sigma) * dt
        n = min(1.0, max(0.0, n))
        n_b[k + 1] = n
    return n_b
