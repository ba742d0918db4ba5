"""Pure-Python versions of the compiled kernels (same signatures)."""
import math

import numpy as np


def thomas(a, b, c, d):
    a, b, c, d = (np.asarray(x, dtype=float).tolist() for x in (a, b, c, d))
    m = len(b)
    cp = [0.0] * m
    x = [0.0] * m
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
    return np.array(x)


def shoot(alpha, n, s, r0, rb, hmax):
    nm1 = n - 1.0

    def exp(x):
        # like the C library: overflow gives inf instead of raising
        return math.exp(x) if x < 709.0 else math.inf

    def acc(r, v, p):
        return alpha * v * exp(v) - nm1 * p / r

    g = alpha * s * exp(s) / n
    r = r0
    v = s + 0.5 * g * r0 * r0
    p = g * r0
    vo, po = [], []
    for r_next in np.asarray(rb, dtype=float).tolist():
        if not v < 700.0:
            vo.append(math.inf)
            po.append(math.inf)
            continue
        if r_next > r:
            nsub = math.ceil((r_next - r) / hmax)
            H = (r_next - r) / nsub
            for _ in range(nsub):
                k1v = p
                k1p = acc(r, v, p)
                k2v = p + 0.5 * H * k1p
                k2p = acc(r + 0.5 * H, v + 0.5 * H * k1v, k2v)
                k3v = p + 0.5 * H * k2p
                k3p = acc(r + 0.5 * H, v + 0.5 * H * k2v, k3v)
                k4v = p + H * k3p
                k4p = acc(r + H, v + H * k3v, k4v)
                v += H * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
                p += H * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
                r += H
                if not v < 700.0:
                    break
            r = r_next
        vo.append(v)
        po.append(p)
    return np.array(vo), np.array(po)
