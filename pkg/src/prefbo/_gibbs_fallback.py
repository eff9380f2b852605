"""Pure-Python fallback for the compiled Gibbs kernels.

Consumes the BitGenerator stream one scalar at a time in exactly the same
order as the compiled extension, and sticks to libm scalar math plus
elementwise numpy updates, so chains are bit-identical across backends.
"""

import math

import numpy as np

REGIME_THRESHOLD = 0.47
_NEG_TINY = -2.2250738585072014e-308


def _tn_scalar(gen, mu, sigma, counter):
    beta = -mu / sigma
    if beta >= REGIME_THRESHOLD:
        while True:
            z = gen.standard_normal()
            counter[0] += 1
            if z < beta:
                break
    else:
        alpha = -beta
        rate = 0.5 * (alpha + math.sqrt(alpha * alpha + 4.0))
        while True:
            y = alpha + gen.standard_exponential() / rate
            u = gen.random()
            counter[0] += 1
            if u <= math.exp(-0.5 * (y - rate) * (y - rate)):
                break
        z = -y
    v = mu + sigma * z
    if v >= 0.0:
        v = _NEG_TINY
    return v


def tn_below_zero(bit_generator, mu, sigma):
    """One draw from N(mu, sigma^2) truncated above at 0."""
    gen = np.random.Generator(bit_generator)
    return _tn_scalar(gen, mu, sigma, [0])


def tn_below_zero_batch(bit_generator, mu, sigma, n):
    """n draws plus the total proposal count (for acceptance-rate checks)."""
    gen = np.random.Generator(bit_generator)
    counter = [0]
    out = np.empty(n)
    for i in range(n):
        out[i] = _tn_scalar(gen, mu, sigma, counter)
    return out, counter[0]


def gibbs_sweeps(bit_generator, lam, v, n_keep, burn_in, thinning):
    """Coordinate-wise Gibbs sweeps for v ~ N(0, Sigma) | v < 0.

    Mirrors the compiled kernel: v is updated in place and w = lam @ v is
    maintained incrementally with elementwise updates.
    """
    gen = np.random.Generator(bit_generator)
    t = v.shape[0]
    out = np.empty((n_keep, t))
    if t == 0:
        return out
    sig = np.empty(t)
    w = np.empty(t)
    for j in range(t):
        sig[j] = 1.0 / math.sqrt(lam[j, j])
        s = 0.0
        for k in range(t):
            s += lam[j, k] * v[k]
        w[j] = s
    counter = [0]
    kept = 0
    for i in range(burn_in + n_keep * thinning):
        for j in range(t):
            mu = v[j] - w[j] / lam[j, j]
            newv = _tn_scalar(gen, mu, sig[j], counter)
            w += lam[j] * (newv - v[j])
            v[j] = newv
        if i >= burn_in and (i - burn_in + 1) % thinning == 0:
            out[kept] = v
            kept += 1
    return out
