#cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: one-sided truncated-normal draws and Gibbs sweeps.

Draws come from the numpy BitGenerator C API, so a chain produced here is
bit-identical to one produced by the pure-Python fallback running on the
same seeded BitGenerator (the fallback consumes the stream in the same
order, one scalar at a time).
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp, sqrt
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_exponential,
    random_standard_normal,
    random_standard_uniform,
)

import numpy as np

# Regime switch on the standardized bound beta = -mu/sigma; below this the
# plain accept-below-bound step gets slow and a translated-exponential
# proposal takes over.  Must match _gibbs_fallback.REGIME_THRESHOLD.
DEF REGIME_THRESHOLD = 0.47
# Clamp for the (measure-zero) case where mu + sigma*z rounds up to 0.0.
DEF NEG_TINY = -2.2250738585072014e-308


cdef bitgen_t *_get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef double _tn_below_zero_c(bitgen_t *rng, double mu, double sigma,
                             long *proposals) noexcept nogil:
    # Draw z ~ N(0,1) conditioned on z < beta, return mu + sigma*z < 0.
    cdef double beta = -mu / sigma
    cdef double z, alpha, rate, y, u, v
    if beta >= REGIME_THRESHOLD:
        while True:
            z = random_standard_normal(rng)
            proposals[0] += 1
            if z < beta:
                break
    else:
        alpha = -beta
        rate = 0.5 * (alpha + sqrt(alpha * alpha + 4.0))
        while True:
            y = alpha + random_standard_exponential(rng) / rate
            u = random_standard_uniform(rng)
            proposals[0] += 1
            if u <= exp(-0.5 * (y - rate) * (y - rate)):
                break
        z = -y
    v = mu + sigma * z
    if v >= 0.0:
        v = NEG_TINY
    return v


def tn_below_zero(object bit_generator, double mu, double sigma):
    """One draw from N(mu, sigma^2) truncated above at 0."""
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    cdef long proposals = 0
    return _tn_below_zero_c(rng, mu, sigma, &proposals)


def tn_below_zero_batch(object bit_generator, double mu, double sigma,
                        Py_ssize_t n):
    """n draws plus the total proposal count (for acceptance-rate checks)."""
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    cdef long proposals = 0
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = _tn_below_zero_c(rng, mu, sigma, &proposals)
    return out, proposals


def gibbs_sweeps(object bit_generator, double[:, ::1] lam, double[::1] v,
                 Py_ssize_t n_keep, Py_ssize_t burn_in, Py_ssize_t thinning):
    """Run coordinate-wise Gibbs sweeps for v ~ N(0, Sigma) | v < 0.

    lam is the precision matrix Sigma^-1.  v is the chain state, updated in
    place; the returned array holds n_keep states recorded every
    ``thinning``-th sweep after ``burn_in`` discarded sweeps.
    """
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    cdef Py_ssize_t t = v.shape[0]
    out = np.empty((n_keep, t))
    cdef double[:, ::1] o = out
    if t == 0:
        return out
    sig = np.empty(t)
    cdef double[::1] sg = sig
    w = np.empty(t)
    cdef double[::1] wv = w
    cdef Py_ssize_t i, j, k, kept, sweep_count
    cdef double s, mu, dv, newv
    cdef long proposals = 0
    with nogil:
        for j in range(t):
            sg[j] = 1.0 / sqrt(lam[j, j])
            s = 0.0
            for k in range(t):
                s += lam[j, k] * v[k]
            wv[j] = s
        # w = lam @ v is maintained incrementally; round-off from the
        # updates is a negligible random walk at our chain lengths.
        sweep_count = burn_in + n_keep * thinning
        kept = 0
        for i in range(sweep_count):
            for j in range(t):
                mu = v[j] - wv[j] / lam[j, j]
                newv = _tn_below_zero_c(rng, mu, sg[j], &proposals)
                dv = newv - v[j]
                for k in range(t):
                    wv[k] += lam[j, k] * dv
                v[j] = newv
            if i >= burn_in and (i - burn_in + 1) % thinning == 0:
                for k in range(t):
                    o[kept, k] = v[k]
                kept += 1
    return out
