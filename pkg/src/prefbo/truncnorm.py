"""Univariate normal truncated above at zero: sampling and exact moments.

The sampler switches between plain rejection and a translated-exponential
proposal depending on the standardized bound, so it stays O(1) proposals
per draw even deep in the tail.  Moments use the scaled complementary
error function to avoid cancellation for large negative means.
"""

import numpy as np
from scipy import special

from prefbo import _backend

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
_SQRT2 = np.sqrt(2.0)


def _bitgen(rng):
    if isinstance(rng, np.random.Generator):
        return rng.bit_generator
    return rng


def hazard(beta):
    """phi(beta) / Phi(beta), stable for beta far below zero."""
    return _SQRT_2_OVER_PI / special.erfcx(-np.asarray(beta, float) / _SQRT2)


def moments_below_zero(mu, sigma):
    """Mean and variance of N(mu, sigma^2) conditioned on being negative."""
    mu = np.asarray(mu, float)
    sigma = np.asarray(sigma, float)
    beta = -mu / sigma
    lam = hazard(beta)
    mean = mu - sigma * lam
    var = sigma**2 * (1.0 - beta * lam - lam**2)
    return mean, var


def sample_below_zero(rng, mu, sigma, size=None):
    """Draw from N(mu, sigma^2) conditioned on being negative.

    rng may be a numpy Generator or BitGenerator.  Returns a scalar when
    size is None, else a 1-d array of length size.
    """
    bg = _bitgen(rng)
    if size is None:
        return _backend.tn_below_zero(bg, float(mu), float(sigma))
    out, _ = _backend.tn_below_zero_batch(bg, float(mu), float(sigma), int(size))
    return out


def sample_below_zero_counted(rng, mu, sigma, size):
    """Like sample_below_zero but also returns the proposal count."""
    return _backend.tn_below_zero_batch(_bitgen(rng), float(mu), float(sigma),
                                        int(size))
