"""Gibbs sampling of the comparison variables v ~ N(0, Sigma_vv) | v < 0.

The truncated multivariate normal over the negative orthant is sampled
coordinate-wise: each full conditional is a univariate normal truncated
above at 0, drawn exactly by rejection.  The precision matrix is computed
once per chain; the running product Lambda @ v is updated incrementally,
so a sweep costs O(t^2).
"""

import struct
from dataclasses import dataclass

import numpy as np

from prefbo import _backend
from prefbo.kernels import _chol_with_jitter

__all__ = ["ChainConfig", "VSampleBatch", "gibbs_chain", "hallucination",
           "save_batch", "load_batch"]

WARM_BURN_IN = 100


@dataclass(frozen=True)
class ChainConfig:
    n_samples: int
    burn_in: int = 1000
    thinning: int = 1

    def __post_init__(self):
        if self.n_samples < 1 or self.burn_in < 0 or self.thinning < 1:
            raise ValueError("bad chain configuration")


@dataclass(frozen=True)
class VSampleBatch:
    samples: np.ndarray          # n_samples x t, all entries < 0
    burn_in: int
    thinning: int
    seed: object = None

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def t(self):
        return self.samples.shape[1]

    @property
    def final_state(self):
        """Last kept state; a valid warm start for a grown dataset."""
        return self.samples[-1].copy()


def _precision(sigma_vv):
    from scipy.linalg import cho_solve
    chol, _ = _chol_with_jitter(np.asarray(sigma_vv, float))
    lam = cho_solve(chol, np.eye(len(sigma_vv)))
    return np.ascontiguousarray((lam + lam.T) / 2)


def _bitgen(rng):
    return rng.bit_generator if isinstance(rng, np.random.Generator) else rng


def gibbs_chain(sigma_vv, cfg, rng, seed=None, init=None):
    """Run the chain and keep cfg.n_samples states after burn-in/thinning.

    init defaults to one standard deviation into the feasible orthant,
    v0 = -sqrt(diag(Sigma_vv)), which is always strictly negative.
    """
    sigma_vv = np.asarray(sigma_vv, float)
    t = len(sigma_vv)
    if t == 0:
        return VSampleBatch(np.empty((cfg.n_samples, 0)), cfg.burn_in,
                            cfg.thinning, seed)
    lam = _precision(sigma_vv)
    if init is None:
        v = -np.sqrt(np.diag(sigma_vv)).copy()
    else:
        v = np.array(init, float)
        if v.shape != (t,) or (v >= 0).any():
            raise ValueError("init must be a strictly negative t-vector")
    samples = _backend.gibbs_sweeps(_bitgen(rng), lam, v, cfg.n_samples,
                                    cfg.burn_in, cfg.thinning)
    return VSampleBatch(samples, cfg.burn_in, cfg.thinning, seed)


def hallucination(sigma_vv, rng, burn_in=None, warm_start=None):
    """One draw v ~ N(0, Sigma_vv) | v < 0.

    With a warm start (final state of the previous iteration's chain,
    possibly one coordinate short after a new duel) a reduced burn-in of
    100 sweeps is used; cold starts default to 1000.
    """
    sigma_vv = np.asarray(sigma_vv, float)
    t = len(sigma_vv)
    if t == 0:
        return np.empty(0)
    init = None
    if warm_start is not None:
        init = np.asarray(warm_start, float)
        if len(init) == t - 1:
            init = np.append(init, -np.sqrt(sigma_vv[t - 1, t - 1]))
        if init.shape != (t,):
            raise ValueError("warm start length must be t or t-1")
    if burn_in is None:
        burn_in = WARM_BURN_IN if warm_start is not None else 1000
    cfg = ChainConfig(n_samples=1, burn_in=burn_in, thinning=1)
    return gibbs_chain(sigma_vv, cfg, rng, init=init).samples[0]


# --- binary persistence: (n_samples, t) as little-endian uint64, then the
# --- sample matrix row-major as little-endian float64

def save_batch(batch, path):
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", batch.n_samples, batch.t))
        fh.write(np.ascontiguousarray(batch.samples, "<f8").tobytes())


def load_batch(path, burn_in=0, thinning=1):
    with open(path, "rb") as fh:
        n, t = struct.unpack("<QQ", fh.read(16))
        samples = np.frombuffer(fh.read(8 * n * t), "<f8").reshape(n, t).copy()
    return VSampleBatch(samples, burn_in, thinning)
