"""ARD-RBF kernel and the joint prior covariance over (f_tes, v).

With X the stacked design (m test points, t winners, t losers), the joint
covariance of (f at test points, comparison variables v) is

    Sigma = A (K + B) A^T,   A = [[I_m, 0, 0], [0, -I_t, I_t]],
    B = blockdiag(0, noise_variance * I_2t),

but A is never materialized: each block has a closed form in kernel
evaluations.  The v-block picks up 2*noise_variance on its diagonal from
the two comparison noises.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from prefbo.duels import stack_inputs

__all__ = ["KernelConfig", "JointCovariance", "kernel", "kernel_matrix",
           "build_joint_covariance"]

JITTER_INIT = 1e-10
JITTER_MAX = 1e-6


@dataclass(frozen=True)
class KernelConfig:
    lengthscales: np.ndarray
    signal_variance: float = 1.0
    noise_variance: float = 1e-4

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, float))
        if (ls <= 0).any() or not np.isfinite(ls).all():
            raise ValueError("lengthscales must be positive and finite")
        if self.signal_variance <= 0 or self.noise_variance <= 0:
            raise ValueError("variances must be positive")
        object.__setattr__(self, "lengthscales", ls)

    @property
    def dimension(self):
        return len(self.lengthscales)


def kernel(x, y, cfg):
    """signal_variance * exp(-0.5 * sum(((x-y)/ls)^2))."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.shape != y.shape or x.shape != (cfg.dimension,):
        raise ValueError("kernel inputs must match the config dimension")
    z = (x - y) / cfg.lengthscales
    return cfg.signal_variance * float(np.exp(-0.5 * z @ z))


def kernel_matrix(X, Y, cfg):
    """Cross-covariance matrix K[i, j] = kernel(X[i], Y[j])."""
    X = np.asarray(X, float).reshape(-1, cfg.dimension)
    Y = np.asarray(Y, float).reshape(-1, cfg.dimension)
    sq = cdist(X / cfg.lengthscales, Y / cfg.lengthscales, "sqeuclidean")
    return cfg.signal_variance * np.exp(-0.5 * sq)


def _chol_with_jitter(mat):
    jitter = JITTER_INIT
    eye = np.eye(len(mat))
    while True:
        try:
            return cho_factor(mat + jitter * eye, lower=True), jitter
        except np.linalg.LinAlgError:
            jitter *= 2
            if jitter > JITTER_MAX:
                raise


@dataclass
class JointCovariance:
    """Blocks of Sigma plus a cached jittered Cholesky of the v-block."""

    sigma_tes_tes: np.ndarray
    sigma_tes_v: np.ndarray
    sigma_vv: np.ndarray
    m: int
    t: int
    cfg: KernelConfig
    _chol: tuple = field(default=None, repr=False)
    _jitter: float = field(default=None, repr=False)
    _precision: np.ndarray = field(default=None, repr=False)

    @property
    def sigma(self):
        return np.block([[self.sigma_tes_tes, self.sigma_tes_v],
                         [self.sigma_tes_v.T, self.sigma_vv]])

    def chol_vv(self):
        if self._chol is None:
            self._chol, self._jitter = _chol_with_jitter(self.sigma_vv)
        return self._chol

    @property
    def jitter(self):
        self.chol_vv()
        return self._jitter

    def solve_vv(self, b):
        """Sigma_vv^{-1} b via the cached Cholesky."""
        if self.t == 0:
            return np.zeros_like(np.asarray(b, float))
        return cho_solve(self.chol_vv(), np.asarray(b, float))

    def precision_vv(self):
        """Lambda = Sigma_vv^{-1}, symmetrized, C-contiguous (Gibbs input)."""
        if self._precision is None:
            lam = self.solve_vv(np.eye(self.t))
            self._precision = np.ascontiguousarray((lam + lam.T) / 2)
        return self._precision


def build_joint_covariance(tes, data, cfg):
    """Assemble the blocks of Sigma = A(K+B)A^T for test points and duels."""
    if data.dimension != cfg.dimension:
        raise ValueError("dataset and kernel dimensions differ")
    tes = np.asarray(tes, float).reshape(-1, data.dimension) if len(tes) \
        else np.empty((0, data.dimension))
    m, t = len(tes), len(data)
    W, L = data.winners, data.losers
    k_tt = kernel_matrix(tes, tes, cfg)
    if t:
        k_ww = kernel_matrix(W, W, cfg)
        k_ll = kernel_matrix(L, L, cfg)
        k_wl = kernel_matrix(W, L, cfg)
        sigma_vv = k_ll - k_wl.T - k_wl + k_ww \
            + 2 * cfg.noise_variance * np.eye(t)
        sigma_tes_v = kernel_matrix(tes, L, cfg) - kernel_matrix(tes, W, cfg)
    else:
        sigma_vv = np.empty((0, 0))
        sigma_tes_v = np.empty((m, 0))
    return JointCovariance(sigma_tes_tes=k_tt, sigma_tes_v=sigma_tes_v,
                           sigma_vv=sigma_vv, m=m, t=t, cfg=cfg)


# Kept for completeness of the design-matrix view; tests compare the block
# construction above against the dense product over stack_inputs rows.
def dense_joint_covariance(tes, data, cfg):
    """Reference construction that materializes A, K and B (O((m+2t)^2))."""
    X = stack_inputs(tes, data)
    m, t = (len(tes) if len(tes) else 0), len(data)
    K = kernel_matrix(X, X, cfg) if len(X) else np.empty((0, 0))
    B = np.zeros((m + 2 * t, m + 2 * t))
    if t:
        B[m:, m:] = cfg.noise_variance * np.eye(2 * t)
    A = np.zeros((m + t, m + 2 * t))
    A[:m, :m] = np.eye(m)
    if t:
        A[m:, m:m + t] = -np.eye(t)
        A[m:, m + t:] = np.eye(t)
    return A @ (K + B) @ A.T
