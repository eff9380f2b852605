"""Gaussian approximations of the duel posterior: Laplace and EP.

Laplace works in the space of winner-minus-loser gaps g_i = f(w_i) - f(l_i),
whose prior covariance is the v-block minus the comparison noise; each duel
contributes a probit factor Phi(g_i / sqrt(2*noise_variance)).  The Newton
mode-finder and its marginal-likelihood value follow the standard GP
classification recipe, so the fit degrades exactly where the true skewed
posterior departs from its mode.

EP runs in v-space on the truncated Gaussian itself: one axis-aligned site
1{v_i < 0} per duel, moment-matched in closed form via univariate
truncated-normal moments.  Both expose Gaussian predictive moments for f
at arbitrary inputs.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize
from scipy.special import log_ndtr

from prefbo import truncnorm
from prefbo.duels import stack_inputs
from prefbo.kernels import KernelConfig, build_joint_covariance, kernel_matrix
from prefbo.skew import ConditionedGaussian, conditional_cov, _projection

__all__ = ["GaussianPosterior", "EpSiteState", "la_fit", "ep_fit",
           "ep_predict", "fit_gaussian_posterior", "optimize_hyperparameters",
           "la_log_marginal"]

LENGTHSCALE_BOX = (1e-2, 1e2)


@dataclass
class GaussianPosterior:
    kind: str                      # "la" | "ep"
    data: object
    cfg: KernelConfig
    log_marginal: float = None
    converged: bool = True
    _predictor: object = field(default=None, repr=False)

    def predict(self, X, full_cov=False):
        """Predictive moments of f at the rows of X."""
        return self._predictor(X, full_cov)

    def mean_argmax_training_input(self):
        """Training input (winner or loser) with the largest predictive mean."""
        X = stack_inputs([], self.data)
        mean, _ = self.predict(X)
        return X[int(np.argmax(mean))]


# ---------------------------------------------------------------------------
# Laplace

def _gap_covariance(data, cfg):
    jc = build_joint_covariance([], data, cfg)
    return jc.sigma_vv - 2 * cfg.noise_variance * np.eye(jc.t)


def _la_newton(k_g, s, max_iter=100, tol=1e-9):
    """Newton iterations for the probit-likelihood mode in gap space.

    Parameterized through a = K_g^{-1} g so K_g is never inverted; returns
    (a_hat, g_hat, sqrt_w, chol_B, psi) at the mode.
    """
    t = len(k_g)
    a = np.zeros(t)
    g = np.zeros(t)

    def psi(a_vec, g_vec):
        return -0.5 * a_vec @ g_vec + log_ndtr(g_vec / s).sum()

    obj = psi(a, g)
    sw, cl = None, None
    for _ in range(max_iter):
        z = g / s
        u = truncnorm.hazard(z)      # phi(z)/Phi(z)
        w = np.maximum(u * (u + z) / s**2, 1e-12)
        sw = np.sqrt(w)
        cl = cho_factor(np.eye(t) + sw[:, None] * k_g * sw[None, :],
                        lower=True)
        b = w * g + u / s
        a_new = b - sw * cho_solve(cl, sw * (k_g @ b))
        # backtrack toward the previous a if the full step overshoots
        step = 1.0
        while step > 1e-4:
            a_try = (1 - step) * a + step * a_new
            g_try = k_g @ a_try
            obj_try = psi(a_try, g_try)
            if obj_try >= obj - 1e-12:
                break
            step /= 2
        a, g = a_try, g_try
        if abs(obj_try - obj) < tol:
            obj = obj_try
            break
        obj = obj_try
    # refresh curvature at the accepted mode
    z = g / s
    u = truncnorm.hazard(z)
    w = np.maximum(u * (u + z) / s**2, 1e-12)
    sw = np.sqrt(w)
    cl = cho_factor(np.eye(t) + sw[:, None] * k_g * sw[None, :], lower=True)
    return a, g, sw, cl, psi(a, g)


def la_fit(data, cfg):
    """Laplace posterior: Gaussian at the mode of the duel posterior."""
    t = len(data)
    if t < 1:
        raise ValueError("Laplace fit needs at least one duel")
    s = np.sqrt(2 * cfg.noise_variance)
    k_g = _gap_covariance(data, cfg)
    a_hat, g_hat, sw, cl, obj = _la_newton(k_g, s)
    log_marginal = obj - np.log(np.diag(cl[0])).sum()
    # M = W^1/2 B^-1 W^1/2 gives cov_* = K_** - Q M Q^T
    m_mat = sw[:, None] * cho_solve(cl, np.diag(sw))
    W, L = data.winners, data.losers

    def predictor(X, full_cov):
        X = np.asarray(X, float).reshape(-1, cfg.dimension)
        q = kernel_matrix(X, W, cfg) - kernel_matrix(X, L, cfg)
        mean = q @ a_hat
        if full_cov:
            cov = kernel_matrix(X, X, cfg) - q @ m_mat @ q.T
            return mean, (cov + cov.T) / 2
        var = cfg.signal_variance - np.einsum("ij,jk,ik->i", q, m_mat, q)
        return mean, np.maximum(var, 1e-300)

    return GaussianPosterior(kind="la", data=data, cfg=cfg,
                             log_marginal=log_marginal, _predictor=predictor)


def la_log_marginal(data, cfg):
    """Laplace evidence approximation of log Pr(all duels observed)."""
    s = np.sqrt(2 * cfg.noise_variance)
    k_g = _gap_covariance(data, cfg)
    _, _, _, cl, obj = _la_newton(k_g, s)
    return obj - np.log(np.diag(cl[0])).sum()


# ---------------------------------------------------------------------------
# EP

@dataclass
class EpSiteState:
    tau: np.ndarray
    nu: np.ndarray
    converged: bool
    iterations: int
    skipped_updates: int = 0


def ep_fit(sigma_vv, damping=0.8, tol=1e-6, max_sweeps=200):
    """EP on N(0, Sigma_vv) restricted to the negative orthant.

    One truncation site per coordinate; updates are closed-form via
    truncated-normal moments, rank-1 on the running covariance, with a
    periodic full refresh to keep round-off in check.
    """
    sigma = np.asarray(sigma_vv, float)
    t = len(sigma)
    if t == 0:
        return (EpSiteState(np.empty(0), np.empty(0), True, 0),
                ConditionedGaussian(np.empty(0), np.empty((0, 0))))
    tau = np.zeros(t)
    nu = np.zeros(t)
    S = sigma.copy()
    m = np.zeros(t)
    prior_chol = cho_factor(sigma + 1e-12 * np.eye(t), lower=True)
    skipped = 0
    sweeps_used = max_sweeps
    converged = False

    def refresh():
        # S = (Sigma^-1 + diag(tau))^-1, m = S nu, from scratch
        lam = cho_solve(prior_chol, np.eye(t)) + np.diag(tau)
        cl = cho_factor((lam + lam.T) / 2, lower=True)
        s_new = cho_solve(cl, np.eye(t))
        return (s_new + s_new.T) / 2, s_new @ nu

    for sweep in range(max_sweeps):
        max_delta = 0.0
        for i in range(t):
            s_ii = S[i, i]
            tau_cav = 1.0 / s_ii - tau[i]
            nu_cav = m[i] / s_ii - nu[i]
            if tau_cav <= 0:
                skipped += 1
                continue
            cav_var = 1.0 / tau_cav
            cav_mean = nu_cav * cav_var
            tilt_mean, tilt_var = truncnorm.moments_below_zero(
                cav_mean, np.sqrt(cav_var))
            tau_new = max(1.0 / tilt_var - tau_cav, 0.0)
            nu_new = tilt_mean / tilt_var - nu_cav
            d_tau = damping * (tau_new - tau[i])
            d_nu = damping * (nu_new - nu[i])
            max_delta = max(max_delta, abs(d_tau), abs(d_nu))
            denom = 1.0 + d_tau * s_ii
            if denom <= 0:
                skipped += 1
                continue
            tau[i] += d_tau
            nu[i] += d_nu
            s_col = S[:, i].copy()
            S -= (d_tau / denom) * np.outer(s_col, s_col)
            m = S @ nu
        if (sweep + 1) % 10 == 0:
            S, m = refresh()
        if max_delta < tol:
            converged = True
            sweeps_used = sweep + 1
            break
    S, m = refresh()
    site = EpSiteState(tau, nu, converged, sweeps_used, skipped)
    return site, ConditionedGaussian(m, S)


def ep_predict(jc, site):
    """Gaussian predictive over the test points of jc under the EP fit."""
    if len(site.tau) != jc.t:
        raise ValueError("site state and covariance duel counts differ")
    if jc.t == 0:
        return ConditionedGaussian(np.zeros(jc.m), jc.sigma_tes_tes.copy())
    _, q_v = ep_fit_from_sites(jc, site)
    p = _projection(jc)
    mean = p @ q_v.mean
    cov = conditional_cov(jc) + p @ q_v.cov @ p.T
    return ConditionedGaussian(mean, (cov + cov.T) / 2)


def ep_fit_from_sites(jc, site):
    """Reconstruct q(v) = N(m, S) from site parameters and jc's v-block."""
    t = jc.t
    lam = jc.precision_vv() + np.diag(site.tau)
    cl = cho_factor((lam + lam.T) / 2, lower=True)
    S = cho_solve(cl, np.eye(t))
    S = (S + S.T) / 2
    return site, ConditionedGaussian(S @ site.nu, S)


class _EpPredictor:
    """Predicts EP moments of f at arbitrary inputs (winners/losers kernel)."""

    def __init__(self, data, cfg, jc, q_v):
        self.data = data
        self.cfg = cfg
        self.jc = jc
        self.S = q_v.cov
        self.alpha = jc.solve_vv(q_v.mean)

    def __call__(self, X, full_cov):
        X = np.asarray(X, float).reshape(-1, self.cfg.dimension)
        k_xv = kernel_matrix(X, self.data.losers, self.cfg) \
            - kernel_matrix(X, self.data.winners, self.cfg)
        mean = k_xv @ self.alpha
        r = self.jc.solve_vv(k_xv.T)          # Sigma_vv^-1 Sigma_v,x
        if full_cov:
            cov = kernel_matrix(X, X, self.cfg) - k_xv @ r + r.T @ self.S @ r
            return mean, (cov + cov.T) / 2
        var = self.cfg.signal_variance - np.einsum("ij,ji->i", k_xv, r) \
            + np.einsum("ji,jk,ki->i", r, self.S, r)
        return mean, np.maximum(var, 1e-300)

    def pair_stats(self, x1, X):
        """Joint moments of (f(x1), f(x_i)) per row of X: means, variances
        and the cross-covariance, vectorized over candidates."""
        cfg = self.cfg
        x1 = np.asarray(x1, float).reshape(1, -1)
        X = np.asarray(X, float).reshape(-1, cfg.dimension)
        k_1v = kernel_matrix(x1, self.data.losers, cfg) \
            - kernel_matrix(x1, self.data.winners, cfg)
        k_xv = kernel_matrix(X, self.data.losers, cfg) \
            - kernel_matrix(X, self.data.winners, cfg)
        r1 = self.jc.solve_vv(k_1v[0])
        rx = self.jc.solve_vv(k_xv.T)
        mean1 = float(k_1v[0] @ self.alpha)
        mean_x = k_xv @ self.alpha
        var1 = cfg.signal_variance - float(k_1v[0] @ r1) \
            + float(r1 @ self.S @ r1)
        var_x = cfg.signal_variance - np.einsum("ij,ji->i", k_xv, rx) \
            + np.einsum("ji,jk,ki->i", rx, self.S, rx)
        cross = kernel_matrix(x1, X, cfg)[0] - k_xv @ r1 \
            + rx.T @ (self.S @ r1)
        return mean1, max(var1, 0.0), mean_x, np.maximum(var_x, 0.0), cross


def fit_gaussian_posterior(data, cfg, kind):
    """Convenience: fit 'la' or 'ep' on a dataset and return the posterior."""
    if kind == "la":
        return la_fit(data, cfg)
    if kind != "ep":
        raise ValueError(f"unknown posterior kind {kind!r}")
    jc = build_joint_covariance([], data, cfg)
    site, q_v = ep_fit(jc.sigma_vv)
    predictor = _EpPredictor(data, cfg, jc, q_v)
    return GaussianPosterior(kind="ep", data=data, cfg=cfg,
                             converged=site.converged, _predictor=predictor)


# ---------------------------------------------------------------------------
# hyperparameters

def optimize_hyperparameters(data, cfg, restarts=5, maxiter=60, seed=None):
    """Maximize the Laplace evidence over log-lengthscales in a fixed box.

    Signal and noise variances stay fixed.  Derivative-free simplex search
    from the current lengthscales plus random restarts; falls back to the
    incoming config if every start fails.
    """
    if len(data) < 1:
        return cfg
    d = cfg.dimension
    lo, hi = np.log(LENGTHSCALE_BOX[0]), np.log(LENGTHSCALE_BOX[1])

    def objective(log_ls):
        clipped = np.clip(log_ls, lo, hi)
        penalty = 1e3 * np.sum((log_ls - clipped)**2)
        trial = KernelConfig(np.exp(clipped), cfg.signal_variance,
                             cfg.noise_variance)
        try:
            return -la_log_marginal(data, trial) + penalty
        except np.linalg.LinAlgError:
            return 1e12

    rng = np.random.default_rng(seed if seed is not None else len(data))
    starts = [np.clip(np.log(cfg.lengthscales), lo, hi)]
    starts += [rng.uniform(lo, hi, size=d) for _ in range(restarts - 1)]
    best_val, best_ls = np.inf, None
    for x0 in starts:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": maxiter, "xatol": 1e-3,
                                "fatol": 1e-6})
        if np.isfinite(res.fun) and res.fun < best_val:
            best_val, best_ls = res.fun, np.clip(res.x, lo, hi)
    if best_ls is None:
        return cfg
    return KernelConfig(np.exp(best_ls), cfg.signal_variance,
                        cfg.noise_variance)
