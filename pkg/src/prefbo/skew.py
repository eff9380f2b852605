"""Exact posterior statistics of the latent utility from v-samples.

Conditioning the joint Gaussian (f_tes, v) on a concrete v collapses to an
ordinary GP whose covariance does not depend on v.  Every posterior
statistic is therefore a Monte-Carlo average over v-draws of a closed-form
Gaussian quantity, which has strictly less MC variance than averaging raw
sample paths (the conditional covariance term is computed exactly instead
of estimated).  The full-path estimators are kept as the baseline.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import gaussian_kde

from prefbo.kernels import kernel_matrix

__all__ = ["ConditionedGaussian", "PosteriorEstimate", "SkewPosterior",
           "condition_on_v", "conditional_cov", "posterior_mean",
           "posterior_variance", "cdf_estimate", "duel_probability",
           "quantile", "sample_path_values", "sample_paths", "full_mc_mean",
           "path_mode_estimate", "HallucinationGP"]

_DEGENERATE_VAR = 1e-300


@dataclass(frozen=True)
class ConditionedGaussian:
    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class PosteriorEstimate:
    value: object
    mc_std_error: object
    n_samples: int
    degenerate: bool = False


def _projection(jc):
    # P = Sigma_tes,v Sigma_vv^-1, cached per covariance object
    if getattr(jc, "_skew_proj", None) is None:
        if jc.t == 0:
            jc._skew_proj = np.zeros((jc.m, 0))
        else:
            jc._skew_proj = jc.solve_vv(jc.sigma_tes_v.T).T
    return jc._skew_proj


def conditional_cov(jc):
    """Sigma_tes|v, independent of v; computed once and reused."""
    if getattr(jc, "_skew_cond_cov", None) is None:
        cov = jc.sigma_tes_tes - _projection(jc) @ jc.sigma_tes_v.T
        jc._skew_cond_cov = (cov + cov.T) / 2
    return jc._skew_cond_cov


def _cond_chol(jc):
    if getattr(jc, "_skew_cond_chol", None) is None:
        cov = conditional_cov(jc)
        jitter = 1e-12
        while True:
            try:
                jc._skew_cond_chol = np.linalg.cholesky(
                    cov + jitter * np.eye(len(cov)))
                break
            except np.linalg.LinAlgError:
                jitter *= 10
                if jitter > 1e-4:
                    # duplicated test points make the conditional exactly
                    # singular; fall back to a PSD square root
                    w, q = np.linalg.eigh(cov)
                    jc._skew_cond_chol = q * np.sqrt(np.clip(w, 0, None))
                    break
    return jc._skew_cond_chol


def condition_on_v(jc, v):
    """Gaussian law of f_tes given a concrete comparison vector v."""
    v = np.asarray(v, float)
    if v.shape != (jc.t,):
        raise ValueError(f"v must have length {jc.t}")
    return ConditionedGaussian(_projection(jc) @ v, conditional_cov(jc))


def _conditioned_means(jc, batch):
    # rows: per-draw conditional means mu_tes|v (M x m)
    if batch.t != jc.t:
        raise ValueError("batch and covariance duel counts differ")
    return batch.samples @ _projection(jc).T


def posterior_mean(jc, batch):
    """E[f_tes | duels]: the projection applied to the v-sample mean."""
    if batch.n_samples == 0:
        raise ValueError("empty sample batch")
    mu = _conditioned_means(jc, batch)
    m = batch.n_samples
    se = mu.std(axis=0, ddof=1) / np.sqrt(m) if m > 1 else np.full(jc.m, np.inf)
    return PosteriorEstimate(mu.mean(axis=0), se, m)


def posterior_variance(jc, batch, return_cov=False):
    """V[f_tes | duels] = variance of the conditional means + Sigma_tes|v."""
    if batch.n_samples < 2:
        raise ValueError("variance estimation needs at least 2 samples")
    mu = _conditioned_means(jc, batch)
    m = batch.n_samples
    centered = mu - mu.mean(axis=0)
    var_term = (centered**2).sum(axis=0) / (m - 1)
    value = var_term + np.diag(conditional_cov(jc))
    # standard error of a sample variance: sqrt((m4 - s^4) / M)
    m4 = (centered**4).mean(axis=0)
    se = np.sqrt(np.maximum(m4 - var_term**2, 0) / m)
    if return_cov:
        cov = centered.T @ centered / (m - 1) + conditional_cov(jc)
        return PosteriorEstimate(value, se, m), cov
    return PosteriorEstimate(value, se, m)


def cdf_estimate(jc, batch, i, c):
    """Pr(f(x_i) <= c | duels) as a mixture of conditional Gaussian CDFs."""
    mu = _conditioned_means(jc, batch)[:, i]
    var = conditional_cov(jc)[i, i]
    m = batch.n_samples
    if var <= _DEGENERATE_VAR:
        terms = (mu <= c).astype(float)
        degenerate = True
    else:
        terms = ndtr((c - mu) / np.sqrt(var))
        degenerate = False
    se = terms.std(ddof=1) / np.sqrt(m) if m > 1 else np.inf
    return PosteriorEstimate(float(terms.mean()), se, m, degenerate)


def duel_probability(jc, batch, i, j):
    """Pr(f(x_i) <= f(x_j) | duels); complements are exact by construction."""
    if i == j:
        raise ValueError("duel probability needs two distinct test points")
    # evaluate on the canonically ordered pair so that (i,j) and (j,i)
    # share the identical MC average and sum to 1 exactly
    a, b = (i, j) if i < j else (j, i)
    mu = _conditioned_means(jc, batch)
    cov = conditional_cov(jc)
    gap_var = cov[a, a] + cov[b, b] - 2 * cov[a, b]
    m = batch.n_samples
    if gap_var <= _DEGENERATE_VAR:
        return PosteriorEstimate(0.5, 0.0, m, True)
    terms = ndtr((mu[:, b] - mu[:, a]) / np.sqrt(gap_var))
    p = float(terms.mean())
    se = terms.std(ddof=1) / np.sqrt(m) if m > 1 else np.inf
    return PosteriorEstimate(p if (a, b) == (i, j) else 1.0 - p, se, m)


def quantile(jc, batch, i, alpha, tol=1e-3, max_steps=100):
    """gamma with |Pr(f(x_i) <= gamma) - alpha| <= tol, by bisection.

    The bracket spans the per-draw Gaussian alpha-quantiles, which always
    contains the mixture quantile when the conditional variance is
    positive; a degenerate variance triggers geometric expansion.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    mu = _conditioned_means(jc, batch)[:, i]
    sd = np.sqrt(max(conditional_cov(jc)[i, i], 0.0))
    z = ndtri(alpha)
    lo = float(mu.min() + z * sd)
    hi = float(mu.max() + z * sd)
    if hi - lo < tol:
        hi += tol
        lo -= tol

    def cdf(c):
        return cdf_estimate(jc, batch, i, c).value

    width = hi - lo
    for _ in range(60):
        if cdf(lo) <= alpha <= cdf(hi):
            break
        lo -= width
        hi += width
        width *= 2
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        val = cdf(mid)
        if abs(val - alpha) <= tol:
            return mid
        if val < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def quantile_batch(jc, batch, indices, alpha, tol=1e-3, max_steps=100):
    """quantile() for many test-point indices at once (shared bisection)."""
    indices = np.asarray(indices, int)
    mu = _conditioned_means(jc, batch)[:, indices]
    sd = np.sqrt(np.maximum(np.diag(conditional_cov(jc))[indices], 0.0))
    z = ndtri(alpha)
    lo = mu.min(axis=0) + z * sd
    hi = mu.max(axis=0) + z * sd
    tight = hi - lo < tol
    lo[tight] -= tol
    hi[tight] += tol

    def cdf(gamma):
        safe_sd = np.where(sd > 0, sd, 1.0)
        terms = ndtr((gamma[None, :] - mu) / safe_sd[None, :])
        step = (mu <= gamma[None, :]).astype(float)
        return np.where(sd > 0, terms.mean(axis=0), step.mean(axis=0))

    width = hi - lo
    for _ in range(60):
        bad = ~((cdf(lo) <= alpha) & (alpha <= cdf(hi)))
        if not bad.any():
            break
        lo[bad] -= width[bad]
        hi[bad] += width[bad]
        width[bad] *= 2
    out = 0.5 * (lo + hi)
    done = np.zeros(len(indices), bool)
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        val = cdf(mid)
        newly = (np.abs(val - alpha) <= tol) & ~done
        out[newly] = mid[newly]
        done |= newly
        if done.all():
            break
        move_lo = (val < alpha) & ~done
        lo[move_lo] = mid[move_lo]
        hi[~move_lo & ~done] = mid[~move_lo & ~done]
        out[~done] = mid[~done]
    return out


def sample_path_values(jc, v, rng):
    """One exact joint draw of f_tes given v (stage two of path sampling)."""
    cg = condition_on_v(jc, v)
    return cg.mean + _cond_chol(jc) @ rng.standard_normal(jc.m)


def sample_paths(jc, batch, rng):
    """One f_tes draw per v-row of the batch: exact skew-posterior paths."""
    mu = _conditioned_means(jc, batch)
    z = rng.standard_normal((batch.n_samples, jc.m))
    return mu + z @ _cond_chol(jc).T


def full_mc_mean(jc, batch, rng):
    """Baseline mean estimator: average raw sample paths (no conditioning)."""
    paths = sample_paths(jc, batch, rng)
    m = batch.n_samples
    se = paths.std(axis=0, ddof=1) / np.sqrt(m) if m > 1 else np.full(jc.m, np.inf)
    return PosteriorEstimate(paths.mean(axis=0), se, m)


def path_mode_estimate(values, grid_size=512):
    """Mode of a 1-d sample cloud via a Gaussian KDE on a spanning grid."""
    values = np.asarray(values, float)
    if values.std() == 0:
        return float(values[0])
    kde = gaussian_kde(values)
    grid = np.linspace(values.min(), values.max(), grid_size)
    return float(grid[np.argmax(kde(grid))])


@dataclass(frozen=True)
class SkewPosterior:
    """A covariance structure and a shared v-sample batch.

    All statistics reuse the one batch, so quantities like duel
    probabilities for (i,j) and (j,i) are exactly consistent.
    """

    jc: object
    batch: object

    def mean(self):
        return posterior_mean(self.jc, self.batch)

    def variance(self):
        return posterior_variance(self.jc, self.batch)

    def cdf(self, i, c):
        return cdf_estimate(self.jc, self.batch, i, c)

    def duel_probability(self, i, j):
        return duel_probability(self.jc, self.batch, i, j)

    def quantile(self, i, alpha, tol=1e-3):
        return quantile(self.jc, self.batch, i, alpha, tol)

    def conditioned_means(self):
        return _conditioned_means(self.jc, self.batch)


class HallucinationGP:
    """Ordinary GP over f obtained by conditioning on one drawn v.

    Predicts at arbitrary inputs, which is what acquisition maximization
    over the continuous domain needs.
    """

    def __init__(self, data, cfg, jc, v):
        if jc.t != len(data):
            raise ValueError("covariance and dataset sizes differ")
        self.data = data
        self.cfg = cfg
        self.jc = jc
        self.v = np.asarray(v, float)
        self.alpha = jc.solve_vv(self.v) if jc.t else np.empty(0)

    def predict(self, X):
        """Mean and (diagonal) variance of f at the rows of X."""
        X = np.asarray(X, float).reshape(-1, self.cfg.dimension)
        if self.jc.t == 0:
            return np.zeros(len(X)), np.full(len(X), self.cfg.signal_variance)
        k_xv = kernel_matrix(X, self.data.losers, self.cfg) \
            - kernel_matrix(X, self.data.winners, self.cfg)
        mean = k_xv @ self.alpha
        var = self.cfg.signal_variance \
            - np.einsum("ij,ji->i", k_xv, self.jc.solve_vv(k_xv.T))
        return mean, np.maximum(var, 0.0)
