"""Acquisition functions and a derivative-free maximizer over box domains.

Two families: closed-form scores on a Gaussian predictive (EI, UCB — used
by the hallucination-conditioned GP and the LA/EP baselines), and
sample-based scores on the exact skewed posterior (Thompson paths,
quantile UCB, EI-plus-information-gain, and the EP duel-uncertainty
score).  Sample-based scores rank a fixed quasi-random candidate set;
Gaussian scores are additionally refined by a coordinate pattern search.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, xlogy
from scipy.stats import qmc

from prefbo import skew

__all__ = ["AcquisitionConfig", "ei", "ucb", "duel_ts_select",
           "duel_ucb_score", "duel_ucb_scores", "eiig_score", "eiig_scores",
           "ep_muc_score", "maximize_acquisition", "sobol_candidates"]

KINDS = ("hb_ei", "hb_ucb", "duel_ts", "duel_ucb", "eiig",
         "ep_ei", "ep_muc", "la_ei")


@dataclass(frozen=True)
class AcquisitionConfig:
    kind: str = "hb_ei"
    ucb_beta_sqrt: float = 2.0
    duel_ucb_alpha: float = 0.975
    eiig_weight: float = 1.0
    mc_samples: int = 1000
    candidate_count: int = None      # default 512*d capped at 4096
    restarts: int = 5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        if not 0 < self.duel_ucb_alpha < 1:
            raise ValueError("duel_ucb_alpha must lie in (0, 1)")
        if self.eiig_weight < 0 or self.mc_samples < 1 or self.restarts < 1:
            raise ValueError("bad acquisition configuration")

    def n_candidates(self, d):
        if self.candidate_count is not None:
            return self.candidate_count
        return min(512 * d, 4096)


def _phi(z):
    return np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)


def ei(mean, sd, incumbent):
    """Expected improvement over the incumbent; exact sd -> 0 limit."""
    mean = np.asarray(mean, float)
    sd = np.asarray(sd, float)
    gap = mean - incumbent
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, gap / np.where(sd > 0, sd, 1.0), 0.0)
        smooth = gap * ndtr(z) + sd * _phi(z)
    return np.where(sd > 0, smooth, np.maximum(gap, 0.0))


def ucb(mean, sd, beta_sqrt=2.0):
    """Optimistic bound mean + beta_sqrt * sd."""
    return np.asarray(mean, float) + beta_sqrt * np.asarray(sd, float)


def duel_ts_select(jc, v, rng):
    """Thompson choice: argmax of one posterior path over the test points."""
    if jc.m == 0:
        raise ValueError("no candidates to select from")
    return int(np.argmax(skew.sample_path_values(jc, v, rng)))


def duel_ucb_score(sp, index, alpha=0.975):
    """Upper alpha-quantile of the skewed posterior at one test point."""
    return sp.quantile(index, alpha)


def duel_ucb_scores(sp, indices, alpha=0.975):
    return skew.quantile_batch(sp.jc, sp.batch, indices, alpha)


def _binary_entropy(p):
    return -(xlogy(p, p) + xlogy(1 - p, 1 - p))


def eiig_score(sp, index, x1_index, weight=1.0):
    """Per-sample EI against the value at x1, plus duel-outcome entropy."""
    return float(eiig_scores(sp, [index], x1_index, weight)[0])


def eiig_scores(sp, indices, x1_index, weight=1.0):
    indices = np.asarray(indices, int)
    if (indices == x1_index).any():
        raise ValueError("candidate coincides with the comparison point x1")
    mu = sp.conditioned_means()                      # M x m
    cov = skew.conditional_cov(sp.jc)
    sd = np.sqrt(np.maximum(np.diag(cov)[indices], 0.0))
    ei_terms = ei(mu[:, indices], sd[None, :], mu[:, [x1_index]])
    ei_part = ei_terms.mean(axis=0)
    ig_part = np.array([
        _binary_entropy(skew.duel_probability(sp.jc, sp.batch, i, x1_index).value)
        for i in indices])
    return ei_part + weight * ig_part


def ep_muc_score(mean2, cov2, noise_variance):
    """p(1-p) for the duel (x1, x) under Gaussian joint moments of f.

    mean2/cov2 are the EP joint moments at (x1, x); the two comparison
    noises add 2*noise_variance to the gap variance, which keeps the score
    finite for coincident points.
    """
    mean2 = np.asarray(mean2, float)
    cov2 = np.asarray(cov2, float)
    return float(ep_muc_scores(mean2[0], cov2[0, 0], mean2[1:2],
                               cov2[1:2, 1:2].ravel(), cov2[0:1, 1],
                               noise_variance)[0])


def ep_muc_scores(mean1, var1, mean_x, var_x, cross, noise_variance):
    """Vectorized p(1-p) over candidates given pairwise joint moments."""
    gap_var = var1 + np.asarray(var_x, float) - 2 * np.asarray(cross, float) \
        + 2 * noise_variance
    p = ndtr((np.asarray(mean_x, float) - mean1) / np.sqrt(gap_var))
    return p * (1 - p)


def sobol_candidates(domain, n, rng):
    """n quasi-random points in the box (scrambled Sobol, rng-seeded)."""
    domain = np.asarray(domain, float)
    d = len(domain)
    sampler = qmc.Sobol(d, scramble=True, seed=rng)
    n_pow2 = 1 << max(int(np.ceil(np.log2(max(n, 1)))), 0)
    unit = sampler.random(n_pow2)[:n]
    return qmc.scale(unit, domain[:, 0], domain[:, 1])


def _pattern_search(score, x0, domain, max_sweeps=50, shrink_tol=1e-3):
    """Deterministic coordinate descent on the (batched) score function."""
    lo, hi = domain[:, 0], domain[:, 1]
    span = hi - lo
    x = x0.copy()
    best = float(score(x[None, :])[0])
    step = 0.1 * span
    for _ in range(max_sweeps):
        probes = np.concatenate([x + np.diag(step), x - np.diag(step)])
        np.clip(probes, lo, hi, out=probes)
        vals = score(probes)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            x = probes[k]
        else:
            step /= 2
            if (step < shrink_tol * span).all():
                break
    return x, best


def maximize_acquisition(score, domain, cfg, rng):
    """Best of a Sobol candidate sweep plus local pattern-search refinement.

    score maps an (n, d) matrix to n values; the result always lies in the
    box.  Deterministic given the rng state.
    """
    domain = np.asarray(domain, float)
    cands = sobol_candidates(domain, cfg.n_candidates(len(domain)), rng)
    vals = np.asarray(score(cands), float)
    order = np.argsort(-vals, kind="stable")[:cfg.restarts]
    best_x = cands[order[0]]
    best_val = vals[order[0]]
    for idx in order:
        x, val = _pattern_search(score, cands[idx], domain)
        if val > best_val:
            best_val, best_x = val, x
    return np.clip(best_x, domain[:, 0], domain[:, 1])
