"""Preferential Bayesian optimization from pairwise duels.

Exact skew-GP posterior over latent utilities via Gibbs sampling, reduced-
variance Monte Carlo estimators, and a hallucination-believer optimization
loop, with Laplace/EP baselines, an experiment harness, and a live duel
session service.
"""

from prefbo._backend import active_backend

__all__ = ["active_backend"]
__version__ = "0.1.0"
