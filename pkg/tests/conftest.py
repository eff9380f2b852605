"""Shared fixtures and independent sampling oracles for the test suite."""

import numpy as np
import pytest

from prefbo.benchmarks import oracle_duel
from prefbo.duels import Duel, DuelDataset

# acceptance tests register (name, passed, detail) tuples here so the
# summary prints one line per criterion at the end of the run
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


# ---------------------------------------------------------------------------
# oracles: brute-force references the implementation is checked against

def rejection_orthant(sigma, n_keep, rng, batch=50_000, max_proposals=2e7):
    """Exact negative-orthant draws of N(0, sigma) by plain rejection."""
    sigma = np.asarray(sigma, float)
    t = len(sigma)
    chol = np.linalg.cholesky(sigma + 1e-12 * np.eye(t))
    kept, total, proposed = [], 0, 0
    while total < n_keep:
        proposed += batch
        if proposed > max_proposals:
            raise RuntimeError("rejection oracle exceeded its proposal budget")
        z = rng.standard_normal((batch, t)) @ chol.T
        z = z[(z < 0).all(axis=1)]
        if len(z):
            kept.append(z)
            total += len(z)
    return np.concatenate(kept)[:n_keep]


def batch_means_se(chain_column, n_batches=50):
    """Autocorrelation-robust standard error of a chain average."""
    x = np.asarray(chain_column, float)
    usable = (len(x) // n_batches) * n_batches
    means = x[:usable].reshape(n_batches, -1).mean(axis=1)
    return means.std(ddof=1) / np.sqrt(n_batches)


def toy_dataset(t, d, rng, scale=1.0):
    """Random duels in [0, scale]^d; winner/loser assignment is arbitrary."""
    data = DuelDataset(d)
    for _ in range(t):
        data = data.append(Duel(scale * rng.random(d), scale * rng.random(d)))
    return data


def judged_dataset(fn, t, rng, noise_sd=0.0):
    """Random duels on a benchmark, winners decided by the simulated judge."""
    lo, hi = fn.domain[:, 0], fn.domain[:, 1]
    data = DuelDataset(fn.dimension)
    for _ in range(t):
        x_a, x_b = rng.uniform(lo, hi), rng.uniform(lo, hi)
        label = oracle_duel(fn, x_a, x_b, noise_sd, rng)
        data = data.append(Duel(x_a, x_b) if label == "a"
                           else Duel(x_b, x_a))
    return data


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
