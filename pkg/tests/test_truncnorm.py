import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from prefbo import truncnorm

# N(0,1) truncated above at 0 is the mirrored half-normal
HALF_NORMAL_MEAN = -np.sqrt(2 / np.pi)
HALF_NORMAL_VAR = 1 - 2 / np.pi


def quad_moments(mu, sigma):
    """Numerical-integration oracle; valid while the negative mass
    is representable."""
    norm = stats.norm(mu, sigma)
    mass = norm.cdf(0.0)
    m1 = integrate.quad(lambda x: x * norm.pdf(x), -np.inf, 0.0)[0] / mass
    m2 = integrate.quad(lambda x: x * x * norm.pdf(x), -np.inf, 0.0)[0] / mass
    return m1, m2 - m1**2


def test_half_normal_constants():
    mean, var = truncnorm.moments_below_zero(0.0, 1.0)
    assert abs(mean - HALF_NORMAL_MEAN) < 1e-12
    assert abs(var - HALF_NORMAL_VAR) < 1e-12


def test_moments_match_quadrature():
    for mu in (-3.0, -1.0, 0.0, 1.0, 3.0):
        for sigma in (0.5, 1.0, 10.0):
            mean, var = truncnorm.moments_below_zero(mu, sigma)
            q_mean, q_var = quad_moments(mu, sigma)
            assert abs(mean - q_mean) < 1e-8 * max(1, abs(q_mean))
            assert abs(var - q_var) < 1e-7 * max(1, q_var)


def test_moments_vectorized():
    mu = np.array([-1.0, 0.0, 2.0])
    mean, var = truncnorm.moments_below_zero(mu, np.ones(3))
    for k in range(3):
        m_k, v_k = truncnorm.moments_below_zero(mu[k], 1.0)
        assert mean[k] == m_k and var[k] == v_k


def test_sampler_matches_closed_moments():
    n = 20_000
    for mu, sigma in [(-3.0, 1.0), (0.0, 1.0), (1.0, 0.5), (3.0, 1.0),
                      (5.0, 0.5), (0.2, 10.0)]:
        draws = truncnorm.sample_below_zero(
            np.random.default_rng(hash((mu, sigma)) % 2**32), mu, sigma, n)
        mean, var = truncnorm.moments_below_zero(mu, sigma)
        se_mean = np.sqrt(var / n)
        assert abs(draws.mean() - mean) < 4 * se_mean
        dev2 = (draws - draws.mean())**2
        se_var = dev2.std(ddof=1) / np.sqrt(n)
        assert abs(draws.var(ddof=1) - var) < 4 * se_var


def test_samples_strictly_negative_even_deep_in_the_tail():
    for mu in (-8.0, 0.0, 8.0, 40.0):
        draws = truncnorm.sample_below_zero(
            np.random.default_rng(3), mu, 1.0, 5000)
        assert (draws < 0).all()


def test_proposals_per_draw_stay_bounded():
    # the regime switch keeps the acceptance rate >= Phi(-0.47) ~ 0.32
    rng = np.random.default_rng(11)
    for mu in (-2.0, -0.47, 0.0, 0.47, 2.0, 10.0, 100.0):
        draws, proposals = truncnorm.sample_below_zero_counted(
            rng, mu, 1.0, 20_000)
        assert len(draws) == 20_000
        assert proposals / len(draws) < 4.0


def test_scalar_and_batch_consume_the_same_stream():
    one = truncnorm.sample_below_zero(np.random.default_rng(5), 1.0, 2.0)
    batch = truncnorm.sample_below_zero(np.random.default_rng(5), 1.0, 2.0, 3)
    assert one == batch[0]


def test_accepts_bare_bit_generator():
    a = truncnorm.sample_below_zero(np.random.PCG64(9), -1.0, 1.0, 4)
    b = truncnorm.sample_below_zero(np.random.default_rng(9), -1.0, 1.0, 4)
    assert np.array_equal(a, b)


@settings(max_examples=60, deadline=None)
@given(mu=st.floats(-5, 5), sigma=st.floats(0.1, 10))
def test_moment_inequalities(mu, sigma):
    mean, var = truncnorm.moments_below_zero(mu, sigma)
    assert mean < 0
    assert mean < mu + 1e-12
    # far from the boundary the truncation correction rounds away
    assert 0 < var <= sigma**2 * (1 + 1e-12)


def test_hazard_matches_naive_ratio_where_stable():
    for beta in (-3.0, -1.0, 0.0, 1.0, 4.0):
        naive = stats.norm.pdf(beta) / stats.norm.cdf(beta)
        assert abs(truncnorm.hazard(beta) - naive) < 1e-10 * max(1, naive)


def test_hazard_stable_far_below_zero():
    # phi/Phi ~ -beta for beta -> -inf; the naive ratio is 0/0 there
    beta = -300.0
    val = truncnorm.hazard(beta)
    assert np.isfinite(val)
    assert abs(val / (-beta) - 1.0) < 1e-4
