import numpy as np
import pytest

from conftest import toy_dataset
from prefbo import kernels
from prefbo.kernels import (JITTER_MAX, JointCovariance, KernelConfig,
                            _chol_with_jitter, build_joint_covariance,
                            dense_joint_covariance, kernel, kernel_matrix)


def test_kernel_hand_values():
    cfg = KernelConfig(np.array([1.0, 1.0]))
    assert abs(kernel(np.zeros(2), np.zeros(2), cfg) - 1.0) < 1e-15
    assert abs(kernel(np.zeros(2), np.ones(2), cfg) - np.exp(-1.0)) < 1e-15
    ard = KernelConfig(np.array([1.0, 2.0]), signal_variance=3.0)
    expect = 3.0 * np.exp(-0.5 * (1.0 + 0.25))
    assert abs(kernel(np.zeros(2), np.ones(2), ard) - expect) < 1e-14


def test_kernel_matrix_agrees_with_scalar():
    rng = np.random.default_rng(0)
    cfg = KernelConfig(np.array([0.5, 2.0]), signal_variance=1.7)
    X = rng.standard_normal((4, 2))
    Y = rng.standard_normal((3, 2))
    K = kernel_matrix(X, Y, cfg)
    for i in range(4):
        for j in range(3):
            assert abs(K[i, j] - kernel(X[i], Y[j], cfg)) < 1e-12
    Kxx = kernel_matrix(X, X, cfg)
    assert np.allclose(Kxx, Kxx.T)
    assert np.allclose(np.diag(Kxx), cfg.signal_variance)


def test_config_validation():
    with pytest.raises(ValueError):
        KernelConfig(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        KernelConfig(np.array([1.0]), signal_variance=-1.0)
    with pytest.raises(ValueError):
        KernelConfig(np.array([1.0]), noise_variance=0.0)
    cfg = KernelConfig(0.5)                  # scalar promotes to 1-d
    assert cfg.dimension == 1


def test_blocks_match_dense_reference():
    rng = np.random.default_rng(1)
    cfg = KernelConfig(np.array([0.3, 0.8]), noise_variance=1e-3)
    data = toy_dataset(5, 2, rng)
    tes = rng.random((4, 2))
    jc = build_joint_covariance(tes, data, cfg)
    dense = dense_joint_covariance(tes, data, cfg)
    assert np.abs(jc.sigma - dense).max() < 1e-12
    assert jc.m == 4 and jc.t == 5


def test_v_block_diagonal_identity():
    rng = np.random.default_rng(2)
    cfg = KernelConfig(np.array([0.4]), signal_variance=2.0,
                       noise_variance=1e-2)
    data = toy_dataset(6, 1, rng)
    jc = build_joint_covariance([], data, cfg)
    for i, duel in enumerate(data.duels):
        expect = (2 * cfg.signal_variance
                  - 2 * kernel(duel.winner, duel.loser, cfg)
                  + 2 * cfg.noise_variance)
        assert abs(jc.sigma_vv[i, i] - expect) < 1e-12


def test_empty_dataset_blocks():
    cfg = KernelConfig(np.array([1.0]))
    jc = build_joint_covariance(np.array([[0.5]]), toy_dataset(0, 1,
                                np.random.default_rng(0)), cfg)
    assert jc.sigma_vv.shape == (0, 0)
    assert jc.sigma_tes_v.shape == (1, 0)
    assert np.array_equal(jc.solve_vv(np.empty(0)), np.empty(0))


def test_solve_and_precision_against_numpy():
    rng = np.random.default_rng(3)
    cfg = KernelConfig(np.array([0.6, 0.6]))
    data = toy_dataset(5, 2, rng)
    jc = build_joint_covariance([], data, cfg)
    b = rng.standard_normal(5)
    direct = np.linalg.solve(jc.sigma_vv + jc.jitter * np.eye(5), b)
    assert np.allclose(jc.solve_vv(b), direct, atol=1e-8)
    lam = jc.precision_vv()
    assert np.allclose(lam, lam.T)
    assert lam.flags["C_CONTIGUOUS"]
    assert np.allclose(lam @ (jc.sigma_vv + jc.jitter * np.eye(5)),
                       np.eye(5), atol=1e-6)


def test_jitter_escalates_only_as_needed():
    rng = np.random.default_rng(4)
    cfg = KernelConfig(np.array([0.5]))
    jc = build_joint_covariance([], toy_dataset(4, 1, rng), cfg)
    jc.chol_vv()
    assert jc.jitter == kernels.JITTER_INIT

    # exactly singular but PSD: jitter must rescue the factorization
    _, used = _chol_with_jitter(np.ones((3, 3)))
    assert kernels.JITTER_INIT <= used <= JITTER_MAX

    # indefinite beyond the jitter budget: give up loudly
    with pytest.raises(np.linalg.LinAlgError):
        _chol_with_jitter(-np.eye(3))


def test_repeated_duel_still_factorizable():
    # identical duels leave sigma_vv positive-definite thanks to the
    # comparison-noise diagonal
    d = toy_dataset(1, 2, np.random.default_rng(5)).duels[0]
    from prefbo.duels import DuelDataset
    data = DuelDataset(2, (d, d, d))
    jc = build_joint_covariance([], data, KernelConfig(np.ones(2)))
    jc.chol_vv()
    assert jc.jitter <= JITTER_MAX


def test_dimension_mismatch_raises():
    data = toy_dataset(2, 2, np.random.default_rng(6))
    with pytest.raises(ValueError):
        build_joint_covariance([], data, KernelConfig(np.ones(3)))


def test_joint_covariance_is_psd():
    rng = np.random.default_rng(7)
    cfg = KernelConfig(np.array([0.7, 1.3]), noise_variance=1e-4)
    jc = build_joint_covariance(rng.random((3, 2)), toy_dataset(4, 2, rng),
                                cfg)
    eigs = np.linalg.eigvalsh(jc.sigma)
    assert eigs.min() > -1e-9
