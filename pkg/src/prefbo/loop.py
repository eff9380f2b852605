"""Sequential duel-based optimization: the hallucination-believer loop
and the Gaussian / sample-based baselines.

Each iteration pits a comparison point x1 against an acquisition argmax
x2, asks the oracle which is better, and appends the outcome.  The
hallucination methods draw one v-sample, condition the GP on it, and
maximize a classic acquisition on the resulting ordinary GP; baselines
substitute their own posterior and x1 policy.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from prefbo import acquisition as acq
from prefbo import approx, gibbs, skew
from prefbo.duels import Duel, DuelDataset
from prefbo.kernels import KernelConfig, build_joint_covariance

__all__ = ["MethodSpec", "BOState", "method_spec", "hb_step",
           "baseline_step", "bo_step", "run_bo", "METHOD_NAMES"]

REFIT_PERIOD = 10
INIT_LENGTHSCALE_FRAC = 0.2

# name -> (x1 policy, inference backend)
_METHODS = {
    "hb_ei": ("winner_so_far", "skew_mc"),
    "hb_ucb": ("winner_so_far", "skew_mc"),
    "duel_ts": ("winner_so_far", "skew_mc"),
    "duel_ucb": ("winner_so_far", "skew_mc"),
    "eiig": ("winner_so_far", "skew_mc"),
    "ep_ei": ("posterior_mean_argmax", "ep"),
    "ep_muc": ("posterior_mean_argmax", "ep"),
    "la_ei": ("posterior_mean_argmax", "la"),
}
METHOD_NAMES = tuple(_METHODS)


@dataclass(frozen=True)
class MethodSpec:
    name: str
    x1_policy: str
    backend: str
    acquisition: acq.AcquisitionConfig

    def __post_init__(self):
        if self.name not in _METHODS:
            raise ValueError(f"unknown method {self.name!r}")
        policy, backend = _METHODS[self.name]
        if (self.x1_policy, self.backend) != (policy, backend):
            raise ValueError(
                f"{self.name} requires x1_policy={policy!r}, backend={backend!r}")
        if self.acquisition.kind != self.name:
            raise ValueError("acquisition kind must match the method name")


def method_spec(name, **acq_overrides):
    """Canonical MethodSpec for a method name, with acquisition overrides."""
    if name not in _METHODS:
        raise ValueError(
            f"unknown method {name!r}; known: {', '.join(_METHODS)}")
    policy, backend = _METHODS[name]
    cfg = acq.AcquisitionConfig(kind=name, **acq_overrides)
    return MethodSpec(name, policy, backend, cfg)


@dataclass
class BOState:
    data: DuelDataset
    current_winner: np.ndarray
    kernel: KernelConfig
    domain: np.ndarray
    rng: np.random.Generator
    iteration: int = 0
    hb_burn_in: int = 1000
    use_warm_start: bool = False
    warm_state: np.ndarray = field(default=None, repr=False)


def _finish_duel(state, x1, x2, oracle, warm_state=None):
    label = oracle(x1, x2)
    winner, loser = (x1, x2) if label == "a" else (x2, x1)
    state.data = state.data.append(Duel(winner, loser))
    state.current_winner = winner
    state.iteration += 1
    state.warm_state = warm_state
    return state


def hb_step(state, af, oracle, acq_cfg=None):
    """One hallucination-believer iteration with af in {'ei', 'ucb'}."""
    if len(state.data) < 1:
        raise ValueError("the loop needs at least one duel to start")
    if acq_cfg is None:
        acq_cfg = acq.AcquisitionConfig(kind=f"hb_{af}")
    x1 = state.current_winner
    jc0 = build_joint_covariance([], state.data, state.kernel)
    warm = state.warm_state if state.use_warm_start else None
    burn_in = None if warm is not None else state.hb_burn_in
    v = gibbs.hallucination(jc0.sigma_vv, state.rng, burn_in=burn_in,
                            warm_start=warm)
    gp = skew.HallucinationGP(state.data, state.kernel, jc0, v)
    if af == "ei":
        incumbent = float(gp.predict(x1[None, :])[0][0])

        def score(X):
            mean, var = gp.predict(X)
            return acq.ei(mean, np.sqrt(var), incumbent)
    elif af == "ucb":
        beta = acq_cfg.ucb_beta_sqrt

        def score(X):
            mean, var = gp.predict(X)
            return acq.ucb(mean, np.sqrt(var), beta)
    else:
        raise ValueError(f"unsupported acquisition {af!r} for the HB loop")
    x2 = acq.maximize_acquisition(score, state.domain, acq_cfg, state.rng)
    return _finish_duel(state, x1, x2, oracle, warm_state=v)


def _skew_mc_step(state, spec, oracle):
    cfg = state.kernel
    a_cfg = spec.acquisition
    x1 = state.current_winner
    cands = acq.sobol_candidates(state.domain, a_cfg.n_candidates(
        len(state.domain)), state.rng)
    if spec.name == "duel_ts":
        jc = build_joint_covariance(cands, state.data, cfg)
        warm = state.warm_state if state.use_warm_start else None
        burn_in = None if warm is not None else state.hb_burn_in
        v = gibbs.hallucination(jc.sigma_vv, state.rng, burn_in=burn_in,
                                warm_start=warm)
        x2 = cands[acq.duel_ts_select(jc, v, state.rng)]
        return _finish_duel(state, x1, x2, oracle, warm_state=v)
    if spec.name == "duel_ucb":
        jc = build_joint_covariance(cands, state.data, cfg)
        chain = gibbs.ChainConfig(a_cfg.mc_samples, burn_in=state.hb_burn_in)
        batch = gibbs.gibbs_chain(jc.sigma_vv, chain, state.rng)
        sp = skew.SkewPosterior(jc, batch)
        scores = acq.duel_ucb_scores(sp, np.arange(len(cands)),
                                     a_cfg.duel_ucb_alpha)
        x2 = cands[int(np.argmax(scores))]
        return _finish_duel(state, x1, x2, oracle,
                            warm_state=batch.final_state)
    if spec.name == "eiig":
        tes = np.vstack([x1[None, :], cands])
        jc = build_joint_covariance(tes, state.data, cfg)
        chain = gibbs.ChainConfig(a_cfg.mc_samples, burn_in=state.hb_burn_in)
        batch = gibbs.gibbs_chain(jc.sigma_vv, chain, state.rng)
        sp = skew.SkewPosterior(jc, batch)
        scores = acq.eiig_scores(sp, np.arange(1, len(tes)), 0,
                                 a_cfg.eiig_weight)
        x2 = cands[int(np.argmax(scores))]
        return _finish_duel(state, x1, x2, oracle,
                            warm_state=batch.final_state)
    raise ValueError(f"unknown sample-based method {spec.name!r}")


def baseline_step(state, spec, oracle):
    """One iteration of a non-HB baseline per its method spec."""
    if len(state.data) < 1:
        raise ValueError("the loop needs at least one duel to start")
    if spec.backend == "skew_mc":
        return _skew_mc_step(state, spec, oracle)
    post = approx.fit_gaussian_posterior(state.data, state.kernel,
                                         spec.backend)
    x1 = post.mean_argmax_training_input()
    a_cfg = spec.acquisition
    if spec.name in ("ep_ei", "la_ei"):
        incumbent = float(post.predict(x1[None, :])[0][0])

        def score(X):
            mean, var = post.predict(X)
            return acq.ei(mean, np.sqrt(var), incumbent)
    elif spec.name == "ep_muc":
        predictor = post._predictor

        def score(X):
            m1, v1, mx, vx, cross = predictor.pair_stats(x1, X)
            return acq.ep_muc_scores(m1, v1, mx, vx, cross,
                                     state.kernel.noise_variance)
    else:
        raise ValueError(f"unknown Gaussian-backend method {spec.name!r}")
    x2 = acq.maximize_acquisition(score, state.domain, a_cfg, state.rng)
    return _finish_duel(state, x1, x2, oracle)


def bo_step(state, spec, oracle):
    if spec.name in ("hb_ei", "hb_ucb"):
        return hb_step(state, spec.name.split("_")[1], oracle,
                       spec.acquisition)
    return baseline_step(state, spec, oracle)


class _TimedOracle:
    """Wraps the judging callable so its time can be excluded from costs."""

    def __init__(self, fn):
        self.fn = fn
        self.spent = 0.0

    def __call__(self, x_a, x_b):
        t0 = time.perf_counter()
        out = self.fn(x_a, x_b)
        self.spent += time.perf_counter() - t0
        return out


def initial_lengthscales(domain, frac=INIT_LENGTHSCALE_FRAC):
    domain = np.asarray(domain, float)
    return frac * (domain[:, 1] - domain[:, 0])


def run_bo(fn, spec, n_iterations, seed, noise_sd=0.0,
           noise_variance=1e-4, refit_period=REFIT_PERIOD, hb_burn_in=1000,
           use_warm_start=False, n_init=None, record=None):
    """Full trial: random initial duels, then n_iterations method steps.

    Returns a list of per-duel rows (phase, iteration, recommendation,
    regret, cumulative method seconds).  Oracle time is excluded from the
    clock.  Identical (fn, spec, seed, settings) reproduce the identical
    duel sequence.
    """
    from prefbo.benchmarks import oracle_duel, regret

    rng = np.random.default_rng(seed)
    oracle = _TimedOracle(
        lambda a, b: oracle_duel(fn, a, b, noise_sd, rng))
    domain = np.asarray(fn.domain, float)
    d = fn.dimension
    if n_init is None:
        n_init = 3 * d
    t0 = time.perf_counter()

    def elapsed():
        return time.perf_counter() - t0 - oracle.spent

    history = []
    data = DuelDataset(d)
    for i in range(n_init):
        x_a = rng.uniform(domain[:, 0], domain[:, 1])
        x_b = rng.uniform(domain[:, 0], domain[:, 1])
        label = oracle(x_a, x_b)
        duel = Duel(x_a, x_b) if label == "a" else Duel(x_b, x_a)
        data = data.append(duel)
        history.append({"phase": "init", "iteration": len(data),
                        "recommendation": duel.winner,
                        "regret": regret(fn, duel.winner),
                        "elapsed_seconds": elapsed()})
    cfg = KernelConfig(initial_lengthscales(domain),
                       noise_variance=noise_variance)
    state = BOState(data=data, current_winner=data.duels[-1].winner,
                    kernel=cfg, domain=domain, rng=rng,
                    hb_burn_in=hb_burn_in, use_warm_start=use_warm_start)
    for _ in range(n_iterations):
        if len(state.data) % refit_period == 0:
            state.kernel = approx.optimize_hyperparameters(state.data,
                                                           state.kernel)
        try:
            state = bo_step(state, spec, oracle)
        except np.linalg.LinAlgError:
            # one retry; transient factorization failures resolve with the
            # jittered path on the rebuilt covariance
            state = bo_step(state, spec, oracle)
        row = {"phase": "bo", "iteration": len(state.data),
               "recommendation": state.current_winner,
               "regret": regret(fn, state.current_winner),
               "elapsed_seconds": elapsed()}
        history.append(row)
        if record is not None:
            record(row)
    return history
