"""Throughput comparison: compiled Gibbs kernels vs the pure-Python fallback.

Both backends are loaded directly (ignoring PREFBO_PURE_PYTHON) so one
process can time them on identical inputs and verify they walk the same
chain.  Usage:

    python3 benchmarks/bench_backends.py [--sweeps 2000] [--tn-draws 200000]
"""

import argparse
import time

import numpy as np

import prefbo
from prefbo import _gibbs_fallback, kernels
from prefbo.benchmarks import get_benchmark, oracle_duel
from prefbo.duels import Duel, DuelDataset

try:
    from prefbo import _gibbs_core
except ImportError:
    _gibbs_core = None


def _duel_precision(t, rng):
    """Lambda = Sigma_vv^-1 for t oracle-judged duels on ackley d=4."""
    fn = get_benchmark("ackley", 4)
    data = DuelDataset(fn.dimension)
    for _ in range(t):
        a = rng.uniform(fn.domain[:, 0], fn.domain[:, 1])
        b = rng.uniform(fn.domain[:, 0], fn.domain[:, 1])
        data = data.append(Duel(a, b) if oracle_duel(fn, a, b, 0.0, rng) == "a"
                           else Duel(b, a))
    cfg = kernels.KernelConfig(0.2 * (fn.domain[:, 1] - fn.domain[:, 0]))
    sigma = kernels.build_joint_covariance([], data, cfg).sigma_vv
    lam = np.linalg.inv(sigma)
    return np.ascontiguousarray((lam + lam.T) / 2), -np.sqrt(np.diag(sigma))


def _time(fun, *args, repeats=3):
    best, out = np.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fun(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--tn-draws", type=int, default=200_000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 50, 100])
    args = ap.parse_args()

    if _gibbs_core is None:
        print("compiled core not built; timing the fallback only")
    backends = [("python", _gibbs_fallback)]
    if _gibbs_core is not None:
        backends.insert(0, ("compiled", _gibbs_core))

    print(f"\ntruncated-normal batch, {args.tn_draws} draws (mu=0.3, sigma=1)")
    rows = {}
    for name, impl in backends:
        sec, (draws, n_prop) = _time(
            impl.tn_below_zero_batch, np.random.PCG64(0), 0.3, 1.0,
            args.tn_draws)
        rows[name] = (sec, draws)
        print(f"  {name:8s} {sec * 1e3:8.1f} ms   "
              f"{args.tn_draws / sec / 1e6:6.2f} Mdraws/s   "
              f"({n_prop / args.tn_draws:.2f} proposals/draw)")
    if len(rows) == 2:
        assert np.array_equal(rows["compiled"][1], rows["python"][1])
        print(f"  speedup {rows['python'][0] / rows['compiled'][0]:.1f}x, "
              "identical draws")

    for t in args.sizes:
        lam, v0 = _duel_precision(t, np.random.default_rng(1))
        print(f"\ngibbs sweeps, t={t}, {args.sweeps} kept (burn-in 100)")
        rows = {}
        for name, impl in backends:
            sec, kept = _time(impl.gibbs_sweeps, np.random.PCG64(9), lam,
                              v0.copy(), args.sweeps, 100, 1)
            rows[name] = (sec, kept)
            print(f"  {name:8s} {sec * 1e3:8.1f} ms   "
                  f"{(args.sweeps + 100) / sec:8.0f} sweeps/s")
        if len(rows) == 2:
            assert np.array_equal(rows["compiled"][1], rows["python"][1])
            print(f"  speedup {rows['python'][0] / rows['compiled'][0]:.1f}x, "
                  "identical chain")

    print(f"\nactive backend for normal imports: {prefbo.active_backend()}")


if __name__ == "__main__":
    main()
