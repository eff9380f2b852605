"""Benchmark objectives in maximization form, plus the simulated duel judge.

Each function is the negated standard minimization test function on its
usual domain, so the whole codebase maximizes.  ``optimum_value`` is the
max of f: analytic where the literature gives one, otherwise determined
by a dense multistart polish and frozen here.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["BenchmarkFunction", "BENCHMARK_IDS", "get_benchmark", "evaluate",
           "oracle_duel", "regret"]


@dataclass(frozen=True)
class BenchmarkFunction:
    id: str
    dimension: int
    domain: np.ndarray          # (d, 2) closed box
    optimum_value: float        # max of f over the domain
    optimizer: np.ndarray       # an argmax (for reference / tests)
    _raw: callable = field(repr=False)  # standard minimization form

    def __call__(self, x):
        return evaluate(self, x)


def _check_x(fn, x):
    x = np.asarray(x, float)
    if x.shape != (fn.dimension,):
        raise ValueError(
            f"{fn.id} expects a vector of length {fn.dimension}, got shape {x.shape}")
    lo, hi = fn.domain[:, 0], fn.domain[:, 1]
    if (x < lo - 1e-12).any() or (x > hi + 1e-12).any():
        raise ValueError(f"point outside the {fn.id} domain")
    return x


def evaluate(fn, x):
    """f(x), the negated standard form (larger is better)."""
    return -float(fn._raw(_check_x(fn, x)))


def regret(fn, x):
    """optimum_value - f(x); non-negative up to numerical noise."""
    return fn.optimum_value - evaluate(fn, x)


def oracle_duel(fn, x_a, x_b, noise_sd, rng):
    """Simulated judge: 'a' iff f(x_a)+eps_a > f(x_b)+eps_b, ties to 'a'."""
    fa = evaluate(fn, x_a)
    fb = evaluate(fn, x_b)
    if noise_sd > 0:
        eps = rng.normal(scale=noise_sd, size=2)
        fa += eps[0]
        fb += eps[1]
    return "a" if fa >= fb else "b"


# ---------------------------------------------------------------------------
# standard minimization forms

def _branin(x):
    b = 5.1 / (4 * np.pi**2)
    c = 5 / np.pi
    t = 1 / (8 * np.pi)
    return ((x[1] - b * x[0]**2 + c * x[0] - 6.0)**2
            + 10.0 * (1 - t) * np.cos(x[0]) + 10.0)


def _holder_table(x):
    return -abs(np.sin(x[0]) * np.cos(x[1])
                * np.exp(abs(1 - np.hypot(x[0], x[1]) / np.pi)))


def _bukin(x):
    return 100.0 * np.sqrt(abs(x[1] - 0.01 * x[0]**2)) + 0.01 * abs(x[0] + 10.0)


def _eggholder(x):
    return (-(x[1] + 47) * np.sin(np.sqrt(abs(x[1] + x[0] / 2 + 47)))
            - x[0] * np.sin(np.sqrt(abs(x[0] - (x[1] + 47)))))


def _ackley(x):
    d = len(x)
    return (-20.0 * np.exp(-0.2 * np.sqrt(np.sum(x**2) / d))
            - np.exp(np.sum(np.cos(2 * np.pi * x)) / d) + 20.0 + np.e)


_HART_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HART3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
_HART3_P = 1e-4 * np.array([[3689, 1170, 2673], [4699, 4387, 7470],
                            [1091, 8732, 5547], [381, 5743, 8828]])
_HART6_A = np.array([[10, 3, 17, 3.5, 1.7, 8], [0.05, 10, 17, 0.1, 8, 14],
                     [3, 3.5, 1.7, 10, 17, 8], [17, 8, 0.05, 10, 0.1, 14]])
_HART6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                            [2329, 4135, 8307, 3736, 1004, 9991],
                            [2348, 1451, 3522, 2883, 3047, 6650],
                            [4047, 8828, 8732, 5743, 1091, 381]])


def _hartmann3(x):
    return -np.sum(_HART_ALPHA * np.exp(-np.sum(_HART3_A * (x - _HART3_P)**2, axis=1)))


def _hartmann4(x):
    e = np.exp(-np.sum(_HART6_A[:, :4] * (x - _HART6_P[:, :4])**2, axis=1))
    return (1.1 - np.sum(_HART_ALPHA * e)) / 0.839


def _hartmann6(x):
    return -np.sum(_HART_ALPHA * np.exp(-np.sum(_HART6_A * (x - _HART6_P)**2, axis=1)))


def _cross_in_tray(x):
    return -1e-4 * (abs(np.sin(x[0]) * np.sin(x[1])
                        * np.exp(abs(100 - np.hypot(x[0], x[1]) / np.pi))) + 1)**0.1


_LANGER_C = np.array([1.0, 2.0, 5.0, 2.0, 3.0])
_LANGER_A = np.array([[3.0, 5.0], [5.0, 2.0], [2.0, 1.0], [1.0, 4.0], [7.0, 9.0]])


def _langerman(x):
    inner = np.sum((x - _LANGER_A)**2, axis=1)
    return np.sum(_LANGER_C * np.exp(-inner / np.pi) * np.cos(np.pi * inner))


def _levy13(x):
    return (np.sin(3 * np.pi * x[0])**2
            + (x[0] - 1)**2 * (1 + np.sin(3 * np.pi * x[1])**2)
            + (x[1] - 1)**2 * (1 + np.sin(2 * np.pi * x[1])**2))


def _levy(x):
    w = 1 + (x - 1) / 4
    return (np.sin(np.pi * w[0])**2
            + np.sum((w[:-1] - 1)**2 * (1 + 10 * np.sin(np.pi * w[:-1] + 1)**2))
            + (w[-1] - 1)**2 * (1 + np.sin(2 * np.pi * w[-1])**2))


def _box(lo, hi, d):
    return np.tile([float(lo), float(hi)], (d, 1))


# (raw form, domain, optimum of the negated form, argmax, scalable?)
_REGISTRY = {
    "branin": (_branin, np.array([[-5.0, 10.0], [0.0, 15.0]]),
               -5 / (4 * np.pi), np.array([np.pi, 2.275]), None),
    "holder_table": (_holder_table, _box(-10, 10, 2),
                     19.208502567886736,
                     np.array([8.0550234791, -9.6645900353]), None),
    "bukin": (_bukin, np.array([[-15.0, -5.0], [-3.0, 3.0]]),
              0.0, np.array([-10.0, 1.0]), None),
    "eggholder": (_eggholder, _box(-512, 512, 2),
                  959.6406627208497, np.array([512.0, 404.231804059]), None),
    "ackley": (_ackley, None, 0.0, None, 4),
    "hartmann3": (_hartmann3, _box(0, 1, 3), 3.862779787332662,
                  np.array([0.1145888964, 0.555648892, 0.8525469852]), None),
    "hartmann4": (_hartmann4, _box(0, 1, 4), 3.1344941412223988,
                  np.array([0.187395270061, 0.194151525952,
                            0.557917777569, 0.264779620906]), None),
    "hartmann6": (_hartmann6, _box(0, 1, 6), 3.3223680114150795,
                  np.array([0.2016895158, 0.1500108265, 0.4768739467,
                            0.275332511, 0.3116516398, 0.6573005356]), None),
    "cross_in_tray": (_cross_in_tray, _box(-10, 10, 2),
                      2.0626118708227366,
                      np.array([-1.3494064937, -1.3494065557]), None),
    "langerman": (_langerman, _box(0, 10, 2), 4.155809291847786,
                  np.array([2.793402209736, 1.597232502685]), None),
    "levy13": (_levy13, _box(-10, 10, 2), 0.0, np.array([1.0, 1.0]), None),
    "levy": (_levy, None, 0.0, None, 4),
}

BENCHMARK_IDS = tuple(_REGISTRY)

_SCALABLE_DOMAIN = {"ackley": (-32.768, 32.768), "levy": (-10.0, 10.0)}


def get_benchmark(name, dimension=None):
    """Look up a benchmark by id; scalable ids (ackley, levy) accept a dimension."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown benchmark {name!r}; known: {', '.join(BENCHMARK_IDS)}")
    raw, domain, opt, argmax, default_d = _REGISTRY[name]
    if default_d is not None:
        d = int(dimension) if dimension is not None else default_d
        if d < 1:
            raise ValueError("dimension must be positive")
        lo, hi = _SCALABLE_DOMAIN[name]
        domain = _box(lo, hi, d)
        argmax = np.zeros(d) if name == "ackley" else np.ones(d)
    else:
        d = len(domain)
        if dimension is not None and int(dimension) != d:
            raise ValueError(f"{name} is fixed at dimension {d}")
    return BenchmarkFunction(id=name, dimension=d, domain=domain,
                             optimum_value=opt, optimizer=argmax, _raw=raw)
