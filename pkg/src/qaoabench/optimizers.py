"""Derivative-free maximisers: SHC-RR, multiplicative LS and additive LS*.

Each works on a plain ``evaluate(theta) -> float`` callable and spends
exactly ``outer * (1 + inner)`` evaluations: every outer iteration
evaluates one starting point and then takes ``inner`` single-coordinate
greedy steps from it.
"""

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi
STEP_SCALE = 0.2
PERTURB_BOUND = 0.2


@dataclass(frozen=True)
class Budget:
    outer: int = 100
    inner: int = 50

    def __post_init__(self):
        if self.outer < 1 or self.inner < 0:
            raise ConfigError(f"budget needs outer >= 1 and inner >= 0, got {self.outer}x{self.inner}")

    @property
    def total_evals(self):
        return self.outer * (1 + self.inner)


@dataclass
class OptRun:
    best_params: np.ndarray
    best_value: float
    trace: list
    evals: int


def stream_key(name):
    """Stable integer for a config id or experiment name (str or int)."""
    if isinstance(name, str):
        return zlib.crc32(name.encode("utf-8"))
    return int(name)


def rng_stream(seed, experiment, trial):
    """Generator for trial ``trial`` of ``experiment`` under master ``seed``.

    The stream is keyed by (experiment, trial), not by execution order, so
    trials can run in any order or in parallel and still draw the same
    numbers.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(stream_key(experiment), int(trial)))
    return np.random.default_rng(ss)


class _Counter:
    def __init__(self, evaluate):
        self.evaluate = evaluate
        self.count = 0

    def __call__(self, theta):
        self.count += 1
        return float(self.evaluate(theta))


def shc_inner(evaluate, start, inner, step_scale, rng):
    """Greedy one-coordinate hill climb from ``start``.

    Costs ``1 + inner`` evaluations.  A step is kept only if it is strictly
    better, so the returned point is also the best one seen.
    """
    if step_scale <= 0:
        raise ConfigError("step_scale must be positive")
    current = np.array(start, dtype=np.float64)
    value = evaluate(current)
    for _ in range(inner):
        d = rng.integers(current.shape[0])
        old = current[d]
        current[d] = old + rng.uniform(-step_scale, step_scale)
        trial = evaluate(current)
        if trial > value:
            value = trial
        else:
            current[d] = old
    return current, value


def shc_rr(evaluate, dim, budget=Budget(), step_scale=STEP_SCALE, rng=None):
    """Stochastic hill climbing with random restarts over [0, 2pi)^dim."""
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    f = _Counter(evaluate)
    best_x, best_v = None, -np.inf
    trace = []
    for _ in range(budget.outer):
        start = rng.uniform(0.0, TWO_PI, dim)
        x, v = shc_inner(f, start, budget.inner, step_scale, rng)
        if v > best_v:
            best_x, best_v = x, v
        trace.append(best_v)
    return OptRun(best_x, best_v, trace, f.count)


def local_search(evaluate, dim, budget=Budget(), mode="mult", perturb_bound=PERTURB_BOUND,
                 step_scale=STEP_SCALE, rng=None):
    """Perturb one coordinate of the incumbent, then hill-climb from there.

    ``mode="mult"`` (LS) sets theta_d <- theta_d * (1 + delta); ``mode="sum"``
    (LS*) sets theta_d <- theta_d + delta, with delta ~ U(-bound, bound).
    After a failed iteration the next perturbation starts again from the
    global best.
    """
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    if mode not in ("mult", "sum"):
        raise ConfigError(f"mode must be 'mult' or 'sum', got {mode!r}")
    if perturb_bound <= 0:
        raise ConfigError("perturb_bound must be positive")
    rng = np.random.default_rng() if rng is None else rng
    f = _Counter(evaluate)
    current = rng.uniform(0.0, TWO_PI, dim)
    best_x, best_v = current.copy(), -np.inf
    trace = []
    for _ in range(budget.outer):
        candidate = current.copy()
        d = rng.integers(dim)
        delta = rng.uniform(-perturb_bound, perturb_bound)
        if mode == "mult":
            candidate[d] *= 1.0 + delta
        else:
            candidate[d] += delta
        x, v = shc_inner(f, candidate, budget.inner, step_scale, rng)
        if v > best_v:
            best_x, best_v = x, v
        current = best_x.copy()
        trace.append(best_v)
    return OptRun(best_x, best_v, trace, f.count)


OPTIMIZERS = ("shc_rr", "ls_mult", "ls_sum")


def run_optimizer(name, evaluate, dim, budget=Budget(), rng=None):
    """Dispatch by name: shc_rr, ls_mult (LS) or ls_sum (LS*)."""
    if name == "shc_rr":
        return shc_rr(evaluate, dim, budget, rng=rng)
    if name == "ls_mult":
        return local_search(evaluate, dim, budget, "mult", rng=rng)
    if name == "ls_sum":
        return local_search(evaluate, dim, budget, "sum", rng=rng)
    raise ConfigError(f"unknown optimizer {name!r}; expected one of {', '.join(OPTIMIZERS)}")
