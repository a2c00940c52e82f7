import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qaoabench.errors import ConfigError
from qaoabench.optimizers import (
    OPTIMIZERS,
    Budget,
    local_search,
    rng_stream,
    run_optimizer,
    shc_inner,
    shc_rr,
)


class Recorder:
    """Counts calls and keeps every evaluated point."""

    def __init__(self, f):
        self.f = f
        self.points = []

    def __call__(self, x):
        self.points.append(np.array(x, dtype=float))
        return self.f(x)


def bowl(center):
    return lambda x: -float(np.sum((np.asarray(x) - center) ** 2))


def rastrigin(x):
    x = np.asarray(x)
    return -(10 * len(x) + float(np.sum(x * x - 10 * np.cos(2 * np.pi * x))))


# ---------------------------------------------------------------- budget

def test_budget_defaults():
    b = Budget()
    assert (b.outer, b.inner, b.total_evals) == (100, 50, 5100)
    assert Budget(3, 0).total_evals == 3


@pytest.mark.parametrize("outer, inner", [(0, 5), (1, -1)])
def test_budget_validation(outer, inner):
    with pytest.raises(ConfigError):
        Budget(outer, inner)


# ---------------------------------------------------------------- shc inner loop

def test_shc_inner_with_no_steps():
    f = Recorder(bowl(1.0))
    x, v = shc_inner(f, [0.3, 0.4], 0, 0.2, np.random.default_rng(0))
    np.testing.assert_array_equal(x, [0.3, 0.4])
    assert v == f([0.3, 0.4]) and len(f.points) == 2


def test_shc_inner_climbs_one_dimensional_bowl():
    x, v = shc_inner(bowl(1.0), [0.0], 200, 0.2, np.random.default_rng(1))
    assert abs(x[0] - 1.0) < 0.05
    assert v == pytest.approx(-(x[0] - 1.0) ** 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), inner=st.integers(0, 60))
def test_shc_inner_never_worse_than_start(seed, inner):
    rng = np.random.default_rng(seed)
    start = rng.uniform(-5, 5, 3)
    f = Recorder(rastrigin)
    x, v = shc_inner(f, start, inner, 0.2, rng)
    assert v >= rastrigin(start)
    assert len(f.points) == 1 + inner
    assert v == max(rastrigin(p) for p in f.points)


def test_shc_inner_moves_one_coordinate_per_step():
    f = Recorder(rastrigin)
    shc_inner(f, [0.5, 0.5, 0.5], 30, 0.2, np.random.default_rng(2))
    kept = f.points[0]
    for p in f.points[1:]:
        diff = np.flatnonzero(p != kept)
        assert len(diff) <= 1
        assert np.all(np.abs(p - kept) <= 0.2)
        if rastrigin(p) > rastrigin(kept):
            kept = p


def test_shc_inner_rejects_bad_step():
    with pytest.raises(ConfigError):
        shc_inner(bowl(0), [0.0], 5, 0.0, np.random.default_rng(0))


# ---------------------------------------------------------------- shc-rr

def test_shc_rr_is_deterministic():
    a = shc_rr(rastrigin, 3, Budget(20, 10), rng=rng_stream(7, "x", 0))
    b = shc_rr(rastrigin, 3, Budget(20, 10), rng=rng_stream(7, "x", 0))
    assert a.trace == b.trace
    np.testing.assert_array_equal(a.best_params, b.best_params)


def test_shc_rr_finds_interior_optimum():
    res = shc_rr(bowl(np.pi), 3, Budget(100, 50), rng=np.random.default_rng(3))
    assert res.best_value > -0.01
    assert len(res.trace) == 100
    assert np.all(np.diff(res.trace) >= 0)
    assert res.best_value == res.trace[-1]
    assert res.evals == 5100


def test_shc_rr_restart_points_lie_in_box():
    f = Recorder(rastrigin)
    shc_rr(f, 4, Budget(50, 7), rng=np.random.default_rng(4))
    starts = np.array(f.points[::8])
    assert len(starts) == 50
    assert np.all((starts >= 0) & (starts < 2 * np.pi))


# ---------------------------------------------------------------- local search

@pytest.mark.parametrize("mode", ["mult", "sum"])
def test_local_search_is_deterministic(mode):
    a = local_search(rastrigin, 3, Budget(30, 10), mode, rng=rng_stream(1, "ls", 5))
    b = local_search(rastrigin, 3, Budget(30, 10), mode, rng=rng_stream(1, "ls", 5))
    assert a.trace == b.trace


def test_multiplicative_moves_are_relative():
    # with no inner steps every evaluation is one outer perturbation of the incumbent
    f = Recorder(rastrigin)
    local_search(f, 3, Budget(200, 0), "mult", rng=np.random.default_rng(5))
    best = f.points[0]
    for p in f.points[1:]:
        changed = np.flatnonzero(p != best)
        assert len(changed) <= 1
        for d in changed:
            assert abs(p[d] / best[d] - 1.0) <= 0.2 + 1e-12
        if rastrigin(p) > rastrigin(best):
            best = p


def test_additive_moves_are_bounded():
    f = Recorder(rastrigin)
    local_search(f, 2, Budget(200, 0), "sum", rng=np.random.default_rng(6))
    best = f.points[0]
    for p in f.points[1:]:
        assert np.max(np.abs(p - best)) <= 0.2
        if rastrigin(p) > rastrigin(best):
            best = p


def test_local_search_argument_checks():
    with pytest.raises(ConfigError):
        local_search(rastrigin, 2, mode="div")
    with pytest.raises(ConfigError):
        local_search(rastrigin, 2, perturb_bound=0.0)
    with pytest.raises(ConfigError):
        local_search(rastrigin, 0)
    with pytest.raises(ConfigError):
        shc_rr(rastrigin, 0)


# ---------------------------------------------------------------- shared properties

@pytest.mark.parametrize("name", OPTIMIZERS)
def test_budget_parity(name):
    f = Recorder(rastrigin)
    res = run_optimizer(name, f, 3, Budget(), np.random.default_rng(0))
    assert len(f.points) == res.evals == 100 * 51


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), name=st.sampled_from(OPTIMIZERS),
       outer=st.integers(1, 30), inner=st.integers(0, 10))
def test_traces_are_monotone_and_budget_exact(seed, name, outer, inner):
    f = Recorder(rastrigin)
    res = run_optimizer(name, f, 2, Budget(outer, inner), np.random.default_rng(seed))
    assert len(res.trace) == outer
    assert all(b >= a for a, b in zip(res.trace, res.trace[1:]))
    assert res.best_value == res.trace[-1] == pytest.approx(rastrigin(res.best_params))
    assert res.evals == len(f.points) == outer * (1 + inner)
    assert np.all(np.isfinite(res.best_params))


def test_unknown_optimizer():
    with pytest.raises(ConfigError):
        run_optimizer("annealing", rastrigin, 2)


def test_rng_streams():
    a = rng_stream(3, "cfg", 4).random(5)
    np.testing.assert_array_equal(a, rng_stream(3, "cfg", 4).random(5))
    assert not np.array_equal(a, rng_stream(3, "cfg", 5).random(5))
    assert not np.array_equal(a, rng_stream(3, "other", 4).random(5))
    assert not np.array_equal(a, rng_stream(4, "cfg", 4).random(5))


def test_restarts_beat_multiplicative_search_on_rastrigin():
    shc = [shc_rr(rastrigin, 3, rng=rng_stream(0, "rastrigin-shc", t)).best_value for t in range(30)]
    ls = [local_search(rastrigin, 3, mode="mult", rng=rng_stream(0, "rastrigin-ls", t)).best_value
          for t in range(30)]
    assert np.mean(shc) >= np.mean(ls)
    assert stats.ttest_ind(shc, ls, equal_var=False, alternative="greater").pvalue < 0.05
