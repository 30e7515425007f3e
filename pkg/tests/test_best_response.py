import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pubchoice.best_response import (
    best_response,
    best_response_all,
    kkt_spread,
    oracle_best_response,
    utility,
)
from pubchoice.errors import OracleConvergenceError
from pubchoice.model import GameSpec

from conftest import random_spec


def test_single_venue_spends_whole_budget():
    assert best_response([3.0], [2.0], 0.3, 2.0, 1.0).actions == pytest.approx([0.5])


def test_symmetric_venues_split_evenly():
    assert best_response([1, 1], [1, 1], 0.5, 2.0).actions == pytest.approx([0.5, 0.5])


def test_actions_proportional_to_impact_power():
    # with alpha = 0.5 and beta = 2, actions scale with v**4
    row = best_response([1, 2], [1, 1], 0.5, 2.0)
    assert row.actions == pytest.approx([1 / 17, 16 / 17], rel=1e-12)
    assert oracle_best_response([1, 2], [1, 1], 0.5, 2.0, resolution=1e-4) == pytest.approx(
        [1 / 17, 16 / 17], abs=1e-4
    )


def test_first_order_condition_and_multiplier(rng):
    for _ in range(20):
        k = int(rng.integers(2, 6))
        v, c = rng.uniform(0.5, 5, k), np.sort(rng.uniform(0.5, 5, k))
        alpha, beta, budget = rng.uniform(0.1, 0.9), rng.uniform(1.1, 3), rng.uniform(0.5, 40)
        row = best_response(v, c, alpha, beta, budget)
        assert row.actions @ c == pytest.approx(budget, rel=1e-12)
        marginal = alpha * row.actions ** (alpha - 1) * v ** beta
        assert marginal == pytest.approx(row.multiplier * c, rel=1e-9)


@pytest.mark.parametrize("v, c", [([1, 0], [1, 1]), ([1, -1], [1, 1]), ([1, 1], [0, 1]), ([1, 1], [1, -2])])
def test_non_positive_inputs_rejected(v, c):
    with pytest.raises(ValueError):
        best_response(v, c, 0.5, 2.0)


def test_best_response_all_rows(rng):
    single = GameSpec([2.0], [1.0], [[1.0, 3.0]], alpha=0.3, beta=1.5, budget=2.0)
    v = np.array([1.5, 4.0])
    assert best_response_all(v, single)[0] == pytest.approx(best_response(v, [1, 3], 0.3, 1.5, 2.0).actions)
    twins = GameSpec([1.0, 2.0], [1.0, 1.0], [[1.0, 3.0], [1.0, 3.0]])
    a = best_response_all(v, twins)
    assert a[0] == pytest.approx(a[1], rel=0, abs=0)
    with pytest.raises(ValueError):
        best_response_all([1.0], twins)


def test_utility_examples():
    assert utility([1, 1], [1, 1], 0.3, 2.5) == pytest.approx(2 ** (1 / 2.5))
    assert utility([0, 0, 0], [1, 2, 3], 0.3, 2.0) == 0.0
    assert utility([4, 1], [1, 2], 0.5, 2.0) == pytest.approx(np.sqrt(6))
    with pytest.raises(ValueError):
        utility([-1, 1], [1, 1], 0.5, 2.0)


def test_utility_strictly_increasing(rng):
    a, v = rng.uniform(0.1, 2, 4), rng.uniform(0.5, 3, 4)
    base = utility(a, v, 0.4, 2.0)
    for j in range(4):
        bumped = a.copy()
        bumped[j] += 1e-3
        assert utility(bumped, v, 0.4, 2.0) > base


def test_oracle_single_venue():
    assert oracle_best_response([2.0], [4.0], 0.3, 2.0, 8.0, mode="grid") == pytest.approx([2.0])
    assert oracle_best_response([2.0], [4.0], 0.3, 2.0, 8.0, mode="ascent") == pytest.approx([2.0])


def test_oracle_matches_closed_form_three_venues():
    rng = np.random.default_rng(7)
    for _ in range(100):
        v, c = rng.uniform(0.5, 5, 3), np.sort(rng.uniform(0.5, 5, 3))
        alpha, beta, budget = rng.uniform(0.1, 0.9), rng.uniform(1.1, 3), rng.uniform(0.5, 2)
        closed = best_response(v, c, alpha, beta, budget).actions
        assert np.abs(oracle_best_response(v, c, alpha, beta, budget) - closed).max() <= 1e-4
        assert np.abs(oracle_best_response(v, c, alpha, beta, budget, mode="ascent", resolution=1e-12)
                      - closed).max() <= 1e-6


def test_oracle_ascent_handles_many_venues(rng):
    v, c = rng.uniform(0.5, 5, 8), np.sort(rng.uniform(0.5, 5, 8))
    closed = best_response(v, c, 0.3, 2.0, 3.0).actions
    got = oracle_best_response(v, c, 0.3, 2.0, 3.0, mode="ascent", resolution=1e-12)
    assert got == pytest.approx(closed, abs=1e-9)
    with pytest.raises(ValueError):
        oracle_best_response(v, c, 0.3, 2.0, 3.0, mode="grid")
    with pytest.raises(ValueError):
        oracle_best_response(v, c, 0.3, 2.0, 3.0, mode="simplex")


def test_oracle_ascent_iteration_cap():
    with pytest.raises(OracleConvergenceError):
        oracle_best_response([1, 5, 2], [1, 2, 3], 0.3, 2.0, 1.0, mode="ascent", resolution=1e-14, max_iter=1)


def test_kkt_spread_is_zero_at_optimum(rng):
    for _ in range(50):
        v, c = rng.uniform(0.5, 5, 4), np.sort(rng.uniform(0.5, 5, 4))
        a = best_response(v, c, 0.25, 2.0, 1.0).actions
        assert kkt_spread(a, v, c, 0.25, 2.0) <= 1e-8
    assert kkt_spread([0.5, 0.5], [1, 2], [1, 1], 0.5, 2.0) > 0.1


def test_constant_action_ratio_identity(rng):
    for _ in range(50):
        spec = random_spec(rng, mcr=False)
        v = rng.uniform(0.5, 10, spec.n_venues)
        a = best_response_all(v, spec)
        c, e = spec.costs, 1.0 / (spec.alpha - 1.0)
        for i, ip in [(0, spec.n_types - 1)]:
            for j, l in [(0, spec.n_venues - 1)]:
                lhs = (a[ip, j] / a[i, j]) / (a[ip, l] / a[i, l])
                rhs = (c[ip, j] / c[i, j]) ** e / (c[ip, l] / c[i, l]) ** e
                assert lhs == pytest.approx(rhs, rel=1e-8)


def test_top_venue_actions_increase_with_type(rng):
    # monotone cost ratio plus a non-competitive first venue, arbitrary impacts
    for _ in range(100):
        spec = random_spec(rng, mcr=True, noncompetitive=True)
        v = rng.uniform(0.1, 50, spec.n_venues)
        top = best_response_all(v, spec)[:, -1]
        assert np.all(np.diff(top) > 0)


def test_impact_scale_invariance(rng):
    for _ in range(50):
        k = int(rng.integers(1, 6))
        v, c = rng.uniform(0.5, 5, k), rng.uniform(0.5, 5, k)
        m = rng.uniform(0.01, 100)
        a = best_response(v, c, 0.35, 2.2, 3.0).actions
        assert best_response(m * v, c, 0.35, 2.2, 3.0).actions == pytest.approx(a, rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(
    v=st.lists(st.floats(0.01, 100), min_size=1, max_size=6),
    alpha=st.floats(0.05, 0.95),
    beta=st.floats(1.01, 4.0),
    budget=st.floats(0.01, 100),
    data=st.data(),
)
def test_budget_binds_property(v, alpha, beta, budget, data):
    c = data.draw(st.lists(st.floats(0.01, 100), min_size=len(v), max_size=len(v)))
    a = best_response(v, c, alpha, beta, budget).actions
    assert np.all(a > 0)
    assert a @ np.asarray(c) == pytest.approx(budget, rel=1e-9)
