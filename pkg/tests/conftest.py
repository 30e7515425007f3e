import numpy as np
import pytest

from pubchoice.binary import BinaryGame
from pubchoice.experiments import build_parametric_game
from pubchoice.model import GameSpec


def mcr_costs(rng, n, k, noncompetitive=False):
    """Costs ``exp(h_i + d_j + e_i f_j)`` with ``e`` falling in i and ``f`` rising in j.

    Low/high cost ratios then rise strictly with the venue index (MCR), and
    each row is non-decreasing. ``noncompetitive`` pins column 1 to 1.
    """
    e = np.sort(rng.uniform(0.0, 1.5, n))[::-1]
    f = np.cumsum(rng.uniform(0.2, 1.0, k))
    d = np.cumsum(rng.uniform(0.0, 0.5, k))
    h = rng.uniform(-0.5, 0.5, n)
    if noncompetitive:
        f, d, h = f - f[0], d - d[0], np.zeros(n)
    return np.exp(h[:, None] + d[None, :] + e[:, None] * f[None, :])


def random_spec(rng, n=None, k=None, mcr=True, noncompetitive=False, budget=None):
    n = n or int(rng.integers(2, 6))
    k = k or int(rng.integers(2, 5))
    thetas = np.cumsum(rng.uniform(0.5, 5.0, n))
    masses = rng.uniform(0.05, 1.0, n)
    if mcr:
        costs = mcr_costs(rng, n, k, noncompetitive)
    else:
        costs = rng.uniform(0.5, 5.0, (n, k))
    return GameSpec(
        thetas, masses, costs,
        alpha=rng.uniform(0.1, 0.6), beta=rng.uniform(1.2, 3.0),
        budget=budget if budget is not None else rng.uniform(0.5, 50.0),
    )


def random_binary(rng, k=None, alpha=None):
    """Binary game satisfying MCR with a non-competitive first venue."""
    k = k or int(rng.integers(2, 5))
    costs = mcr_costs(rng, 2, k, noncompetitive=True)
    return BinaryGame(
        theta=rng.uniform(1.5, 30.0),
        mu_tilde=rng.uniform(0.1, 3.0),
        cost_low=costs[0],
        cost_high=costs[1],
        alpha=rng.uniform(0.1, 0.6) if alpha is None else alpha,
        beta=rng.uniform(1.2, 3.0),
        budget=rng.uniform(0.5, 50.0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def five_type_game():
    return build_parametric_game(0.6)


@pytest.fixture(scope="session")
def counterexample_spec():
    return GameSpec([1.0, 20.0], [2 / 3, 1 / 3], [[1.0, 40.0], [1.0, 15.0]], alpha=0.2, beta=2.0, budget=40.0)


# acceptance criterion number -> list of (ok, detail) parts, printed after the run
ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        details = "; ".join(f"{d} [{'ok' if ok else 'FAILED'}]" for ok, d in parts)
        terminalreporter.write_line(f"criterion {n}: {verdict} - {details}")
