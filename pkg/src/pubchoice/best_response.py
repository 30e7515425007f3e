"""Researcher best responses: the closed form and an independent numerical oracle."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ._backend import kernels
from .errors import OracleConvergenceError
from .model import GameSpec


@dataclass(frozen=True)
class BestResponseRow:
    """Optimal publication counts for one type and the budget multiplier."""

    actions: np.ndarray
    multiplier: float


def _check_positive(impacts, cost_row):
    v = np.asarray(impacts, dtype=float)
    c = np.asarray(cost_row, dtype=float)
    if v.shape != c.shape or v.ndim != 1:
        raise ValueError(f"impacts {v.shape} and cost row {c.shape} must be equal-length vectors")
    if np.any(v <= 0):
        raise ValueError("venue impacts must be strictly positive")
    if np.any(c <= 0):
        raise ValueError("publication costs must be strictly positive")
    return v, c


def best_response(impacts, cost_row, alpha: float, beta: float, budget: float = 1.0) -> BestResponseRow:
    """Utility-maximizing allocation of one type's budget across venues.

    Publications at venue ``j`` are proportional to
    ``c_j**(1/(alpha-1)) * v_j**(beta/(1-alpha))`` and the budget binds.
    """
    v, c = _check_positive(impacts, cost_row)
    w = v ** (beta / (1.0 - alpha))
    num = c ** (1.0 / (alpha - 1.0)) * w
    s = float((c * num).sum())
    actions = budget * num / s
    # first-order condition: alpha * a^(alpha-1) * v^beta = lambda * c
    multiplier = alpha * (s / budget) ** (1.0 - alpha)
    return BestResponseRow(actions=actions, multiplier=multiplier)


def best_response_all(impacts, spec: GameSpec) -> np.ndarray:
    """Stack best responses of every type into an (n, k) action profile."""
    v = np.asarray(impacts, dtype=float)
    if v.shape != (spec.n_venues,):
        raise ValueError(f"expected {spec.n_venues} impacts, got shape {v.shape}")
    if np.any(v <= 0):
        raise ValueError("venue impacts must be strictly positive")
    if np.any(spec.costs <= 0):
        raise ValueError("publication costs must be strictly positive")
    spot = np.zeros_like(spec.costs)
    return kernels.best_responses(spec.costs, v, spot, spec.alpha, spec.beta, spec.budget)


def utility(action_row, impacts, alpha: float, beta: float) -> float:
    a = np.asarray(action_row, dtype=float)
    if np.any(a < 0):
        raise ValueError("actions must be non-negative")
    v = np.asarray(impacts, dtype=float)
    return float(((a ** alpha) * v ** beta).sum() ** (1.0 / beta))


def kkt_spread(action_row, impacts, cost_row, alpha: float, beta: float) -> float:
    """Relative spread of marginal utility per unit cost across venues.

    Zero at an interior optimum.
    """
    a = np.asarray(action_row, dtype=float)
    ratio = alpha * a ** (alpha - 1.0) * np.asarray(impacts, dtype=float) ** beta / np.asarray(cost_row, dtype=float)
    return float((ratio.max() - ratio.min()) / ratio.mean())


# --- oracle -------------------------------------------------------------------


def _objective(shares, v, c, alpha, beta, budget):
    # shares: (..., k) fractions of budget; objective before the 1/beta root
    a = budget * shares / c
    return ((a ** alpha) * v ** beta).sum(axis=-1)


def _simplex_grid(k: int, m: int) -> np.ndarray:
    """All compositions of ``m`` into ``k`` non-negative parts, divided by ``m``."""
    if k == 1:
        return np.ones((1, 1))
    pts = [p for p in product(range(m + 1), repeat=k - 1) if sum(p) <= m]
    head = np.array(pts, dtype=float)
    return np.column_stack([head, m - head.sum(axis=1)]) / m


def _grid_search(v, c, alpha, beta, budget, resolution):
    k = v.shape[0]
    m = {2: 400, 3: 60, 4: 24}.get(k, 12)
    base = _simplex_grid(k, m)
    best = base[np.argmax(_objective(base, v, c, alpha, beta, budget))]
    # pattern search: move a +-4 cell window while it improves, shrink the
    # spacing once the incumbent is the best point of its own window
    offsets = np.array(list(product(range(-4, 5), repeat=k - 1)), dtype=float)
    h = 1.0 / m
    for _ in range(100_000):
        head = best[: k - 1] + offsets * h
        cand = np.column_stack([head, 1.0 - head.sum(axis=1)])
        cand = np.vstack([best, cand[np.all(cand >= 0.0, axis=1)]])
        i = int(np.argmax(_objective(cand, v, c, alpha, beta, budget)))
        if i == 0:
            if h <= resolution:
                return best
            h /= 4.0
        else:
            best = cand[i]
    raise OracleConvergenceError("grid search hit its iteration cap")


def _newton_direction(grad, curv):
    """Newton step for a separable objective restricted to ``sum(d) = 0``.

    ``curv`` is the positive diagonal of the negated Hessian.
    """
    inv = 1.0 / curv
    tau = float((grad * inv).sum() / inv.sum())
    return (grad - tau) * inv


def _ascent(v, c, alpha, beta, budget, tol, max_iter):
    # the objective sum_j A_j s_j**alpha is separable and concave on the
    # simplex with an interior maximizer, so a damped Newton step that never
    # leaves the interior converges quadratically
    k = v.shape[0]
    weight = (budget / c) ** alpha * v ** beta
    s = np.full(k, 1.0 / k)

    def objective(x):
        return float((weight * x ** alpha).sum())

    f = objective(s)
    for _ in range(max_iter):
        grad = alpha * weight * s ** (alpha - 1.0)
        curv = alpha * (1.0 - alpha) * weight * s ** (alpha - 2.0)
        d = _newton_direction(grad, curv)
        if np.abs(d).max() < tol * max(s.max(), 1.0) and np.all(np.abs(d) < 0.5 * s):
            return s + d
        shrinking = d < 0.0
        lam = 1.0
        if shrinking.any():
            # stay strictly inside the simplex
            lam = min(1.0, 0.9 * float((s[shrinking] / -d[shrinking]).min()))
        slope = float(grad @ d)
        while True:
            cand = s + lam * d
            fc = objective(cand)
            if fc >= f + 1e-4 * lam * slope or lam < 1e-14:
                break
            lam *= 0.5
        s, f = cand, fc
    raise OracleConvergenceError(f"Newton ascent did not converge in {max_iter} iterations")


def oracle_best_response(
    impacts,
    cost_row,
    alpha: float,
    beta: float,
    budget: float = 1.0,
    resolution: float = 1e-4,
    mode: str = "grid",
    max_iter: int = 10_000,
) -> np.ndarray:
    """Maximize utility over the budget simplex numerically.

    ``resolution`` is in action units: both modes work on budget shares and
    refine them to ``resolution * min(c) / budget``, which bounds the action
    error by about ``resolution``. ``mode="grid"`` runs an exhaustive simplex
    grid (for at most 4 venues) and zooms into the best cell until the
    spacing drops below that. ``mode="ascent"`` runs damped Newton ascent
    restricted to the interior of the budget simplex, with backtracking,
    and stops once a full step would move every share by less than it.
    Neither mode uses the closed form.
    """
    v, c = _check_positive(impacts, cost_row)
    if v.shape[0] == 1:
        return np.array([budget / c[0]])
    share_resolution = resolution * float(c.min()) / budget
    if mode == "grid":
        if v.shape[0] > 4:
            raise ValueError("grid oracle supports at most 4 venues; use mode='ascent'")
        shares = _grid_search(v, c, alpha, beta, budget, share_resolution)
    elif mode == "ascent":
        shares = _ascent(v, c, alpha, beta, budget, share_resolution, max_iter)
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    return budget * shares / c
