"""Impact consistency updates and simultaneous best-response dynamics."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ._backend import kernels
from .best_response import best_response, utility
from .model import GameSpec


@dataclass
class EquilibriumResult:
    """Outcome of a best-response run.

    ``impacts`` is the returned state, ``actions`` the exact best responses
    to it and ``residual`` the Euclidean gap between ``impacts`` and the
    impacts those actions induce. ``rounds`` counts impact updates performed
    before the stopping test first passed.
    """

    impacts: np.ndarray
    actions: np.ndarray
    rounds: int
    residual: float
    converged: bool
    trace: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        out = {
            "impacts": self.impacts.tolist(),
            "actions": self.actions.tolist(),
            "rounds": self.rounds,
            "residual": self.residual,
            "converged": self.converged,
        }
        if self.trace is not None:
            out["trace"] = self.trace.tolist()
        return out


def _spot(spec: GameSpec, spot) -> np.ndarray:
    if spot is None:
        return np.zeros(spec.costs.shape)
    spot = np.ascontiguousarray(spot, dtype=float)
    if spot.shape != spec.costs.shape:
        raise ValueError(f"spot weights {spot.shape} must match costs {spec.costs.shape}")
    return spot


def _impacts(spec: GameSpec, impacts) -> np.ndarray:
    v = np.ascontiguousarray(impacts, dtype=float)
    if v.shape != (spec.n_venues,):
        raise ValueError(f"expected {spec.n_venues} impacts, got shape {v.shape}")
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise ValueError("venue impacts must be finite and strictly positive")
    return v


def update_impacts(actions, spec: GameSpec) -> np.ndarray:
    """Publication-weighted mean type at each venue."""
    a = np.ascontiguousarray(actions, dtype=float)
    if a.shape != spec.costs.shape:
        raise ValueError(f"actions {a.shape} must match costs {spec.costs.shape}")
    return kernels.update_impacts(a, np.ascontiguousarray(spec.thetas), np.ascontiguousarray(spec.masses))


def _step(spec: GameSpec, v: np.ndarray, spot: np.ndarray) -> np.ndarray:
    return kernels.step(
        spec.thetas, spec.masses, spec.costs, spot, v, spec.alpha, spec.beta, spec.budget
    )


def step(impacts, spec: GameSpec, spot=None) -> np.ndarray:
    """One round: every type best-responds to ``impacts``, then impacts are recomputed."""
    return _step(spec, _impacts(spec, impacts), _spot(spec, spot))


def consistency_residual(impacts, spec: GameSpec, spot=None) -> float:
    v = _impacts(spec, impacts)
    return float(np.linalg.norm(_step(spec, v, _spot(spec, spot)) - v))


def equilibrate(
    spec: GameSpec,
    initial=None,
    eps: float = 1e-5,
    max_rounds: int = 1000,
    trace: bool = False,
    spot=None,
) -> EquilibriumResult:
    """Iterate simultaneous best responses until the impact gap drops below ``eps``.

    ``initial`` defaults to every venue at the population mean type.
    ``spot`` holds optional extra normalizer weights (spotlight labeling).
    When the stopping test passes at state ``v_T`` the returned impacts are
    its update ``v_{T+1}``, provided that state also meets the test, since
    it is the one consistent with the actions researchers just chose.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    spot = _spot(spec, spot)
    v0 = np.full(spec.n_venues, spec.mean_type) if initial is None else _impacts(spec, initial)

    history = None
    if trace:
        history = [v0.copy()]
        v = v0.copy()
        t = 0
        while True:
            nv = _step(spec, v, spot)
            gap = float(np.sqrt(((nv - v) ** 2).sum()))
            met = gap < eps
            if met or t >= max_rounds:
                break
            v = nv
            t += 1
            history.append(v.copy())
    else:
        v, nv, t, gap, met = kernels.iterate(
            spec.thetas, spec.masses, spec.costs, spot, v0,
            spec.alpha, spec.beta, spec.budget, float(eps), int(max_rounds),
        )

    impacts, residual = v, gap
    if met:
        after = float(np.linalg.norm(_step(spec, nv, spot) - nv))
        if after < eps:
            impacts, residual = nv, after
    actions = kernels.best_responses(spec.costs, impacts, spot, spec.alpha, spec.beta, spec.budget)
    return EquilibriumResult(
        impacts=np.array(impacts),
        actions=actions,
        rounds=int(t),
        residual=float(residual),
        converged=bool(met),
        trace=None if history is None else np.array(history),
    )


def check_eps_nash(actions, impacts, spec: GameSpec, eps: float, tol: float = 1e-9) -> bool:
    """True iff ``actions`` are best responses to ``impacts`` and induce them within ``eps``.

    Each row must respect the budget and reach the best-response utility
    within relative ``tol``.
    """
    a = np.asarray(actions, dtype=float)
    v = _impacts(spec, impacts)
    if a.shape != spec.costs.shape or np.any(a < 0):
        return False
    try:
        induced = update_impacts(a, spec)
    except ValueError:
        return False
    if not np.linalg.norm(induced - v) < eps:
        return False
    for i in range(spec.n_types):
        if a[i] @ spec.costs[i] > spec.budget * (1.0 + tol):
            return False
        best = best_response(v, spec.costs[i], spec.alpha, spec.beta, spec.budget).actions
        u_best = utility(best, v, spec.alpha, spec.beta)
        if abs(utility(a[i], v, spec.alpha, spec.beta) - u_best) > tol * u_best:
            return False
    return True


def rank_one_impact(spec: GameSpec) -> float:
    """Common venue impact when costs factor as ``c[i, j] = h[i] * d[j]``.

    Type ``i`` publishes in proportion to ``1 / h[i]`` at every venue, so
    each venue sees the same ``mu / h``-weighted mean type.
    """
    h = spec.costs[:, 0]
    w = spec.masses / h
    return float(w @ spec.thetas / w.sum())


def sample_starts(spec: GameSpec, n_starts: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random initial impacts on ``[theta_1, theta_n]`` per venue."""
    lo, hi = float(spec.thetas.min()), float(spec.thetas.max())
    return rng.uniform(lo, hi, size=(n_starts, spec.n_venues))


def multi_start(
    spec: GameSpec,
    starts: Sequence,
    eps: float = 1e-5,
    max_rounds: int = 1000,
    spot=None,
    workers: Optional[int] = None,
) -> List[EquilibriumResult]:
    """Equilibrate from every start; results come back in start order."""
    starts = [np.asarray(s, dtype=float) for s in starts]

    def run(v0):
        return equilibrate(spec, v0, eps=eps, max_rounds=max_rounds, spot=spot)

    if workers == 1 or len(starts) < 2:
        return [run(s) for s in starts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, starts))
