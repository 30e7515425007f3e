"""Numpy implementation of the inner kernels.

Mirrors ``_kernels.pyx`` function for function. ``spot`` is an (n, k)
matrix of extra per-venue weights in each type's normalizer; it is zero
everywhere for a game without spotlight labeling.
"""
import numpy as np

from .errors import EmptyVenueError


def best_responses(costs, impacts, spot, alpha, beta, budget):
    costs = np.asarray(costs, dtype=float)
    w = np.asarray(impacts, dtype=float) ** (beta / (1.0 - alpha))
    num = costs ** (1.0 / (alpha - 1.0)) * w
    denom = (costs * num * (1.0 + spot)).sum(axis=1, keepdims=True)
    return budget * num / denom


def update_impacts(actions, thetas, masses):
    weighted = np.asarray(actions, dtype=float) * np.asarray(masses, dtype=float)[:, None]
    total = weighted.sum(axis=0)
    if np.any(total <= 0):
        empty = [int(j) for j in np.flatnonzero(total <= 0)]
        raise EmptyVenueError(f"empty venue(s) {empty}: no weighted publications")
    return (weighted * np.asarray(thetas, dtype=float)[:, None]).sum(axis=0) / total


def step(thetas, masses, costs, spot, impacts, alpha, beta, budget):
    a = best_responses(costs, impacts, spot, alpha, beta, budget)
    return update_impacts(a, thetas, masses)


def iterate(thetas, masses, costs, spot, impacts, alpha, beta, budget, eps, max_rounds):
    """Run simultaneous best-response rounds until the consistency gap is below ``eps``.

    Returns ``(state, updated, rounds, gap, met)`` where ``state`` is the
    impact vector after ``rounds`` updates, ``updated`` its one-step image
    and ``gap`` the Euclidean distance between the two.
    """
    v = np.array(impacts, dtype=float)
    t = 0
    while True:
        nv = step(thetas, masses, costs, spot, v, alpha, beta, budget)
        gap = float(np.sqrt(((nv - v) ** 2).sum()))
        if gap < eps:
            return v, nv, t, gap, True
        if t >= max_rounds:
            return v, nv, t, gap, False
        v = nv
        t += 1
