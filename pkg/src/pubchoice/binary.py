"""Two-type games solved through the first-venue action ratio.

With a low and a high type, every best-response profile is pinned down by
``x = a_H1 / a_L1``: the high type publishes ``x * b_j`` times as much as
the low type at venue ``j``. Venue impacts are then explicit functions of
``x`` and the equilibrium is the root of a scalar characteristic function,
negative at 0 and, under the cost assumptions, convex with a single root.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np

from .best_response import best_response
from .errors import BracketError
from .model import GameSpec, check_mcr, check_noncompetitive_first, mass_ratio, normalize_binary


@dataclass(frozen=True)
class BinaryGame:
    """Binary-type game with the low type normalized to 1.

    ``theta`` is the high type over the low type, ``mu_tilde`` the high
    over low mass ratio and ``theta_low`` the original low type, used to
    convert impacts back to the caller's units.
    """

    theta: float
    mu_tilde: float
    cost_low: np.ndarray
    cost_high: np.ndarray
    alpha: float = 0.2
    beta: float = 2.0
    budget: float = 1.0
    theta_low: float = 1.0

    def __post_init__(self):
        for name in ("cost_low", "cost_high"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be a vector")
            if np.any(arr <= 0):
                raise ValueError("costs must be strictly positive")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.cost_low.shape != self.cost_high.shape:
            raise ValueError("cost rows must have equal length")
        if not self.theta > 1.0:
            raise ValueError("normalized high type must exceed 1")
        if not self.mu_tilde > 0.0:
            raise ValueError("mass ratio must be positive")

    @classmethod
    def from_spec(cls, spec: GameSpec) -> "BinaryGame":
        norm, scale = normalize_binary(spec)
        return cls(
            theta=float(norm.thetas[1]),
            mu_tilde=mass_ratio(spec),
            cost_low=spec.costs[0],
            cost_high=spec.costs[1],
            alpha=spec.alpha,
            beta=spec.beta,
            budget=spec.budget,
            theta_low=scale,
        )

    def to_spec(self) -> GameSpec:
        m = 1.0 + self.mu_tilde
        return GameSpec(
            thetas=[self.theta_low, self.theta_low * self.theta],
            masses=[1.0 / m, self.mu_tilde / m],
            costs=np.vstack([self.cost_low, self.cost_high]),
            alpha=self.alpha,
            beta=self.beta,
            budget=self.budget,
        )

    @property
    def n_venues(self) -> int:
        return self.cost_low.shape[0]

    @property
    def b(self) -> np.ndarray:
        """Per-venue high/low action ratio relative to venue 1."""
        cl, ch = self.cost_low, self.cost_high
        return (ch[0] * cl / (cl[0] * ch)) ** (1.0 / (1.0 - self.alpha))

    def assumptions(self) -> dict:
        costs = np.vstack([self.cost_low, self.cost_high])
        mcr, _ = check_mcr(costs)
        return {"mcr": mcr, "noncompetitive_first": check_noncompetitive_first(costs)}


def _ratio(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("action ratio must be non-negative")
    return x


def venue_impacts(x, g: BinaryGame) -> np.ndarray:
    """Normalized impacts of every venue at ratio ``x``; shape ``x.shape + (k,)``."""
    z = _ratio(x)[..., None] * g.b * g.mu_tilde
    return (1.0 + z * g.theta) / (1.0 + z)


def venue_impact_of_ratio(x: float, j: int, g: BinaryGame) -> float:
    """Normalized impact of venue ``j`` (0-based) at ratio ``x``."""
    return float(venue_impacts(x, g)[..., j])


def _weighted(g: BinaryGame, v, row) -> np.ndarray:
    a = g.alpha
    return (row ** (a / (a - 1.0)) * v ** (g.beta / (1.0 - a))).sum(axis=-1)


def characteristic(x, g: BinaryGame):
    """Characteristic function; negative where impacts rise after a round."""
    x = _ratio(x)
    v = venue_impacts(x, g)
    a = g.alpha
    ch, cl = g.cost_high, g.cost_low
    shift = (cl[0] / ch[0]) * g.b ** (-a)
    terms = ch ** (a / (a - 1.0)) * v ** (g.beta / (1.0 - a)) * (x[..., None] - shift)
    out = terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def characteristic_alt(x, g: BinaryGame):
    """Same function written as the high-type normalizer against the low-type one.

    Expanding the shift term of :func:`characteristic` gives exactly this
    expression, so the two agree pointwise, not only in sign.
    """
    x = _ratio(x)
    v = venue_impacts(x, g)
    a = g.alpha
    k = (g.cost_high[0] / g.cost_low[0]) ** (1.0 / (a - 1.0))
    out = x * _weighted(g, v, g.cost_high) - k * _weighted(g, v, g.cost_low)
    return float(out) if out.ndim == 0 else out


@dataclass
class RootResult:
    """Equilibrium found from the characteristic function.

    ``impacts`` are in the caller's units; ``actions`` has rows (low, high).
    ``roots`` lists every sign change located on the scan grid, which is a
    single entry whenever the cost assumptions hold.
    """

    x: float
    impacts: np.ndarray
    actions: np.ndarray
    f_value: float
    x_hi: float
    assumptions_ok: bool
    roots: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "impacts": self.impacts.tolist(),
            "actions": self.actions.tolist(),
            "f_value": self.f_value,
            "x_hi": self.x_hi,
            "assumptions_ok": self.assumptions_ok,
            "roots": list(self.roots),
        }


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sign_changes(f, xs) -> List[int]:
    """Indices ``i`` with ``f(xs[i])`` and ``f(xs[i+1])`` of opposite sign."""
    vals = np.asarray(f(np.asarray(xs)))
    s = np.sign(vals)
    return [int(i) for i in np.flatnonzero(s[:-1] * s[1:] < 0)]


def find_root(f, tol: float = 1e-12, x_cap: float = 1e12, scan: bool = False, n_scan: int = 4001):
    """Bracket and bisect a scalar function negative at 0.

    The upper end doubles from 1 until ``f`` turns positive. Returns
    ``(x, x_hi, roots)``; with ``scan`` every sign change on a grid over
    ``[0, x_hi]`` is bisected and listed in ``roots``.
    """
    if not f(0.0) < 0.0:
        raise BracketError("characteristic function is not negative at 0")
    hi = 1.0
    while True:
        if hi > x_cap:
            raise BracketError(f"characteristic function stays non-positive up to x = {x_cap:g}")
        if f(hi) > 0.0:
            break
        hi *= 2.0
    x = _bisect(f, 0.0, hi, tol)
    roots = [x]
    if scan:
        xs = np.linspace(0.0, hi, n_scan)
        roots = [_bisect(f, xs[i], xs[i + 1], tol) for i in sign_changes(f, xs)] or [x]
    return x, hi, roots


def reconstruct_actions(x: float, g: BinaryGame) -> np.ndarray:
    """Low type best-responds to the impacts at ``x``; the high type scales it by ``x * b``."""
    v = venue_impacts(x, g)
    low = best_response(v, g.cost_low, g.alpha, g.beta, g.budget).actions
    return np.vstack([low, x * g.b * low])


def solve_equilibrium_root(g: BinaryGame, tol: float = 1e-12, x_cap: float = 1e12) -> RootResult:
    """Unique equilibrium of a binary game by bisection on the characteristic function.

    When the cost assumptions fail the solver still runs, and ``roots``
    reports every sign change found on a dense scan instead of assuming
    uniqueness.
    """
    flags = g.assumptions()
    ok = bool(flags["mcr"] and flags["noncompetitive_first"])
    f = lambda x: characteristic(x, g)  # noqa: E731
    x, hi, roots = find_root(f, tol=tol, x_cap=x_cap, scan=not ok)
    return RootResult(
        x=float(x),
        impacts=g.theta_low * venue_impacts(x, g),
        actions=reconstruct_actions(x, g),
        f_value=float(f(x)),
        x_hi=hi,
        assumptions_ok=ok,
        roots=[float(r) for r in roots],
    )


class Direction(enum.Enum):
    INCREASE = "increase"
    DECREASE = "decrease"
    FIXED = "fixed"


def sign_predicts_direction(x: float, g: BinaryGame, rtol: float = 1e-9) -> Direction:
    """Direction in which one best-response round moves every impact from state ``x``.

    ``x`` is the first-venue ratio of the current action profile. Values of
    the characteristic within ``rtol`` of the scale of its two terms count
    as zero.
    """
    x = float(_ratio(x))
    v = venue_impacts(x, g)
    a = g.alpha
    k = (g.cost_high[0] / g.cost_low[0]) ** (1.0 / (a - 1.0))
    high, low = x * _weighted(g, v, g.cost_high), k * _weighted(g, v, g.cost_low)
    f = high - low
    if abs(f) <= rtol * (abs(high) + abs(low)):
        return Direction.FIXED
    return Direction.INCREASE if f < 0 else Direction.DECREASE


def scale_population(g: BinaryGame, m_high: float, m_low: float) -> BinaryGame:
    """Multiply the high-type mass by ``m_high`` and the low-type mass by ``m_low``."""
    if not (m_high > 0 and m_low > 0):
        raise ValueError("population scale factors must be positive")
    return replace(g, mu_tilde=g.mu_tilde * m_high / m_low)


def binary_game(
    theta_high: float,
    mu_tilde: float,
    cost_low,
    cost_high,
    alpha: float = 0.2,
    beta: float = 2.0,
    budget: float = 1.0,
    theta_low: float = 1.0,
) -> BinaryGame:
    """Build a game from un-normalized types."""
    return BinaryGame(
        theta=theta_high / theta_low,
        mu_tilde=mu_tilde,
        cost_low=cost_low,
        cost_high=cost_high,
        alpha=alpha,
        beta=beta,
        budget=budget,
        theta_low=theta_low,
    )


def counterexample_game() -> BinaryGame:
    """Two-venue instance where the high type publishes less in total at equilibrium."""
    return BinaryGame(
        theta=20.0, mu_tilde=0.5, cost_low=[1.0, 40.0], cost_high=[1.0, 15.0], budget=40.0
    )
