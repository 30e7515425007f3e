"""Spotlight labeling at a single venue.

A spotlighted venue ``j`` splits into a regular session and a spotlight
session. Spotlight papers cost ``r[i]`` times the regular cost for type
``i`` and are valued at ``gamma * v_j``, where ``gamma = (ln omega)**p``
and ``1/omega`` is the spotlight share. Regular impacts are computed from
regular papers only, so a spotlight acts on the dynamics through one extra
term in each type's budget normalizer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .binary import BinaryGame, Direction, characteristic_alt, find_root, venue_impacts
from .dynamics import EquilibriumResult, equilibrate
from .errors import EmptyVenueError, InfeasibleTargetError
from .model import GameSpec
from ._backend import kernels

DEFAULT_P = 1.77
# stand-in for an unreachable spotlight session (infinite relative cost)
EXCLUDED_R = 1e12


def labeling_effect(omega: float, p: float = DEFAULT_P) -> float:
    """Per-paper impact multiplier ``(ln omega)**p`` of a spotlight label."""
    if not omega > 1.0:
        raise ValueError("omega must exceed 1")
    if not p > 0.0:
        raise ValueError("p must be positive")
    return math.log(omega) ** p


def selection_rule(n_types: int, scale: float) -> np.ndarray:
    """Relative spotlight costs ``scale * (N + 1 - i)**2`` for types ``i = 1..N``."""
    i = np.arange(1, n_types + 1, dtype=float)
    return scale * (n_types + 1 - i) ** 2


@dataclass(frozen=True)
class SpotlightSpec:
    """Spotlight configuration of one venue (0-based ``venue``).

    ``r[i]`` is the spotlight cost of type ``i`` relative to its regular
    cost at that venue; ``selection_scale`` is the constant of the
    selection rule that produced it (``nan`` for hand-built ``r``).
    """

    venue: int
    omega: float
    p: float
    r: np.ndarray
    selection_scale: float = float("nan")

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if r.ndim != 1 or np.any(r <= 0):
            raise ValueError("relative spotlight costs must be a positive vector")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        labeling_effect(self.omega, self.p)

    @property
    def gamma(self) -> float:
        return labeling_effect(self.omega, self.p)

    @property
    def gamma_le_one(self) -> bool:
        return self.gamma <= 1.0

    @property
    def overall_factor(self) -> float:
        """Overall venue impact over regular impact, ``(omega + gamma) / (1 + omega)``."""
        return (self.omega + self.gamma) / (1.0 + self.omega)

    def weights(self, alpha: float, beta: float) -> np.ndarray:
        """Spotlight term per type in the budget normalizer of venue ``venue``."""
        return self.r ** (alpha / (alpha - 1.0)) * self.gamma ** (beta / (1.0 - alpha))

    def action_factor(self, alpha: float, beta: float) -> np.ndarray:
        """Spotlight actions over regular actions at the spotlight venue, per type."""
        return self.r ** (1.0 / (alpha - 1.0)) * self.gamma ** (beta / (1.0 - alpha))

    def to_dict(self) -> dict:
        return {
            "venue": self.venue,
            "omega": self.omega,
            "p": self.p,
            "gamma": self.gamma,
            "gamma_le_one": self.gamma_le_one,
            "selection_scale": self.selection_scale,
            "r": self.r.tolist(),
        }


def _check(spec: GameSpec, sp: SpotlightSpec):
    if not 0 <= sp.venue < spec.n_venues:
        raise ValueError(f"spotlight venue {sp.venue} out of range for {spec.n_venues} venues")
    if sp.r.shape != (spec.n_types,):
        raise ValueError(f"expected {spec.n_types} relative costs, got {sp.r.shape}")


def spotlight_weights(spec: GameSpec, sp: SpotlightSpec) -> np.ndarray:
    """(n, k) matrix of extra normalizer weights, non-zero only in the spotlight column."""
    _check(spec, sp)
    spot = np.zeros(spec.costs.shape)
    spot[:, sp.venue] = sp.weights(spec.alpha, spec.beta)
    return spot


def _fraction(w_regular, w_spot) -> float:
    s = float(w_spot.sum())
    return s / (float(w_regular.sum()) + s)


def spotlight_fraction(spec: GameSpec, sp: SpotlightSpec, impacts=None) -> float:
    """Spotlight share of the venue's publications.

    Without ``impacts`` this is the calibration formula, which weighs each
    type by ``mu * c**(1/(alpha-1))`` and so does not depend on impacts.
    With ``impacts`` it is the share realized by best responses to them.
    """
    _check(spec, sp)
    a = spec.alpha
    if impacts is None:
        w = spec.masses * spec.costs[:, sp.venue] ** (1.0 / (a - 1.0))
        return _fraction(w, w * sp.action_factor(a, spec.beta))
    regular, spot = best_response_spotlight(impacts, spec, sp)
    j = sp.venue
    return _fraction(spec.masses * regular[:, j], spec.masses * spot[:, j])


def solve_selection_scale(
    spec: GameSpec,
    venue: int,
    omega: float,
    p: float = DEFAULT_P,
    floor: Optional[float] = 1.0,
    target: Optional[float] = None,
) -> SpotlightSpec:
    """Selection-rule constant whose calibrated spotlight share equals ``target``.

    ``target`` defaults to ``1/omega``. The share falls strictly as the
    constant grows, so the constant is found by bisection in log space.
    ``floor`` is the smallest admissible relative cost (spotlight never
    cheaper than regular); ``None`` lifts it.
    """
    target = 1.0 / omega if target is None else float(target)
    if not 0.0 < target < 1.0:
        raise ValueError("target spotlight share must lie in (0, 1)")
    shape = selection_rule(spec.n_types, 1.0)

    def share(log_scale):
        sp = SpotlightSpec(venue, omega, p, shape * math.exp(log_scale), math.exp(log_scale))
        return spotlight_fraction(spec, sp)

    if floor is None:
        lo = 0.0
        while not share(lo) > target:
            lo -= 10.0
            if lo < -700.0:
                raise InfeasibleTargetError(f"spotlight share {target:g} is out of reach")
    else:
        # the smallest relative cost belongs to the top type, where shape is 1
        lo = math.log(floor / shape.min())
        if share(lo) < target:
            raise InfeasibleTargetError(
                f"spotlight share {target:g} exceeds {share(lo):.6g}, the share at the cost floor {floor:g}"
            )
    hi = max(lo, 0.0) + 10.0
    while not share(hi) < target:
        hi += 10.0
        if hi > 700.0:
            raise InfeasibleTargetError(f"spotlight share {target:g} is out of reach")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if share(mid) > target:
            lo = mid
        else:
            hi = mid
    scale = math.exp(0.5 * (lo + hi))
    return SpotlightSpec(venue, omega, p, shape * scale, scale)


def high_only(spec: GameSpec, venue: int, omega: float, p: float = DEFAULT_P, r_high: float = 1.0) -> SpotlightSpec:
    """Spotlight open to the top type only; every other type faces ``EXCLUDED_R``."""
    r = np.full(spec.n_types, EXCLUDED_R)
    r[-1] = r_high
    return SpotlightSpec(venue, omega, p, r)


def best_response_spotlight(impacts, spec: GameSpec, sp: SpotlightSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Regular and spotlight action matrices of every type.

    The spotlight matrix is zero outside the spotlight venue. Regular plus
    spotlight spending exhausts each budget.
    """
    v = np.asarray(impacts, dtype=float)
    if v.shape != (spec.n_venues,) or np.any(v <= 0):
        raise ValueError("venue impacts must be a positive vector, one per venue")
    spot_w = spotlight_weights(spec, sp)
    regular = kernels.best_responses(spec.costs, v, spot_w, spec.alpha, spec.beta, spec.budget)
    spot = np.zeros_like(regular)
    spot[:, sp.venue] = regular[:, sp.venue] * sp.action_factor(spec.alpha, spec.beta)
    return regular, spot


def spending(spec: GameSpec, sp: SpotlightSpec, regular, spot) -> np.ndarray:
    """Budget used by each type across regular and spotlight sessions."""
    j = sp.venue
    return (regular * spec.costs).sum(axis=1) + spot[:, j] * spec.costs[:, j] * sp.r


def actual_spotlight_impact(spot_column, spec: GameSpec) -> float:
    """Publication-weighted mean type of the spotlight session."""
    w = np.asarray(spot_column, dtype=float) * spec.masses
    total = w.sum()
    if not total > 0:
        raise EmptyVenueError("spotlight session has no weighted publications")
    return float(w @ spec.thetas / total)


@dataclass
class SpotlightEquilibrium:
    """Equilibrium with one spotlighted venue.

    ``result.impacts`` are regular-session impacts; ``overall_impacts``
    replaces the spotlight venue's entry by the blended regular and
    spotlight impact.
    """

    spotlight: SpotlightSpec
    result: EquilibriumResult
    spot_actions: np.ndarray
    spotlight_impact: float
    overall_impacts: np.ndarray
    realized_fraction: float

    @property
    def impacts(self) -> np.ndarray:
        return self.result.impacts

    def to_dict(self) -> dict:
        out = self.result.to_dict()
        out.update(
            spotlight=self.spotlight.to_dict(),
            spot_actions=self.spot_actions.tolist(),
            spotlight_impact=self.spotlight_impact,
            overall_impacts=self.overall_impacts.tolist(),
            realized_fraction=self.realized_fraction,
        )
        return out


def equilibrate_spotlight(
    spec: GameSpec,
    sp: SpotlightSpec,
    initial=None,
    eps: float = 1e-5,
    max_rounds: int = 1000,
) -> SpotlightEquilibrium:
    res = equilibrate(spec, initial, eps=eps, max_rounds=max_rounds, spot=spotlight_weights(spec, sp))
    return finish_spotlight(spec, sp, res)


def finish_spotlight(spec: GameSpec, sp: SpotlightSpec, res: EquilibriumResult) -> SpotlightEquilibrium:
    """Attach spotlight actions and derived impacts to a finished run."""
    j = sp.venue
    spot = np.zeros_like(res.actions)
    spot[:, j] = res.actions[:, j] * sp.action_factor(spec.alpha, spec.beta)
    overall = res.impacts.copy()
    overall[j] *= sp.overall_factor
    return SpotlightEquilibrium(
        spotlight=sp,
        result=res,
        spot_actions=spot,
        spotlight_impact=actual_spotlight_impact(spot[:, j], spec),
        overall_impacts=overall,
        realized_fraction=_fraction(spec.masses * res.actions[:, j], spec.masses * spot[:, j]),
    )


# --- binary games -------------------------------------------------------------


def _binary_weights(g: BinaryGame, sp: SpotlightSpec) -> np.ndarray:
    if sp.r.shape != (2,):
        raise ValueError("binary spotlight needs relative costs (r_low, r_high)")
    if not 0 <= sp.venue < g.n_venues:
        raise ValueError(f"spotlight venue {sp.venue} out of range")
    return sp.weights(g.alpha, g.beta)


def characteristic_spotlight(x, g: BinaryGame, sp: SpotlightSpec):
    """Characteristic function of a binary game with a spotlight.

    It is the plain function plus one venue term, which changes sign at
    :func:`crossover_ratio`.
    """
    x = np.asarray(x, dtype=float)
    w = _binary_weights(g, sp)
    a, j = g.alpha, sp.venue
    v = venue_impacts(x, g)[..., j] ** (g.beta / (1.0 - a))
    k = (g.cost_high[0] / g.cost_low[0]) ** (1.0 / (a - 1.0))
    e = a / (a - 1.0)
    extra = v * (x * g.cost_high[j] ** e * w[1] - k * g.cost_low[j] ** e * w[0])
    out = characteristic_alt(x, g) + extra
    return float(out) if np.ndim(out) == 0 else out


def crossover_ratio(g: BinaryGame, sp: SpotlightSpec) -> float:
    """Ratio at which the spotlight term of the characteristic function vanishes.

    Spotlighting raises every regular impact iff the no-spotlight
    equilibrium ratio lies below this value.
    """
    w = _binary_weights(g, sp)
    a, j = g.alpha, sp.venue
    e = a / (a - 1.0)
    k = (g.cost_high[0] / g.cost_low[0]) ** (1.0 / (a - 1.0))
    return float(k * g.cost_low[j] ** e * w[0] / (g.cost_high[j] ** e * w[1]))


def predicted_direction(g: BinaryGame, sp: SpotlightSpec, x0: float) -> Direction:
    """Effect of the spotlight on all regular impacts, given the plain equilibrium ratio ``x0``."""
    xc = crossover_ratio(g, sp)
    if math.isclose(x0, xc, rel_tol=1e-12):
        return Direction.FIXED
    return Direction.INCREASE if x0 < xc else Direction.DECREASE


@dataclass
class SpotlightRoot:
    x: float
    impacts: np.ndarray
    actions: np.ndarray
    spot_actions: np.ndarray
    f_value: float


def solve_spotlight_root(g: BinaryGame, sp: SpotlightSpec, tol: float = 1e-12) -> SpotlightRoot:
    """Spotlight equilibrium of a binary game by bisection on its characteristic function."""
    f = lambda x: characteristic_spotlight(x, g, sp)  # noqa: E731
    x, _, _ = find_root(f, tol=tol)
    spec = g.to_spec()
    impacts = g.theta_low * venue_impacts(x, g)
    regular, spot = best_response_spotlight(impacts, spec, sp)
    return SpotlightRoot(x=float(x), impacts=impacts, actions=regular, spot_actions=spot, f_value=float(f(x)))


# --- threshold venue ----------------------------------------------------------


def _direction(delta: np.ndarray) -> str:
    if np.all(delta > 0):
        return "increase"
    if np.all(delta < 0):
        return "decrease"
    return "mixed"


@dataclass
class ThresholdReport:
    """Effect of spotlighting each venue in turn on regular equilibrium impacts.

    ``j0`` is the first venue (0-based) whose spotlight lowers every regular
    impact, or ``None``. ``dichotomy_holds`` requires every earlier venue to
    raise every impact and every later one to lower them all; each breach
    is listed in ``violations``. Many-type reports are ``empirical``.
    """

    baseline: np.ndarray
    scenarios: List[SpotlightEquilibrium]
    directions: List[str]
    j0: Optional[int]
    dichotomy_holds: bool
    empirical: bool
    violations: List[str] = field(default_factory=list)
    predicted: Optional[List[str]] = None

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline.tolist(),
            "scenarios": [s.to_dict() for s in self.scenarios],
            "directions": list(self.directions),
            "j0": self.j0,
            "dichotomy_holds": self.dichotomy_holds,
            "empirical": self.empirical,
            "violations": list(self.violations),
            "predicted": self.predicted,
        }


def threshold_report(baseline: np.ndarray, scenarios: List[SpotlightEquilibrium], empirical: bool) -> ThresholdReport:
    dirs = [_direction(s.impacts - baseline) for s in scenarios]
    j0 = next((j for j, d in enumerate(dirs) if d == "decrease"), None)
    cut = len(dirs) if j0 is None else j0
    violations = [
        f"venue {j + 1}: spotlight gives {d} below the threshold" for j, d in enumerate(dirs[:cut]) if d != "increase"
    ] + [
        f"venue {j + 1}: spotlight gives {d} at or above the threshold"
        for j, d in enumerate(dirs[cut:], start=cut)
        if d != "decrease"
    ]
    return ThresholdReport(
        baseline=baseline,
        scenarios=scenarios,
        directions=dirs,
        j0=j0,
        dichotomy_holds=not violations,
        empirical=empirical,
        violations=violations,
    )


def threshold_venue(
    spec: GameSpec,
    omega: float,
    p: float = DEFAULT_P,
    eps: float = 1e-10,
    max_rounds: int = 1000,
    floor: Optional[float] = 1.0,
) -> ThresholdReport:
    """Spotlight every venue in turn, calibrated to share ``1/omega``, and compare to baseline."""
    base = equilibrate(spec, eps=eps, max_rounds=max_rounds)
    scenarios = []
    for j in range(spec.n_venues):
        sp = solve_selection_scale(spec, j, omega, p, floor=floor)
        scenarios.append(equilibrate_spotlight(spec, sp, eps=eps, max_rounds=max_rounds))
    report = threshold_report(base.impacts, scenarios, empirical=spec.n_types != 2)
    if spec.n_types == 2:
        g = BinaryGame.from_spec(spec)
        x0 = float(base.actions[1, 0] / base.actions[0, 0])
        report.predicted = [predicted_direction(g, s.spotlight, x0).value for s in scenarios]
    return report
