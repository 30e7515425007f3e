"""Game data and the structural checks attached to it.

Solvers accept any :class:`GameSpec` whose arrays have consistent shapes.
Whether the modelling assumptions hold is a separate question answered by
:func:`validate_game`, so counterexamples can still be explored.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

DEFAULT_TOL = 1e-9


def _frozen(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GameSpec:
    """A publication choice game.

    Parameters
    ----------
    thetas : (n,) researcher types, strictly increasing and positive.
    masses : (n,) population density of each type.
    costs : (n, k) cost of one publication for type ``i`` at venue ``j``.
        Columns are ordered from least to most competitive venue.
    alpha : exponent on publication counts, in (0, 1).
    beta : exponent on venue impact, greater than 1.
    budget : time budget shared by every type.
    """

    thetas: np.ndarray
    masses: np.ndarray
    costs: np.ndarray
    alpha: float = 0.2
    beta: float = 2.0
    budget: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "thetas", _frozen(self.thetas, 1, "thetas"))
        object.__setattr__(self, "masses", _frozen(self.masses, 1, "masses"))
        object.__setattr__(self, "costs", _frozen(self.costs, 2, "costs"))
        n = self.thetas.shape[0]
        if n == 0 or self.costs.shape[1] == 0:
            raise ValueError("a game needs at least one type and one venue")
        if self.masses.shape != (n,) or self.costs.shape[0] != n:
            raise ValueError(
                f"shape mismatch: thetas {self.thetas.shape}, masses {self.masses.shape}, "
                f"costs {self.costs.shape}"
            )
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "budget", float(self.budget))

    @property
    def n_types(self) -> int:
        return self.thetas.shape[0]

    @property
    def n_venues(self) -> int:
        return self.costs.shape[1]

    @property
    def mean_type(self) -> float:
        return float(self.masses @ self.thetas / self.masses.sum())

    def with_masses(self, masses) -> "GameSpec":
        return replace(self, masses=masses)

    def with_costs(self, costs) -> "GameSpec":
        return replace(self, costs=costs)

    def with_thetas(self, thetas) -> "GameSpec":
        return replace(self, thetas=thetas)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_game`.

    ``violations`` lists broken model requirements. The ``mcr``,
    ``noncompetitive_first`` and ``rank_one`` flags record which
    structural assumptions of the theory hold; they are informational.
    """

    violations: List[str] = field(default_factory=list)
    mcr: bool = False
    mcr_witness: Optional[Tuple[int, int, int, int]] = None
    noncompetitive_first: bool = False
    rank_one: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "mcr": self.mcr,
            "mcr_witness": list(self.mcr_witness) if self.mcr_witness else None,
            "noncompetitive_first": self.noncompetitive_first,
            "rank_one": self.rank_one,
        }


def validate_game(spec: GameSpec, tol: float = DEFAULT_TOL) -> ValidationReport:
    report = ValidationReport()
    v = report.violations
    if not 0.0 < spec.alpha < 1.0:
        v.append("alpha out of (0,1)")
    if not spec.beta > 1.0:
        v.append("beta not greater than 1")
    if np.any(spec.thetas <= 0):
        v.append("non-positive type")
    if np.any(np.diff(spec.thetas) <= 0):
        v.append("types not strictly increasing")
    if np.any(spec.masses <= 0):
        v.append("non-positive mass")
    if np.any(spec.costs <= 0):
        v.append("non-positive cost")
    if not spec.budget > 0:
        v.append("non-positive budget")
    if np.any(np.diff(spec.costs, axis=1) < 0):
        v.append("costs decrease with venue competitiveness")
    if np.all(spec.costs > 0):
        report.mcr, report.mcr_witness = check_mcr(spec.costs)
        report.noncompetitive_first = check_noncompetitive_first(spec.costs, tol)
        report.rank_one = is_rank_one_cost(spec.costs, tol)
    return report


def check_mcr(costs) -> Tuple[bool, Optional[Tuple[int, int, int, int]]]:
    """Monotone cost ratio: ``c[i,j]/c[i',j] < c[i,j']/c[i',j']`` for i<i', j<j'.

    Returns ``(True, None)`` or ``(False, (i, i', j, j'))`` with the first
    violating quadruple in lexicographic order (0-based indices).
    """
    c = np.asarray(costs, dtype=float)
    n, k = c.shape
    for i in range(n):
        for ip in range(i + 1, n):
            ratio = c[i] / c[ip]
            for j in range(k):
                for jp in range(j + 1, k):
                    if not ratio[j] < ratio[jp]:
                        return False, (i, ip, j, jp)
    return True, None


def check_noncompetitive_first(costs, tol: float = DEFAULT_TOL) -> bool:
    col = np.asarray(costs, dtype=float)[:, 0]
    return bool(col.max() - col.min() <= tol)


def is_rank_one_cost(costs, tol: float = DEFAULT_TOL) -> bool:
    """True when every 2x2 cross product agrees to relative tolerance ``tol``."""
    c = np.asarray(costs, dtype=float)
    # c[i,j] * c[i',j'] against c[i,j'] * c[i',j] for all index pairs at once
    lhs = np.einsum("ij,kl->ikjl", c, c)
    rhs = np.einsum("il,kj->ikjl", c, c)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    return bool(np.all(np.abs(lhs - rhs) <= tol * scale))


def normalize_binary(spec: GameSpec) -> Tuple[GameSpec, float]:
    """Rescale a two-type game so the low type is 1.

    Returns the normalized game and the low type's original value, which
    multiplies normalized impacts back into the original units.
    """
    if spec.n_types != 2:
        raise ValueError(f"normalize_binary needs exactly two types, got {spec.n_types}")
    scale = float(spec.thetas[0])
    return spec.with_thetas(spec.thetas / scale), scale


def mass_ratio(spec: GameSpec) -> float:
    """High-to-low mass ratio of a binary game."""
    if spec.n_types != 2:
        raise ValueError(f"mass ratio is defined for two types, got {spec.n_types}")
    return float(spec.masses[1] / spec.masses[0])
