"""Configuration and the simulation studies behind the command line.

Every study returns a :class:`StudyResult` holding output tables, a summary,
figure series and a list of violated expectations. Random draws come from
``numpy.random.default_rng(seed)`` only, and concurrent runs are merged in
input order, so identical configs give identical results.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .binary import BinaryGame, counterexample_game, solve_equilibrium_root
from .dynamics import EquilibriumResult, equilibrate, multi_start, sample_starts
from .errors import ConfigError, ConvergenceError
from .model import GameSpec, validate_game
from .spotlight import (
    DEFAULT_P,
    SpotlightSpec,
    equilibrate_spotlight,
    high_only,
    solve_selection_scale,
    solve_spotlight_root,
    spotlight_weights,
    threshold_report,
    threshold_venue,
)

TYPE_MASSES = (0.50, 0.25, 0.15, 0.07, 0.03)
GENERATOR = "numpy.random.PCG64"


def build_parametric_game(
    g: float,
    n_types: int = 5,
    n_venues: int = 3,
    budget: float = 40.0,
    alpha: float = 0.2,
    beta: float = 2.0,
) -> GameSpec:
    """Parametric test game: types ``i**2`` and costs ``exp(g * j**2 / i**2)`` beyond venue 1.

    Fewer than five types keep the leading masses, renormalized.
    """
    if not g > 0:
        raise ValueError("growth rate g must be positive")
    if not 1 <= n_types <= len(TYPE_MASSES):
        raise ValueError(f"n_types must be between 1 and {len(TYPE_MASSES)}")
    if n_venues < 1:
        raise ValueError("n_venues must be at least 1")
    i = np.arange(1, n_types + 1, dtype=float)[:, None]
    j = np.arange(1, n_venues + 1, dtype=float)[None, :]
    costs = np.where(j == 1, 1.0, np.exp(g * j ** 2 / i ** 2))
    masses = np.array(TYPE_MASSES[:n_types])
    return GameSpec(
        thetas=i[:, 0] ** 2,
        masses=masses / masses.sum(),
        costs=costs,
        alpha=alpha,
        beta=beta,
        budget=budget,
    )


# --- configuration ------------------------------------------------------------

EXPLICIT_KEYS = {"thetas", "masses", "costs"}
PARAMETRIC_KEYS = {"g", "n_types", "n_venues", "z"}
SHARED_KEYS = {"alpha", "beta", "budget"}
EXPERIMENT_KEYS = {
    "seed", "eps", "max_rounds", "n_starts", "initial", "g_values", "ratios",
    "venues", "round_bound", "uniqueness_tol", "spotlight_each_venue", "workers",
}
SPOTLIGHT_KEYS = {"venue", "ratio", "p", "floor", "high_only", "r_high"}


@dataclass
class GameConfig:
    """Either explicit arrays or the parametric family (``g`` may be left to the study)."""

    thetas: Optional[list] = None
    masses: Optional[list] = None
    costs: Optional[list] = None
    g: Optional[float] = None
    n_types: int = 5
    n_venues: int = 3
    z: Optional[float] = None  # listed beside g in the original table; has no effect on costs
    alpha: float = 0.2
    beta: float = 2.0
    budget: float = 40.0

    @property
    def explicit(self) -> bool:
        return self.costs is not None

    def build(self, default_g: float = 0.6) -> GameSpec:
        try:
            if self.explicit:
                return GameSpec(self.thetas, self.masses, self.costs, self.alpha, self.beta, self.budget)
            g = default_g if self.g is None else self.g
            return build_parametric_game(g, self.n_types, self.n_venues, self.budget, self.alpha, self.beta)
        except ValueError as exc:
            raise ConfigError(f"game: {exc}") from exc


@dataclass
class SpotlightConfig:
    venue: Optional[int] = None  # 1-based; defaults to the most competitive venue
    ratio: float = 0.24
    p: float = DEFAULT_P
    floor: Optional[float] = 1.0
    high_only: bool = False
    r_high: float = 1.0

    @property
    def omega(self) -> float:
        return 1.0 / self.ratio


@dataclass
class ExperimentConfig:
    game: GameConfig = field(default_factory=GameConfig)
    spotlight: SpotlightConfig = field(default_factory=SpotlightConfig)
    game_given: bool = False
    seed: int = 0
    eps: float = 1e-5
    max_rounds: int = 1000
    n_starts: int = 50
    initial: Optional[list] = None
    g_values: List[float] = field(default_factory=lambda: [0.2, 0.3, 0.4, 0.6])
    ratios: List[float] = field(default_factory=lambda: [0.05, 0.25, 0.8])
    venues: Optional[List[int]] = None  # 1-based
    round_bound: int = 7
    uniqueness_tol: float = 1e-5
    spotlight_each_venue: bool = True
    workers: Optional[int] = None

    def echo(self) -> Dict[str, Any]:
        """Resolved configuration as plain JSON data."""
        out = asdict(self)
        out["game"] = {k: v for k, v in out["game"].items() if v is not None}
        return out


def _number(section: str, key: str, value, integer: bool = False, positive: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if integer and not (isinstance(value, int) or float(value).is_integer()):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be finite")
    if positive and not value > 0:
        raise ConfigError(f"{section}.{key} must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _numbers(section: str, key: str, value, integer: bool = False, positive: bool = False):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{section}.{key} must be a non-empty list")
    return [_number(section, key, x, integer, positive) for x in value]


def _matrix(section: str, key: str, value, ndim: int):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key} is not a numeric array") from exc
    if arr.ndim != ndim or arr.size == 0:
        raise ConfigError(f"{section}.{key} must be a {ndim}-d numeric array")
    return arr.tolist()


def _reject_unknown(section: str, data: dict, allowed: set):
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(unknown)}")


def _parse_game(data: dict) -> GameConfig:
    _reject_unknown("game", data, EXPLICIT_KEYS | PARAMETRIC_KEYS | SHARED_KEYS)
    explicit = EXPLICIT_KEYS & set(data)
    parametric = PARAMETRIC_KEYS & set(data)
    if explicit and parametric:
        raise ConfigError("game: give either thetas/masses/costs or the parametric g/n_types/n_venues, not both")
    if explicit and explicit != EXPLICIT_KEYS:
        raise ConfigError(f"game: explicit games need {sorted(EXPLICIT_KEYS)}")
    cfg = GameConfig()
    if explicit:
        cfg.thetas = _matrix("game", "thetas", data["thetas"], 1)
        cfg.masses = _matrix("game", "masses", data["masses"], 1)
        cfg.costs = _matrix("game", "costs", data["costs"], 2)
    if "g" in data:
        cfg.g = _number("game", "g", data["g"], positive=True)
    for key in ("n_types", "n_venues"):
        if key in data:
            setattr(cfg, key, _number("game", key, data[key], integer=True, positive=True))
    if "z" in data:
        cfg.z = _number("game", "z", data["z"])
    for key in ("alpha", "beta", "budget"):
        if key in data:
            setattr(cfg, key, _number("game", key, data[key]))
    return cfg


def _parse_spotlight(data: dict) -> SpotlightConfig:
    _reject_unknown("spotlight", data, SPOTLIGHT_KEYS)
    cfg = SpotlightConfig()
    if "venue" in data:
        cfg.venue = _number("spotlight", "venue", data["venue"], integer=True, positive=True)
    if "ratio" in data:
        cfg.ratio = _number("spotlight", "ratio", data["ratio"], positive=True)
        if not cfg.ratio < 1.0:
            raise ConfigError("spotlight.ratio must lie in (0, 1)")
    if "p" in data:
        cfg.p = _number("spotlight", "p", data["p"], positive=True)
    if "floor" in data:
        cfg.floor = None if data["floor"] is None else _number("spotlight", "floor", data["floor"], positive=True)
    if "high_only" in data:
        if not isinstance(data["high_only"], bool):
            raise ConfigError("spotlight.high_only must be true or false")
        cfg.high_only = data["high_only"]
    if "r_high" in data:
        cfg.r_high = _number("spotlight", "r_high", data["r_high"], positive=True)
    return cfg


def parse_config(data: dict) -> ExperimentConfig:
    """Build a config from decoded JSON, rejecting unknown sections and keys."""
    _reject_unknown("config", data, {"game", "experiment", "spotlight"})
    cfg = ExperimentConfig()
    if "game" in data:
        cfg.game = _parse_game(data["game"])
        cfg.game_given = True
    if "spotlight" in data:
        cfg.spotlight = _parse_spotlight(data["spotlight"])
    exp = data.get("experiment", {})
    _reject_unknown("experiment", exp, EXPERIMENT_KEYS)
    if "seed" in exp:
        cfg.seed = _number("experiment", "seed", exp["seed"], integer=True)
        if not 0 <= cfg.seed < 2 ** 64:
            raise ConfigError("experiment.seed must fit in an unsigned 64-bit integer")
    if "eps" in exp:
        cfg.eps = _number("experiment", "eps", exp["eps"], positive=True)
    for key in ("max_rounds", "n_starts", "round_bound", "workers"):
        if key in exp:
            setattr(cfg, key, _number("experiment", key, exp[key], integer=True, positive=True))
    if "uniqueness_tol" in exp:
        cfg.uniqueness_tol = _number("experiment", "uniqueness_tol", exp["uniqueness_tol"], positive=True)
    if "initial" in exp:
        cfg.initial = _numbers("experiment", "initial", exp["initial"], positive=True)
    if "g_values" in exp:
        cfg.g_values = _numbers("experiment", "g_values", exp["g_values"], positive=True)
    if "ratios" in exp:
        cfg.ratios = _numbers("experiment", "ratios", exp["ratios"], positive=True)
        if any(r >= 1.0 for r in cfg.ratios):
            raise ConfigError("experiment.ratios must lie in (0, 1)")
    if "venues" in exp:
        cfg.venues = _numbers("experiment", "venues", exp["venues"], integer=True, positive=True)
    if "spotlight_each_venue" in exp:
        if not isinstance(exp["spotlight_each_venue"], bool):
            raise ConfigError("experiment.spotlight_each_venue must be true or false")
        cfg.spotlight_each_venue = exp["spotlight_each_venue"]
    return cfg


def load_config(path: Optional[str]) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


# --- results ------------------------------------------------------------------


@dataclass
class Table:
    name: str
    columns: List[str]
    rows: List[list]


@dataclass
class Series:
    label: str
    x: List[float]
    y: List[float]


@dataclass
class Figure:
    name: str
    title: str
    x_label: str
    y_label: str
    series: List[Series]


@dataclass
class StudyResult:
    kind: str
    tables: List[Table]
    summary: Dict[str, Any] = field(default_factory=dict)
    violations: List[Dict[str, str]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    figures: List[Figure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def violate(self, check: str, detail: str):
        self.violations.append({"check": check, "detail": detail})


def _venue_figure(name: str, title: str, lines: Dict[str, Sequence[float]]) -> Figure:
    series = [Series(label, list(range(1, len(v) + 1)), [float(x) for x in v]) for label, v in lines.items()]
    return Figure(name, title, "venue", "regular impact", series)


def _require(res: EquilibriumResult, what: str) -> EquilibriumResult:
    if not res.converged:
        raise ConvergenceError(f"{what}: no convergence in {res.rounds} rounds (residual {res.residual:.3g})")
    return res


def _venues(cfg: ExperimentConfig, spec: GameSpec) -> List[int]:
    """0-based venue indices selected by the config."""
    venues = cfg.venues or list(range(1, spec.n_venues + 1))
    bad = [v for v in venues if v > spec.n_venues]
    if bad:
        raise ConfigError(f"experiment.venues {bad} exceed the {spec.n_venues} venues of the game")
    return [v - 1 for v in venues]


def _spotlight_spec(cfg: ExperimentConfig, spec: GameSpec, venue: int, ratio: Optional[float] = None,
                    floor: Any = "config") -> SpotlightSpec:
    sc = cfg.spotlight
    omega = 1.0 / (sc.ratio if ratio is None else ratio)
    if sc.high_only:
        return high_only(spec, venue, omega, sc.p, sc.r_high)
    return solve_selection_scale(spec, venue, omega, sc.p, floor=sc.floor if floor == "config" else floor)


def check_game(spec: GameSpec) -> dict:
    """Validation report; structural model violations are configuration errors."""
    report = validate_game(spec)
    fatal = [v for v in report.violations if v not in ("types not strictly increasing",
                                                        "costs decrease with venue competitiveness")]
    if fatal:
        raise ConfigError("invalid game: " + "; ".join(fatal))
    return report.to_dict()


def replace_g(game: GameConfig, g: float) -> GameSpec:
    return GameConfig(g=g, n_types=game.n_types, n_venues=game.n_venues, alpha=game.alpha, beta=game.beta,
                      budget=game.budget).build()


# --- studies ------------------------------------------------------------------


def run_equilibrate(cfg: ExperimentConfig) -> StudyResult:
    spec = cfg.game.build()
    validation = check_game(spec)
    if cfg.initial is not None and len(cfg.initial) != spec.n_venues:
        raise ConfigError(f"experiment.initial needs {spec.n_venues} values")
    res = _require(equilibrate(spec, cfg.initial, cfg.eps, cfg.max_rounds), "equilibrate")
    out = StudyResult(
        "equilibrate",
        [
            Table("equilibrate", ["venue", "impact"], [[j + 1, v] for j, v in enumerate(res.impacts)]),
            Table("actions", ["type", "venue", "action"],
                  [[i + 1, j + 1, res.actions[i, j]] for i in range(spec.n_types) for j in range(spec.n_venues)]),
        ],
        summary={"rounds": res.rounds, "residual": res.residual, "validation": validation,
                 "total_publications": res.actions.sum(axis=1).tolist()},
        figures=[_venue_figure("equilibrate", "Equilibrium venue impacts", {"equilibrium": res.impacts})],
    )
    return out


def run_binary_root(cfg: ExperimentConfig) -> StudyResult:
    if cfg.game_given:
        spec = cfg.game.build()
        if spec.n_types != 2:
            raise ConfigError(f"binary-root needs a two-type game, got {spec.n_types} types")
        g = BinaryGame.from_spec(spec)
    else:
        g = counterexample_game()
        spec = g.to_spec()
    validation = check_game(spec)
    root = solve_equilibrium_root(g)
    dyn = _require(equilibrate(spec, eps=cfg.eps, max_rounds=cfg.max_rounds), "binary dynamics")
    gap = float(np.abs(root.impacts - dyn.impacts).max())
    out = StudyResult(
        "binary-root",
        [
            Table("binary-root", ["venue", "impact", "impact_dynamics"],
                  [[j + 1, root.impacts[j], dyn.impacts[j]] for j in range(g.n_venues)]),
            Table("actions", ["type", "venue", "action"],
                  [[t, j + 1, root.actions[i, j]] for i, t in enumerate(("low", "high")) for j in range(g.n_venues)]),
        ],
        summary={"root": root.to_dict(), "solver_gap": gap, "validation": validation,
                 "total_publications": root.actions.sum(axis=1).tolist()},
        figures=[_venue_figure("binary-root", "Binary equilibrium impacts",
                               {"root": root.impacts, "dynamics": dyn.impacts})],
    )
    tol = max(10 * cfg.eps, 1e-6)
    if gap > tol:
        out.violate("solver agreement", f"root and dynamics impacts differ by {gap:.3g} > {tol:.3g}")
    if len(root.roots) > 1:
        out.notes.append(f"cost assumptions fail and the characteristic function has {len(root.roots)} roots")
    return out


def _threshold_rows(baseline: np.ndarray, scenarios) -> List[list]:
    rows = [["baseline", j + 1, v, v, v] for j, v in enumerate(baseline)]
    for s in scenarios:
        label = f"spotlight_venue_{s.spotlight.venue + 1}"
        rows += [[label, j + 1, s.impacts[j], s.overall_impacts[j], baseline[j]] for j in range(len(baseline))]
    return rows


THRESHOLD_COLUMNS = ["scenario", "venue", "regular_impact", "overall_impact", "baseline_impact"]


def run_spotlight(cfg: ExperimentConfig) -> StudyResult:
    spec = cfg.game.build()
    validation = check_game(spec)
    venue = (cfg.spotlight.venue or spec.n_venues) - 1
    if venue >= spec.n_venues:
        raise ConfigError(f"spotlight.venue {venue + 1} exceeds the {spec.n_venues} venues of the game")
    sp = _spotlight_spec(cfg, spec, venue)
    base = _require(equilibrate(spec, cfg.initial, cfg.eps, cfg.max_rounds), "baseline")
    eq = equilibrate_spotlight(spec, sp, cfg.initial, cfg.eps, cfg.max_rounds)
    _require(eq.result, "spotlight")
    out = StudyResult(
        "spotlight",
        [Table("spotlight", THRESHOLD_COLUMNS, _threshold_rows(base.impacts, [eq]))],
        summary={"spotlight": eq.to_dict(), "baseline": base.impacts.tolist(), "validation": validation},
        figures=[_venue_figure("spotlight", "Regular impacts with one spotlighted venue",
                               {"baseline": base.impacts, f"spotlight venue {venue + 1}": eq.impacts})],
    )
    if sp.gamma_le_one:
        out.notes.append(f"labeling effect {sp.gamma:.6g} is not above 1")
    if not eq.spotlight_impact > eq.impacts[venue]:
        out.violate("spotlight quality",
                    f"spotlight impact {eq.spotlight_impact:.6g} not above regular impact {eq.impacts[venue]:.6g}")
    return out


def run_convergence_study(cfg: ExperimentConfig) -> StudyResult:
    spec = cfg.game.build()
    check_game(spec)
    starts = sample_starts(spec, cfg.n_starts, np.random.default_rng(cfg.seed))
    runs = multi_start(spec, starts, cfg.eps, cfg.max_rounds, workers=cfg.workers)
    rows = [[i + 1, cfg.seed, r.rounds, r.residual, r.converged] for i, r in enumerate(runs)]
    rounds = [r.rounds for r in runs]
    hist = {str(t): rounds.count(t) for t in sorted(set(rounds))}
    out = StudyResult(
        "convergence",
        [Table("convergence", ["start_id", "seed", "rounds", "residual", "converged"], rows)],
        summary={"histogram": hist, "max_rounds_used": max(rounds), "converged": sum(r.converged for r in runs),
                 "n_starts": len(runs), "round_bound": cfg.round_bound},
        figures=[Figure("convergence", "Rounds before convergence", "rounds", "starts",
                        [Series("starts", [float(k) for k in hist], [float(v) for v in hist.values()])])],
    )
    for i, r in enumerate(runs):
        if not r.converged:
            out.violate("convergence", f"start {i + 1} did not converge in {cfg.max_rounds} rounds")
        elif r.rounds > cfg.round_bound:
            out.violate("round bound", f"start {i + 1} took {r.rounds} rounds > {cfg.round_bound}")
    return out


def max_pairwise_distance(points) -> float:
    x = np.asarray(points, dtype=float)
    if len(x) < 2:
        return 0.0
    return float(max(np.linalg.norm(x[a] - x[b]) for a, b in combinations(range(len(x)), 2)))


def run_uniqueness_study(cfg: ExperimentConfig) -> StudyResult:
    spec = cfg.game.build()
    check_game(spec)
    if cfg.n_starts < 2:
        raise ConfigError("uniqueness needs at least two starts")
    starts = sample_starts(spec, cfg.n_starts, np.random.default_rng(cfg.seed))
    scenarios: List[tuple] = [("baseline", None)]
    if cfg.spotlight_each_venue:
        scenarios += [(f"spotlight_venue_{j + 1}", _spotlight_spec(cfg, spec, j)) for j in _venues(cfg, spec)]
    binary = BinaryGame.from_spec(spec) if spec.n_types == 2 else None

    out = StudyResult("uniqueness", [])
    cols = ["scenario", "start_id", "seed", "converged", "distance_to_first"] + [
        f"impact_{j + 1}" for j in range(spec.n_venues)
    ]
    rows, distances = [], {}
    for name, sp in scenarios:
        spot = None if sp is None else spotlight_weights(spec, sp)
        runs = multi_start(spec, starts, cfg.eps, cfg.max_rounds, spot=spot, workers=cfg.workers)
        impacts = np.array([r.impacts for r in runs])
        for i, r in enumerate(runs):
            rows.append([name, i + 1, cfg.seed, r.converged, float(np.linalg.norm(impacts[i] - impacts[0]))]
                        + list(r.impacts))
            if not r.converged:
                out.violate("convergence", f"{name}: start {i + 1} did not converge")
        d = max_pairwise_distance(impacts)
        distances[name] = d
        if not d < cfg.uniqueness_tol:
            out.violate("uniqueness", f"{name}: max pairwise distance {d:.3g} >= {cfg.uniqueness_tol:g}")
        if binary is not None:
            ref = solve_equilibrium_root(binary).impacts if sp is None else solve_spotlight_root(binary, sp).impacts
            gap = float(np.linalg.norm(impacts - ref, axis=1).max())
            distances[name + "_vs_root"] = gap
            if not gap < cfg.uniqueness_tol:
                out.violate("uniqueness", f"{name}: distance to root solution {gap:.3g}")
    out.tables.append(Table("uniqueness", cols, rows))
    out.summary = {"max_pairwise_distance": distances, "tolerance": cfg.uniqueness_tol, "n_starts": len(starts)}
    return out


def run_cost_sweep(cfg: ExperimentConfig) -> StudyResult:
    if cfg.game.explicit:
        raise ConfigError("cost-sweep varies g and needs the parametric game family")
    g_values = sorted(cfg.g_values)
    impacts = {}
    for g in g_values:
        # the sweep value wins over any g in the game section
        spec = replace_g(cfg.game, g)
        check_game(spec)
        impacts[g] = _require(equilibrate(spec, eps=cfg.eps, max_rounds=cfg.max_rounds), f"g={g}").impacts
    rows = [[g, j + 1, v[j]] for g, v in impacts.items() for j in range(len(v))]
    out = StudyResult(
        "cost-sweep",
        [Table("cost-sweep", ["g", "venue", "impact"], rows)],
        summary={"impacts": {repr(g): v.tolist() for g, v in impacts.items()}},
        figures=[_venue_figure("cost-sweep", "Equilibrium impacts by cost growth rate",
                               {f"g={g:g}": v for g, v in impacts.items()})],
    )
    if cfg.game.z is not None:
        out.notes.append("z is recorded but does not enter the cost family")
    for g, v in impacts.items():
        if not np.all(np.diff(v) > 0):
            out.violate("monotone venues", f"g={g:g}: impacts {v.tolist()} not increasing in venue")
    for lo, hi in zip(g_values, g_values[1:]):
        a, b = impacts[lo], impacts[hi]
        if not b[0] < a[0]:
            out.violate("cost ordering", f"venue 1 impact does not fall from g={lo:g} to g={hi:g}")
        for j in range(1, len(a)):
            if not b[j] > a[j]:
                out.violate("cost ordering", f"venue {j + 1} impact does not rise from g={lo:g} to g={hi:g}")
    return out


def run_spotlight_threshold(cfg: ExperimentConfig) -> StudyResult:
    spec = cfg.game.build(default_g=0.6)
    check_game(spec)
    sc = cfg.spotlight
    if sc.high_only:
        base = _require(equilibrate(spec, eps=cfg.eps, max_rounds=cfg.max_rounds), "baseline")
        scenarios = []
        for j in range(spec.n_venues):
            eq = equilibrate_spotlight(spec, high_only(spec, j, sc.omega, sc.p, sc.r_high), eps=cfg.eps,
                                       max_rounds=cfg.max_rounds)
            scenarios.append(eq)
        report = threshold_report(base.impacts, scenarios, empirical=spec.n_types != 2)
    else:
        report = threshold_venue(spec, sc.omega, sc.p, eps=cfg.eps, max_rounds=cfg.max_rounds, floor=sc.floor)
    for s in report.scenarios:
        _require(s.result, f"spotlight venue {s.spotlight.venue + 1}")
    lines = {"baseline": report.baseline}
    lines.update({f"spotlight venue {s.spotlight.venue + 1}": s.impacts for s in report.scenarios})
    out = StudyResult(
        "spotlight-threshold",
        [Table("spotlight-threshold", THRESHOLD_COLUMNS, _threshold_rows(report.baseline, report.scenarios))],
        summary={
            "j0": None if report.j0 is None else report.j0 + 1,
            "directions": report.directions,
            "dichotomy_holds": report.dichotomy_holds,
            "empirical": report.empirical,
            "predicted": report.predicted,
            "selection_scales": [s.spotlight.selection_scale for s in report.scenarios],
            "gamma": report.scenarios[0].spotlight.gamma,
        },
        figures=[_venue_figure("spotlight-threshold", "Regular impacts with and without spotlight labeling", lines)],
    )
    if sc.high_only:
        for j, d in enumerate(report.directions):
            if d != "decrease":
                out.violate("high-only spotlight", f"venue {j + 1}: regular impacts {d} instead of decrease")
        return out
    if report.j0 is None:
        out.violate("threshold", "no venue lowers every regular impact")
        return out
    for j, d in enumerate(report.directions):
        if j >= report.j0 and d != "decrease":
            out.violate("threshold", f"venue {j + 1} at or above the threshold gives {d}")
        if j < report.j0:
            rises = report.scenarios[j].impacts > report.baseline
            if not rises.any():
                out.violate("threshold", f"venue {j + 1} below the threshold raises no regular impact")
            elif not report.empirical and d != "increase":
                out.violate("threshold", f"venue {j + 1} below the threshold gives {d}")
            elif d != "increase":
                risen = ", ".join(str(i + 1) for i in np.flatnonzero(rises))
                out.notes.append(f"empirical: venue {j + 1} spotlight raises venue(s) {risen} only")
    if report.predicted is not None and report.predicted != report.directions:
        out.violate("sign test", f"predicted {report.predicted} but observed {report.directions}")
    return out


RATIO_COLUMNS = ["spotlight_venue", "ratio", "gamma", "gamma_le_one", "r_below_one", "venue", "regular_impact",
                 "baseline_impact"]


def run_spotlight_ratio_sweep(cfg: ExperimentConfig) -> StudyResult:
    spec = cfg.game.build(default_g=0.4)
    check_game(spec)
    if cfg.spotlight.high_only:
        raise ConfigError("the ratio sweep calibrates the selection rule; high_only is not supported")
    base = _require(equilibrate(spec, eps=cfg.eps, max_rounds=cfg.max_rounds), "baseline").impacts
    ratios = sorted(cfg.ratios)
    rows, figures = [], []
    runs: Dict[int, Dict[float, np.ndarray]] = {}
    flagged: Dict[int, set] = {}
    for j in _venues(cfg, spec):
        runs[j], flagged[j] = {}, set()
        lines = {"baseline": base}
        for ratio in ratios:
            # every ratio is calibrated; rows below the cost floor are flagged, not dropped
            sp = _spotlight_spec(cfg, spec, j, ratio=ratio, floor=None)
            eq = equilibrate_spotlight(spec, sp, eps=cfg.eps, max_rounds=cfg.max_rounds)
            _require(eq.result, f"venue {j + 1} ratio {ratio:g}")
            below = bool(sp.r.min() < 1.0)
            if sp.gamma_le_one:
                flagged[j].add(ratio)
            runs[j][ratio] = eq.impacts
            lines[f"{ratio:.0%}"] = eq.impacts
            rows += [[j + 1, ratio, sp.gamma, sp.gamma_le_one, below, i + 1, eq.impacts[i], base[i]]
                     for i in range(spec.n_venues)]
        figures.append(_venue_figure(f"venue{j + 1}", f"Spotlight at venue {j + 1}", lines))

    out = StudyResult("spotlight-ratio-sweep", [Table("spotlight-ratio-sweep", RATIO_COLUMNS, rows)], figures=figures)
    gaps = {}
    for j, by_ratio in runs.items():
        usable = [r for r in ratios if r not in flagged[j]]
        if flagged[j]:
            out.notes.append(f"venue {j + 1}: ratios {sorted(flagged[j])} have gamma <= 1 and are excluded")
        if len(usable) < 2:
            continue
        low, high = by_ratio[usable[0]], by_ratio[usable[-1]]
        others = [i for i in range(spec.n_venues) if i != j]
        gaps[j + 1] = float(np.abs(high - low)[others].mean())
        if j == 0:
            top = spec.n_venues - 1
            for r in usable[1:]:
                if not by_ratio[usable[0]][top] < by_ratio[r][top]:
                    out.violate("ratio ordering", f"venue 1 spotlight at {usable[0]:g} does not lower venue "
                                f"{top + 1} below the {r:g} run")
            continue
        for a, b in zip(usable, usable[1:]):
            worse = [i + 1 for i in others if not by_ratio[a][i] < by_ratio[b][i]]
            if worse:
                out.violate("ratio ordering", f"venue {j + 1}: ratio {a:g} not below ratio {b:g} at venues {worse}")
    competitive = sorted(v for v in gaps if v > 1)
    for a, b in zip(competitive, competitive[1:]):
        if not gaps[b] > gaps[a]:
            out.violate("gap ordering", f"gap for venue {b} ({gaps[b]:.4g}) not above venue {a} ({gaps[a]:.4g})")
    out.summary = {"baseline": base.tolist(), "gaps": {str(k): v for k, v in gaps.items()},
                   "excluded": {str(j + 1): sorted(f) for j, f in flagged.items()}}
    return out


STUDIES = {
    "equilibrate": run_equilibrate,
    "binary-root": run_binary_root,
    "spotlight": run_spotlight,
    "convergence": run_convergence_study,
    "uniqueness": run_uniqueness_study,
    "cost-sweep": run_cost_sweep,
    "spotlight-threshold": run_spotlight_threshold,
    "spotlight-ratio-sweep": run_spotlight_ratio_sweep,
}
