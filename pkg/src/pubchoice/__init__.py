"""Best responses, impact equilibria and spotlight labeling in publication choice games."""

__version__ = "0.1.0"

from ._backend import NAME as backend  # noqa: E402
from .best_response import best_response, best_response_all, oracle_best_response, utility  # noqa: E402
from .binary import BinaryGame, characteristic, solve_equilibrium_root  # noqa: E402
from .dynamics import EquilibriumResult, check_eps_nash, equilibrate, step, update_impacts  # noqa: E402
from .model import GameSpec, validate_game  # noqa: E402
from .spotlight import SpotlightSpec, equilibrate_spotlight, solve_selection_scale, threshold_venue  # noqa: E402

__all__ = [
    "BinaryGame",
    "EquilibriumResult",
    "GameSpec",
    "SpotlightSpec",
    "backend",
    "best_response",
    "best_response_all",
    "characteristic",
    "check_eps_nash",
    "equilibrate",
    "equilibrate_spotlight",
    "oracle_best_response",
    "solve_equilibrium_root",
    "solve_selection_scale",
    "step",
    "threshold_venue",
    "update_impacts",
    "utility",
    "validate_game",
]
