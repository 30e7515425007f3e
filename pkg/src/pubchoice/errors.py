"""Exception types raised by the solvers and the experiment runner."""


class PubChoiceError(Exception):
    """Base class for all package errors."""


class EmptyVenueError(PubChoiceError, ValueError):
    """A venue received no mass-weighted publications, so its impact is undefined."""


class BracketError(PubChoiceError, RuntimeError):
    """The characteristic function never turned positive inside the search cap."""


class InfeasibleTargetError(PubChoiceError, ValueError):
    """A spotlight fraction cannot be reached under the relative-cost floor."""


class OracleConvergenceError(PubChoiceError, RuntimeError):
    """A numerical best-response oracle hit its iteration cap before meeting the tolerance."""


class ConfigError(PubChoiceError, ValueError):
    """Malformed or unknown entries in an experiment configuration."""


class ConvergenceError(PubChoiceError, RuntimeError):
    """Best-response dynamics exhausted the round limit without meeting the tolerance."""
