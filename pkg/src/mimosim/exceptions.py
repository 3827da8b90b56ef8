"""Exception types shared across the simulator.

The CLI maps these to exit codes: configuration and feasibility problems
exit with 2, numerical failures with 3.
"""


class ConfigurationError(ValueError):
    """Invalid configuration: bad tiling, bad parameter values, unknown keys."""


class FeasibilityError(ConfigurationError):
    """A scheme/deployment/antenna combination that cannot be simulated,
    e.g. per-BS zero-forcing toward more UEs than a BS has antennas."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or hit a rank deficiency.

    Carries optional diagnostic state in :attr:`info`.
    """

    def __init__(self, message: str, info: dict | None = None):
        super().__init__(message)
        self.info = info or {}
