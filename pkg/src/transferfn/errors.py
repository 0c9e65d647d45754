"""Exception types shared across the package.

The CLI maps these onto exit codes (usage 2, data 3, numeric 4).
"""


class DomainError(ValueError):
    """An argument fell outside the domain a contract requires."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to converge.

    ``last`` carries the final iterate so callers can inspect it.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class ConfigError(ValueError):
    """A simulation or CLI configuration names something unknown."""
