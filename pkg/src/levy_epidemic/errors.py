"""Exception hierarchy shared across the package."""


class LevyEpidemicError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(LevyEpidemicError):
    """Raised for unreadable, malformed, or schema-violating configuration."""


class ConditionNotApplicableError(LevyEpidemicError):
    """Raised when a stability condition's hypotheses do not apply.

    The message names the evaluator that covers the rejected case.
    """


class InfeasibleConstantsError(LevyEpidemicError):
    """Raised when no feasible Lyapunov constants exist for the parameters."""


class NumericalFailureError(LevyEpidemicError):
    """Raised when a linear solve or iteration fails numerically.

    Attributes:
        condition_estimate: Estimated condition number of the offending
            system, or ``inf`` when the system is exactly singular.
    """

    def __init__(self, message: str, condition_estimate: float = float("inf")):
        super().__init__(message)
        self.condition_estimate = condition_estimate
