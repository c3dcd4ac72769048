"""Exception hierarchy for levinson-check.

Library code raises these; the command-line harness maps them to exit codes.
"""


class LevinsonError(Exception):
    """Base class for every error raised by this package."""


class PoleError(LevinsonError):
    """Argument lies within tolerance of a Gamma-function pole."""


class DivergentLimitError(LevinsonError):
    """A power (x²/4)^m was requested at x = 0 with Re(m) < 0."""


class InvalidParameterError(LevinsonError):
    """Model parameters outside the admissible range |Re(m)| ∈ (0, 1)."""


class ExceptionalPairError(LevinsonError):
    """Parameters sit within the margin of an exceptional pair."""


class ShootingError(LevinsonError):
    """The ODE shooting oracle could not produce a residual."""


class IntegrationError(ShootingError):
    """The ODE integrator reported failure."""


class FitConditioningError(ShootingError):
    """The small-x least-squares fit is too ill-conditioned to trust."""


class RefinementExhaustedError(LevinsonError):
    """Adaptive bisection hit its depth limit before the phase steps settled."""


class IntegralityError(LevinsonError):
    """A closed-loop winding number is not close to an integer."""


class SeriesWindowError(LevinsonError):
    """A Bessel argument falls outside the supported evaluation window."""


class ConfigError(LevinsonError):
    """Invalid command-line or sweep configuration."""
