"""Errors raised by the scattering library.

Invalid input parameters are rejected with
``django.core.exceptions.ValidationError``; the classes below cover failures
of a computation on valid input.
"""


class BogoscatterError(Exception):
    """Base class for computation failures."""


class NonConvergence(BogoscatterError):
    """Adaptive quadrature hit its subdivision cap above tolerance."""

    def __init__(self, value, error, message=''):
        self.value = value
        self.error = error
        super().__init__(
            message or f"Quadrature did not converge: value={value!r}, error estimate={error!r}"
        )


class EmptyRegion(BogoscatterError):
    """alpha_T never exceeds the requested threshold."""


class AboveCritical(BogoscatterError):
    """Temperature at or above the condensation temperature."""

    def __init__(self, temperature, t_c):
        self.temperature = temperature
        self.t_c = t_c
        super().__init__(f"T = {temperature!r} K is not below T_c = {t_c!r} K")


class DegenerateMomenta(BogoscatterError):
    """Momentum configuration too close to a kinematic boundary for the oracle."""


class VerificationFailed(BogoscatterError):
    """A Monte Carlo oracle disagreed with the analytic reduction."""
