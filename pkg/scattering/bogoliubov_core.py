"""
Closed-form Bogoliubov quasi-particle functions in scaled units.

Energies are in units of k_B T and momenta are scaled so that the mass and
hbar drop out entirely: the dispersion reads

    E(p) = sqrt((p^2 + nbar)^2 - nbar^2)

with nbar = g n_c / k_B T. Every function below depends only on (E, nbar)
and accepts floats or numpy arrays.

Limit values at E = 0 are fixed explicitly (u^2 = 1/2, chi = 0, mu = 1/2)
instead of being left to floating-point division.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from django.db.models import TextChoices

logger = logging.getLogger(__name__)

# Upper end of the dilute-gas regime in which the quasi-particle kernels apply.
DILUTE_NBAR_LIMIT = 0.1


class KernelForm(TextChoices):
    AS_PRINTED = 'as-printed', 'Kernels exactly as printed'
    SYMMETRIZED = 'symmetrized', 'Amplitude averaged over the exchange group'


class DosForm(TextChoices):
    DERIVED = 'derived', 'rho ~ p^2 dp/dE of the Bogoliubov dispersion'
    AS_PRINTED = 'as-printed', 'Density of states as printed'


@dataclass(frozen=True)
class CondensateScale:
    """The scaled condensate density nbar = g n_c / k_B T."""

    nbar: float

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ValueError(f"nbar must be non-negative, got {self.nbar!r}")
        if self.nbar > DILUTE_NBAR_LIMIT:
            logger.warning(
                "nbar = %g is outside the dilute-gas regime (nbar <= %g)",
                self.nbar, DILUTE_NBAR_LIMIT,
            )

    @property
    def outside_dilute_regime(self):
        return self.nbar > DILUTE_NBAR_LIMIT

    def __float__(self):
        return float(self.nbar)


class CoherenceFactors(NamedTuple):
    u: object
    v: object


@dataclass(frozen=True)
class PrefactorConstants:
    """
    Absolute collision prefactors.

    gamma multiplies the NN operator Q, xi the NC operator W. Both cancel in
    every ratio of collision integrals; they only set the units of the
    condensate growth rate.
    """

    gamma: float
    xi: float
    gamma_description: str = '8 a0^2 / ((2 pi)^3 hbar^3 m^2)'
    xi_description: str = '8 a0^2 n_c / m^2'

    @classmethod
    def from_physical(cls, a0, mass, n_c, hbar):
        gamma = 8.0 * a0**2 / ((2.0 * np.pi) ** 3 * hbar**3 * mass**2)
        xi = 8.0 * a0**2 * n_c / mass**2
        return cls(gamma=gamma, xi=xi)

    @classmethod
    def scaled(cls, a0, mass, nbar, hbar):
        """Prefactors after the kT scaling: xi -> 8 a0 nbar / (m 4 pi hbar^2)."""
        gamma = 8.0 * a0**2 / ((2.0 * np.pi) ** 3 * hbar**3 * mass**2)
        xi = 8.0 * a0 * nbar / (mass * 4.0 * np.pi * hbar**2)
        return cls(
            gamma=gamma,
            xi=xi,
            xi_description='8 a0 nbar / (m 4 pi hbar^2)',
        )


def _nbar(n):
    return float(n.nbar) if isinstance(n, CondensateScale) else float(n)


def _ratio(e, nbar):
    """E / sqrt(E^2 + nbar^2), set to 0 where both vanish."""
    e = np.asarray(e, dtype=float)
    denom = np.hypot(e, nbar)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(denom > 0.0, e / denom, 0.0)


def _as_result(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def dispersion(p, n):
    """Quasi-particle energy for scaled momentum p; p * sqrt(p^2 + 2 nbar)."""
    nbar = _nbar(n)
    p = np.asarray(p, dtype=float)
    return _as_result(p * np.sqrt(p * p + 2.0 * nbar))


def inverse_dispersion(e, n):
    """Scaled momentum of a quasi-particle of energy e."""
    nbar = _nbar(n)
    e = np.asarray(e, dtype=float)
    # sqrt(E^2 + nbar^2) - nbar without the cancellation at E << nbar
    root = np.hypot(e, nbar)
    with np.errstate(divide='ignore', invalid='ignore'):
        p2 = np.where(root > 0.0, e * e / (root + nbar), 0.0)
    return _as_result(np.sqrt(p2))


def coherence_factors(e, n):
    """
    Coherence factors with u^2 = 1/2 + E / (2 sqrt(E^2 + nbar^2)) and
    v = sqrt(1 - u^2), so that u^2 + v^2 = 1.
    """
    nbar = _nbar(n)
    ratio = _ratio(e, nbar)
    u2 = 0.5 + 0.5 * ratio
    v2 = 0.5 - 0.5 * ratio
    return CoherenceFactors(_as_result(np.sqrt(u2)), _as_result(np.sqrt(np.maximum(v2, 0.0))))


def particle_weight(e, e0):
    """
    Particle content mu = 1/2 + 1/(2 sqrt(1 + (E0/E)^2)) of a quasi-particle.

    mu -> 1/2 deep in the phonon regime and mu = 1 without a condensate.
    """
    e = np.asarray(e, dtype=float)
    e0 = np.broadcast_to(np.asarray(e0, dtype=float), e.shape)
    mu = 0.5 + 0.5 * _ratio(e, e0)
    mu = np.where(e0 == 0.0, 1.0, mu)
    return _as_result(mu)


def chi_weight(e, n):
    """Density-of-states weight 1/sqrt(1 + (nbar/E)^2); 0 at E = 0."""
    nbar = _nbar(n)
    e = np.asarray(e, dtype=float)
    if nbar == 0.0:
        return _as_result(np.where(e > 0.0, 1.0, 0.0))
    return _as_result(_ratio(e, nbar))


def bose_einstein(e):
    """Bose-Einstein occupation with zero chemical potential. Pole at e = 0."""
    return _as_result(1.0 / np.expm1(np.asarray(e, dtype=float)))


def dos_shape(e, n, form=DosForm.DERIVED):
    """
    Quasi-particle density of states with the constant prefactor dropped.

    DERIVED follows from rho ~ p^2 dp/dE and tends to sqrt(E) without a
    condensate; AS_PRINTED is the literal printed expression, which tends to
    nbar / sqrt(2 E) at E >> nbar.
    """
    nbar = _nbar(n)
    e = np.asarray(e, dtype=float)
    if form == DosForm.DERIVED:
        return _as_result(inverse_dispersion(e, nbar) * chi_weight(e, nbar))
    if form == DosForm.AS_PRINTED:
        if nbar <= 0.0:
            raise ValueError("The printed density of states needs nbar > 0")
        x = e / nbar
        # sqrt(x^2 + 1) - x written as 1 / (sqrt(x^2 + 1) + x)
        gap = 1.0 / (np.hypot(x, 1.0) + x)
        return _as_result(e / np.sqrt(nbar) * np.sqrt(gap / (1.0 + x * x)))
    raise ValueError(f"Unknown density-of-states form {form!r}")


# -----------------------------------------------------------------------------
# Scattering kernels
# -----------------------------------------------------------------------------

def _t_amplitude(u, v, a, b, c, d):
    return (
        u[a] * u[b] * u[c] * u[d]
        + v[a] * u[b] * u[c] * u[d]
        + v[a] * u[b] * u[c] * v[d]
        + v[a] * v[b] * v[c] * u[d]
        + u[a] * v[b] * v[c] * v[d]
    )


def _s_amplitude(u, v, a, b, c):
    return (
        u[a] * u[b] * u[c]
        + v[a] * v[b] * v[c]
        + u[a] * v[b] * v[c]
        + v[a] * u[b] * v[c]
        - u[a] * v[b] * u[c]
        - v[a] * u[b] * u[c]
    )


# Exchange group of the 2 <-> 2 process: 1<->2, 3<->4 and in <-> out.
_T_EXCHANGES = (
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
)
# 1 <-> 2 + 3: exchange of the two partners.
_S_EXCHANGES = ((0, 1, 2), (0, 2, 1))


def _factors(energies, nbar):
    pairs = [coherence_factors(e, nbar) for e in energies]
    return [pair.u for pair in pairs], [pair.v for pair in pairs]


def kernel_T(e1, e2, e3, e4, n, form=KernelForm.AS_PRINTED):
    """NN scattering kernel T(E1, E2, E3, E4)."""
    u, v = _factors((e1, e2, e3, e4), _nbar(n))
    if form == KernelForm.AS_PRINTED:
        amplitude = _t_amplitude(u, v, 0, 1, 2, 3)
    elif form == KernelForm.SYMMETRIZED:
        amplitude = sum(_t_amplitude(u, v, *g) for g in _T_EXCHANGES) / len(_T_EXCHANGES)
    else:
        raise ValueError(f"Unknown kernel form {form!r}")
    return _as_result(np.square(amplitude))


def kernel_S(e1, e2, e3, n, form=KernelForm.AS_PRINTED):
    """NC scattering kernel S(E1, E2, E3)."""
    u, v = _factors((e1, e2, e3), _nbar(n))
    if form == KernelForm.AS_PRINTED:
        amplitude = _s_amplitude(u, v, 0, 1, 2)
    elif form == KernelForm.SYMMETRIZED:
        amplitude = sum(_s_amplitude(u, v, *g) for g in _S_EXCHANGES) / len(_S_EXCHANGES)
    else:
        raise ValueError(f"Unknown kernel form {form!r}")
    return _as_result(np.square(amplitude))


def momentum_window(p1, p2, p3, p4):
    """
    Length of the interval of momentum transfers allowed by the triangles
    (p1, p3, q) and (p2, p4, q); negative when no transfer fits both.
    """
    upper = np.minimum(np.add(p1, p3), np.add(p2, p4))
    lower = np.maximum(np.abs(np.subtract(p1, p3)), np.abs(np.subtract(p2, p4)))
    return upper - lower


def zeta(e1, e2, e3, e4, n):
    """
    Momentum-window factor of the isotropic NN operator.

    The window is clamped at zero (no momentum-conserving configuration)
    before it is multiplied by the chi weights of E2, E3 and E4.
    """
    nbar = _nbar(n)
    p1, p2, p3, p4 = (inverse_dispersion(e, nbar) for e in (e1, e2, e3, e4))
    window = np.maximum(momentum_window(p1, p2, p3, p4), 0.0)
    weights = chi_weight(e2, nbar) * chi_weight(e3, nbar) * chi_weight(e4, nbar)
    return _as_result(window * weights)
