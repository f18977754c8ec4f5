"""
Laboratory parameters -> scaled condensate density.

All inputs are SI (kg, m, m^-3, K). Densities are commonly quoted per nm^3;
use ``per_nm3`` / ``to_per_nm3`` at the boundary.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from django.core.exceptions import ValidationError
from scipy import constants
from scipy.special import zeta

from .bogoliubov_core import CondensateScale, particle_weight
from .exceptions import AboveCritical

logger = logging.getLogger(__name__)

HBAR = constants.hbar
K_B = constants.k
ELECTRON_MASS = constants.m_e
ATOMIC_MASS = constants.atomic_mass
NM = constants.nano

# zeta(3/2) = 2.612..., the ideal-gas condensation constant
ZETA_3_2 = float(zeta(1.5))

# 2 zeta(3/2)^(2/3), rounded
ROUNDED_COEFFICIENT = 3.79

DILUTENESS_WARNING = 1e-2

# Printed scaled densities the presets are compared with
TABLE1_PRINTED = {
    'o-Ps (low density)': 1e-3,
    'o-Ps (high density)': 4e-2,
    '87Rb': 1.7e-2,
    '23Na': 1.4e-2,
}


def per_nm3(density_nm3):
    """nm^-3 -> m^-3."""
    return density_nm3 / NM**3


def to_per_nm3(density_m3):
    """m^-3 -> nm^-3."""
    return density_m3 * NM**3


def critical_temperature(n, mass):
    """Ideal Bose gas condensation temperature (K) at number density n (m^-3)."""
    if not (n > 0 and mass > 0):
        raise ValueError("density and mass must be positive")
    return 2.0 * np.pi * HBAR**2 / (mass * K_B) * (n / ZETA_3_2) ** (2.0 / 3.0)


class CondensateFraction(NamedTuple):
    value: float
    above_critical: bool


def condensate_fraction(temperature, t_c):
    """n_c / n = 1 - (T / T_c)^(3/2); 0 and flagged above T_c."""
    if temperature < 0 or not t_c > 0:
        raise ValueError("temperature must be non-negative and T_c positive")
    if temperature > t_c:
        return CondensateFraction(0.0, True)
    return CondensateFraction(float(1.0 - (temperature / t_c) ** 1.5), False)


def temperature_for_fraction(fraction, t_c):
    """Temperature at which n_c / n equals ``fraction``."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    return t_c * (1.0 - fraction) ** (2.0 / 3.0)


def interaction_strength(a0, mass):
    """g = 4 pi hbar^2 a0 / m, in J m^3."""
    return 4.0 * np.pi * HBAR**2 * a0 / mass


@dataclass(frozen=True)
class PhysicalSpecies:
    name: str
    mass: float
    a0: float
    density_n: float
    temperature: float

    def __post_init__(self):
        errors = {
            key: f'{key} must be positive.'
            for key in ('mass', 'a0', 'density_n', 'temperature')
            if not getattr(self, key) > 0
        }
        if errors:
            raise ValidationError(errors)
        if self.diluteness >= DILUTENESS_WARNING:
            logger.warning(
                "%s is not a dilute gas: n a0^3 = %.3g", self.name, self.diluteness
            )

    @classmethod
    def at_fraction(cls, name, mass, a0, density_n, fraction=0.5):
        """Species at the temperature where n_c / n = ``fraction``."""
        t_c = critical_temperature(density_n, mass)
        return cls(name, mass, a0, density_n, temperature_for_fraction(fraction, t_c))

    @property
    def diluteness(self):
        return self.density_n * self.a0**3

    @property
    def t_c(self):
        return critical_temperature(self.density_n, self.mass)

    @property
    def temperature_ratio(self):
        return self.temperature / self.t_c

    def as_config(self):
        """Flat key/value form used by run-config files."""
        return {
            'species': self.name,
            'mass_kg': self.mass,
            'a0_nm': self.a0 / NM,
            'density_nm3': to_per_nm3(self.density_n),
            'temperature_k': self.temperature,
        }


def scaled_density(species):
    """
    nbar = g n_c / (k_B T) through the definitional chain.

    Raises AboveCritical when there is no condensate (T >= T_c).
    """
    t_c = species.t_c
    if species.temperature >= t_c:
        raise AboveCritical(species.temperature, t_c)
    fraction = condensate_fraction(species.temperature, t_c).value
    g = interaction_strength(species.a0, species.mass)
    nbar = g * species.density_n * fraction / (K_B * species.temperature)
    return CondensateScale(nbar)


def scaled_density_rounded(species):
    """nbar from the closed form 3.79 (T_c/T - sqrt(T/T_c)) a0 n^(1/3)."""
    t = species.temperature_ratio
    if t >= 1.0:
        return CondensateScale(0.0)
    nbar = ROUNDED_COEFFICIENT * (1.0 / t - np.sqrt(t)) * species.a0 * np.cbrt(species.density_n)
    return CondensateScale(float(nbar))


@dataclass(frozen=True)
class DerivedScales:
    t_c: float
    condensate_fraction: float
    g: float
    e0: float
    nbar: CondensateScale
    nbar_rounded: CondensateScale
    above_critical: bool = False

    def __post_init__(self):
        if not 0.0 <= self.condensate_fraction <= 1.0:
            raise ValidationError({'condensate_fraction': 'must lie in [0, 1].'})
        if not self.t_c > 0:
            raise ValidationError({'t_c': 't_c must be positive.'})

    @property
    def e0_kelvin(self):
        return self.e0 / K_B

    def quasi_particle_weight(self, temperature):
        """Particle content of a quasi-particle at E = k_B T."""
        return particle_weight(K_B * temperature, self.e0)


def derived_scales(species):
    t_c = species.t_c
    fraction = condensate_fraction(species.temperature, t_c)
    g = interaction_strength(species.a0, species.mass)
    try:
        nbar = scaled_density(species)
    except AboveCritical as exc:
        logger.info("%s: %s", species.name, exc)
        nbar = CondensateScale(0.0)
    return DerivedScales(
        t_c=t_c,
        condensate_fraction=fraction.value,
        g=g,
        e0=g * species.density_n * fraction.value,
        nbar=nbar,
        nbar_rounded=scaled_density_rounded(species),
        above_critical=species.temperature >= t_c,
    )


def positronium_mass():
    # binding-energy mass defect ignored
    return 2.0 * ELECTRON_MASS


SPECIES_MASSES = {
    'o-Ps': positronium_mass(),
    '87Rb': 86.909180527 * ATOMIC_MASS,
    '23Na': 22.98976928 * ATOMIC_MASS,
}

SPECIES_A0 = {
    'o-Ps': 0.16 * NM,
    '87Rb': 5.5 * NM,
    '23Na': 4.5 * NM,
}


def species_presets(fraction=0.5):
    """The tabulated species, each at a 50/50 condensate mixture by default."""
    rows = [
        ('o-Ps (low density)', 'o-Ps', 1e-7),
        ('o-Ps (high density)', 'o-Ps', 1e-3),
        ('87Rb', '87Rb', 1e-9),
        ('23Na', '23Na', 1e-9),
    ]
    return [
        PhysicalSpecies.at_fraction(
            name, SPECIES_MASSES[key], SPECIES_A0[key], per_nm3(density), fraction
        )
        for name, key, density in rows
    ]


def preset(name, fraction=0.5):
    """Look up a preset by its label or by species key (o-Ps -> high density)."""
    aliases = {'o-Ps': 'o-Ps (high density)'}
    label = aliases.get(name, name)
    for species in species_presets(fraction):
        if species.name == label:
            return species
    raise KeyError(name)


def custom_species(name, a0_nm, density_nm3, mass=None, fraction=None,
                   temperature=None, temperature_ratio=None):
    """
    Species from laboratory inputs; exactly one of ``fraction``,
    ``temperature`` or ``temperature_ratio`` fixes the temperature.
    """
    mass = SPECIES_MASSES.get(name) if mass is None else mass
    if mass is None:
        raise ValidationError({'mass': f"Unknown species {name!r}; give a mass."})
    density = per_nm3(density_nm3)
    given = [x is not None for x in (fraction, temperature, temperature_ratio)]
    if sum(given) != 1:
        raise ValidationError('Give exactly one of fraction, temperature or temperature ratio.')
    if fraction is not None:
        return PhysicalSpecies.at_fraction(name, mass, a0_nm * NM, density, fraction)
    if temperature_ratio is not None:
        temperature = temperature_ratio * critical_temperature(density, mass)
    return PhysicalSpecies(name, mass, a0_nm * NM, density, temperature)
