"""
Effective scattering lengths from the variational replacement of the
collision kernels by a single function of the incoming energy.

Minimizing the distance between the loss term with the full kernel and the
loss term with a kernel sigma(E1) gives, pointwise in E1,

    sigma(E1) = Q^l[T, f_BE](E1) / Q^l[1, f_BE](E1)

so that alpha_T = sqrt(sigma) for NN collisions, and by analogy
alpha_S = W^l[S, f_BE] / W^l[1, f_BE] for NC collisions. Population
averages weight alpha with the equilibrium density rho(E) f_BE(E).
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import NamedTuple, Optional

import numpy as np
from django.core.exceptions import ValidationError
from django.db.models import TextChoices
from scipy.integrate import trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.optimize import bisect

from .bogoliubov_core import (
    DosForm,
    KernelForm,
    PrefactorConstants,
    bose_einstein,
    dos_shape,
)
from .collision_integrals import (
    DEFAULT_SPEC,
    CollisionParts,
    IsotropicDistribution,
    KernelMode,
    QuadratureSpec,
    integrate_1d,
    integrate_log,
    q_collision,
    w_collision,
)
from .exceptions import EmptyRegion

logger = logging.getLogger(__name__)

SQRT2 = float(np.sqrt(2.0))
# Every T amplitude is at most 3/2, reached at (phonon, free, free, phonon).
# alpha_T is the root of a weighted mean of T, so it stays below that for
# either kernel form. A phonon among free partners gives alpha_T = sqrt(2).
ALPHA_T_CEILING = 1.5
EQUILIBRIUM = IsotropicDistribution.bose_einstein()


class AlphaSMode(TextChoices):
    CONSISTENT = 'consistent', 'chi weights in numerator and denominator'
    AS_PRINTED = 'as-printed', 'Numerator without chi weights, as printed'


def _nbar(n):
    return float(getattr(n, 'nbar', n))


def _require_condensate(nbar):
    if not nbar > 0:
        raise ValueError(f"nbar must be positive, got {nbar!r}")


# =============================================================================
# Pointwise quantities
# =============================================================================

def loss_rates(e1, n, spec=DEFAULT_SPEC, form=KernelForm.AS_PRINTED):
    """
    Per-particle NN loss rates (Q^l[T, f_BE], Q^l[1, f_BE]) / f_BE(E1) at E1.

    The common factor f_BE(E1) cancels in every ratio and is divided out
    analytically.
    """
    nbar = _nbar(n)
    with_t = q_collision(
        e1, EQUILIBRIUM, nbar, KernelMode.full_t(form), CollisionParts.LOSS, spec, per_particle=True,
    )
    with_one = q_collision(
        e1, EQUILIBRIUM, nbar, KernelMode.constant_one(), CollisionParts.LOSS, spec, per_particle=True,
    )
    return with_t, with_one


def variational_sigma(e1, n, kernel=None, spec=DEFAULT_SPEC):
    """
    Best single-function replacement sigma(E1) of an NN kernel.

    ``kernel`` defaults to the full T kernel; a ``KernelMode.of_sigma``
    kernel returns its own sigma (the fixed point of the minimization).
    """
    nbar = _nbar(n)
    kernel = kernel or KernelMode.full_t()
    numerator = q_collision(
        e1, EQUILIBRIUM, nbar, kernel, CollisionParts.LOSS, spec, per_particle=True,
    )
    denominator = q_collision(
        e1, EQUILIBRIUM, nbar, KernelMode.constant_one(), CollisionParts.LOSS, spec, per_particle=True,
    )
    return numerator / denominator


def alpha_T(e1, n, spec=DEFAULT_SPEC, form=KernelForm.AS_PRINTED):
    """Effective NN scattering length a_eff / a0 at energy E1 (positive root)."""
    nbar = _nbar(n)
    _require_condensate(nbar)
    sigma = variational_sigma(e1, nbar, KernelMode.full_t(form), spec)
    return float(np.sqrt(sigma))


def alpha_S(e1, n, mode=AlphaSMode.CONSISTENT, spec=DEFAULT_SPEC, form=KernelForm.AS_PRINTED):
    """
    Effective NC scattering length a_eff / a0 at energy E1.

    In AS_PRINTED mode the numerator drops the chi weights of E2 and E3
    while the denominator keeps them; the numerator then depends on the
    substitution cutoff through its logarithmic end-point divergence.
    """
    nbar = _nbar(n)
    _require_condensate(nbar)
    if mode not in AlphaSMode.values:
        raise ValueError(f"Unknown alpha_S mode {mode!r}")
    numerator = w_collision(
        e1, EQUILIBRIUM, nbar, KernelMode.full_s(form), CollisionParts.LOSS, spec,
        chi_weights=(mode == AlphaSMode.CONSISTENT), per_particle=True,
    )
    denominator = w_collision(
        e1, EQUILIBRIUM, nbar, KernelMode.constant_one(), CollisionParts.LOSS, spec, per_particle=True,
    )
    return numerator / denominator


# =============================================================================
# Curves
# =============================================================================

def energy_grid(nbar, emin_frac=1e-4, emax=1e3, points=200):
    """Log-spaced energies over [emin_frac * nbar, emax]."""
    if points < 2:
        raise ValueError("An energy grid needs at least two points")
    return np.geomspace(emin_frac * nbar, emax, points)


@dataclass(frozen=True)
class AlphaCurve:
    """
    An effective-scattering-length curve on an increasing energy grid.

    Between nodes the curve is interpolated with a monotone cubic in log E;
    outside the grid it is held at the end values.
    """

    quantity: str
    nbar: float
    energies: np.ndarray = field(compare=False)
    alpha: np.ndarray = field(compare=False)
    quad: QuadratureSpec = DEFAULT_SPEC
    kernel_form: str = KernelForm.AS_PRINTED
    dos_form: str = DosForm.DERIVED
    alpha_s_mode: Optional[str] = None

    T = 'alpha_T'
    S = 'alpha_S'

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        alpha = np.asarray(self.alpha, dtype=float)
        if self.quantity not in (self.T, self.S):
            raise ValidationError({'quantity': f"Unknown curve quantity {self.quantity!r}."})
        if energies.ndim != 1 or energies.shape != alpha.shape or energies.size < 2:
            raise ValidationError('energies and alpha must be 1-d arrays of equal length >= 2.')
        if np.any(np.diff(energies) <= 0) or energies[0] <= 0:
            raise ValidationError({'energies': 'energies must be positive and strictly increasing.'})
        if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
            raise ValidationError({'alpha': 'alpha values must be finite and positive.'})
        object.__setattr__(self, 'energies', energies)
        object.__setattr__(self, 'alpha', alpha)

    @property
    def tolerance(self):
        return 10.0 * self.quad.rel_tol

    @property
    def bounds(self):
        if self.quantity == self.T:
            return 1.0 - self.tolerance, ALPHA_T_CEILING + self.tolerance
        return 0.0, 1.0 + self.tolerance

    def out_of_bounds(self):
        """Indices of grid points outside the admissible range."""
        lower, upper = self.bounds
        bad = (self.alpha < lower) | (self.alpha > upper)
        if self.quantity == self.S:
            bad |= self.alpha <= 0.0
        return np.flatnonzero(bad)

    @cached_property
    def _interpolant(self):
        return PchipInterpolator(np.log(self.energies), self.alpha, extrapolate=False)

    def __call__(self, e):
        log_e = np.clip(np.log(np.asarray(e, dtype=float)),
                        np.log(self.energies[0]), np.log(self.energies[-1]))
        value = self._interpolant(log_e)
        return value.item() if value.ndim == 0 else value

    def threshold_crossing(self, threshold):
        """
        Upper end E* of the low-energy region alpha >= threshold.

        None when even the lowest grid point is below the threshold; the top
        of the grid when the curve never drops below it.
        """
        above = self.alpha >= threshold
        if not above[0]:
            return None
        if above.all():
            return float(self.energies[-1])
        i = int(np.argmin(above))
        interpolant = self._interpolant
        lo, hi = np.log(self.energies[i - 1]), np.log(self.energies[i])
        root = bisect(lambda x: float(interpolant(x)) - threshold, lo, hi, xtol=1e-12)
        return float(np.exp(root))

    def argmin_energy(self):
        return float(self.energies[int(np.argmin(self.alpha))])

    def rows(self):
        for e, a in zip(self.energies, self.alpha):
            yield self.nbar, float(e), float(a)


def alpha_T_curve(n, energies, spec=DEFAULT_SPEC, form=KernelForm.AS_PRINTED, mapper=map):
    """alpha_T on ``energies``; ``mapper`` is any ordered map (builtin or a pool's)."""
    nbar = _nbar(n)
    values = list(mapper(partial(alpha_T, n=nbar, spec=spec, form=form), energies))
    return AlphaCurve(AlphaCurve.T, nbar, energies, values, spec, form)


def alpha_S_curve(n, energies, mode=AlphaSMode.CONSISTENT, spec=DEFAULT_SPEC,
                  form=KernelForm.AS_PRINTED, mapper=map):
    nbar = _nbar(n)
    values = list(mapper(partial(alpha_S, n=nbar, mode=mode, spec=spec, form=form), energies))
    return AlphaCurve(AlphaCurve.S, nbar, energies, values, spec, form, alpha_s_mode=mode)


def population_grid(nbar, spec=DEFAULT_SPEC, emin_frac=1e-4, points=48):
    """Grid on which population averages tabulate alpha: [emin_frac * nbar, e_max]."""
    return energy_grid(nbar, emin_frac, spec.e_max, points)


# =============================================================================
# Global sigma
# =============================================================================

def sigma0_from_tables(energies, q_t, q_one, weight):
    """
    Constant sigma minimizing ∫ (Q^l[T] - sigma Q^l[1])^2 weight^2 dE.

    The integrals are trapezoidal in log E, so sigma0 is a positively
    weighted average of Q^l[T]/Q^l[1] over the nodes.
    """
    energies = np.asarray(energies, dtype=float)
    q_t, q_one, weight = (np.asarray(x, dtype=float) for x in (q_t, q_one, weight))
    log_e = np.log(energies)
    numerator = trapezoid(q_t * q_one * weight**2 * energies, log_e)
    denominator = trapezoid((q_one * weight) ** 2 * energies, log_e)
    return float(numerator / denominator)


class LossTable(NamedTuple):
    energies: np.ndarray
    q_t: np.ndarray
    q_one: np.ndarray
    weight: np.ndarray

    @property
    def sigma0(self):
        return sigma0_from_tables(self.energies, self.q_t, self.q_one, self.weight)

    @property
    def alpha_sq(self):
        return self.q_t / self.q_one


def loss_table(n, spec=DEFAULT_SPEC, dos=DosForm.DERIVED, energies=None,
               form=KernelForm.AS_PRINTED, mapper=map):
    """Q^l[T] and Q^l[1] on a log grid with the fit weight; ``dos=None`` is unit weight."""
    nbar = _nbar(n)
    _require_condensate(nbar)
    energies = population_grid(nbar, spec) if energies is None else np.asarray(energies, dtype=float)
    pairs = list(mapper(partial(loss_rates, n=nbar, spec=spec, form=form), energies))
    # back from per-particle rates to the loss terms themselves
    occupation = bose_einstein(energies)
    q_t = occupation * np.array([p[0] for p in pairs])
    q_one = occupation * np.array([p[1] for p in pairs])
    weight = np.ones_like(q_one) if dos is None else dos_shape(energies, nbar, dos)
    return LossTable(energies, q_t, q_one, weight)


def sigma0_T(n, spec=DEFAULT_SPEC, dos=DosForm.DERIVED, energies=None,
             form=KernelForm.AS_PRINTED, mapper=map):
    """Single constant replacing T over all energies at once."""
    table = loss_table(n, spec, dos, energies, form, mapper)
    sigma0 = table.sigma0
    logger.info("sigma0(nbar=%g, dos=%s) = %r over %d energies", _nbar(n), dos, sigma0, len(table.energies))
    return sigma0


# =============================================================================
# Population averages
# =============================================================================

def _occupied_states(nbar, dos):
    def weight(e):
        return dos_shape(e, nbar, dos) * bose_einstein(e)
    return weight


def gas_population(n, upper=None, dos=DosForm.DERIVED, spec=DEFAULT_SPEC, alpha=None):
    """∫_0^upper alpha(E) rho(E) f_BE(E) dE, alpha = 1 by default; upper defaults to e_max."""
    nbar = _nbar(n)
    upper = spec.e_max if upper is None else min(upper, spec.e_max)
    occupied = _occupied_states(nbar, dos)
    integrand = occupied if alpha is None else (lambda e: alpha(e) * occupied(e))
    split = min(spec.split_for(nbar), upper)
    low = integrate_log(integrand, 0.0, split, spec)
    if upper <= split:
        return low.value
    points = (nbar,) if alpha is None else tuple(alpha.energies)
    return low.value + integrate_1d(integrand, split, upper, spec, points=points).value


def _check_threshold(threshold):
    if not threshold > 1:
        raise ValidationError({'threshold': 'threshold must exceed 1.'})


def _t_curve(nbar, spec, form, curve):
    return curve if curve is not None else alpha_T_curve(nbar, population_grid(nbar, spec), spec, form)


def low_energy_fraction(n, threshold=1.05, dos=DosForm.DERIVED, spec=DEFAULT_SPEC,
                        form=KernelForm.AS_PRINTED, curve=None):
    """
    Fraction of the non-condensed bosons whose alpha_T exceeds ``threshold``.

    The region is [0, E*) with E* located by bisection on the tabulated
    curve; zero when alpha_T never reaches the threshold.
    """
    nbar = _nbar(n)
    _require_condensate(nbar)
    _check_threshold(threshold)
    curve = _t_curve(nbar, spec, form, curve)
    e_star = curve.threshold_crossing(threshold)
    if e_star is None:
        return 0.0
    fraction = gas_population(nbar, e_star, dos, spec) / gas_population(nbar, None, dos, spec)
    return float(min(max(fraction, 0.0), 1.0))


def mean_alpha_low(n, threshold=1.05, dos=DosForm.DERIVED, spec=DEFAULT_SPEC,
                   form=KernelForm.AS_PRINTED, curve=None):
    """a_eff,l / a0: alpha_T averaged over the bosons with alpha_T above ``threshold``."""
    nbar = _nbar(n)
    _require_condensate(nbar)
    _check_threshold(threshold)
    curve = _t_curve(nbar, spec, form, curve)
    e_star = curve.threshold_crossing(threshold)
    if e_star is None:
        raise EmptyRegion(f"alpha_T never exceeds {threshold} at nbar={nbar}")
    weighted = gas_population(nbar, e_star, dos, spec, alpha=curve)
    return weighted / gas_population(nbar, e_star, dos, spec)


def mean_alpha_T(n, dos=DosForm.DERIVED, spec=DEFAULT_SPEC, form=KernelForm.AS_PRINTED, curve=None):
    nbar = _nbar(n)
    _require_condensate(nbar)
    curve = _t_curve(nbar, spec, form, curve)
    return gas_population(nbar, None, dos, spec, alpha=curve) / gas_population(nbar, None, dos, spec)


def mean_alpha_S(n, dos=DosForm.DERIVED, spec=DEFAULT_SPEC, mode=AlphaSMode.CONSISTENT,
                 form=KernelForm.AS_PRINTED, curve=None):
    """alpha_S averaged over the whole non-condensed population."""
    nbar = _nbar(n)
    _require_condensate(nbar)
    if curve is None:
        curve = alpha_S_curve(nbar, population_grid(nbar, spec), mode, spec, form)
    return gas_population(nbar, None, dos, spec, alpha=curve) / gas_population(nbar, None, dos, spec)


@dataclass(frozen=True)
class PopulationReport:
    nbar: float
    threshold: float
    n_l: float
    a_eff_l_over_a0: Optional[float]
    mean_alpha_T: float
    mean_alpha_S: float
    dos_form: str

    def __post_init__(self):
        if not 0.0 <= self.n_l <= 1.0:
            raise ValidationError({'n_l': 'n_l must lie in [0, 1].'})

    def as_row(self):
        a_eff = '' if self.a_eff_l_over_a0 is None else self.a_eff_l_over_a0
        return [self.nbar, self.n_l, a_eff, self.mean_alpha_T, self.mean_alpha_S, self.dos_form]


def population_report(n, t_curve, s_curve, threshold=1.05, dos=DosForm.DERIVED, spec=DEFAULT_SPEC):
    """All population quantities of one nbar from precomputed alpha curves."""
    nbar = _nbar(n)
    n_l = low_energy_fraction(nbar, threshold, dos, spec, curve=t_curve)
    try:
        a_eff = mean_alpha_low(nbar, threshold, dos, spec, curve=t_curve)
    except EmptyRegion:
        a_eff = None
    return PopulationReport(
        nbar=nbar,
        threshold=threshold,
        n_l=n_l,
        a_eff_l_over_a0=a_eff,
        mean_alpha_T=mean_alpha_T(nbar, dos, spec, curve=t_curve),
        mean_alpha_S=mean_alpha_S(nbar, dos, spec, curve=s_curve),
        dos_form=dos,
    )


# =============================================================================
# Condensate growth
# =============================================================================

class GrowthRate(NamedTuple):
    rate: float
    prefactors: Optional[PrefactorConstants]


def condensate_growth_rate(f, n, spec=DEFAULT_SPEC, form=KernelForm.AS_PRINTED, prefactors=None):
    """
    dn_c/dt = -2 ∫ W[S, f](p1) d^3p1 in scaled units.

    The momentum shell is d^3p = 4 pi p^2 dp = 2 pi rho(E) dE with rho the
    derived density of states; the absolute scale (xi and 1/hbar) is carried
    by ``prefactors`` when given. Positive when the condensate grows.
    """
    nbar = _nbar(n)
    _require_condensate(nbar)
    if f.kind == 'vacuum':
        return GrowthRate(0.0, prefactors)
    kernel = KernelMode.full_s(form)

    def shell(e1):
        w = w_collision(e1, f, nbar, kernel, CollisionParts.BOTH, spec)
        return w * 2.0 * np.pi * dos_shape(e1, nbar, DosForm.DERIVED)

    split = spec.split_for(nbar)
    total = integrate_log(shell, 0.0, split, spec).value
    total += integrate_1d(shell, split, spec.e_max, spec, points=(nbar,)).value
    rate = -2.0 * total
    logger.info("Condensate growth rate at nbar=%g (%s): %r", nbar, f.kind, rate)
    return GrowthRate(rate, prefactors)
