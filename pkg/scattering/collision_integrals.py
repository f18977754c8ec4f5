"""
Isotropic Boltzmann collision operators of the condensed Bose gas.

Q is the NN operator (two non-condensed quasi-particles in, two out), W the
NC operator (one quasi-particle exchanged with the condensate). Both are
evaluated after the delta functions have been eliminated analytically:

    Q(E1) = 1/p1 ∫0^∞ dE2 ∫0^{E1+E2} dE3 [gain - loss] K zeta,  E4 = E1+E2-E3
    W(E1) = 1/p1 ∫ dE2 [gain - loss] S chi2 chi3 (theta + 1)

with W = W+ (E3 = E1 + E2, weight 2) + W- (E3 = E1 - E2, weight 1). The
absolute prefactors gamma and xi are left out; see PrefactorConstants.

The integrable singularities at vanishing energies are resolved by variable
substitutions: logarithmic below ``QuadratureSpec.log_split`` on half-open
ranges, logistic on bounded ranges whose both ends can be singular.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from django.core.exceptions import ValidationError
from django.db.models import TextChoices
from scipy import integrate
from scipy.special import expit

from .bogoliubov_core import (
    KernelForm,
    bose_einstein,
    chi_weight,
    inverse_dispersion,
    kernel_S,
    kernel_T,
    zeta,
)
from .exceptions import NonConvergence

logger = logging.getLogger(__name__)


# =============================================================================
# Quadrature
# =============================================================================

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances, truncations and substitution settings for all integrals."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    # semi-infinite energy integrals are cut here (units of k_B T)
    e_max: float = 40.0
    max_subdivisions: int = 200
    # below this energy a logarithmic substitution is used; None -> min(nbar, 1)/100
    log_split: Optional[float] = None
    # e-folds covered by the logarithmic and logistic substitutions
    cutoff_span: float = 50.0

    def __post_init__(self):
        errors = {}
        if not self.rel_tol > 0:
            errors['rel_tol'] = 'rel_tol must be positive.'
        if not self.abs_tol >= 0:
            errors['abs_tol'] = 'abs_tol must be non-negative.'
        if not self.e_max >= 20:
            errors['e_max'] = 'e_max must be at least 20 (k_B T units).'
        if self.max_subdivisions < 1:
            errors['max_subdivisions'] = 'max_subdivisions must be at least 1.'
        if self.log_split is not None and not self.log_split > 0:
            errors['log_split'] = 'log_split must be positive.'
        if not self.cutoff_span > 0:
            errors['cutoff_span'] = 'cutoff_span must be positive.'
        if errors:
            raise ValidationError(errors)

    def split_for(self, nbar):
        if self.log_split is not None:
            return self.log_split
        return min(nbar, 1.0) / 100.0 if nbar > 0 else 1e-2

    def with_rel_tol(self, rel_tol):
        return replace(self, rel_tol=rel_tol)

    def tolerance(self, value):
        return max(self.rel_tol * abs(value), self.abs_tol)

    def as_config(self):
        return {
            'rel_tol': self.rel_tol,
            'abs_tol': self.abs_tol,
            'e_max': self.e_max,
            'max_subdivisions': self.max_subdivisions,
            'log_split': self.log_split,
            'cutoff_span': self.cutoff_span,
        }


DEFAULT_SPEC = QuadratureSpec()


class QuadResult(NamedTuple):
    value: float
    error: float


def integrate_1d(integrand, a, b, spec=DEFAULT_SPEC, points=None, strict=True,
                 log_level=logging.WARNING):
    """
    Adaptive Gauss-Kronrod quadrature of ``integrand`` over [a, b].

    ``b`` may be ``np.inf``. Endpoint singularities up to E^-1/2 are handled
    by the extrapolating QAGS/QAGI routines. When the subdivision cap is hit
    with the error estimate above tolerance, NonConvergence is raised
    (``strict``) or the estimate is returned with its error and the QUADPACK
    message is logged at ``log_level``.
    """
    kwargs = {
        'epsabs': spec.abs_tol,
        'epsrel': spec.rel_tol,
        'limit': spec.max_subdivisions,
        'full_output': 1,
    }
    if points is not None and np.isfinite(b):
        inside = sorted({float(p) for p in points if a < p < b})
        # QUADPACK needs fewer break points than subintervals
        keep = spec.max_subdivisions - 1
        if len(inside) > keep:
            inside = [inside[i] for i in np.linspace(0, len(inside) - 1, keep).astype(int)] if keep else []
        if inside:
            kwargs['points'] = inside
    out = integrate.quad(integrand, a, b, **kwargs)
    value, error = float(out[0]), float(out[1])
    if len(out) > 3 and error > spec.tolerance(value):
        message = out[3]
        # roundoff-limited results (e.g. gain and loss cancelling) are kept
        if strict and message.startswith(_FATAL_QUAD_MESSAGES):
            raise NonConvergence(value, error, f"{message} (value={value!r}, error={error!r})")
        logger.log(log_level, "Tolerated quadrature warning on [%g, %g]: %s", a, b, message)
    return QuadResult(value, error)


_FATAL_QUAD_MESSAGES = (
    'The maximum number of subdivisions',
    'The integral is probably divergent',
)


def integrate_log(integrand, a, b, spec=DEFAULT_SPEC, strict=True):
    """∫_a^b g(E) dE as ∫ g(e^t) e^t dt; a = 0 is cut ``cutoff_span`` e-folds below b."""
    t_lo = np.log(a) if a > 0 else np.log(b) - spec.cutoff_span
    t_hi = np.log(b)

    def transformed(t):
        e = np.exp(t)
        return integrand(e) * e

    return integrate_1d(transformed, t_lo, t_hi, spec, strict=strict)


def integrate_logistic(integrand, lo, hi, spec=DEFAULT_SPEC, points=None, strict=True,
                       log_level=logging.WARNING):
    """
    ∫_lo^hi g(x, hi - x) dx through x = lo + w expit(t), w = hi - lo.

    ``integrand`` receives the distances to both ends separately so that
    neither is lost to cancellation; both ends may carry integrable
    (including logarithmic) singularities.
    """
    width = hi - lo
    span = spec.cutoff_span

    def transformed(t):
        s, sc = expit(t), expit(-t)
        return integrand(lo + width * s, width * sc) * width * s * sc

    t_points = None
    if points is not None:
        t_points = [
            float(np.log((p - lo) / (hi - p))) for p in points if lo < p < hi
        ]
    return integrate_1d(transformed, -span, span, spec, points=t_points, strict=strict,
                        log_level=log_level)


# =============================================================================
# Distributions and kernel selection
# =============================================================================

@dataclass(frozen=True)
class IsotropicDistribution:
    """
    Isotropic occupation f(E).

    ``kind`` is 'bose-einstein' (analytic, optionally scaled), 'vacuum'
    (f = 0) or 'tabulated'. Tabulated values are interpolated log-linearly
    between nodes (linearly where a node is zero), extrapolated as 1/E below
    the grid and with exp(-E) decay above it.
    """

    kind: str
    scale: float = 1.0
    grid: Optional[np.ndarray] = field(default=None, compare=False)
    values: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ('bose-einstein', 'vacuum', 'tabulated'):
            raise ValidationError({'kind': f"Unknown distribution kind {self.kind!r}."})
        if not self.scale >= 0:
            raise ValidationError({'scale': 'scale must be non-negative.'})
        if self.kind == 'tabulated':
            grid = np.asarray(self.grid, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
                raise ValidationError('grid and values must be 1-d arrays of equal length >= 2.')
            if np.any(np.diff(grid) <= 0) or grid[0] <= 0:
                raise ValidationError({'grid': 'grid must be positive and strictly increasing.'})
            if not np.all(np.isfinite(values)) or np.any(values < 0):
                raise ValidationError({'values': 'values must be finite and non-negative.'})
            object.__setattr__(self, 'grid', grid)
            object.__setattr__(self, 'values', values)

    @classmethod
    def bose_einstein(cls, scale=1.0):
        return cls(kind='bose-einstein', scale=scale)

    @classmethod
    def vacuum(cls):
        return cls(kind='vacuum', scale=0.0)

    @classmethod
    def tabulated(cls, grid, values):
        return cls(kind='tabulated', grid=grid, values=values)

    @property
    def is_equilibrium(self):
        return self.kind == 'bose-einstein' and self.scale == 1.0

    def __call__(self, e):
        if self.kind == 'bose-einstein':
            return self.scale * bose_einstein(e)
        if self.kind == 'vacuum':
            return 0.0 * np.asarray(e, dtype=float)
        return self._interpolate(np.asarray(e, dtype=float))

    def one_plus(self, e):
        """1 + f(E); exact 1/(1 - e^-E) for the equilibrium distribution."""
        if self.is_equilibrium:
            return -1.0 / np.expm1(-np.asarray(e, dtype=float))
        return 1.0 + self(e)

    def _interpolate(self, e):
        grid, values = self.grid, self.values
        if np.all(values > 0):
            inside = np.exp(np.interp(e, grid, np.log(values)))
        else:
            inside = np.interp(e, grid, values)
        with np.errstate(divide='ignore', over='ignore'):
            below = values[0] * grid[0] / e
        above = values[-1] * np.exp(-(e - grid[-1]))
        result = np.where(e < grid[0], below, np.where(e > grid[-1], above, inside))
        return result.item() if result.ndim == 0 else result


class CollisionParts(TextChoices):
    GAIN = 'gain', 'Gain (in-scattering) term only'
    LOSS = 'loss', 'Loss (out-scattering) term only'
    BOTH = 'both', 'Gain minus loss'


@dataclass(frozen=True)
class KernelMode:
    """Which kernel multiplies the collision bracket."""

    kind: str
    form: str = KernelForm.AS_PRINTED
    sigma: Optional[Callable] = field(default=None, compare=False)

    FULL_T = 'full-t'
    FULL_S = 'full-s'
    CONSTANT_ONE = 'constant-one'
    SIGMA = 'sigma'

    @classmethod
    def full_t(cls, form=KernelForm.AS_PRINTED):
        return cls(cls.FULL_T, form)

    @classmethod
    def full_s(cls, form=KernelForm.AS_PRINTED):
        return cls(cls.FULL_S, form)

    @classmethod
    def constant_one(cls):
        return cls(cls.CONSTANT_ONE)

    @classmethod
    def of_sigma(cls, sigma):
        """Kernel replaced by a function of E1 alone."""
        return cls(cls.SIGMA, sigma=sigma)


def _bracket(gain, loss, parts):
    if parts == CollisionParts.BOTH:
        return gain - loss
    if parts == CollisionParts.GAIN:
        return gain
    if parts == CollisionParts.LOSS:
        return loss
    raise ValueError(f"Unknown collision parts {parts!r}")


def _has_closed_form(f, parts):
    """
    Gain minus loss of a scaled Bose-Einstein distribution has closed forms.

    With f = s n(E), n = 1/(e^E - 1), one has 1 + f = n (e^E + s - 1), and
    the energy-conserving products reduce without subtracting the gain and
    loss terms:

        1 + 2 -> 3:      g1 g2 f3 - f1 f2 g3 = s (1 - s) n3
        1 + 2 -> 3 + 4:  g1 g2 f3 f4 - f1 f2 g3 g4
                         = s^2 (s - 1) n1 n2 n3 n4 (e^E1 + e^E2 - e^E3 - e^E4)

    Both vanish identically at s = 1.
    """
    return parts == CollisionParts.BOTH and f.kind == 'bose-einstein'


def _nn_bracket(e1, e2, e3, e4, scale):
    if scale == 1.0:
        return 0.0
    imbalance = np.expm1(e1) + np.expm1(e2) - np.expm1(e3) - np.expm1(e4)
    occupation = (bose_einstein(e1) * bose_einstein(e2)) * (bose_einstein(e3) * bose_einstein(e4))
    return scale * scale * (scale - 1.0) * occupation * imbalance


def _nc_bracket(e_out, scale):
    """s (1 - s) n(E_out) for the three-body process ending at ``e_out``."""
    return scale * (1.0 - scale) * bose_einstein(e_out)


def _occupation_of_e1(e1, f, parts, per_particle):
    """(f(E1), 1 + f(E1)); f(E1) is divided out of the loss term when ``per_particle``."""
    if per_particle:
        if parts != CollisionParts.LOSS:
            raise ValueError("per_particle applies to the loss term only")
        return 1.0, float(f.one_plus(e1))
    return float(f(e1)), float(f.one_plus(e1))


# =============================================================================
# NN operator Q
# =============================================================================

def m_prime(e1, e2, e3, n):
    """zeta f(E2) (1 + f(E3)) (1 + f(E4)) at equilibrium, E4 = E1 + E2 - E3."""
    e4 = e1 + e2 - e3
    one_plus = IsotropicDistribution.bose_einstein().one_plus
    return zeta(e1, e2, e3, e4, n) * bose_einstein(e2) * one_plus(e3) * one_plus(e4)


def _q_point(e1, e2, e3, e4, f, nbar, kernel, parts, occupation1):
    window = zeta(e1, e2, e3, e4, nbar)
    if window == 0.0:
        return 0.0
    if kernel.kind == KernelMode.FULL_T:
        k = kernel_T(e1, e2, e3, e4, nbar, kernel.form)
    elif kernel.kind in (KernelMode.CONSTANT_ONE, KernelMode.SIGMA):
        k = 1.0
    else:
        raise ValueError(f"Kernel {kernel.kind!r} does not apply to the NN operator")
    if _has_closed_form(f, parts):
        return _nn_bracket(e1, e2, e3, e4, f.scale) * k * window
    f1, g1 = occupation1
    f2, f3, f4 = f(e2), f(e3), f(e4)
    g2, g3, g4 = f.one_plus(e2), f.one_plus(e3), f.one_plus(e4)
    return _bracket(g1 * g2 * f3 * f4, f1 * f2 * g3 * g4, parts) * k * window


def _inner_error(missed):
    """Outer-integral estimate of the error left by inner integrals that missed tolerance."""
    if not missed:
        return 0.0
    grid = np.array(sorted(missed))
    errors = np.array([missed[e] for e in grid])
    if grid.size == 1:
        return float(errors[0])
    return float(integrate.trapezoid(errors, grid))


def q_collision(e1, f, n, kernel=None, parts=CollisionParts.BOTH, spec=DEFAULT_SPEC,
                per_particle=False):
    """
    NN collision rate at energy E1 (scaled, gamma and (k_B T)^2 left out).

    Positive when gain exceeds loss; with ``parts=LOSS`` the positive
    magnitude of the out-scattering term. ``per_particle`` (loss only)
    divides out f(E1), giving the out-scattering rate 1/tau of one
    quasi-particle; it stays finite where f(E1) underflows.
    """
    if not e1 > 0:
        raise ValueError(f"E1 must be positive, got {e1!r}")
    nbar = float(getattr(n, 'nbar', n))
    kernel = kernel or KernelMode.full_t()
    occupation1 = _occupation_of_e1(e1, f, parts, per_particle)
    if f.kind == 'vacuum':
        return 0.0

    # E2 -> error of the E3 integral, for inner integrals that missed tolerance
    missed = {}

    def inner(e2):
        total = e1 + e2

        def along_e3(e3, e4):
            return _q_point(e1, e2, e3, e4, f, nbar, kernel, parts, occupation1)

        result = integrate_logistic(
            along_e3, 0.0, total, spec, points=(e1, e2), strict=False, log_level=logging.DEBUG
        )
        if result.error > spec.tolerance(result.value):
            missed[float(e2)] = result.error
        return result.value

    split = spec.split_for(nbar)
    low = integrate_log(inner, 0.0, split, spec)
    high = integrate_1d(inner, split, spec.e_max, spec, points=(e1,))
    raw = low.value + high.value
    error = low.error + high.error + _inner_error(missed)
    if missed and error > spec.tolerance(raw):
        raise NonConvergence(
            raw, error,
            f"{len(missed)} inner E3 integrals missed tolerance (value={raw!r}, error={error!r})",
        )
    value = raw / inverse_dispersion(e1, nbar)
    logger.debug(
        "Q(E1=%g, nbar=%g, %s, %s) = %r (+- %g)",
        e1, nbar, kernel.kind, parts, value, error,
    )
    if kernel.kind == KernelMode.SIGMA:
        value *= float(kernel.sigma(e1))
    return value


# =============================================================================
# NC operator W
# =============================================================================

def _w_point(e1, e2, e3, f, nbar, kernel, parts, branch, chi_weights, occupation1):
    if kernel.kind == KernelMode.FULL_S:
        k = kernel_S(e1, e2, e3, nbar, kernel.form)
    elif kernel.kind in (KernelMode.CONSTANT_ONE, KernelMode.SIGMA):
        k = 1.0
    else:
        raise ValueError(f"Kernel {kernel.kind!r} does not apply to the NC operator")
    if chi_weights:
        k = k * chi_weight(e2, nbar) * chi_weight(e3, nbar)
    if _has_closed_form(f, parts):
        if branch > 0:
            return 2.0 * _nc_bracket(e3, f.scale) * k
        # reverse of 2 + 3 -> 1
        return -_nc_bracket(e1, f.scale) * k
    f1, g1 = occupation1
    f2, f3 = f(e2), f(e3)
    g2, g3 = f.one_plus(e2), f.one_plus(e3)
    if branch > 0:
        # 1 + 2 <-> 3 (+ condensate), counted twice
        return 2.0 * _bracket(g1 * g2 * f3, f1 * f2 * g3, parts) * k
    # 1 (+ condensate) <-> 2 + 3
    return _bracket(g1 * f2 * f3, f1 * g2 * g3, parts) * k


def w_plus(e1, f, nbar, kernel, parts, spec, chi_weights=True, occupation1=None):
    occupation1 = occupation1 or _occupation_of_e1(e1, f, parts, False)

    def along_e2(e2):
        return _w_point(e1, e2, e1 + e2, f, nbar, kernel, parts, +1, chi_weights, occupation1)

    split = spec.split_for(nbar)
    low = integrate_log(along_e2, 0.0, split, spec)
    high = integrate_1d(along_e2, split, spec.e_max, spec)
    return low.value + high.value


def w_minus(e1, f, nbar, kernel, parts, spec, chi_weights=True, occupation1=None):
    occupation1 = occupation1 or _occupation_of_e1(e1, f, parts, False)

    def along_e2(e2, e3):
        return _w_point(e1, e2, e3, f, nbar, kernel, parts, -1, chi_weights, occupation1)

    return integrate_logistic(along_e2, 0.0, e1, spec).value


def w_collision(e1, f, n, kernel=None, parts=CollisionParts.BOTH, spec=DEFAULT_SPEC,
                chi_weights=True, per_particle=False):
    """
    NC collision rate at energy E1 (scaled, xi 2 pi m^2 left out).

    Vanishes identically without a condensate. ``chi_weights=False`` drops
    the density-of-states weights of E2 and E3; the integral then diverges
    logarithmically at E2 -> 0 and is only finite through the substitution
    cutoff. ``per_particle`` as for ``q_collision``.
    """
    if not e1 > 0:
        raise ValueError(f"E1 must be positive, got {e1!r}")
    nbar = float(getattr(n, 'nbar', n))
    occupation1 = _occupation_of_e1(e1, f, parts, per_particle)
    if nbar == 0.0 or f.kind == 'vacuum':
        return 0.0
    kernel = kernel or KernelMode.full_s()
    total = (
        w_plus(e1, f, nbar, kernel, parts, spec, chi_weights, occupation1)
        + w_minus(e1, f, nbar, kernel, parts, spec, chi_weights, occupation1)
    )
    value = total / inverse_dispersion(e1, nbar)
    if kernel.kind == KernelMode.SIGMA:
        value *= float(kernel.sigma(e1))
    logger.debug("W(E1=%g, nbar=%g, %s, %s) = %r", e1, nbar, kernel.kind, parts, value)
    return value
