"""
Brute-force Monte Carlo checks of the analytic delta-function reductions.

Every estimator smooths the momentum delta with a 3-d Gaussian of width
epsilon and removes the leading O(epsilon^2) smoothing bias per sample by
two-point Richardson extrapolation, (4 g(eps/2) - g(eps)) / 3.

Random numbers come from numpy's counter-based Philox generator. A fixed
number of batches is spawned from ``SeedSequence(seed)`` and their partial
sums are combined in batch order, so a given seed reproduces the estimate
bit for bit however the batches are scheduled.
"""
import logging
from dataclasses import dataclass
from functools import partial
from typing import NamedTuple, Optional

import numpy as np
from django.core.exceptions import ValidationError

from .bogoliubov_core import bose_einstein, chi_weight, dispersion, inverse_dispersion, momentum_window
from .collision_integrals import (
    DEFAULT_SPEC,
    CollisionParts,
    IsotropicDistribution,
    KernelMode,
    q_collision,
)
from .exceptions import DegenerateMomenta, NonConvergence

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi
# angular-reduced NN loss = Q^l * pi^2 / 2 (shell measure p chi / 2 dE per momentum)
Q_LOSS_NORMALIZATION = np.pi**2 / 2.0
MAX_RELATIVE_STDERR = 0.05


@dataclass(frozen=True)
class McSpec:
    samples: int = 1_000_000
    # smoothing width; None -> 1e-2 of the characteristic scale of the point
    epsilon: Optional[float] = None
    seed: int = 42
    batches: int = 8

    def __post_init__(self):
        errors = {}
        if self.samples < 10_000:
            errors['samples'] = 'At least 10^4 samples are required.'
        if self.epsilon is not None and not self.epsilon > 0:
            errors['epsilon'] = 'epsilon must be positive.'
        if self.seed < 0:
            errors['seed'] = 'seed must be non-negative.'
        if not 1 <= self.batches <= self.samples:
            errors['batches'] = 'batches must lie in [1, samples].'
        if errors:
            raise ValidationError(errors)

    def width(self, scale):
        return self.epsilon if self.epsilon is not None else 1e-2 * scale

    def batch_plan(self):
        """(seed sequence, sample count) per batch, in combination order."""
        children = np.random.SeedSequence(self.seed).spawn(self.batches)
        base, extra = divmod(self.samples, self.batches)
        return [(child, base + (1 if i < extra else 0)) for i, child in enumerate(children)]


class McEstimate(NamedTuple):
    value: float
    stderr: float
    samples: int
    epsilon: float
    analytic: Optional[float] = None

    @property
    def relative_stderr(self):
        return self.stderr / abs(self.value) if self.value else float('inf')

    def agrees(self, sigmas=3.0, relative=0.0):
        """Within max(sigmas * stderr, relative * |analytic|) of the analytic value."""
        if self.analytic is None:
            raise ValueError("No analytic value to compare with")
        allowed = max(sigmas * self.stderr, relative * abs(self.analytic))
        return abs(self.value - self.analytic) <= allowed


def _generator(seed_seq):
    return np.random.Generator(np.random.Philox(seed_seq))


def _directions(rng, count):
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _shell_gaussian(k, p, eps):
    """∫ dOmega G_eps(k - p n), G_eps the normalized 3-d Gaussian; k = |k|."""
    x = k * p / eps**2
    radial = np.exp(-((k - p) ** 2) / (2.0 * eps**2))
    with np.errstate(divide='ignore', invalid='ignore'):
        shell = np.where(x > 0.0, -np.expm1(-2.0 * x) / (2.0 * x), 1.0)
    return FOUR_PI * radial * shell / ((2.0 * np.pi) ** 1.5 * eps**3)


def _richardson(coarse, fine):
    return (4.0 * fine - coarse) / 3.0


def _moments(values):
    return float(np.sum(values)), float(np.sum(values * values)), values.size


def _combine(partials, eps, analytic=None):
    total = sum(p[0] for p in partials)
    total_sq = sum(p[1] for p in partials)
    count = sum(p[2] for p in partials)
    mean = total / count
    variance = max(total_sq / count - mean * mean, 0.0) * count / (count - 1)
    return McEstimate(mean, float(np.sqrt(variance / count)), count, eps, analytic)


def _run(batch, spec, eps, analytic=None, mapper=map):
    plan = spec.batch_plan()
    partials = list(mapper(batch, [seed for seed, _ in plan], [count for _, count in plan]))
    return _combine(partials, eps, analytic)


# =============================================================================
# Angular identities
# =============================================================================

def analytic_angular_window(p1, p2, p3, p4):
    """∫∫∫ delta^3(p1 + p2 - p3 - p4) dp2^ dp3^ dp4^ = 4 pi^2 window / (p1 p2 p3 p4)."""
    window = max(float(momentum_window(p1, p2, p3, p4)), 0.0)
    return 4.0 * np.pi**2 * window / (p1 * p2 * p3 * p4)


def analytic_three_momentum(p1, p2, p3):
    """∫∫ delta^3(p1 + p2 + p3) dp2^ dp3^ from the sign-sum formula."""
    signs = 1.0 + np.sign(p1 - p2 - p3) + np.sign(p2 - p1 - p3) + np.sign(p3 - p1 - p2)
    return float(-np.pi / (p1 * p2 * p3) * signs)


def _check_momenta(momenta):
    if any(not p > 0 for p in momenta):
        raise ValueError("All momenta must be positive")


def _window_batch(seed_seq, count, p1, p2, p3, p4, eps):
    rng = _generator(seed_seq)
    n2, n3 = _directions(rng, count), _directions(rng, count)
    k = np.linalg.norm(np.array([0.0, 0.0, p1]) + p2 * n2 - p3 * n3, axis=1)
    weight = FOUR_PI * FOUR_PI
    coarse = weight * _shell_gaussian(k, p4, eps)
    fine = weight * _shell_gaussian(k, p4, eps / 2.0)
    return _moments(_richardson(coarse, fine))


def mc_angular_window(p1, p2, p3, p4, spec=McSpec(), mapper=map):
    """
    Estimate of ∫∫∫ delta^3(p1 + p2 - p3 - p4) over the directions of p2, p3
    and p4 with p1 along z. The p4 direction is integrated against the
    Gaussian in closed form; p2 and p3 are sampled uniformly.
    """
    _check_momenta((p1, p2, p3, p4))
    eps = spec.width(max(p1, p2, p3, p4))
    window = float(momentum_window(p1, p2, p3, p4))
    if abs(window) < eps:
        raise DegenerateMomenta(f"Window {window!r} within epsilon={eps!r} of zero")
    batch = partial(_window_batch, p1=p1, p2=p2, p3=p3, p4=p4, eps=eps)
    return _run(batch, spec, eps, analytic_angular_window(p1, p2, p3, p4), mapper)


def _three_batch(seed_seq, count, p1, p2, p3, eps):
    rng = _generator(seed_seq)
    n2 = _directions(rng, count)
    k = np.linalg.norm(np.array([0.0, 0.0, p1]) + p2 * n2, axis=1)
    coarse = FOUR_PI * _shell_gaussian(k, p3, eps)
    fine = FOUR_PI * _shell_gaussian(k, p3, eps / 2.0)
    return _moments(_richardson(coarse, fine))


def mc_three_momentum(p1, p2, p3, spec=McSpec(), mapper=map):
    """Estimate of ∫∫ delta^3(p1 + p2 + p3) dp2^ dp3^ with p1 along z."""
    _check_momenta((p1, p2, p3))
    eps = spec.width(max(p1, p2, p3))
    for edge in (p1 - p2 - p3, p2 - p1 - p3, p3 - p1 - p2):
        if abs(edge) < eps:
            raise DegenerateMomenta(f"Triangle edge {edge!r} within epsilon={eps!r} of zero")
    batch = partial(_three_batch, p1=p1, p2=p2, p3=p3, eps=eps)
    return _run(batch, spec, eps, analytic_three_momentum(p1, p2, p3), mapper)


# =============================================================================
# Nine-dimensional NN loss term
# =============================================================================

def _q_loss_batch(seed_seq, count, e1, nbar, eps_e, eps_p):
    rng = _generator(seed_seq)
    p1 = float(inverse_dispersion(e1, nbar))

    # E2 ~ Gamma(1/2, 1), E3 = (E1 + E2) Beta(1/2, 1/2), uniform directions
    e2 = rng.gamma(0.5, 1.0, count)
    total = e1 + e2
    e3 = total * rng.beta(0.5, 0.5, count)
    n2, n3 = _directions(rng, count), _directions(rng, count)
    jitter = rng.standard_normal((count, 3))

    p2, p3 = inverse_dispersion(e2, nbar), inverse_dispersion(e3, nbar)
    density2 = np.exp(-e2) / np.sqrt(np.pi * e2)
    weight2 = FOUR_PI * p2 * chi_weight(e2, nbar) / 2.0 / density2
    weight3 = FOUR_PI * p3 * chi_weight(e3, nbar) / 2.0 * np.pi * np.sqrt(e3 * (total - e3))
    centre = np.array([0.0, 0.0, p1]) + p2[:, None] * n2 - p3[:, None] * n3
    occupation = bose_einstein(e1) * bose_einstein(e2) * (1.0 + bose_einstein(e3))

    def sample(scale):
        # p4 drawn from the smoothed momentum delta itself
        p4 = np.linalg.norm(centre + scale * eps_p * jitter, axis=1)
        e4 = dispersion(p4, nbar)
        width = scale * eps_e
        energy_delta = np.exp(-((total - e3 - e4) ** 2) / (2.0 * width**2)) / (np.sqrt(2.0 * np.pi) * width)
        return weight2 * weight3 * occupation * (1.0 + bose_einstein(e4)) * energy_delta

    values = _richardson(sample(1.0), sample(0.5)) / Q_LOSS_NORMALIZATION
    return _moments(values)


def mc_q_loss(e1, n, spec=McSpec(), mapper=map):
    """
    Estimate of the NN loss term at E1 with kernel 1 and f = f_BE, from the
    full integral over three momenta with both deltas smoothed. Normalized
    like ``q_collision(..., KernelMode.constant_one(), CollisionParts.LOSS)``.
    """
    nbar = float(getattr(n, 'nbar', n))
    if not e1 > 0:
        raise ValueError(f"E1 must be positive, got {e1!r}")
    scale = max(e1, 1.0)
    eps_e = spec.width(scale)
    eps_p = spec.width(float(inverse_dispersion(scale, nbar)))
    batch = partial(_q_loss_batch, e1=e1, nbar=nbar, eps_e=eps_e, eps_p=eps_p)
    estimate = _run(batch, spec, eps_e, mapper=mapper)
    if estimate.relative_stderr > MAX_RELATIVE_STDERR:
        raise NonConvergence(
            estimate.value, estimate.stderr,
            f"Monte Carlo relative error {estimate.relative_stderr:.3g} above "
            f"{MAX_RELATIVE_STDERR} after {spec.samples} samples",
        )
    return estimate


# =============================================================================
# Verification suite
# =============================================================================

WINDOW_POINTS = (
    (1.0, 0.6, 0.9, 0.8),
    (2.0, 1.0, 1.5, 1.2),
    (3.0, 0.5, 2.8, 0.55),
    (0.5, 2.0, 0.8, 1.9),
    (0.1, 0.1, 20.0, 0.1),
)
THREE_MOMENTUM_POINTS = (
    (1.0, 1.0, 1.0),
    (3.0, 1.0, 1.0),
    (1.0, 0.8, 0.6),
    (2.0, 1.5, 1.0),
    (0.5, 2.0, 0.3),
)
Q_LOSS_POINTS = (
    (1.0, 0.0),
    (0.04, 0.04),
    (1.0, 0.04),
)
Q_LOSS_RELATIVE_TOLERANCE = 0.10


class OracleCheck(NamedTuple):
    name: str
    point: tuple
    estimate: float
    stderr: float
    analytic: float
    passed: bool

    def line(self):
        point = ','.join(repr(float(x)) for x in self.point)
        status = 'ok' if self.passed else 'FAILED'
        return (
            f"{self.name}({point}): estimate={self.estimate!r} stderr={self.stderr!r} "
            f"analytic={self.analytic!r} {status}"
        )


class VerificationReport(NamedTuple):
    checks: list

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def lines(self):
        return [check.line() for check in self.checks]


def run_verification_suite(spec=McSpec(), quad=DEFAULT_SPEC, window_points=WINDOW_POINTS,
                           three_points=THREE_MOMENTUM_POINTS, q_points=Q_LOSS_POINTS, mapper=map):
    """Compare every estimator with its analytic counterpart."""
    checks = []
    for point in window_points:
        est = mc_angular_window(*point, spec=spec, mapper=mapper)
        checks.append(OracleCheck('angular_window', point, est.value, est.stderr, est.analytic, est.agrees()))
    for point in three_points:
        est = mc_three_momentum(*point, spec=spec, mapper=mapper)
        checks.append(OracleCheck('three_momentum', point, est.value, est.stderr, est.analytic, est.agrees()))
    for e1, nbar in q_points:
        reduced = q_collision(
            e1, IsotropicDistribution.bose_einstein(), nbar,
            KernelMode.constant_one(), CollisionParts.LOSS, quad,
        )
        est = mc_q_loss(e1, nbar, spec=spec, mapper=mapper)._replace(analytic=reduced)
        passed = est.agrees(relative=Q_LOSS_RELATIVE_TOLERANCE)
        checks.append(OracleCheck('q_loss', (e1, nbar), est.value, est.stderr, reduced, passed))
    for check in checks:
        logger.info(check.line())
    return VerificationReport(checks)
