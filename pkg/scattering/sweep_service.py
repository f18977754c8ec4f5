"""
Parameter-sweep services for the scattering commands.

Provides:
1. Worker pool - ordered map over independent sweep points
2. Curve tabulation - alpha_T / alpha_S curves per nbar, served from the
   result cache when the same config was computed before
"""
import logging
import os
from concurrent import futures
from contextlib import contextmanager

import numpy as np
import typing_extensions as typing

from . import effective_scattering
from .effective_scattering import AlphaCurve, AlphaSMode

logger = logging.getLogger(__name__)


# ============================================================
# 1. WORKER POOL
# ============================================================

def worker_count(threads=0):
    """``threads`` workers, or the available parallelism when 0."""
    if threads < 0:
        raise ValueError("threads must be non-negative")
    if threads:
        return threads
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@contextmanager
def pool_map(threads=0):
    """
    Yield an ordered map: the builtin for a single worker, otherwise the
    map of a process pool. Results always come back in input order.
    """
    workers = worker_count(threads)
    if workers == 1:
        yield map
        return
    logger.info("Starting a pool of %d worker processes", workers)
    with futures.ProcessPoolExecutor(max_workers=workers) as executor:
        yield executor.map


def parse_log_range(text):
    """'a:b:n' -> n log-spaced values from a to b."""
    try:
        start, stop, count = text.split(':')
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise ValueError(f"Expected 'start:stop:count', got {text!r}")
    if not (start > 0 and stop > start and count >= 1):
        raise ValueError(f"Invalid log range {text!r}")
    return [float(x) for x in np.geomspace(start, stop, count)]


def parse_float_list(text):
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ValueError(f"Expected a comma-separated list of numbers, got {text!r}")
    if not values:
        raise ValueError("Empty list")
    return values


# ============================================================
# 2. CURVE TABULATION
# ============================================================

# Everything a tabulated curve depends on. Floats are repr strings: the
# cache key hashes their exact JSON form.
class CurvePayload(typing.TypedDict):
    quantity: str
    nbar: str
    energies: list[str]
    quad: dict
    kernel_form: str
    alpha_s_mode: str | None


def curve_payload(quantity, nbar, energies, spec, kernel_form, alpha_s_mode=None) -> CurvePayload:
    return {
        'quantity': quantity,
        'nbar': repr(float(nbar)),
        'energies': [repr(float(e)) for e in energies],
        'quad': spec.as_config(),
        'kernel_form': str(kernel_form),
        'alpha_s_mode': None if alpha_s_mode is None else str(alpha_s_mode),
    }


def tabulate_curve(quantity, nbar, energies, spec, kernel_form, alpha_s_mode=None,
                   cache=None, mapper=map):
    """
    An AlphaCurve for one nbar; looked up in ``cache`` first and stored there
    after a fresh computation (in the calling process only).
    """
    energies = np.asarray(energies, dtype=float)
    key = None
    if cache is not None:
        key = cache.key(curve_payload(quantity, nbar, energies, spec, kernel_form, alpha_s_mode))
        values = cache.load(key)
        if values is not None:
            logger.debug("Cache hit for %s at nbar=%g", quantity, nbar)
            return AlphaCurve(quantity, nbar, energies, values, spec, kernel_form, alpha_s_mode=alpha_s_mode)

    logger.info("Computing %s at nbar=%g on %d energies", quantity, nbar, len(energies))
    if quantity == AlphaCurve.T:
        curve = effective_scattering.alpha_T_curve(nbar, energies, spec, kernel_form, mapper)
    else:
        curve = effective_scattering.alpha_S_curve(
            nbar, energies, alpha_s_mode or AlphaSMode.CONSISTENT, spec, kernel_form, mapper
        )
    if cache is not None:
        cache.store(key, curve.energies, curve.alpha)
    return curve
