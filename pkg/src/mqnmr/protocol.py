"""Pseudopure-state preparation: excite, filter, time-reverse, saturate.

Also locates the characteristic times that make the preparation work: zeros
of the non-diagonal zero-quantum intensity and maxima of the highest-order
coherence.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .basis import DEFAULT_MAX_SPINS, as_density, build_basis, equilibrium_state
from .coherence import mq_filter, mq_spectrum, normalization_for, NORMALIZE_IZ2
from .dynamics import (
    FORWARD,
    REVERSED,
    corner_element,
    diagonalize,
    evolve,
    evolve_prepared,
    prepare,
    propagator_for,
)
from .errors import DegenerateStateError, DomainError, SpinIndexError
from .geometry import SpinSystem

log = logging.getLogger(__name__)

DEFAULT_DT = 0.01
DEFAULT_THRESHOLD = 1e-3
TIME_RESOLUTION = 1e-4
CORNER_FLOOR = 1e-12
# curves whose maximum stays below this fraction of the total intensity are
# treated as numerically zero
NOISE_FLOOR = 1e-14


class Sentinel(enum.Enum):
    IDENTICALLY_ZERO = "identically-zero"


IDENTICALLY_ZERO = Sentinel.IDENTICALLY_ZERO


@dataclass(frozen=True)
class ProtocolSchedule:
    """Durations (units of ``1/D1``) and options of the four stages."""

    tau1: float
    filter_order: int
    tau2: float
    saturate: bool = False

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")
        if isinstance(self.filter_order, bool) or int(self.filter_order) != self.filter_order or self.filter_order < 0:
            raise DomainError(f"filter_order must be a non-negative integer, got {self.filter_order!r}")


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    schedule: ProtocolSchedule
    intermediate: np.ndarray
    final: np.ndarray
    diagonal: np.ndarray
    diag_deviation: float
    offdiag_norm: float
    sign_pattern: tuple


def _check_grid(t_max, dt):
    if not (math.isfinite(t_max) and t_max > 0):
        raise DomainError(f"t_max must be positive, got {t_max!r}")
    if not (math.isfinite(dt) and dt > 0):
        raise DomainError(f"dt must be positive, got {dt!r}")
    if dt > t_max:
        raise DomainError(f"dt={dt} exceeds t_max={t_max}")
    return np.linspace(0.0, t_max, int(round(t_max / dt)) + 1)


def _local_extrema(values, sign):
    """Interior grid indices where ``sign * values`` has a local minimum."""
    v = sign * np.asarray(values)
    out = []
    for i in range(1, len(v) - 1):
        if v[i] <= v[i - 1] and v[i] < v[i + 1]:
            out.append(i)
    return out


def _golden_refine(f, a, b, c):
    """Minimize ``f`` inside the bracket ``a < b < c`` to TIME_RESOLUTION."""
    tol = TIME_RESOLUTION / (2.0 * max(abs(b), TIME_RESOLUTION))
    x, fx, _ = scipy.optimize.golden(f, brack=(a, b, c), tol=tol, full_output=True)
    if not a <= x <= c:  # golden may step outside on flat brackets
        x, fx = b, f(b)
    return float(x), float(fx)


def find_nd0q_zeros(
    system: SpinSystem,
    initial,
    t_max: float,
    dt: float = DEFAULT_DT,
    threshold: float = DEFAULT_THRESHOLD,
    blocked: bool = False,
    max_spins: int | None = None,
):
    """Times where the non-diagonal zero-quantum intensity touches zero.

    The intensity is sampled on ``[0, t_max]`` with step ``dt``; each grid
    minimum is refined by golden-section search and kept when its value is
    below ``threshold`` times the largest intensity seen up to that time.
    For a diagonal initial state the trivial zero at ``t = 0`` is skipped.

    Returns:
        Sorted list of times, or :data:`IDENTICALLY_ZERO` when the intensity
        vanishes over the whole grid.
    """
    if not (math.isfinite(threshold) and threshold > 0):
        raise DomainError(f"threshold must be positive, got {threshold!r}")
    times = _check_grid(t_max, dt)
    basis = build_basis(system.n_spins, max_spins or DEFAULT_MAX_SPINS)
    initial = as_density(initial, basis.dim)
    prep = prepare(propagator_for(system, blocked, max_spins), initial)
    norm = normalization_for(NORMALIZE_IZ2, basis)

    def nd0q(t):
        return mq_spectrum(evolve_prepared(prep, t), basis, norm).j0_nondiag

    values = np.array([nd0q(t) for t in times])
    total = float(np.sum(np.abs(initial) ** 2)) / norm
    if values.max() <= NOISE_FLOOR * total:
        return IDENTICALLY_ZERO
    running_max = np.maximum.accumulate(values)

    candidates = _local_extrema(values, +1)
    diagonal = not np.any(initial - np.diag(np.diagonal(initial)))
    if not diagonal and len(values) > 1 and values[0] < values[1]:
        candidates.insert(0, 0)

    zeros = []
    for i in candidates:
        if i == 0:
            t_ref, v_ref = 0.0, values[0]
        else:
            t_ref, v_ref = _golden_refine(nd0q, times[i - 1], times[i], times[i + 1])
        if v_ref < threshold * running_max[i]:
            zeros.append(t_ref)
        log.debug("nd0q minimum t=%.4f value=%.3g running max=%.3g", t_ref, v_ref, running_max[i])
    return zeros


def find_homqc_maxima(
    system: SpinSystem,
    initial=None,
    t_max: float = 12.0,
    dt: float = DEFAULT_DT,
    blocked: bool = False,
    max_spins: int | None = None,
):
    """Local maxima of the highest-order coherence intensity ``J_NQ``.

    ``J_NQ`` only involves the element coupling all-up to all-down, so each
    sample costs O(d**2).  ``initial`` defaults to ``rho_eq``.

    Returns:
        ``(time, intensity)`` pairs sorted by descending intensity.  Peaks at
        or below numerical noise are dropped, so the list is empty if the
        coherence is never excited.
    """
    times = _check_grid(t_max, dt)
    basis = build_basis(system.n_spins, max_spins or DEFAULT_MAX_SPINS)
    if initial is None:
        initial = equilibrium_state(basis)
    initial = as_density(initial, basis.dim)
    prep = prepare(propagator_for(system, blocked, max_spins), initial)
    norm = normalization_for(NORMALIZE_IZ2, basis)
    last = basis.dim - 1

    def homqc(t):
        return abs(corner_element(prep, t, 0, last)) ** 2 / norm

    values = np.array([homqc(t) for t in times])
    total = float(np.sum(np.abs(initial) ** 2)) / norm
    if values.max() <= NOISE_FLOOR * total:
        return []
    peaks = []
    for i in _local_extrema(values, -1):
        t_ref, neg = _golden_refine(lambda t: -homqc(t), times[i - 1], times[i], times[i + 1])
        if -neg > NOISE_FLOOR * total:  # round-off ripples before the coherence builds up
            peaks.append((t_ref, -neg))
    peaks.sort(key=lambda p: -p[1])
    return peaks


def partial_saturate(rho) -> np.ndarray:
    """Spread every population except all-down evenly; drop coherences.

    The all-down population is untouched and the trace is preserved.
    """
    rho = as_density(rho)
    dim = rho.shape[0]
    d = np.real(np.diagonal(rho))
    out = np.zeros_like(rho)
    rest = d[:-1]
    if dim == 1:
        return rho.copy()
    if np.all(rest == rest[0]):
        mean = rest[0]
    else:
        mean = (math.fsum(d) - d[-1]) / (dim - 1)
    out[np.diag_indices(dim)] = mean
    out[-1, -1] = d[-1]
    return out


def _sign(x):
    if abs(x) < CORNER_FLOOR:
        return "0"
    return "+" if x > 0 else "-"


def pseudopure_metrics(rho):
    """Quality of a two-level state ``a|up><up| + b|down><down|``.

    Returns:
        ``(diag_deviation, offdiag_norm, sign_pattern)``: largest interior
        population relative to the larger corner, Frobenius norm of the
        off-diagonal part relative to the diagonal part, and the signs of
        ``(rho_11, rho_dd)``.

    Raises:
        DegenerateStateError: both corner populations are below 1e-12.
    """
    rho = as_density(rho)
    d = np.real(np.diagonal(rho))
    corner = max(abs(d[0]), abs(d[-1]))
    if corner < CORNER_FLOOR:
        raise DegenerateStateError("both corner populations vanish")
    interior = np.abs(d[1:-1])
    diag_dev = float(interior.max() / corner) if interior.size else 0.0
    diag_norm = float(np.linalg.norm(d))
    off = rho - np.diag(np.diagonal(rho))
    off_norm = float(np.linalg.norm(off)) / diag_norm
    return diag_dev, off_norm, (_sign(d[0]), _sign(d[-1]))


def run_protocol(
    system: SpinSystem,
    schedule: ProtocolSchedule,
    initial=None,
    blocked: bool = False,
    max_spins: int | None = None,
) -> ProtocolResult:
    """Excite for ``tau1``, filter one coherence order, reverse for ``tau2``.

    ``initial`` defaults to ``rho_eq``.  Saturation (stage four) is applied to
    ``final`` only; all metrics describe the intermediate state.
    """
    basis = build_basis(system.n_spins, max_spins or DEFAULT_MAX_SPINS)
    if schedule.filter_order > system.n_spins:
        raise SpinIndexError(
            f"filter_order {schedule.filter_order} exceeds n_spins {system.n_spins}"
        )
    prop = propagator_for(system, blocked, max_spins)
    rho = equilibrium_state(basis) if initial is None else as_density(initial, basis.dim)
    rho = evolve(prop, rho, schedule.tau1, FORWARD)
    rho = mq_filter(rho, basis, schedule.filter_order)
    rho = evolve(prop, rho, schedule.tau2, REVERSED)
    imag = np.max(np.abs(np.imag(np.diagonal(rho))))
    if imag > 1e-9:
        log.warning("diagonal has imaginary parts up to %.3g", imag)
    final = partial_saturate(rho) if schedule.saturate else rho
    dev, off, pattern = pseudopure_metrics(rho)
    return ProtocolResult(
        schedule=schedule,
        intermediate=rho,
        final=final,
        diagonal=np.real(np.diagonal(rho)).copy(),
        diag_deviation=dev,
        offdiag_norm=off,
        sign_pattern=pattern,
    )
