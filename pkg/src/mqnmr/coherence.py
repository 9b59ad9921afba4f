"""Multiple-quantum coherence intensities and coherence-order filters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import DEFAULT_MAX_SPINS, BasisInfo, as_density, build_basis, trace_iz_squared
from .errors import DomainError, SpinIndexError
from .kernels import coherence_sums

NORMALIZE_IZ2 = "iz2"
NORMALIZE_INITIAL = "initial"


@dataclass(frozen=True)
class CoherenceSpectrum:
    """Intensities ``J_kQ`` for ``k = -N..N`` plus the split of ``J_0Q``.

    ``orders[k + n_spins]`` holds ``J_kQ``; use :meth:`order` for signed access.
    """

    n_spins: int
    orders: np.ndarray
    j0_diag: float
    j0_nondiag: float
    normalization: float

    def order(self, k: int) -> float:
        if not -self.n_spins <= k <= self.n_spins:
            raise SpinIndexError(f"coherence order {k} outside [-{self.n_spins}, {self.n_spins}]")
        return float(self.orders[k + self.n_spins])

    def as_dict(self) -> dict:
        return {k: self.order(k) for k in range(-self.n_spins, self.n_spins + 1)}

    @property
    def total(self) -> float:
        return float(np.sum(self.orders))


def coherence_order(p: int, q: int, basis: BasisInfo) -> int:
    """Coherence order ``m_z[p] - m_z[q]`` of element ``(p, q)`` (1-based)."""
    for idx in (p, q):
        if not 1 <= idx <= basis.dim:
            raise SpinIndexError(f"basis index {idx} outside [1, {basis.dim}]")
    return int(basis.popcount[q - 1] - basis.popcount[p - 1])


def normalization_for(mode: str, basis: BasisInfo, rho0=None) -> float:
    """Divisor for intensities: ``Tr Iz**2`` (``"iz2"``) or ``Tr rho0**2``."""
    if mode == NORMALIZE_IZ2:
        return trace_iz_squared(basis)
    if mode == NORMALIZE_INITIAL:
        if rho0 is None:
            raise ValueError("initial-state normalization needs rho0")
        value = float(np.sum(np.abs(rho0) ** 2))
        if value <= 0:
            raise DomainError("initial state has zero norm; cannot normalize by Tr rho0^2")
        return value
    raise ValueError(f"unknown normalization mode {mode!r}")


def mq_spectrum(rho, basis: BasisInfo, normalization: float | None = None) -> CoherenceSpectrum:
    """Bucket ``|rho_pq|**2`` by coherence order.

    Intensities use the squared modulus of each element.  ``normalization``
    defaults to ``Tr Iz**2``.

    Raises:
        DomainError: non-positive normalization.
    """
    if normalization is None:
        normalization = trace_iz_squared(basis)
    if not normalization > 0:
        raise DomainError(f"normalization must be positive, got {normalization!r}")
    rho = np.ascontiguousarray(as_density(rho, basis.dim))
    # kernel leaves the diagonal out of the order bins
    sums, diag = coherence_sums(rho, basis.popcount, basis.n_spins)
    nondiag = sums[basis.n_spins]
    sums[basis.n_spins] = nondiag + diag
    orders = sums / normalization
    return CoherenceSpectrum(
        n_spins=basis.n_spins,
        orders=orders,
        j0_diag=float(diag / normalization),
        j0_nondiag=float(nondiag / normalization),
        normalization=float(normalization),
    )


def order_mask(basis: BasisInfo, k: int) -> np.ndarray:
    pc = basis.popcount
    return np.abs(pc[None, :] - pc[:, None]) == k


def mq_filter(rho, basis: BasisInfo, k: int) -> np.ndarray:
    """Keep only the ``+k`` and ``-k`` coherence blocks of ``rho``."""
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= basis.n_spins:
        raise SpinIndexError(f"filter order {k!r} outside [0, {basis.n_spins}]")
    rho = as_density(rho, basis.dim)
    return np.where(order_mask(basis, int(k)), rho, 0.0)


def scan_trajectory(
    system,
    initial,
    times: Sequence[float],
    normalization: float | None = None,
    blocked: bool = False,
    workers: int = 1,
    max_spins: int | None = None,
) -> list:
    """Coherence spectra of ``initial`` evolved under the double-quantum Hamiltonian."""
    from .dynamics import evolve_series, propagator_for

    basis = build_basis(system.n_spins, max_spins or DEFAULT_MAX_SPINS)
    prop = propagator_for(system, blocked=blocked, max_spins=max_spins)
    if normalization is None:
        normalization = trace_iz_squared(basis)
    return [mq_spectrum(r, basis, normalization) for r in evolve_series(prop, initial, times, workers)]
