"""Exact propagation of density matrices under a time-independent Hamiltonian.

The Hamiltonian is diagonalized once.  For every time point the initial
state, already rotated into the eigenbasis, picks up the phases
``exp(-i (lam_a - lam_b) t)`` and is rotated back.  With ``blocked=True`` the
eigenproblem is split into the invariant sectors of the Hamiltonian (for the
double-quantum Hamiltonian: even and odd number of down spins), which
shrinks both the diagonalization and the back rotation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from .basis import DEFAULT_MAX_SPINS, HERMITIAN_TOL, as_density, build_basis, hermiticity_error
from .errors import NumericError, ValidationError
from .geometry import SpinSystem
from .hamiltonian import dq_average
from .kernels import phase_rotate

FORWARD = "forward"
REVERSED = "reversed"


@dataclass(frozen=True)
class Sector:
    """One invariant block: basis rows ``index`` with its own eigensystem."""

    index: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class Propagator:
    """Eigendecomposition ``H = V diag(lam) V^dagger`` kept for reuse.

    ``eigenvalues`` are sorted ascending and ``eigenvectors`` holds the
    matching columns.  ``sectors`` always covers the full space; an
    unblocked propagator has a single sector spanning every index.
    """

    dim: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sectors: tuple

    @property
    def blocked(self) -> bool:
        return len(self.sectors) > 1

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _eigh(h):
    try:
        if np.iscomplexobj(h) and np.any(h.imag):
            lam, v = scipy.linalg.eigh(h, driver="evd")
        else:
            lam, v = scipy.linalg.eigh(np.ascontiguousarray(h.real), driver="evd")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(v))):
        raise NumericError("eigensolver returned non-finite values")
    return lam, v


def parity_sectors(popcount) -> list:
    """Index sets of even and odd down-spin count (empty sets dropped)."""
    pc = np.asarray(popcount)
    return [s for s in (np.flatnonzero(pc % 2 == 0), np.flatnonzero(pc % 2 == 1)) if s.size]


def diagonalize(h, sectors=None, tol: float = HERMITIAN_TOL) -> Propagator:
    """Diagonalize Hermitian ``h``, optionally sector by sector.

    Args:
        h: Hermitian matrix (real symmetric matrices stay real).
        sectors: optional list of index arrays partitioning the basis; ``h``
            must have no elements between different sectors.
        tol: Hermiticity tolerance.

    Raises:
        ValidationError: ``h`` is not square/Hermitian, or couples sectors.
        NumericError: the eigensolver failed.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"Hamiltonian must be square, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValidationError("Hamiltonian has non-finite entries")
    err = hermiticity_error(h)
    if err > tol:
        raise ValidationError(f"Hamiltonian is not Hermitian (max deviation {err:.3g})")
    if not np.iscomplexobj(h) or not np.any(h.imag):
        h = np.ascontiguousarray(h.real, dtype=float)
    dim = h.shape[0]
    if sectors is None:
        sectors = [np.arange(dim)]
    else:
        sectors = [np.asarray(s, dtype=np.int64) for s in sectors]
        covered = np.sort(np.concatenate(sectors))
        if covered.size != dim or np.any(covered != np.arange(dim)):
            raise ValidationError("sectors must partition the basis")
        label = np.empty(dim, dtype=np.int64)
        for i, s in enumerate(sectors):
            label[s] = i
        rows, cols = np.nonzero(h)
        if np.any(label[rows] != label[cols]):
            raise ValidationError("Hamiltonian couples different sectors")

    blocks = []
    for s in sectors:
        lam, v = _eigh(h[np.ix_(s, s)])
        blocks.append(Sector(index=s, eigenvalues=lam, eigenvectors=v))

    lam_all = np.concatenate([b.eigenvalues for b in blocks])
    v_all = np.zeros((dim, dim), dtype=h.dtype)
    col = 0
    for b in blocks:
        v_all[b.index, col:col + b.index.size] = b.eigenvectors
        col += b.index.size
    order = np.argsort(lam_all, kind="stable")
    return Propagator(dim, lam_all[order], v_all[:, order], tuple(blocks))


def _mul(a, b):
    # real @ complex as two real products: half the flops of a complex GEMM
    # .real/.imag views are strided; matmul only reaches BLAS on contiguous data
    if not np.iscomplexobj(a) and np.iscomplexobj(b):
        out = np.empty((a.shape[0], b.shape[1]), dtype=complex)
        out.real = a @ np.ascontiguousarray(b.real)
        out.imag = a @ np.ascontiguousarray(b.imag)
        return out
    if np.iscomplexobj(a) and not np.iscomplexobj(b):
        out = np.empty((a.shape[0], b.shape[1]), dtype=complex)
        out.real = np.ascontiguousarray(a.real) @ b
        out.imag = np.ascontiguousarray(a.imag) @ b
        return out
    return a @ b


def _adj(v):
    return v.conj().T if np.iscomplexobj(v) else v.T


@dataclass(frozen=True)
class _Prepared:
    """Initial state rotated into the eigenbasis, one entry per sector pair."""

    blocks: tuple  # (sector_a, sector_b, rho_tilde_ab)
    dim: int
    rho0: np.ndarray


def prepare(prop: Propagator, rho0) -> _Prepared:
    """Rotate ``rho0`` into the eigenbasis; reusable for many time points."""
    rho0 = as_density(rho0, prop.dim).copy()
    blocks = []
    for a in prop.sectors:
        for b in prop.sectors:
            sub = rho0[np.ix_(a.index, b.index)]
            if not np.any(sub):
                continue
            rt = _mul(_mul(_adj(a.eigenvectors), sub), b.eigenvectors)
            blocks.append((a, b, np.ascontiguousarray(rt, dtype=complex)))
    return _Prepared(tuple(blocks), prop.dim, rho0)


def evolve_prepared(prep: _Prepared, t: float) -> np.ndarray:
    if t == 0:
        return prep.rho0.copy()
    out = np.zeros((prep.dim, prep.dim), dtype=complex)
    for a, b, rt in prep.blocks:
        phased = phase_rotate(rt, a.eigenvalues, b.eigenvalues, float(t))
        out[np.ix_(a.index, b.index)] = _mul(_mul(a.eigenvectors, phased), _adj(b.eigenvectors))
    return out


def _signed_time(t, direction):
    if direction == FORWARD:
        return t
    if direction == REVERSED:
        return -t
    raise ValueError(f"direction must be {FORWARD!r} or {REVERSED!r}, got {direction!r}")


def evolve(prop: Propagator, rho0, t: float, direction: str = FORWARD) -> np.ndarray:
    """``exp(-iHt) rho0 exp(iHt)``; ``direction="reversed"`` uses ``-t``.

    Raises:
        ValidationError: ``rho0`` has the wrong dimension or is not Hermitian.
    """
    if not np.isfinite(t):
        raise ValidationError(f"time must be finite, got {t!r}")
    return evolve_prepared(prepare(prop, rho0), _signed_time(t, direction))


def evolve_series(
    prop: Propagator,
    rho0,
    times: Sequence[float],
    workers: int = 1,
) -> Iterator[np.ndarray]:
    """Yield the forward-evolved state at each of ``times``, in order.

    With ``workers > 1`` time points are computed on a thread pool; every
    point is computed independently, so results do not depend on ``workers``.
    """
    times = [float(t) for t in times]
    if not all(np.isfinite(times)):
        raise ValidationError("times must be finite")
    prep = prepare(prop, rho0)
    if workers <= 1:
        for t in times:
            yield evolve_prepared(prep, t)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(lambda t: evolve_prepared(prep, t), times)


def corner_element(prep: _Prepared, t: float, row: int, col: int) -> complex:
    """Single element ``rho(t)[row, col]`` in O(d**2) without the full rotation."""
    total = 0j
    for a, b, rt in prep.blocks:
        ia = np.flatnonzero(a.index == row)
        ib = np.flatnonzero(b.index == col)
        if not (ia.size and ib.size):
            continue
        left = a.eigenvectors[ia[0], :] * np.exp(-1j * a.eigenvalues * t)
        right = (b.eigenvectors[ib[0], :] * np.exp(-1j * b.eigenvalues * t)).conj()
        total += left @ rt @ right
    return complex(total)


@lru_cache(maxsize=8)
def _cached_propagator(n_spins, coupling_bytes, blocked, max_spins):
    d = np.frombuffer(coupling_bytes).reshape(n_spins, n_spins)
    h = dq_average(SpinSystem(n_spins, d.copy()), max_spins)
    sectors = parity_sectors(build_basis(n_spins, max_spins).popcount) if blocked else None
    return diagonalize(h, sectors=sectors)


def propagator_for(system: SpinSystem, blocked: bool = False, max_spins: int | None = None):
    """Diagonalized double-quantum Hamiltonian of ``system`` (cached)."""
    max_spins = max_spins or DEFAULT_MAX_SPINS
    return _cached_propagator(
        system.n_spins, np.ascontiguousarray(system.couplings).tobytes(), bool(blocked), max_spins
    )
