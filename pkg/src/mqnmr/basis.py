"""Zeeman product basis, spin-1/2 operators and the standard initial states.

Index convention: basis index ``p`` (0-based in code, ``p + 1`` in reports)
encodes spin ``j`` in bit ``n_spins - 1 - j``, with a 0 bit meaning spin up.
Index 0 is therefore ``|up...up>`` and index ``dim - 1`` is ``|down...down>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SizeError, SpinIndexError, ValidationError

DEFAULT_MAX_SPINS = 12
HERMITIAN_TOL = 1e-10

_SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
_SPLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_SMINUS = _SPLUS.T.copy()


@dataclass(frozen=True, eq=False)
class BasisInfo:
    """Product basis of ``n_spins`` spins-1/2.

    Attributes:
        n_spins: Number of spins.
        dim: Hilbert space dimension, ``2 ** n_spins``.
        m_z: Magnetization quantum number of every basis state.
        popcount: Number of down spins in every basis state.
    """

    n_spins: int
    dim: int
    m_z: np.ndarray
    popcount: np.ndarray

    def __eq__(self, other):
        return isinstance(other, BasisInfo) and other.n_spins == self.n_spins

    def __hash__(self):
        return hash(self.n_spins)


def _popcount(n_spins):
    pc = np.zeros(1, dtype=np.int64)
    for _ in range(n_spins):
        pc = np.concatenate([pc, pc + 1])
    return pc


@lru_cache(maxsize=None)
def _cached_basis(n_spins):
    pc = _popcount(n_spins)
    pc.setflags(write=False)
    m_z = n_spins / 2.0 - pc
    m_z.setflags(write=False)
    return BasisInfo(n_spins=n_spins, dim=2**n_spins, m_z=m_z, popcount=pc)


def check_spin_count(n_spins, max_spins=DEFAULT_MAX_SPINS, minimum=1):
    """Raise :class:`SizeError` unless ``minimum <= n_spins <= max_spins``."""
    if isinstance(n_spins, bool) or int(n_spins) != n_spins:
        raise SizeError(f"n_spins must be an integer, got {n_spins!r}")
    if not minimum <= n_spins <= max_spins:
        raise SizeError(
            f"n_spins={n_spins} outside supported range [{minimum}, {max_spins}] "
            f"(spin cap {max_spins}; raise it with max_spins / --max-spins)"
        )


def build_basis(n_spins: int, max_spins: int = DEFAULT_MAX_SPINS) -> BasisInfo:
    """Return the Zeeman product basis for ``n_spins`` spins-1/2.

    Raises:
        SizeError: if ``n_spins`` is not within ``[1, max_spins]``.
    """
    check_spin_count(n_spins, max_spins)
    return _cached_basis(int(n_spins))


def _embed(op, j, n_spins):
    out = np.ones((1, 1), dtype=complex)
    eye = np.eye(2, dtype=complex)
    for k in range(n_spins):
        out = np.kron(out, op if k == j else eye)
    return out


def single_spin_ops(j: int, basis: BasisInfo):
    """Return ``(Iz_j, Iplus_j, Iminus_j)`` for spin ``j`` (1-based).

    The operators are Kronecker embeddings of the spin-1/2 matrices, so they
    are built with dense products and are meant for small systems and checks.
    """
    if not 1 <= j <= basis.n_spins:
        raise SpinIndexError(f"spin index {j} outside [1, {basis.n_spins}]")
    k = j - 1
    return (
        _embed(_SZ, k, basis.n_spins),
        _embed(_SPLUS, k, basis.n_spins),
        _embed(_SMINUS, k, basis.n_spins),
    )


def collective_iz(basis: BasisInfo) -> np.ndarray:
    """Total z magnetization, diagonal with entries ``m_z``."""
    return np.diag(basis.m_z.astype(complex))


def trace_iz_squared(basis: BasisInfo) -> float:
    """``Tr Iz**2``, equal to ``n * 2**(n - 2)``."""
    return float(np.dot(basis.m_z, basis.m_z))


def equilibrium_state(basis: BasisInfo) -> np.ndarray:
    """High-temperature deviation density matrix ``rho_eq = Iz``."""
    return collective_iz(basis)


def intermediate_state(basis: BasisInfo, sign: int = 1) -> np.ndarray:
    """Two-level mixture ``sign * (|up><up| - |down><down|)``.

    ``sign=-1`` gives ``-e_{1,1} + e_{d,d}``, the initial condition used for
    the two-level scans.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    rho = np.zeros((basis.dim, basis.dim), dtype=complex)
    rho[0, 0] = sign
    rho[-1, -1] = -sign
    return rho


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def as_density(rho, dim=None, tol=HERMITIAN_TOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as complex128.

    Raises:
        ValidationError: wrong shape, non-finite entries, or Hermiticity
            violated by more than ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValidationError(f"density matrix has dim {rho.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(rho)):
        raise ValidationError("density matrix has non-finite entries")
    err = hermiticity_error(rho)
    if err > tol:
        raise ValidationError(f"density matrix is not Hermitian (max deviation {err:.3g})")
    return rho
