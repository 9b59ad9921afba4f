"""Secular dipolar and double-quantum average Hamiltonians.

Both are assembled pair by pair straight from basis-index arithmetic: for a
pair ``(j, k)`` the two-spin products only ever connect state ``p`` with
``p ^ mask`` where ``mask`` flips both spins.  The result is real symmetric
and is returned as ``float64``.
"""

from __future__ import annotations

import numpy as np

from .basis import DEFAULT_MAX_SPINS, build_basis
from .geometry import SpinSystem


def _pair_bits(n_spins, j, k):
    idx = np.arange(2**n_spins)
    bj = (idx >> (n_spins - 1 - j)) & 1
    bk = (idx >> (n_spins - 1 - k)) & 1
    mask = (1 << (n_spins - 1 - j)) | (1 << (n_spins - 1 - k))
    return idx, bj, bk, mask


def dipolar_secular(system: SpinSystem, max_spins: int = DEFAULT_MAX_SPINS) -> np.ndarray:
    """``sum_{j<k} D_jk [Iz_j Iz_k - (I+_j I-_k + I-_j I+_k) / 4]``.

    Uses the flip-flop term, so the operator conserves total ``m_z``.
    """
    n = system.n_spins
    basis = build_basis(n, max_spins)
    h = np.zeros((basis.dim, basis.dim))
    diag = np.zeros(basis.dim)
    for j, k, djk in system.pairs():
        idx, bj, bk, mask = _pair_bits(n, j, k)
        # Iz_j Iz_k = +1/4 for parallel spins, -1/4 for antiparallel
        diag += djk * np.where(bj == bk, 0.25, -0.25)
        flip = idx[bj != bk]
        h[flip ^ mask, flip] += -0.25 * djk
    h[np.diag_indices(basis.dim)] += diag
    return h


def dq_average(system: SpinSystem, max_spins: int = DEFAULT_MAX_SPINS) -> np.ndarray:
    """``-(1/2) sum_{j<k} D_jk (I+_j I+_k + I-_j I-_k)``.

    Nonzero only between states whose ``m_z`` differ by exactly 2.
    """
    n = system.n_spins
    basis = build_basis(n, max_spins)
    h = np.zeros((basis.dim, basis.dim))
    for j, k, djk in system.pairs():
        idx, bj, bk, mask = _pair_bits(n, j, k)
        src = idx[bj == bk]
        h[src ^ mask, src] += -0.5 * djk
    return h
