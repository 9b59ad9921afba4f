"""NumPy versions of the compiled kernels in ``_kernels.pyx``."""

from functools import lru_cache

import numpy as np


def phase_rotate(rt, lam_a, lam_b, t):
    pa = np.exp(-1j * np.asarray(lam_a) * t)
    pb = np.exp(1j * np.asarray(lam_b) * t)
    return pa[:, None] * rt * pb[None, :]


@lru_cache(maxsize=16)
def _order_index(popcount_bytes, n_spins):
    pc = np.frombuffer(popcount_bytes, dtype=np.int64)
    # bin of (p, q) is k + n with k = m_p - m_q = pc_q - pc_p
    return (n_spins - pc[:, None] + pc[None, :]).ravel()


def coherence_sums(rho, popcount, n_spins):
    pc = np.ascontiguousarray(popcount, dtype=np.int64)
    idx = _order_index(pc.tobytes(), n_spins)
    w = (rho.real**2 + rho.imag**2).ravel()
    w[:: rho.shape[0] + 1] = 0.0
    orders = np.bincount(idx, weights=w, minlength=2 * n_spins + 1)
    dg = np.diagonal(rho)
    diag = 0.0
    for v in (dg.real**2 + dg.imag**2):
        diag += v
    return orders, float(diag)
