"""Independent reference implementations used only by the tests."""

import itertools

import numpy as np
import scipy.linalg

SX = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
SY = np.array([[0, -0.5j], [0.5j, 0]], dtype=complex)
SZ = np.array([[0.5, 0], [0, -0.5]], dtype=complex)


def embed(op, j, n):
    """Spin operator on 0-based spin ``j`` via explicit Kronecker products."""
    mats = [op if k == j else np.eye(2) for k in range(n)]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def kronecker_hamiltonian(couplings, kind="dq"):
    """Hamiltonians from Cartesian spin operators.

    Uses I+I+ + I-I- = 2 (IxIx - IyIy) and I+I- + I-I+ = 2 (IxIx + IyIy), so
    nothing is shared with the index-arithmetic construction.
    """
    d = np.asarray(couplings)
    n = d.shape[0]
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j, k in itertools.combinations(range(n), 2):
        xx = embed(SX, j, n) @ embed(SX, k, n)
        yy = embed(SY, j, n) @ embed(SY, k, n)
        zz = embed(SZ, j, n) @ embed(SZ, k, n)
        if kind == "dq":
            h += -0.5 * d[j, k] * 2 * (xx - yy)
        else:
            h += d[j, k] * (zz - 0.25 * 2 * (xx + yy))
    return h


def m_z_by_loop(n):
    out = []
    for p in range(2**n):
        down = sum((p >> b) & 1 for b in range(n))
        out.append(n / 2 - down)
    return np.array(out)


def brute_force_spectrum(rho, n, normalization):
    """Per-element double loop over (p, q) with no order bucketing tricks."""
    mz = m_z_by_loop(n)
    orders = {k: 0.0 for k in range(-n, n + 1)}
    diag = 0.0
    for p in range(2**n):
        for q in range(2**n):
            k = int(round(mz[p] - mz[q]))
            v = abs(rho[p, q]) ** 2
            orders[k] += v
            if p == q:
                diag += v
    orders = {k: v / normalization for k, v in orders.items()}
    diag /= normalization
    return orders, diag, orders[0] - diag


def expm_evolve(h, rho0, t):
    """Propagation by matrix exponential, independent of eigendecomposition."""
    u = scipy.linalg.expm(-1j * np.asarray(h, dtype=complex) * t)
    return u @ rho0 @ u.conj().T


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2
