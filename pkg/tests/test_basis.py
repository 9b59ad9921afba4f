import math

import numpy as np
import pytest

from mqnmr import basis as B
from mqnmr.errors import SizeError, SpinIndexError, ValidationError

from oracles import m_z_by_loop


def test_single_spin_basis():
    assert list(B.build_basis(1).m_z) == [0.5, -0.5]


def test_two_spin_basis():
    assert list(B.build_basis(2).m_z) == [1, 0, 0, -1]


def test_four_spin_basis():
    b = B.build_basis(4)
    assert b.dim == 16
    assert b.m_z[0] == 2 and b.m_z[15] == -2
    assert np.count_nonzero(b.m_z == 0) == 6


@pytest.mark.parametrize("n", range(1, 9))
def test_m_z_sums_and_multiplicities(n):
    b = B.build_basis(n)
    np.testing.assert_array_equal(b.m_z, m_z_by_loop(n))
    assert sum(b.m_z) == 0
    assert sum(m * m for m in b.m_z) == n * 2 ** (n - 2)
    for m in np.arange(-n / 2, n / 2 + 1):
        assert np.count_nonzero(b.m_z == m) == math.comb(n, int(n / 2 - m))


@pytest.mark.parametrize("n", [0, 13, -1])
def test_size_cap(n):
    with pytest.raises(SizeError, match="12"):
        B.build_basis(n)


def test_size_cap_override():
    assert B.build_basis(13, max_spins=13).dim == 2**13


def test_single_spin_operator_matrices():
    iz, ip, im = B.single_spin_ops(1, B.build_basis(1))
    np.testing.assert_array_equal(iz, np.diag([0.5, -0.5]))
    np.testing.assert_array_equal(ip, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(im, [[0, 0], [1, 0]])


def test_kronecker_placement():
    iz2, _, _ = B.single_spin_ops(2, B.build_basis(2))
    np.testing.assert_array_equal(np.diag(iz2), [0.5, -0.5, 0.5, -0.5])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_operator_algebra(n):
    b = B.build_basis(n)
    ops = [B.single_spin_ops(j, b) for j in range(1, n + 1)]
    total = np.zeros((b.dim, b.dim), dtype=complex)
    for iz, ip, im in ops:
        np.testing.assert_array_equal(ip, im.conj().T)
        assert not np.any(ip @ ip)
        np.testing.assert_allclose(iz @ ip - ip @ iz, ip, atol=1e-12)
        np.testing.assert_allclose(iz @ im - im @ iz, -im, atol=1e-12)
        for iz_k, _, _ in ops:
            assert not np.any(iz @ iz_k - iz_k @ iz)
        total += iz
    np.testing.assert_allclose(B.collective_iz(b), total, atol=1e-12)


def test_spin_index_range():
    with pytest.raises(SpinIndexError):
        B.single_spin_ops(3, B.build_basis(2))
    with pytest.raises(SpinIndexError):
        B.single_spin_ops(0, B.build_basis(2))


@pytest.mark.parametrize("n,expected", [(2, 2), (4, 16), (6, 96)])
def test_trace_iz_squared(n, expected):
    b = B.build_basis(n)
    iz = B.collective_iz(b)
    assert np.trace(iz) == 0
    assert np.trace(iz @ iz).real == expected == B.trace_iz_squared(b)


def test_collective_iz_two_spins():
    np.testing.assert_array_equal(B.collective_iz(B.build_basis(2)), np.diag([1, 0, 0, -1]))


def test_equilibrium_state():
    rho = B.equilibrium_state(B.build_basis(4))
    assert rho[0, 0] == 2 and rho[15, 15] == -2
    assert not np.any(rho - np.diag(np.diagonal(rho)))
    assert B.hermiticity_error(rho) == 0


@pytest.mark.parametrize("n", [4, 6, 10])
def test_intermediate_state_matches_captions(n):
    # -e_{1,1} + e_{d,d}
    b = B.build_basis(n)
    rho = B.intermediate_state(b, -1)
    expected = np.zeros((b.dim, b.dim))
    expected[0, 0], expected[-1, -1] = -1, 1
    np.testing.assert_array_equal(rho, expected)
    np.testing.assert_array_equal(B.intermediate_state(b, 1), -expected)


def test_intermediate_state_sign_checked():
    with pytest.raises(ValueError):
        B.intermediate_state(B.build_basis(2), 0)


def test_as_density_rejects_non_hermitian():
    with pytest.raises(ValidationError, match="Hermitian"):
        B.as_density(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValidationError):
        B.as_density(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        B.as_density(np.diag([np.nan, 0]))
