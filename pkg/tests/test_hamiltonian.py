import numpy as np
import pytest

from mqnmr.basis import build_basis, collective_iz
from mqnmr.geometry import SpinSystem, rectangle_couplings, ring_couplings, chain_couplings
from mqnmr.hamiltonian import dipolar_secular, dq_average

from oracles import kronecker_hamiltonian


def pair(d=1.0):
    return SpinSystem(2, np.array([[0.0, d], [d, 0.0]]))


def test_secular_two_spins():
    h = dipolar_secular(pair())
    expected = np.diag([0.25, -0.25, -0.25, 0.25])
    expected[1, 2] = expected[2, 1] = -0.25
    np.testing.assert_array_equal(h, expected)


def test_dq_two_spins():
    h = dq_average(pair())
    expected = np.zeros((4, 4))
    expected[0, 3] = expected[3, 0] = -0.5
    np.testing.assert_array_equal(h, expected)


@pytest.mark.parametrize("build", [dipolar_secular, dq_average])
def test_zero_couplings_give_zero_operator(build):
    assert not np.any(build(SpinSystem(3, np.zeros((3, 3)))))


SYSTEMS = [
    rectangle_couplings(),
    ring_couplings(5),
    chain_couplings(3),
    SpinSystem(4, np.array([[0, 0.3, -1.2, 0.7], [0.3, 0, 0.1, -0.4],
                            [-1.2, 0.1, 0, 2.0], [0.7, -0.4, 2.0, 0]])),
]


@pytest.mark.parametrize("system", SYSTEMS)
@pytest.mark.parametrize("kind,build", [("dq", dq_average), ("secular", dipolar_secular)])
def test_matches_kronecker_oracle(system, kind, build):
    np.testing.assert_allclose(build(system), kronecker_hamiltonian(system.couplings, kind), atol=1e-13)


def test_secular_conserves_m_z():
    system = rectangle_couplings()
    h = dipolar_secular(system)
    iz = collective_iz(build_basis(4))
    assert np.max(np.abs(h @ iz - iz @ h)) < 1e-12


@pytest.mark.parametrize("system", [rectangle_couplings(), ring_couplings(6), chain_couplings(5)])
def test_dq_selection_rule(system):
    h = dq_average(system)
    mz = build_basis(system.n_spins).m_z
    rows, cols = np.nonzero(h)
    assert rows.size
    np.testing.assert_array_equal(np.abs(mz[rows] - mz[cols]), 2)
    assert not np.any(np.diag(h))


@pytest.mark.parametrize("system", SYSTEMS + [ring_couplings(6)])
def test_hermitian_and_traceless(system):
    for h in (dq_average(system), dipolar_secular(system)):
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        assert abs(np.trace(h)) < 1e-10
