import numpy as np
import pytest
from hypothesis import given, strategies as st

from mqnmr.basis import build_basis, equilibrium_state, intermediate_state
from mqnmr.dynamics import FORWARD, REVERSED, evolve, propagator_for
from mqnmr.errors import DegenerateStateError, DomainError, SpinIndexError
from mqnmr.geometry import SpinSystem, chain_couplings, rectangle_couplings, ring_couplings
from mqnmr.protocol import (
    IDENTICALLY_ZERO,
    ProtocolSchedule,
    find_homqc_maxima,
    find_nd0q_zeros,
    partial_saturate,
    pseudopure_metrics,
    run_protocol,
)

from oracles import random_hermitian


def test_partial_saturate_two_spin_example():
    rho = np.diag([1.0, 0.0, 0.0, -1.0]).astype(complex)
    out = partial_saturate(rho)
    np.testing.assert_allclose(np.diagonal(out).real, [1 / 3, 1 / 3, 1 / 3, -1], atol=1e-15)
    assert np.trace(out) == pytest.approx(np.trace(rho), abs=1e-15)


@given(a=st.floats(-5, 5), b=st.floats(-5, 5), n=st.integers(1, 5))
def test_partial_saturate_fixed_point(a, b, n):
    d = 2**n
    rho = np.diag([a] * (d - 1) + [b]).astype(complex)
    out = partial_saturate(rho)
    assert np.array_equal(out, rho)
    assert np.trace(out) == np.trace(rho)


@given(seed=st.integers(0, 2**32 - 1))
def test_partial_saturate_idempotent(seed):
    rho = random_hermitian(np.random.default_rng(seed), 8)
    once = partial_saturate(rho)
    assert np.array_equal(partial_saturate(once), once)
    assert once[-1, -1] == rho[-1, -1].real
    assert np.trace(once).real == pytest.approx(np.trace(rho).real, abs=1e-12)
    assert not np.any(once - np.diag(np.diagonal(once)))


def test_metrics_examples():
    b = build_basis(4)
    dev, off, signs = pseudopure_metrics(intermediate_state(b, 1))
    assert (dev, off, signs) == (0.0, 0.0, ("+", "-"))
    dev, _, signs = pseudopure_metrics(equilibrium_state(b))
    assert dev == 0.5 and signs == ("+", "-")
    dev, _, signs = pseudopure_metrics(np.eye(4))
    assert dev == 1.0 and signs == ("+", "+")
    rho = np.diag([0.0, 1.0, 0.0, 1e-3]).astype(complex)
    assert pseudopure_metrics(rho)[2] == ("0", "+")
    with pytest.raises(DegenerateStateError):
        pseudopure_metrics(np.diag([0.0, 1.0, 1.0, 0.0]))


def test_offdiag_norm():
    rho = np.diag([1.0, 0.0, 0.0, -1.0]).astype(complex)
    rho[1, 2] = rho[2, 1] = 0.5
    assert pseudopure_metrics(rho)[1] == pytest.approx(np.sqrt(0.5) / np.sqrt(2))


@pytest.mark.parametrize("system", [ring_couplings(4), rectangle_couplings(), chain_couplings(4)])
def test_round_trip(system, rng):
    prop = propagator_for(system)
    rho = random_hermitian(rng, 16)
    out = evolve(prop, evolve(prop, rho, 7.3, FORWARD), 7.3, REVERSED)
    np.testing.assert_allclose(out, rho, atol=1e-8)


def test_identity_protocol_returns_equilibrium():
    b = build_basis(4)
    res = run_protocol(ring_couplings(4), ProtocolSchedule(0.0, 0, 0.0))
    np.testing.assert_array_equal(res.intermediate, equilibrium_state(b))
    assert res.diagonal.shape == (16,)


def test_uncoupled_system_is_static():
    sys4 = SpinSystem(4, np.zeros((4, 4)))
    res = run_protocol(sys4, ProtocolSchedule(5.0, 0, 2.0))
    np.testing.assert_allclose(res.intermediate, equilibrium_state(build_basis(4)), atol=1e-15)
    with pytest.raises(DegenerateStateError):
        run_protocol(sys4, ProtocolSchedule(5.0, 2, 2.0))


def test_saturation_applies_to_final_only():
    res = run_protocol(rectangle_couplings(), ProtocolSchedule(7.86, 2, 7.86, saturate=True))
    d = np.diagonal(res.final).real
    assert np.all(d[:-1] == d[0])
    assert d[-1] == res.diagonal[-1]
    assert not np.array_equal(res.final, res.intermediate)


def test_schedule_validation():
    with pytest.raises(DomainError):
        ProtocolSchedule(-1.0, 2, 1.0)
    with pytest.raises(DomainError):
        ProtocolSchedule(1.0, 2, float("nan"))
    with pytest.raises(DomainError):
        ProtocolSchedule(1.0, -2, 1.0)
    with pytest.raises(SpinIndexError):
        run_protocol(ring_couplings(4), ProtocolSchedule(1.0, 6, 1.0))


def test_grid_validation():
    with pytest.raises(DomainError):
        find_nd0q_zeros(ring_couplings(4), equilibrium_state(build_basis(4)), 0.0)
    with pytest.raises(DomainError):
        find_nd0q_zeros(ring_couplings(4), equilibrium_state(build_basis(4)), 5.0, dt=-1)
    with pytest.raises(DomainError):
        find_nd0q_zeros(ring_couplings(4), equilibrium_state(build_basis(4)), 5.0, threshold=0)


def test_intermediate_state_is_stationary_in_nd0q():
    b = build_basis(4)
    assert find_nd0q_zeros(rectangle_couplings(), intermediate_state(b, -1), 15.0) is IDENTICALLY_ZERO


def test_two_spin_nd0q_is_identically_zero():
    pair = SpinSystem(2, np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert find_nd0q_zeros(pair, equilibrium_state(build_basis(2)), 5.0) is IDENTICALLY_ZERO


def test_two_spin_homqc_maxima():
    # J_2Q = sin^2(t)/2 peaks at pi/2 + m pi
    pair = SpinSystem(2, np.array([[0.0, 1.0], [1.0, 0.0]]))
    peaks = find_homqc_maxima(pair, t_max=6.0)
    times = sorted(t for t, _ in peaks)
    np.testing.assert_allclose(times, [np.pi / 2, 3 * np.pi / 2], atol=1e-4)
    assert all(v == pytest.approx(0.5, abs=1e-8) for _, v in peaks)


def test_homqc_empty_when_never_excited():
    b = build_basis(4)
    assert find_homqc_maxima(rectangle_couplings(), intermediate_state(b, -1), t_max=5.0) == []


def test_homqc_ignores_roundoff_ripples():
    from mqnmr.geometry import cyclopentane_couplings

    assert find_homqc_maxima(cyclopentane_couplings(), t_max=1.0, blocked=True) == []
