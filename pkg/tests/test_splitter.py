import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lossyprop.exceptions import ConfigError, InvalidLossFraction
from lossyprop.fock import (
    make_two_mode_state,
    noon_state,
    pure_density_matrix,
    single_mode_fock_density_matrix,
    single_mode_pure_density_matrix,
)
from lossyprop.medium import ChannelPair, ConstantProfile
from lossyprop.propagation import general_output, noon_output, single_mode_output
from lossyprop.splitter import (
    SplitterChain,
    build_transfer_matrix,
    chain_for_depth,
    enumerate_finite_m_populations,
    finite_m_single_mode_output,
    finite_m_two_mode_output,
    input_mode_coefficients,
    iterate_channel,
    loglog_slope,
    make_chain,
    single_mode_convergence,
    single_splitter_kraus,
)

from oracles import random_alpha


def test_make_chain_beer_limit():
    chain = make_chain(1000, 0.2 * 5 / 1000)
    assert abs(chain.reflection) ** 2 == pytest.approx(1e-3, rel=1e-12)
    assert abs(chain.transmission) ** 2000 == pytest.approx(math.exp(-1), abs=5e-4)


@pytest.mark.parametrize("fraction", [1e-6, 0.3, 0.5, 0.999])
def test_make_chain_unitarity(fraction):
    chain = make_chain(7, fraction, phase=0.37)
    t, l = chain.transmission, chain.reflection
    assert abs(abs(l) ** 2 + abs(t) ** 2 - 1) < 1e-12
    assert abs(l * t.conjugate() + t * l.conjugate()) < 1e-12


def test_make_chain_phase_accumulates():
    chain = make_chain(17, 0.01, phase=math.pi / 17)
    total = chain.transmission ** 17
    assert total / abs(total) == pytest.approx(cmath.exp(1j * math.pi), abs=1e-12)


def test_make_chain_rejects_bad_fraction():
    for bad in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(InvalidLossFraction):
            make_chain(3, bad)


def test_chain_rejects_non_unitary():
    with pytest.raises(ConfigError):
        SplitterChain(2, 0.9, 0.1)
    with pytest.raises(ConfigError):
        SplitterChain(2, math.sqrt(0.5), math.sqrt(0.5))  # real L and T break the phase condition


def test_transfer_matrix_m1():
    chain = make_chain(1, 0.3, 0.2)
    t, l = chain.transmission, chain.reflection
    np.testing.assert_allclose(build_transfer_matrix(chain), [[t, l], [l, t]])


def test_transfer_matrix_m2_pattern():
    chain = make_chain(2, 0.4, -0.6)
    t, l = chain.transmission, chain.reflection
    u = build_transfer_matrix(chain)
    np.testing.assert_allclose(u[0], [t * t, l, l * t])
    np.testing.assert_allclose(u[2], [l, 0, t])
    np.testing.assert_allclose(u[1], [l * t, t, l * l])


def _transfer_by_substitution(chain):
    """Compose the splitters one at a time.

    Inverting each splitter gives a_{k-1} = T a_k + L s_k and
    d_k = L a_k + T s_k; substitute from the last splitter backwards.
    """
    m, t, l = chain.m_count, chain.transmission, chain.reflection
    basis = np.eye(m + 1, dtype=complex)  # columns: a_M, s_1..s_M
    a = [None] * (m + 1)
    a[m] = basis[0]
    for k in range(m, 0, -1):
        a[k - 1] = t * a[k] + l * basis[k]
    rows = [a[0]] + [l * a[k] + t * basis[k] for k in range(1, m + 1)]
    return np.array(rows)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 9])
def test_transfer_matrix_matches_substitution(m):
    chain = make_chain(m, 0.21, 0.8)
    np.testing.assert_allclose(build_transfer_matrix(chain), _transfer_by_substitution(chain), atol=1e-15)


def test_transfer_matrix_m3_unitary(rng):
    for _ in range(5):
        chain = make_chain(3, rng.uniform(0.01, 0.99), rng.uniform(-3, 3))
        u = build_transfer_matrix(chain)
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


@given(st.integers(1, 64), st.floats(1e-6, 1 - 1e-6), st.floats(-math.pi, math.pi))
@settings(max_examples=30, deadline=None)
def test_transfer_matrix_unitary_property(m, fraction, phase):
    u = build_transfer_matrix(make_chain(m, fraction, phase))
    assert np.max(np.abs(u.conj().T @ u - np.eye(m + 1))) < 1e-10


@pytest.mark.parametrize("m", [1, 4, 50])
def test_input_mode_row_sum(m):
    chain = make_chain(m, 0.05, 0.3)
    coeffs = input_mode_coefficients(chain)
    assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(1, abs=1e-13)
    t2, l2 = abs(chain.transmission) ** 2, abs(chain.reflection) ** 2
    assert t2 ** m + l2 * sum(t2 ** (i - 1) for i in range(1, m + 1)) == pytest.approx(1, abs=1e-14)


def test_finite_m_single_splitter():
    chain = make_chain(1, 0.3)
    pops = finite_m_single_mode_output(1, chain).populations()
    np.testing.assert_allclose(pops, [0.3, 0.7], atol=1e-15)


def test_finite_m_lossless_chain():
    chain = SplitterChain(12, 1.0, 0.0)
    rho = finite_m_single_mode_output(6, chain).elements
    expected = np.zeros((7, 7))
    expected[6, 6] = 1
    np.testing.assert_array_equal(rho, expected)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("m", [1, 2, 5, 8])
def test_literal_enumeration_matches_closed_form(n, m):
    chain = make_chain(m, 0.17, 0.4)
    literal = enumerate_finite_m_populations(n, chain)
    closed = finite_m_single_mode_output(n, chain).populations()
    np.testing.assert_allclose(literal, closed, atol=1e-15)


def test_literal_enumeration_limits():
    with pytest.raises(ConfigError):
        enumerate_finite_m_populations(5, make_chain(2, 0.1))
    with pytest.raises(ConfigError):
        enumerate_finite_m_populations(2, make_chain(9, 0.1))


def test_finite_m_n10_m1000_close_to_continuum():
    mu, x, m = 0.2, 5.0, 1000
    finite = finite_m_single_mode_output(10, make_chain(m, mu * x / m)).elements
    continuum = single_mode_output(10, ConstantProfile(mu), x).elements
    assert np.max(np.abs(finite - continuum)) < 2e-2


def test_single_mode_convergence_order_one():
    ms = [10, 100, 1000, 10000]
    errors = single_mode_convergence(10, 1.0, ms)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert loglog_slope(ms, errors) == pytest.approx(-1, abs=0.1)


def test_kraus_lossless():
    ch = single_splitter_kraus(4, 1.0)
    np.testing.assert_allclose(ch.operators[0], np.eye(5))
    assert np.all(ch.operators[1:] == 0)


def test_kraus_full_loss_maps_to_vacuum():
    ch = single_splitter_kraus(3, 0.0)
    rho = iterate_channel(single_mode_fock_density_matrix(3), ch, 1).elements
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    np.testing.assert_allclose(rho, expected, atol=1e-15)


def test_kraus_half_transmission_n2():
    t = math.sqrt(0.5)
    ch = single_splitter_kraus(2, t)
    l = 1j * math.sqrt(0.5)
    assert ch.operators[1][1, 2] == pytest.approx(math.sqrt(2) * t * l)
    pops = iterate_channel(single_mode_fock_density_matrix(2), ch, 1).populations()
    np.testing.assert_allclose(pops, [0.25, 0.5, 0.25], atol=1e-15)
    np.testing.assert_allclose(
        pops, single_mode_output(2, ConstantProfile(math.log(2)), 1.0).populations(), atol=1e-15
    )


@pytest.mark.parametrize("n_max", [0, 1, 5, 10])
def test_kraus_completeness(rng, n_max):
    for _ in range(5):
        t = rng.uniform(0, 1) * np.exp(1j * rng.uniform(-3, 3))
        assert single_splitter_kraus(n_max, t).completeness_defect() < 1e-12


def test_iterate_zero_times_is_identity(rng):
    amps = rng.normal(size=4) + 1j * rng.normal(size=4)
    rho = single_mode_pure_density_matrix(amps / np.linalg.norm(amps))
    out = iterate_channel(rho, single_splitter_kraus(3, 0.6), 0)
    np.testing.assert_array_equal(out.elements, rho.elements)


def test_iterate_vacuum_fixed_point():
    out = iterate_channel(single_mode_fock_density_matrix(0, 4), single_splitter_kraus(4, 0.3 + 0.2j), 7)
    assert out.elements[0, 0] == pytest.approx(1)
    assert np.sum(np.abs(out.elements)) == pytest.approx(1)


def test_iterate_coherence_converges_to_continuum():
    n, depth, phase = 4, 1.0, 0.5
    amps = np.zeros(n + 1, dtype=complex)
    amps[0] = amps[n] = 1 / math.sqrt(2)
    rho = single_mode_pure_density_matrix(amps)
    target = 0.5 * math.exp(-n * depth / 2) * np.exp(-1j * n * phase)
    errors = []
    ms = [50, 100, 200, 400]
    for m in ms:
        chain = chain_for_depth(m, depth, phase)
        out = iterate_channel(rho, single_splitter_kraus(n, chain.transmission, chain.reflection), m)
        assert abs(out.trace() - 1) < 1e-10
        errors.append(abs(out.elements[0, n] - target))
    assert loglog_slope(ms, errors) == pytest.approx(-1, abs=0.1)


def test_two_mode_noon_n4_m2000():
    depth, phase, m = 0.8, 0.3, 2000
    chain = chain_for_depth(m, depth, phase)
    f = finite_m_two_mode_output(noon_state(4), chain, chain)
    g = noon_output(4, ChannelPair.constant(depth, phase), 1.0)
    assert abs(f.element(4, 0, 0, 4) - g.element(4, 0, 0, 4)) < 1e-3


def test_two_mode_zero_splitters(rng):
    state = make_two_mode_state(2, random_alpha(rng, 2))
    empty = SplitterChain(0, 1.0, 0.0)
    out = finite_m_two_mode_output(state, empty, empty)
    np.testing.assert_allclose(out.elements, pure_density_matrix(state).elements, atol=1e-15)


def test_two_mode_random_n2_converges(rng):
    state = make_two_mode_state(2, random_alpha(rng, 2))
    exact = general_output(state, ChannelPair.constant(1.0, 0.4, 1.0, -0.3), 1.0).elements
    errs = {}
    for m in (2500, 5000):
        f = finite_m_two_mode_output(state, chain_for_depth(m, 1.0, 0.4), chain_for_depth(m, 1.0, -0.3))
        errs[m] = np.max(np.abs(f.elements - exact))
    assert errs[5000] <= 5e-4
    assert errs[5000] / errs[2500] == pytest.approx(0.5, abs=0.05)
