import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lossyprop.exceptions import AllZeroAmplitudes, CutoffExceeded, DimensionMismatch
from lossyprop.fock import (
    MAX_CUTOFF,
    CombinatoricsTable,
    check_cutoff,
    flatten,
    make_two_mode_state,
    noon_state,
    product_state,
    pure_density_matrix,
    unflatten,
)

from oracles import random_alpha


def test_make_state_normalizes_n1_noon():
    alpha = np.zeros((2, 2))
    alpha[1, 0] = alpha[0, 1] = 1.0
    state = make_two_mode_state(1, alpha)
    assert state.alpha[1, 0] == pytest.approx(1 / math.sqrt(2))
    assert state.alpha[0, 1] == pytest.approx(1 / math.sqrt(2))
    assert state.rescaled
    np.testing.assert_allclose(state.alpha, noon_state(1).alpha, atol=1e-15)


def test_make_state_accepts_noon_grid_n10():
    alpha = np.zeros((11, 11), dtype=complex)
    alpha[10, 0] = alpha[0, 10] = 1 / math.sqrt(2)
    state = make_two_mode_state(10, alpha)
    assert not state.rescaled
    np.testing.assert_allclose(state.alpha, noon_state(10).alpha, atol=1e-15)


def test_make_state_rescales_norm_3_7(rng):
    alpha = random_alpha(rng, 2) * 3.7
    state = make_two_mode_state(2, alpha)
    assert abs(np.sum(np.abs(state.alpha) ** 2) - 1) < 1e-12
    assert state.rescaled


def test_make_state_errors():
    with pytest.raises(AllZeroAmplitudes):
        make_two_mode_state(2, np.zeros((3, 3)))
    with pytest.raises(DimensionMismatch):
        make_two_mode_state(2, np.ones((3, 4)))
    with pytest.raises(CutoffExceeded):
        make_two_mode_state(MAX_CUTOFF + 1, np.ones((32, 32)))


def test_state_is_immutable():
    state = noon_state(3)
    with pytest.raises(ValueError):
        state.alpha[0, 0] = 1.0
    with pytest.raises(ValueError):
        pure_density_matrix(state).elements[0, 0] = 1.0


def test_noon_state():
    s = noon_state(10)
    nonzero = np.argwhere(s.alpha != 0)
    assert sorted(map(tuple, nonzero)) == [(0, 10), (10, 0)]
    assert s.alpha[10, 0] == s.alpha[0, 10] == 1 / math.sqrt(2)
    assert noon_state(1).alpha.shape == (2, 2)
    with pytest.raises(CutoffExceeded):
        noon_state(0)
    with pytest.raises(CutoffExceeded):
        noon_state(5, n_max=3)


def test_noon_state_embedded_in_larger_cutoff():
    s = noon_state(2, n_max=4)
    assert s.alpha.shape == (5, 5)
    assert s.alpha[2, 0] == s.alpha[0, 2] == 1 / math.sqrt(2)


def test_pure_density_matrix_n1_noon():
    rho = pure_density_matrix(noon_state(1)).elements
    i, j = flatten(1, 0, 1), flatten(0, 1, 1)
    expected = np.zeros((4, 4))
    for r in (i, j):
        for c in (i, j):
            expected[r, c] = 0.5
    np.testing.assert_allclose(rho, expected, atol=1e-16)


def test_pure_density_matrix_vacuum():
    alpha = np.zeros((3, 3))
    alpha[0, 0] = 1
    rho = pure_density_matrix(make_two_mode_state(2, alpha)).elements
    expected = np.zeros((9, 9))
    expected[0, 0] = 1
    np.testing.assert_array_equal(rho, expected)


def test_pure_density_matrix_random_purity(rng):
    rho = pure_density_matrix(make_two_mode_state(3, random_alpha(rng, 3)))
    direct = np.trace(rho.elements @ rho.elements).real
    assert abs(direct - 1) < 1e-12
    assert abs(rho.purity - 1) < 1e-12


def test_pure_density_matrix_rank_one(rng):
    rho = pure_density_matrix(make_two_mode_state(4, random_alpha(rng, 4)))
    ev = np.linalg.eigvalsh(rho.elements)
    assert ev[-1] == pytest.approx(1, abs=1e-10)
    assert np.all(np.abs(ev[:-1]) < 1e-10)


def test_product_state_factorizes():
    s = product_state([1, 1, 0], [0, 1, 1j])
    np.testing.assert_allclose(s.alpha, np.outer([1, 1, 0], [0, 1, 1j]) / 2, atol=1e-15)


@given(st.integers(0, MAX_CUTOFF), st.data())
def test_flatten_is_bijection(n_max, data):
    p = data.draw(st.integers(0, n_max))
    q = data.draw(st.integers(0, n_max))
    idx = flatten(p, q, n_max)
    assert 0 <= idx < (n_max + 1) ** 2
    assert unflatten(idx, n_max) == (p, q)


def test_flatten_covers_all_indices():
    n_max = 4
    seen = {flatten(p, q, n_max) for p in range(5) for q in range(5)}
    assert seen == set(range(25))


def test_log_factorials_match_exact():
    table = CombinatoricsTable.for_cutoff(10)
    assert table.log_factorials.size == 21
    for n in range(21):
        assert math.exp(table.log_factorials[n]) == pytest.approx(math.factorial(n), rel=1e-12)
    assert table.log_factorial(-1) == math.inf


def test_binomial_table_pascal():
    table = CombinatoricsTable.for_cutoff(MAX_CUTOFF)
    top = 2 * MAX_CUTOFF
    for n in range(2, top + 1):
        for k in range(1, n):
            assert table.binomial(n, k) == table.binomial(n - 1, k - 1) + table.binomial(n - 1, k)
    assert table.binomial(3, 5) == 0
    assert table.binomial(60, 30) == math.comb(60, 30)


def test_check_cutoff():
    assert check_cutoff(0) == 0
    assert check_cutoff(30.0) == 30
    for bad in (-1, 31, 2.5, True):
        with pytest.raises(CutoffExceeded):
            check_cutoff(bad)
