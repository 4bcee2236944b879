from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigencycle.errors import DimensionError, InvalidState, NoInteriorEquilibrium
from eigencycle.fixtures import matching_pennies_game
from eigencycle.game import (
    PayoffBimatrix,
    check_state,
    expected_payoffs,
    interior_rest_point,
    replicator_velocity,
)

NASH = np.array([0.4, 0.2, 0.2, 0.2, 0.4, 0.2, 0.2, 0.2])


def random_state(rng, n_a, n_b):
    return np.concatenate([rng.dirichlet(np.ones(n_a)), rng.dirichlet(np.ones(n_b))])


def test_payoffs_at_nash(oneill):
    prof = expected_payoffs(oneill, NASH)
    np.testing.assert_allclose(prof.u[:4], -0.2, atol=1e-15)
    np.testing.assert_allclose(prof.u[4:], 0.2, atol=1e-15)
    assert prof.u_bar_a == pytest.approx(-0.2)
    assert prof.u_bar_b == pytest.approx(0.2)


def test_payoffs_against_pure_b1(oneill):
    s = np.array([0.4, 0.2, 0.2, 0.2, 1, 0, 0, 0])
    prof = expected_payoffs(oneill, s)
    np.testing.assert_allclose(prof.u[:4], [1, -1, -1, -1])
    assert prof.u_bar_a == pytest.approx(-0.2)


def test_velocity_hand_example(oneill):
    s = np.array([0.4, 0.2, 0.2, 0.2, 1, 0, 0, 0])
    v = replicator_velocity(oneill, s)
    # x_i (U_i - Ubar) with U_A = (1,-1,-1,-1), Ubar = -0.2; B is at a vertex
    expected = [0.4 * 1.2, 0.2 * -0.8, 0.2 * -0.8, 0.2 * -0.8, 0, 0, 0, 0]
    np.testing.assert_allclose(v, expected, atol=1e-15)
    np.testing.assert_allclose(v, [0.48, -0.16, -0.16, -0.16, 0, 0, 0, 0], atol=1e-15)


def test_exact_state_gives_exact_velocity(oneill):
    s = np.array([Fraction(2, 5), Fraction(1, 5), Fraction(1, 5), Fraction(1, 5), 1, 0, 0, 0], dtype=object)
    v = replicator_velocity(oneill, s)
    assert list(v[:4]) == [Fraction(12, 25), Fraction(-4, 25), Fraction(-4, 25), Fraction(-4, 25)]


def test_rest_points():
    mp = matching_pennies_game()
    np.testing.assert_allclose(interior_rest_point(mp), [0.5] * 4)


def test_oneill_rest_point_exact(oneill):
    x = interior_rest_point(oneill, exact=True)
    assert list(x) == [Fraction(2, 5)] + [Fraction(1, 5)] * 3 + [Fraction(2, 5)] + [Fraction(1, 5)] * 3
    assert np.abs(replicator_velocity(oneill, x.astype(float))).max() < 1e-15


def _zero_sum_with_interior(rng, n):
    # M - (M q) 1^T - 1 p^T (...) leaves p and q indifferent; add a constant
    p = rng.dirichlet(np.ones(n) * 3)
    q = rng.dirichlet(np.ones(n) * 3)
    m = rng.normal(size=(n, n))
    m1 = m - np.outer(m @ q, np.ones(n))
    m2 = m1 - np.outer(np.ones(n), p @ m1)
    return m2 + rng.normal(), p, q


@pytest.mark.parametrize("seed", range(5))
def test_random_zero_sum_rest_point(seed):
    rng = np.random.default_rng(seed)
    a, p, q = _zero_sum_with_interior(rng, 3)
    game = PayoffBimatrix.from_arrays(a)
    x = interior_rest_point(game)
    np.testing.assert_allclose(x, np.concatenate([p, q]), atol=1e-10)
    assert np.linalg.norm(replicator_velocity(game, x)) < 1e-10


def test_no_interior_equilibrium():
    # strictly dominant strategy for A: no fully mixed rest point
    game = PayoffBimatrix.from_arrays([[2, 2], [0, 1]])
    with pytest.raises(NoInteriorEquilibrium):
        interior_rest_point(game)
    with pytest.raises(NoInteriorEquilibrium):
        interior_rest_point(PayoffBimatrix.from_arrays([[0, 0], [0, 0]]))


def test_dimension_errors(oneill):
    with pytest.raises(DimensionError):
        expected_payoffs(oneill, np.ones(6) / 3)
    with pytest.raises(DimensionError):
        replicator_velocity(oneill, np.ones(7))
    with pytest.raises(DimensionError):
        PayoffBimatrix.from_arrays([[1, 2], [3]])


def test_clamping_rule(oneill):
    s = NASH.copy()
    s[0] += 5e-10
    out = check_state(oneill, s)
    assert abs(out[:4].sum() - 1) < 1e-15
    s[1] = -1e-6
    with pytest.raises(InvalidState):
        check_state(oneill, s)


def test_zero_sum_flag_and_roundtrip(oneill):
    assert oneill.zero_sum
    d = oneill.to_dict()
    assert PayoffBimatrix.from_dict(d) == oneill
    nz = PayoffBimatrix.from_arrays([[1, 0], [0, 1]], [[1, 0], [0, 1]])
    assert not nz.zero_sum
    assert PayoffBimatrix.from_arrays([[0.1]]).a_payoff[0][0] == Fraction(1, 10)


state_seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(state_seeds, st.integers(2, 5), st.integers(2, 5))
def test_simplex_conservation_and_zero_sum_balance(seed, n_a, n_b):
    rng = np.random.default_rng(seed)
    game = PayoffBimatrix.from_arrays(rng.integers(-3, 4, size=(n_a, n_b)))
    s = random_state(rng, n_a, n_b)
    v = replicator_velocity(game, s)
    assert abs(v[:n_a].sum()) < 1e-12 and abs(v[n_a:].sum()) < 1e-12
    prof = expected_payoffs(game, s)
    assert abs(prof.u_bar_a + prof.u_bar_b) < 1e-12


@settings(max_examples=40, deadline=None)
@given(state_seeds, st.integers(0, 3), st.integers(0, 3))
def test_vertex_fixity(seed, i, j):
    rng = np.random.default_rng(seed)
    game = PayoffBimatrix.from_arrays(rng.integers(-3, 4, size=(4, 4)), rng.integers(-3, 4, size=(4, 4)))
    s = np.zeros(8)
    s[i] = s[4 + j] = 1
    assert np.all(replicator_velocity(game, s) == 0)
