import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcoherence import quantum as qc
from qcoherence.states import (
    BasisSpec,
    bell_state,
    ghz_state,
    product_plus_state,
    w_state,
    werner_ghz,
)

angles = st.floats(-10, 10, allow_nan=False)


def test_ghz_limits():
    assert ghz_state(0).matrix[0, 0] == pytest.approx(1)
    assert ghz_state(math.pi / 2).matrix[7, 7] == pytest.approx(1)


def test_ghz_quarter_corners():
    m = ghz_state(math.pi / 4).matrix
    expected = np.zeros((8, 8))
    expected[np.ix_([0, 7], [0, 7])] = 0.5
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_werner_limits():
    np.testing.assert_allclose(werner_ghz(0, 0.7).matrix, np.eye(8) / 8, atol=1e-15)
    np.testing.assert_allclose(werner_ghz(1, math.pi / 4).matrix, ghz_state(math.pi / 4).matrix, atol=1e-15)
    np.testing.assert_allclose(werner_ghz(0.5, 0).matrix, np.diag([9 / 16] + [1 / 16] * 7), atol=1e-15)


@pytest.mark.parametrize("mu", [-0.01, 1.01])
def test_werner_range(mu):
    with pytest.raises(ValueError):
        werner_ghz(mu, 0)


@given(st.floats(0, 1), angles)
def test_werner_affine(mu, phi):
    lhs = werner_ghz(mu, phi).matrix
    rhs = (1 - mu) * werner_ghz(0, phi).matrix + mu * werner_ghz(1, phi).matrix
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_w_limits():
    assert w_state(0, 0.3).matrix[1, 1] == pytest.approx(1)
    assert w_state(math.pi / 2, 0).matrix[4, 4] == pytest.approx(1)


def test_w_quarter_amplitudes():
    m = w_state(math.pi / 4, math.pi / 4).matrix
    amps = np.sqrt(np.diag(m).real)
    np.testing.assert_allclose(amps[[4, 2, 1]], [0.5, 0.5, 1 / math.sqrt(2)], atol=1e-14)


@given(angles, angles)
def test_periodic_in_phi(theta, phi):
    assert np.max(np.abs(w_state(theta, phi).matrix - w_state(theta, phi + 2 * math.pi).matrix)) <= 1e-12
    assert np.max(np.abs(ghz_state(phi).matrix - ghz_state(phi + 2 * math.pi).matrix)) <= 1e-12


def test_bell_states():
    m = bell_state(-1).matrix
    assert m[0, 3] == pytest.approx(-0.5) and m[0, 0] == pytest.approx(0.5)
    for sign in (1, -1):
        np.testing.assert_allclose(qc.partial_trace(bell_state(sign), [2]).matrix, np.eye(2) / 2, atol=1e-15)
    assert qc.qjsd_distance(bell_state(-1), bell_state(1)) == pytest.approx(1, abs=1e-12)


def test_product_minus():
    minus = np.array([1, -1]) / math.sqrt(2)
    np.testing.assert_allclose(product_plus_state(1).matrix, np.outer(minus, minus), atol=1e-15)
    m2 = product_plus_state(2).matrix
    np.testing.assert_allclose(np.abs(m2), np.full((4, 4), 0.25), atol=1e-15)
    with pytest.raises(ValueError):
        product_plus_state(0)


def test_basis_spec_validation():
    with pytest.raises(ValueError):
        BasisSpec((np.array([[1, 1], [0, 1]]),))
    b = BasisSpec.computational((2, 2))
    np.testing.assert_allclose(b.unitary(), np.eye(4))
    assert b.restrict([2]).dims == (2,)


def test_basis_spec_rotation(rng):
    u = qc.random_unitary(2, rng)
    b = BasisSpec.computational((2,)).rotated([u])
    np.testing.assert_allclose(b.unitary(), u)
