import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtwist import dual as dn

xs = st.floats(0.1, 2.0)


@given(xs)
def test_scalar_rules_match_calculus(x):
    d = dn.Dual.variable(np.array(x), np.array(1.0))
    f = dn.sin(d) * dn.exp(d) + d**3 / (1 + d) - dn.sqrt(d)
    expected = (np.cos(x) + np.sin(x)) * np.exp(x) + (3 * x**2 * (1 + x) - x**3) / (1 + x) ** 2 - 0.5 / np.sqrt(x)
    assert abs(f.der - expected) < 1e-10 * max(1, abs(expected))


def test_matrix_inverse_derivative_against_fd():
    a0 = np.array([[2.0, 0.3], [0.1, 1.5]])
    da = np.array([[0.2, -0.4], [0.7, 0.1]])
    got = dn.inv(dn.Dual(a0, da)).der
    h = 1e-6
    fd = (np.linalg.inv(a0 + h * da) - np.linalg.inv(a0 - h * da)) / (2 * h)
    assert np.abs(got - fd).max() < 1e-8


def test_complex_seed_propagates():
    x = dn.Dual.variable(np.array([1.0, 2.0]), np.array([1.0, 1j]))
    y = x[0] * x[1]
    assert y.der == pytest.approx(2.0 + 1j)


def test_matmul_and_block_diag():
    a = dn.Dual(np.eye(2), np.ones((2, 2)))
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose((a @ b).der, np.ones((2, 2)) @ b)
    assert np.allclose((b @ a).der, b @ np.ones((2, 2)))
    bd = dn.block_diag(a, b)
    assert bd.shape == (4, 4)
    assert np.allclose(bd.der[2:, 2:], 0) and np.allclose(bd.der[:2, :2], 1)


def test_array_from_mixed_rows():
    t = dn.Dual.variable(np.array(0.5), np.array(1.0))
    m = dn.array([[t, 1.0], [0.0, t * t]])
    assert np.allclose(m.val, [[0.5, 1.0], [0.0, 0.25]])
    assert np.allclose(m.der, [[1.0, 0.0], [0.0, 1.0]])


def test_jvp_linear_map():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    val, der = dn.jvp(lambda p: a @ p, np.array([1.0, 1.0]), np.array([0.0, 1.0]))
    assert np.allclose(val, [3, 7]) and np.allclose(der, [2, 4])
