import numpy as np
import pytest

from laguerre import group, lorentz
from laguerre.errors import UsageError


def test_wp_is_lightlike():
    assert lorentz.inner(lorentz.wp(3), lorentz.wp(3)) == 0.0


def test_inner_hand_values():
    # direct evaluation of the signature sum for a few fixed vectors
    gamma = np.array([0.0, 1.0, 0.0, 0.0, 0.0, -1.0])
    assert lorentz.inner(gamma, gamma) == pytest.approx(0.0, abs=1e-15)
    e2 = np.eye(6)[1]
    e6 = np.eye(6)[5]
    assert lorentz.inner(e2, e2) == 1.0
    assert lorentz.inner(e6, e6) == -1.0
    X = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    Y = np.array([-1.0, 0.5, 2.0, 0.0, 1.0, -2.0])
    expected = -X[0] * Y[0] + X[1] * Y[1] + X[2] * Y[2] + X[3] * Y[3] + X[4] * Y[4] - X[5] * Y[5]
    assert lorentz.inner(X, Y) == pytest.approx(expected, rel=1e-15)


def test_inner_symmetric_bilinear():
    rng = np.random.default_rng(1)
    for _ in range(50):
        X, Y, Z = rng.standard_normal((3, 7))
        a, b = rng.standard_normal(2)
        assert lorentz.inner(X, Y) == pytest.approx(lorentz.inner(Y, X), rel=1e-14, abs=1e-14)
        assert lorentz.inner(a * X + b * Z, Y) == pytest.approx(
            a * lorentz.inner(X, Y) + b * lorentz.inner(Z, Y), rel=1e-12, abs=1e-12
        )


def test_inner_dimension_mismatch():
    with pytest.raises(UsageError):
        lorentz.inner(np.zeros(6), np.zeros(7))


def test_causal_type():
    assert lorentz.causal_type(lorentz.wp(3)) == "lightlike"
    assert lorentz.causal_type(np.eye(6)[0]) == "timelike"
    assert lorentz.causal_type(np.eye(6)[2]) == "spacelike"
    assert lorentz.causal_type(np.zeros(6)) == "zero"
    assert lorentz.causal_type(np.array([0.0, 1, 0, 0, 0, -1])) == "lightlike"
    with pytest.raises(UsageError):
        lorentz.causal_type(np.ones(6), tol=-1.0)


def test_is_laguerre_matrix_basics():
    assert lorentz.is_laguerre_matrix(np.eye(6))
    assert not lorentz.is_laguerre_matrix(np.diag([1.0, 1, 1, 1, 1, 2]))
    with pytest.raises(UsageError):
        lorentz.is_laguerre_matrix(np.eye(5, 6))


def test_parallel_flow_matrix_literal():
    # the unit-parameter parallel flow, written out entry by entry (n = 3)
    t = 1.0
    M = np.array([
        [1 - t * t / 2, t * t / 2, 0, 0, 0, -t],
        [-t * t / 2, 1 + t * t / 2, 0, 0, 0, -t],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [t, -t, 0, 0, 0, 1],
    ])
    assert lorentz.is_laguerre_matrix(M)
    assert np.abs(M - group.parabolic(1.0, 3).matrix).max() == 0.0


def test_group_elements_preserve_inner_and_cone():
    rng = np.random.default_rng(7)
    for _ in range(20):
        T = group.random_transform(rng, 3, factors=4).matrix
        X, Y = rng.standard_normal((2, 6))
        lhs = lorentz.inner(X @ T, Y @ T)
        rhs = lorentz.inner(X, Y)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)
        # light-like vectors stay light-like
        L = np.array([0.0, 1, 0, 0, 0, -1])
        img = L @ T
        assert abs(lorentz.inner(img, img)) <= 1e-10 * np.dot(img, img)
