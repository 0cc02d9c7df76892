import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftwistor import spin
from conftwistor.spin import (ETA, PAULI, SpinError, algebra_morphism, conf_algebra,
                              covec_to_herm, group_morphism, herm_to_covec, herm_to_vec,
                              lorentz_of_sl2, minkowski_norm, sl2_of_lorentz, so13_of_sl2,
                              spin_structure_group, structure_group, vec_to_herm)

vectors = st.lists(st.floats(-10, 10), min_size=4, max_size=4).map(np.array)
seeds = st.integers(0, 2**32 - 1)


def test_vec_to_herm_examples():
    assert np.allclose(vec_to_herm([1, 0, 0, 0]), 0.5 * np.eye(2))
    assert np.allclose(vec_to_herm([0, 1, 0, 0]), 0.5 * np.array([[0, 1], [1, 0]]))
    x = np.array([2.0, 0, 0, 0])
    assert minkowski_norm(x) == pytest.approx(4.0)
    assert 4 * np.linalg.det(vec_to_herm(x)).real == pytest.approx(4.0)


def test_vec_to_herm_matrix_shape():
    x = np.array([0.3, -1.2, 0.7, 2.0])
    expected = 0.5 * np.array([[x[0] + x[3], x[1] - 1j * x[2]], [x[1] + 1j * x[2], x[0] - x[3]]])
    assert np.allclose(vec_to_herm(x), expected)


def test_covec_to_herm_examples():
    # covectors carry no 1/2, so that the algebra morphism is a homomorphism
    assert np.allclose(covec_to_herm(np.array([1, 0, 0, 0]) @ ETA), np.eye(2))
    assert np.allclose(covec_to_herm(np.array([0, 0, 0, 1.0]) @ ETA), np.diag([-1, 1]))


def test_bracket_example():
    tau = vec_to_herm([1, 0, 0, 0])
    rho = covec_to_herm(np.array([1.0, 0, 0, 0]))
    Z = np.zeros((2, 2))
    X = np.block([[Z, Z], [1j * tau, Z]])
    Y = np.block([[Z, -1j * rho], [Z, Z]])
    br = X @ Y - Y @ X
    assert np.allclose(br, np.block([[-rho @ tau, Z], [Z, tau @ rho]]))
    assert np.allclose(br, np.diag([-0.5, -0.5, 0.5, 0.5]))


@settings(max_examples=50, deadline=None)
@given(vectors)
def test_minkowski_norm_is_det(x):
    assert abs(minkowski_norm(x) - 4 * np.linalg.det(vec_to_herm(x)).real) < 1e-12 * max(1, x @ x)


@settings(max_examples=50, deadline=None)
@given(vectors)
def test_herm_roundtrips(x):
    X = vec_to_herm(x)
    assert np.allclose(X, spin.dagger(X))
    assert np.allclose(herm_to_vec(X), x)
    assert np.allclose(herm_to_covec(covec_to_herm(x)), x)


def test_eta_transpose_involutive(rng):
    x = rng.normal(size=4)
    assert np.allclose(spin.eta_transpose(spin.eta_transpose(x)), x)


def test_lorentz_identity():
    assert np.allclose(lorentz_of_sl2(np.eye(2)), np.eye(4))


def test_lorentz_z_boost():
    lam = 0.3
    L = lorentz_of_sl2(np.diag([np.exp(lam / 2), np.exp(-lam / 2)]))
    expected = np.eye(4)
    expected[0, 0] = expected[3, 3] = np.cosh(lam)
    expected[0, 3] = expected[3, 0] = np.sinh(lam)
    assert np.allclose(L, expected)


def test_lorentz_rejects_det():
    with pytest.raises(SpinError):
        lorentz_of_sl2(2 * np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_covering(seed):
    rng = np.random.default_rng(seed)
    S = spin.random_sl2(rng, 0.7)
    L = lorentz_of_sl2(S)
    assert np.allclose(L.T @ ETA @ L, ETA, atol=1e-9)
    assert np.allclose(lorentz_of_sl2(-S), L)
    x = rng.normal(size=4)
    assert np.allclose(vec_to_herm(L @ x), S @ vec_to_herm(x) @ spin.dagger(S))
    back = sl2_of_lorentz(L)
    assert min(np.abs(back - S).max(), np.abs(back + S).max()) < 1e-9


def test_preimage_sign_convention(rng):
    S = spin.random_sl2(rng, 0.3)
    assert np.trace(sl2_of_lorentz(lorentz_of_sl2(S))).real > 0
    assert np.trace(sl2_of_lorentz(lorentz_of_sl2(-S))).real > 0


def test_sl2_of_lorentz_rejects_non_lorentz():
    with pytest.raises(SpinError, match="not a Lorentz"):
        sl2_of_lorentz(2 * np.eye(4))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_infinitesimal_action(seed):
    rng = np.random.default_rng(seed)
    s = spin.random_sl2_algebra(rng)
    x = rng.normal(size=4)
    X = vec_to_herm(x)
    lhs = s @ X + X @ spin.dagger(s)
    assert np.allclose(lhs, vec_to_herm(np.real(so13_of_sl2(s)) @ x))
    assert np.allclose(spin.sl2_of_so13(np.real(so13_of_sl2(s))), s)


def test_epsilon_only_morphism():
    M = conf_algebra(0.8, np.zeros((4, 4)), np.zeros(4), np.zeros(4))
    assert np.allclose(algebra_morphism(M), np.diag([0.4, 0.4, -0.4, -0.4]))


def test_algebra_morphism_rejects_non_member():
    with pytest.raises(SpinError):
        algebra_morphism(np.ones((6, 6)))


@pytest.mark.parametrize("seed", range(50))
def test_homomorphism(seed):
    rng = np.random.default_rng(seed)
    X, Y = spin.random_conf_algebra(rng), spin.random_conf_algebra(rng)
    assert spin.so24_residual(X) < 1e-12
    mX, mY = algebra_morphism(X), algebra_morphism(Y)
    assert spin.su22_residual(mX) < 1e-12
    lhs = algebra_morphism(X @ Y - Y @ X)
    assert np.abs(lhs - (mX @ mY - mY @ mX)).max() < 1e-10


def test_graded_bracket_decomposition(rng):
    tau, rho = rng.normal(size=4), rng.normal(size=4)
    tb, rb = vec_to_herm(tau), covec_to_herm(rho)
    Z = np.zeros((2, 2))
    X = np.block([[Z, Z], [1j * tb, Z]])
    Y = np.block([[Z, -1j * rb], [Z, Z]])
    lr = (X @ Y - Y @ X)[2:, 2:]
    tr_free = tb @ rb - 0.5 * np.trace(tb @ rb) * np.eye(2)
    assert np.allclose(lr, tr_free + 0.5 * (rho @ tau) * np.eye(2))


def test_k1_group_example():
    h = structure_group(1.0, np.eye(4), np.array([1.0, 0, 0, 0]))
    Z = np.zeros((2, 2))
    assert np.allclose(group_morphism(h), np.block([[np.eye(2), -1j * np.eye(2)], [Z, np.eye(2)]]))


@pytest.mark.parametrize("seed", range(20))
def test_group_morphism(seed):
    rng = np.random.default_rng(seed)
    h1, h2 = spin.random_structure_group(rng, 0.5), spin.random_structure_group(rng, 0.5)
    S6 = spin.SIGMA6
    assert np.abs(h1.T @ S6 @ h1 - S6).max() < 1e-10
    g1, g2, g12 = group_morphism(h1), group_morphism(h2), group_morphism(h1 @ h2)
    assert spin.su22_group_residual(g1) < 1e-10
    assert min(np.abs(g12 - g1 @ g2).max(), np.abs(g12 + g1 @ g2).max()) < 1e-10


def test_structure_group_rejects_negative_z():
    with pytest.raises(SpinError):
        structure_group(-1.0, np.eye(4), np.zeros(4))
    with pytest.raises(SpinError):
        spin_structure_group(-1.0, np.eye(2), np.zeros((2, 2)))


def test_pauli_basis():
    assert np.allclose(PAULI[0], np.eye(2))
    for k in (1, 2, 3):
        assert np.allclose(PAULI[k] @ PAULI[k], np.eye(2))
