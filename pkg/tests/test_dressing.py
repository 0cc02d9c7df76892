import numpy as np
import pytest

from conftwistor import cartan, dressing, spin
from conftwistor.calculus import jets as J
from conftwistor.calculus.jets import Jet
from conftwistor.cartan import (CartanError, SpinCurvature, SpinGauge, curvature_matrix,
                                gauge_transform, normal_connection)
from conftwistor.dressing import (cocycle, cocycle_residuals, covariant_derivative, dress,
                                  dress_curvature, dress_section, extract_dressing,
                                  lorentz_conn_closed, lorentz_matrix, lorentz_section_closed,
                                  weyl_conn_closed, weyl_section_closed)
from conftwistor.fields import Field, conformal_frame
from conftwistor.samples import random_connection

P0 = (0.1, -0.2, 0.3, 0.15)
ORDER = 4


def conn_diff(c1, c2):
    return max((getattr(c1, k) - getattr(c2, k)).norm() for k in ("a", "A", "P", "theta"))


def boost(point, order, r):
    return SpinGauge(r=r).jets(point, order).k1()


def section(rng, point, order):
    c = rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))
    x = Jet.coordinates(point, order)
    return Jet.constant(c, point, order) * (x[0] * 0.3 - x[2] * x[3] + 1.0)


@pytest.fixture
def normal(bumpy_e):
    return normal_connection(bumpy_e, P0, ORDER)


@pytest.fixture
def boosted(normal):
    r = Field(lambda x: [x[1] * 0.2, 0.1 + x[0] * x[3], -0.1 * x[2], 0.03])
    return gauge_transform(normal, boost(P0, ORDER, r))


def test_zero_a_gives_trivial_dressing(normal):
    u = extract_dressing(normal)
    assert u.q.norm() == 0
    assert np.allclose(u.matrix().value, np.eye(4))
    assert conn_diff(dress(normal), normal) == 0


def test_boost_recovered(normal):
    r = np.array([0.0, 0.2, 0.0, 0.0]) @ spin.ETA
    moved = gauge_transform(normal, boost(P0, ORDER, Field.constant(r)))
    q = extract_dressing(moved).q
    assert np.abs(q.value + r).max() < 1e-10
    assert np.abs(q.coeffs[..., 1:]).max() < 1e-10


def test_weyl_gauge_dressing():
    e = Field.constant(np.eye(4))
    conn = normal_connection(e, P0, ORDER)
    z = Field(lambda x: 1 + 0.1 * x[0])
    moved = gauge_transform(conn, SpinGauge(z=z).matrix(P0, ORDER))
    q = extract_dressing(moved).q
    zj = z.jet(P0, q.order)
    # a = z^-1 dz and e -> z e, so q_0 = 0.1 / z^2
    expected = (zj * zj).reciprocal() * 0.1
    assert (q[0] - expected).norm() < 1e-12
    assert q[1:].norm() < 1e-12


def test_a_block_vanishes(boosted):
    assert dress(boosted).a.norm() < 1e-10


def test_dressing_is_a_unipotent_boost(boosted):
    U = extract_dressing(boosted).matrix().value
    assert np.allclose(np.diag(U), 1) and np.allclose(U[2:, :2], 0)
    assert abs(np.linalg.det(U) - 1) < 1e-12


def test_curvature_routes_agree(boosted):
    u = extract_dressing(boosted)
    c1 = dress(boosted, u)
    Om = curvature_matrix(boosted.matrix())
    assert (dress_curvature(Om, u) - curvature_matrix(c1.matrix())).norm() < 1e-10


def test_dressed_covariant_derivative(boosted, rng):
    u = extract_dressing(boosted)
    psi = section(rng, P0, ORDER)
    psi1 = dress_section(psi, u)
    D1 = covariant_derivative(dress(boosted, u).matrix(), psi1)
    D = covariant_derivative(boosted.matrix(), psi)
    assert (D1 - u.matrix().inv() @ D).norm() < 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_k1_invariance(normal, seed, rng):
    g = np.random.default_rng(seed).normal(size=(4, 3)) * 0.2
    r = Field(lambda x: [x[0] * g[k, 0] + x[1] * x[2] * g[k, 1] + g[k, 2] for k in range(4)])
    k1 = boost(P0, ORDER, r)
    moved = gauge_transform(normal, k1)
    assert conn_diff(dress(moved), dress(normal)) < 1e-9
    u, um = extract_dressing(normal), extract_dressing(moved)
    Om = curvature_matrix(normal.matrix())
    Omm = curvature_matrix(moved.matrix())
    assert (dress_curvature(Om, u) - dress_curvature(Omm, um)).norm() < 1e-9
    psi = section(rng, P0, ORDER)
    assert (dress_section(psi, u) - dress_section(k1.inv() @ psi, um)).norm() < 1e-9


def test_f1_is_minus_trace_theta_p(rng):
    conn = random_connection(rng, P0, 3)
    c1 = dress(conn)
    f1 = cartan.curvature(c1).f
    th = c1.theta.truncate(f1.order)
    assert f1.norm() > 1e-3
    assert (f1 + (th @ c1.P.truncate(f1.order)).trace()).norm() < 1e-10


# residual Lorentz ------------------------------------------------------------------------------

def S_field(gen, scale=0.1, mu=0):
    return Field(lambda x: J.expm(Jet.constant(gen, x[0].point, x[0].order) * (x[mu] * scale)))


def test_lorentz_identity(boosted):
    c1 = dress(boosted)
    S = Jet.constant(np.eye(2), P0, c1.order + 1)
    assert conn_diff(lorentz_conn_closed(c1, S), c1) == 0


def test_lorentz_closed_vs_conjugation(boosted, rng):
    c1 = dress(boosted)
    S = S_field(spin.PAULI[3]).jet(P0, ORDER)
    L = lorentz_matrix(S)
    assert conn_diff(gauge_transform(c1, L), lorentz_conn_closed(c1, S)) < 1e-9
    psi = section(rng, P0, ORDER)
    assert (L.inv() @ psi - lorentz_section_closed(psi, S)).norm() < 1e-10
    Om = curvature_matrix(c1.matrix())
    moved = SpinCurvature.from_matrix(cartan.conjugate(Om, L))
    closed = dressing.lorentz_curv_closed(SpinCurvature.from_matrix(Om), S)
    assert max((getattr(moved, k) - getattr(closed, k)).norm() for k in "fWC") < 1e-9


def test_constant_boost_on_derivative(boosted, rng):
    c1 = dress(boosted)
    S = Jet.constant(np.diag([np.exp(0.15), np.exp(-0.15)]), P0, ORDER)
    L = lorentz_matrix(S)
    psi = section(rng, P0, ORDER)
    D = covariant_derivative(c1.matrix(), psi)
    Dm = covariant_derivative(gauge_transform(c1, L).matrix(), lorentz_section_closed(psi, S))
    assert (Dm - L.inv() @ D).norm() < 1e-10


def test_dressing_equivariance(boosted):
    S = S_field(spin.PAULI[1] + 0.3j * spin.PAULI[2], 0.2, 3).jet(P0, ORDER)
    L = lorentz_matrix(S)
    u = extract_dressing(boosted).matrix()
    u_moved = extract_dressing(gauge_transform(boosted, L)).matrix()
    k = u_moved.order
    assert (u_moved - (L.inv() @ u @ L).truncate(k)).norm() < 1e-10


def test_lorentz_rejects_det():
    with pytest.raises(CartanError):
        lorentz_matrix(Jet.constant(2 * np.eye(2), P0, 1))


# residual Weyl ------------------------------------------------------------------------------------

def test_weyl_identity(boosted, rng):
    c1 = dress(boosted)
    one = Jet.constant(1.0, P0, ORDER)
    assert conn_diff(weyl_conn_closed(c1, one), c1) < 1e-15
    psi = section(rng, P0, ORDER)
    assert (weyl_section_closed(psi, one, c1.vierbein()) - psi.truncate(ORDER - 2)).norm() < 1e-15


def test_weyl_constant_z(boosted, rng):
    c1 = dress(boosted)
    z = Jet.constant(2.0, P0, ORDER)
    new = weyl_conn_closed(c1, z)
    assert (new.theta - c1.theta * 2.0).norm() < 1e-14
    assert (new.P - c1.P * 0.5).norm() < 1e-14
    psi = section(rng, P0, ORDER)
    w = weyl_section_closed(psi, z, c1.vierbein())
    k = w.order
    assert (w[0:2] - psi[0:2].truncate(k) / np.sqrt(2)).norm() < 1e-14
    assert (w[2:4] - psi[2:4].truncate(k) * np.sqrt(2)).norm() < 1e-14


def test_weyl_closed_vs_conjugation(boosted, rng):
    c1 = dress(boosted)
    z = (Jet.variable(1, P0, ORDER) * 0.1 + 1.0) * J.exp(Jet.variable(0, P0, ORDER) * 0.05)
    e = c1.vierbein()
    C = cocycle(z, e)
    assert conn_diff(gauge_transform(c1, C), weyl_conn_closed(c1, z)) < 1e-9
    Om = curvature_matrix(c1.matrix())
    closed = dressing.weyl_curv_closed(SpinCurvature.from_matrix(Om), z, e)
    assert (cartan.conjugate(Om, C) - closed).norm() < 1e-9
    psi = section(rng, P0, ORDER)
    assert (C.inv() @ psi - weyl_section_closed(psi, z, e)).norm() < 1e-10


def test_schouten_law_against_rescaled_frame(bumpy_e):
    z = Field(lambda x: 1 + 0.1 * x[1])
    direct = normal_connection(conformal_frame(z, bumpy_e), P0, 5)
    closed = weyl_conn_closed(normal_connection(bumpy_e, P0, 5), z.jet(P0, 5))
    assert (direct.P - closed.P).norm() < 1e-7
    assert conn_diff(direct, closed) < 1e-7


def test_dressing_law_under_weyl(boosted):
    z = Jet.variable(2, P0, ORDER) * 0.1 + 1.0
    Z = dressing.weyl_matrix(z)
    u = extract_dressing(boosted).matrix()
    u_moved = extract_dressing(gauge_transform(boosted, Z)).matrix()
    C = cocycle(z, dress(boosted).vierbein())
    rhs = Z.inv() @ u @ C
    k = min(u_moved.order, rhs.order)
    assert (u_moved.truncate(k) - rhs.truncate(k)).norm() < 1e-10


def test_weyl_and_lorentz_commute(boosted):
    c1 = dress(boosted)
    z = Jet.variable(3, P0, ORDER) * 0.1 + 1.0
    S = S_field(spin.PAULI[2], 0.2, 1).jet(P0, ORDER)
    a = weyl_conn_closed(lorentz_conn_closed(c1, S), z)
    b = lorentz_conn_closed(weyl_conn_closed(c1, z), S)
    k = min(a.order, b.order)
    assert conn_diff(a.truncate(k), b.truncate(k)) < 1e-9
    # C(z)^S = S^-1 C(z) S with Upsilon taken in the rotated frame
    L = lorentz_matrix(S)
    CS = cocycle(z, lorentz_conn_closed(c1, S).vierbein())
    k = CS.order
    assert (CS - (L.inv() @ cocycle(z, c1.vierbein()) @ L).truncate(k)).norm() < 1e-10


# cocycle ---------------------------------------------------------------------------------------------

def test_cocycle_trivial_partner():
    e = Jet.constant(np.eye(4), P0, ORDER)
    z = Jet.variable(0, P0, ORDER) * 0.1 + 1.0
    res = cocycle_residuals(z, Jet.constant(1.0, P0, ORDER), e)
    assert res["cocycle"] < 1e-15 and res["group_violation"] < 1e-15


def test_cocycle_constants_form_a_group():
    e = Jet.constant(np.eye(4), P0, ORDER)
    res = cocycle_residuals(Jet.constant(1.5, P0, ORDER), Jet.constant(0.7, P0, ORDER), e)
    assert res["group_violation"] < 1e-14


def test_cocycle_documented_pair(bumpy_e, points):
    for p in points:
        e = bumpy_e.jet(p, ORDER)
        z = Jet.variable(0, p, ORDER) * 0.1 + 1.0
        zp = J.exp(Jet.variable(2, p, ORDER) * 0.05)
        res = cocycle_residuals(z, zp, e)
        assert res["cocycle"] < 1e-10
        assert res["commute"] < 1e-10
        assert res["conjugation"] < 1e-10
        assert res["group_violation"] > 1e-3


def test_weyl_rejects_nonpositive():
    with pytest.raises(CartanError, match="positive"):
        dressing.weyl_matrix(Jet.constant(-1.0, P0, 1))
