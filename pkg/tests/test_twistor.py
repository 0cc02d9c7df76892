import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftwistor import spin, twistor
from conftwistor.calculus import jets as J
from conftwistor.calculus.forms import Form
from conftwistor.calculus.jets import Jet
from conftwistor.cartan import (CartanError, SpinCartanConn, SpinGauge, curvature,
                                flat_connection, gauge_transform, normal_connection)
from conftwistor.dressing import cocycle, lorentz_section_closed, weyl_section_closed
from conftwistor.fields import Field
from conftwistor.samples import random_connection

from conftest import conformal

P0 = (0.2, 0.1, -0.3, 0.25)
ORDER = 4


def random_section(rng, point=P0, order=ORDER):
    c = rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))
    x = Jet.coordinates(point, order)
    return Jet.constant(c, point, order) * (x[1] * 0.2 + x[0] * x[3] + 1.0)


def test_flat_constant_pi():
    conn = flat_connection(P0)
    pi = np.array([[1.0 + 0.5j], [-0.3]])
    psi = Jet.constant(np.vstack([pi, np.zeros((2, 1))]), P0, ORDER)
    top, bottom = twistor.twistor_deriv(conn, psi)
    assert top.norm() < 1e-15
    expected = (conn.theta @ Jet.constant(pi, P0, ORDER)) * 1j
    assert (bottom - expected).norm() < 1e-15


def test_flat_global_twistor():
    """omega = omega0 - i xbar pi0, pi = pi0 solves the flat twistor equation."""
    pi0 = np.array([[0.3 - 0.2j], [1.1]])
    om0 = np.array([[0.5j], [-0.7]])
    x = Jet.coordinates(P0, ORDER)
    xbar = spin.vec_to_herm(Jet.stack(x, axis=0))
    om = Jet.constant(om0, P0, ORDER) - (xbar @ Jet.constant(pi0, P0, ORDER)) * 1j
    pi = Jet.constant(pi0, P0, ORDER)
    psi = Jet(np.concatenate([pi.coeffs, om.coeffs], axis=0), ORDER, P0)
    top, bottom = twistor.twistor_deriv(flat_connection(P0), psi)
    assert top.norm() < 1e-15 and bottom.norm() < 1e-15


def test_section_jet():
    psi = twistor.section_jet(Field.constant([1, 2]), Field(lambda x: [x[0], x[1] * 1j]), P0, 2)
    assert psi.shape == (4, 1)
    assert np.allclose(psi.value.ravel(), [1, 2, P0[0], P0[1] * 1j])
    with pytest.raises(ValueError):
        twistor.section_jet(Field.constant([1, 2, 3]), Field.constant([1, 2]), P0, 2)


def test_prolongation_oracle_bumpy(bumpy_e, points, rng):
    for p in points:
        conn = normal_connection(bumpy_e, p, ORDER)
        psi = random_section(rng, p)
        a, b = twistor.twistor_deriv(conn, psi)
        oa, ob = twistor.prolongation_oracle(conn.vierbein(), psi)
        assert (a - oa).norm() < 1e-7 and (b - ob).norm() < 1e-7


def test_twistor_deriv_rejects_undressed(rng):
    with pytest.raises(CartanError, match="non-dressed"):
        twistor.twistor_deriv(random_connection(rng, P0, 3), random_section(rng))


def test_bilinear_examples():
    psi = np.array([1, 0, 1, 0])
    assert twistor.bilinear(psi, psi) == pytest.approx(2)
    assert twistor.helicity(psi) == pytest.approx(1)
    assert twistor.bilinear(np.array([1, 0, 0, 0]), np.array([1, 0, 0, 0])) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_helicity_reality_and_hermiticity(seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi2 = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert abs(np.imag(twistor.bilinear(psi, psi))) < 1e-12
    assert abs(twistor.bilinear(psi, psi2) - np.conj(twistor.bilinear(psi2, psi))) < 1e-12


def test_bilinear_weyl_and_lorentz_invariance(bumpy_e, rng):
    e = bumpy_e.jet(P0, ORDER)
    z = Jet.variable(3, P0, ORDER) * 0.1 + 1.0
    psi, psi2 = random_section(rng), random_section(rng)
    w1, w2 = weyl_section_closed(psi, z, e), weyl_section_closed(psi2, z, e)
    k = w1.order
    before = twistor.bilinear(psi.truncate(k), psi2.truncate(k))
    assert (twistor.bilinear(w1, w2) - before).norm() < 1e-11
    S = J.expm(Jet.constant(spin.random_sl2_algebra(rng, 0.3), P0, ORDER) * Jet.variable(0, P0, ORDER))
    l1, l2 = lorentz_section_closed(psi, S), lorentz_section_closed(psi2, S)
    assert (twistor.bilinear(l1, l2) - twistor.bilinear(psi, psi2)).norm() < 1e-11


def test_metric_compatibility(bumpy_e, rng):
    psi, psi2 = random_section(rng), random_section(rng)
    flat = twistor.metric_compatibility(flat_connection(P0).matrix(), psi, psi2)
    assert max(flat.values()) < 1e-13
    conn = normal_connection(bumpy_e, P0, ORDER)
    res = twistor.metric_compatibility(conn.matrix(), psi, psi2)
    assert max(res.values()) < 1e-9


def test_metric_compatibility_negative_control(bumpy_e, rng):
    conn = normal_connection(bumpy_e, P0, ORDER)
    bad = SpinCartanConn(conn.a + Form.dx(1, P0, conn.a.order) * 0.5j, conn.A, conn.P, conn.theta)
    res = twistor.metric_compatibility(bad.matrix(), random_section(rng), random_section(rng))
    assert res["sigma"] > 1e-3 and res["bilinear"] > 1e-3


def test_curvature_on_sections(bumpy_e, rng):
    conn = normal_connection(bumpy_e, P0, ORDER)
    moved = gauge_transform(conn, SpinGauge(r=Field(lambda x: [x[2], 0.1, 0, x[0] * x[1]]))
                            .matrix(P0, ORDER))
    for c in (conn, moved):
        assert twistor.curvature_on_sections(c.matrix(), random_section(rng)) < 1e-8


def test_twistor_curvature_flat_and_conformally_flat():
    for e in (Field.constant(np.eye(4)), conformal(lambda x: 1 + 0.1 * x[1]),
              conformal(lambda x: J.exp(x[2] * 0.1))):
        conn = normal_connection(e, P0, ORDER)
        C, W = twistor.twistor_curvature(conn)
        assert C.norm() < 1e-9 and W.norm() < 1e-9
        assert twistor.is_conformally_flat(conn)


def test_twistor_curvature_bumpy(bumpy_e):
    conn = normal_connection(bumpy_e, P0, ORDER)
    C, W = twistor.twistor_curvature(conn)
    cv = curvature(conn)
    assert cv.Theta.norm() < 1e-9
    assert (C - cv.C).norm() == 0
    assert max(C.norm(), W.norm()) > 1e-3
    assert not twistor.is_conformally_flat(conn)


def test_twistor_curvature_rejects_non_normal(rng):
    with pytest.raises(CartanError):
        twistor.twistor_curvature(random_connection(rng, P0, 3))


def test_constant_z_schouten_law(bumpy_e):
    z = 1.7
    e = bumpy_e.jet(P0, ORDER)
    P = twistor.coordinate_schouten(e)
    Pz = twistor.coordinate_schouten(e * z)
    assert (P - Pz).norm() < 1e-12
    from conftwistor.oracles import schouten_frame_jet
    assert (schouten_frame_jet(e * z) - schouten_frame_jet(e) / z**2).norm() < 1e-12


@pytest.mark.parametrize("zexpr", [lambda x: J.exp(x[0] * 0.1), lambda x: 1 + 0.1 * x[1]])
def test_weyl_transformation_laws(bumpy_e, zexpr):
    res = twistor.weyl_transformation_laws(bumpy_e, Field(zexpr), P0, 5)
    assert res["schouten"] < 1e-7
    assert res["connection"] < 1e-7
    assert res["twistor"] < 1e-9


def test_cocycle_matches_section_law(bumpy_e, rng):
    e = bumpy_e.jet(P0, ORDER)
    z = J.exp(Jet.variable(0, P0, ORDER) * 0.1)
    psi = random_section(rng)
    assert (cocycle(z, e).inv() @ psi - weyl_section_closed(psi, z, e)).norm() < 1e-12
