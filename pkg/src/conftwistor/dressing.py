"""The conformal-boost dressing field and the composite (dressed) fields.

The dressing field u = [[1, -i qbar], [0, 1]] is read off the connection,
q_a = a_mu E^mu_a, and kills the a-block of the connection.  The residual
Lorentz symmetry acts by the usual conjugation with diag(S^-1*, S); the
residual Weyl symmetry acts through the cocycle

    C(z) = [[z^1/2, -i z^-1/2 Upsilon], [0, z^-1/2]],   Upsilon_a = z^-1 d_mu z E^mu_a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spin
from .cartan import (CartanError, SpinCartanConn, SpinCurvature, _times_one, conjugate,
                     gauge_transform, tracefree)
from .calculus.forms import Form, block_form, ext_d
from .calculus.jets import Jet, block, sqrt

ONE = np.eye(2)


def _zeros(point, order):
    return Jet.constant(np.zeros((2, 2)), point, order)


def _ones(point, order):
    return Jet.constant(ONE, point, order)


def boost_matrix(xbar: Jet) -> Jet:
    """[[1, -i xbar], [0, 1]] for a hermitian 2x2 jet."""
    p, k = xbar.point, xbar.order
    return block([[_ones(p, k), xbar * -1j], [_zeros(p, k), _ones(p, k)]])


def weyl_matrix(z: Jet) -> Jet:
    """Z = diag(z^1/2, z^-1/2)."""
    if np.any(z.value.real <= 0):
        raise CartanError(f"z must be positive (z <= 0 at {z.point})")
    rz = sqrt(z)
    p, k = z.point, z.order
    return block([[_ones(p, k) * rz, _zeros(p, k)], [_zeros(p, k), _ones(p, k) * rz.reciprocal()]])


def lorentz_matrix(S: Jet) -> Jet:
    """The residual Lorentz element diag(S^-1*, S)."""
    if abs(np.linalg.det(S.value) - 1) > 1e-10:
        raise CartanError("det S must be 1")
    p, k = S.point, S.order
    return block([[S.inv().H, _zeros(p, k)], [_zeros(p, k), S]])


def frame_of(conn: SpinCartanConn) -> Jet:
    e = conn.vierbein()
    if abs(np.linalg.det(e.value)) < 1e-12:
        raise CartanError("singular e")
    return e


@dataclass(frozen=True)
class DressingField:
    q: Jet          # covector q_a

    @property
    def qbar(self) -> Jet:
        return spin.covec_to_herm(self.q)

    def matrix(self) -> Jet:
        return boost_matrix(self.qbar)


def extract_dressing(conn: SpinCartanConn) -> DressingField:
    """q = a . e^-1, solving a - q theta = 0."""
    e = frame_of(conn)
    a = conn.a.coeffs
    k = min(a.order, e.order)
    E = e.truncate(k).inv()
    q = E.T @ a.truncate(k).reshape(4, 1)
    return DressingField(q.reshape(4))


def dress(conn: SpinCartanConn, u: DressingField | None = None) -> SpinCartanConn:
    """Composite connection u^-1 varpi u + u^-1 du."""
    u = u or extract_dressing(conn)
    return gauge_transform(conn, u.matrix())


def dress_curvature(Om: Form, u: DressingField) -> Form:
    """u^-1 Omega u."""
    return conjugate(Om, u.matrix())


def dress_section(psi: Jet, u: DressingField) -> Jet:
    return u.matrix().inv() @ psi


def covariant_derivative(conn_matrix: Form, psi: Jet) -> Form:
    """D psi = d psi + varpi psi for a column section psi of shape (4, 1)."""
    return ext_d(Form.from_jet(psi)) + conn_matrix @ psi


# residual Lorentz ----------------------------------------------------------------------

def lorentz_conn_closed(conn: SpinCartanConn, S: Jet) -> SpinCartanConn:
    Si = S.inv()
    return SpinCartanConn(
        a=conn.a,
        A=Si @ conn.A @ S + Si @ ext_d(Form.from_jet(S)),
        P=S.H @ conn.P @ S,
        theta=Si @ conn.theta @ Si.H,
    )


def lorentz_curv_closed(curv: SpinCurvature, S: Jet) -> SpinCurvature:
    Si = S.inv()
    return SpinCurvature(f=curv.f, W=Si @ curv.W @ S, C=S.H @ curv.C @ S,
                         Theta=Si @ curv.Theta @ Si.H)


def lorentz_section_closed(psi: Jet, S: Jet) -> Jet:
    return _stack_rows(S.H @ psi[0:2], S.inv() @ psi[2:4])


def _stack_rows(top: Jet, bottom: Jet) -> Jet:
    k = min(top.order, bottom.order)
    return Jet(np.concatenate([top.truncate(k).coeffs, bottom.truncate(k).coeffs], axis=0),
               k, top.point)


# residual Weyl --------------------------------------------------------------------------

def upsilon(z: Jet, e: Jet) -> Jet:
    """Upsilon_a = z^-1 d_mu z E^mu_a (covector jet, one order lower)."""
    dz = Jet.stack([z.partial(mu) for mu in range(4)], axis=0)
    k = min(dz.order, e.order)
    E = e.truncate(k).inv()
    return (E.T @ (dz.truncate(k) * z.truncate(k).reciprocal()).reshape(4, 1)).reshape(4)


def cocycle(z: Jet, e: Jet) -> Jet:
    """C(z) = k1(Upsilon) Z."""
    ups = spin.covec_to_herm(upsilon(z, e))
    return boost_matrix(ups) @ weyl_matrix(z.truncate(ups.order))


def weyl_conn_closed(conn: SpinCartanConn, z: Jet) -> SpinCartanConn:
    e = frame_of(conn)
    U = spin.covec_to_herm(upsilon(z, e))
    zi = z.reciprocal()
    A, th = conn.A, conn.theta
    P = conn.P + ext_d(Form.from_jet(U)) - (U @ A + A.H @ U) + conn.a * U - U @ th @ U
    return SpinCartanConn(
        a=conn.a - (th @ U).trace() + ext_d(Form.from_jet(z)) * zi,
        A=A + tracefree(th @ U),
        P=P * zi,
        theta=th * z,
    )


def weyl_curv_closed(curv: SpinCurvature, z: Jet, e: Jet) -> Form:
    """C(z)^-1 Omega C(z) assembled from its closed-form blocks."""
    U = spin.covec_to_herm(upsilon(z, e))
    zi = z.reciprocal()
    half_f = _times_one(curv.f) * 0.5
    W, C, Th, f = curv.W, curv.C, curv.Theta, curv.f
    ul = -(W.H - half_f) - U @ Th
    ur = (C - U @ W - W.H @ U + f * U - U @ Th @ U) * zi * -1j
    ll = Th * z * 1j
    lr = W - half_f + Th @ U
    return block_form([[ul, ur], [ll, lr]])


def weyl_section_closed(psi: Jet, z: Jet, e: Jet) -> Jet:
    U = spin.covec_to_herm(upsilon(z, e))
    rz = sqrt(z)
    pi, om = psi[0:2], psi[2:4]
    return _stack_rows((pi + U @ om * 1j) * rz.reciprocal(), om * rz)


def cocycle_residuals(z: Jet, zp: Jet, e: Jet) -> dict:
    """Cocycle identity, conjugation law and the (failing) group law of C."""
    C = lambda w, frame=e: cocycle(w, frame)
    zz = z * zp
    Zp = weyl_matrix(zp)
    Cz, Czp, Czz = C(z), C(zp), C(zz)
    k = Czz.order
    Zp = Zp.truncate(k)
    cocycle_res = (Czz - Czp @ Zp.inv() @ Cz @ Zp).norm()
    commuted = (C(zz) - C(zp * z)).norm()
    # Upsilon w.r.t. the rescaled frame z' e
    conj_res = (cocycle(z, e * zp) - (Zp.inv() @ Cz @ Zp)).norm()
    group_violation = (Cz @ Czp - Czz).norm()
    return {"cocycle": cocycle_res, "commute": commuted, "conjugation": conj_res,
            "group_violation": group_violation}
