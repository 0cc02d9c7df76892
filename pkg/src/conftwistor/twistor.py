"""Twistors: the dressed normal covariant derivative and its prolongation oracle.

Sections are column jets psi = (pi, omega) of shape (4, 1).  The twistor
derivative is D psi = d psi + varpi_1 psi for a dressed connection; the
prolongation oracle assembles the same two components from metric-side data
(Christoffel spin connection and coordinate Schouten tensor) without ever
forming the 4x4 connection.
"""

from __future__ import annotations

import numpy as np

from . import spin
from .cartan import (CartanError, SpinCartanConn, cotton_and_weyl, curvature_matrix,
                     normal_connection_from_jet, su22_residual)
from .calculus.forms import Form, ext_d
from .calculus.jets import Jet
from .dressing import covariant_derivative, upsilon, weyl_conn_closed, weyl_section_closed
from .fields import Field, conformal_frame
from .oracles import christoffel_jet, schouten_frame_jet, spin_connection_jet

DRESSED_TOL = 1e-10
FLAT_TOL = 1e-8


def section_jet(pi: Field, omega: Field, point, order: int) -> Jet:
    """psi = (pi, omega) as a (4, 1) column jet."""
    p, w = pi.jet(point, order), omega.jet(point, order)
    if p.shape != (2,) or w.shape != (2,):
        raise ValueError("pi and omega must be C^2-valued")
    return Jet(np.concatenate([p.coeffs, w.coeffs], axis=0), order, tuple(point)).reshape(4, 1)


def twistor_deriv(conn: SpinCartanConn, psi: Jet):
    """(nabla pi - i P omega, nabla omega + i theta pi) as (2, 1) column 1-forms."""
    if conn.a.norm() > DRESSED_TOL:
        raise CartanError("non-dressed connection (nonzero a-block)")
    D = covariant_derivative(conn.matrix(), psi)
    return D[0:2], D[2:4]


def prolongation_oracle(e: Jet, psi: Jet):
    """The twistor-equation system assembled from the metric of e.

    Returns (nabla pi - i P omega, nabla omega + i theta pi) with nabla the
    Levi-Civita spinor derivative built from Christoffel symbols.
    """
    omega_lc = Form(1, spin_connection_jet(e))
    A = spin.sl2_of_so13(omega_lc)
    sch = schouten_frame_jet(e)
    k = sch.order
    P = spin.covec_to_herm(Form(1, sch.T @ e.truncate(k)))
    theta = spin.vec_to_herm(Form(1, e))
    pi, om = psi[0:2], psi[2:4]
    nabla_pi = ext_d(Form.from_jet(pi)) - A.H @ pi
    nabla_om = ext_d(Form.from_jet(om)) + A @ om
    return nabla_pi - (P @ om) * 1j, nabla_om + (theta @ pi) * 1j


def bilinear(psi, psi2):
    """<psi, psi'> = pi^* omega' + omega^* pi' (arrays or column jets)."""
    if isinstance(psi, Jet):
        return (psi.H @ spin.SIGMA_BAR @ psi2)[0, 0]
    psi, psi2 = np.ravel(psi), np.ravel(psi2)
    return np.conj(psi) @ spin.SIGMA_BAR @ psi2


def helicity(psi) -> float:
    b = bilinear(psi, psi)
    if isinstance(b, Jet):
        b = b.value
    return float(np.real(b)) / 2


def metric_compatibility(M: Form, psi: Jet, psi2: Jet) -> dict:
    """D Sigma = 0 and d<psi, psi'> = <D psi, psi'> + <psi, D psi'>."""
    S = spin.SIGMA_BAR
    Dpsi = covariant_derivative(M, psi)
    Dpsi2 = covariant_derivative(M, psi2)
    d_form = ext_d(Form.from_jet(bilinear(psi, psi2)))
    rhs = (Dpsi.H @ S @ psi2 + psi.H @ S @ Dpsi2)[0, 0]
    return {"sigma": su22_residual(M), "bilinear": (d_form - rhs).norm()}


def curvature_on_sections(M: Form, psi: Jet) -> float:
    """|D^2 psi - Omega psi|."""
    D = covariant_derivative(M, psi)
    DD = ext_d(D) + M @ D
    return (DD - curvature_matrix(M) @ psi).norm()


def twistor_curvature(conn: SpinCartanConn):
    """(W, C) of a normal connection; raises for non-normal input."""
    return cotton_and_weyl(conn)


def is_conformally_flat(conn: SpinCartanConn, tol: float = FLAT_TOL) -> bool:
    C, W = twistor_curvature(conn)
    return W.norm() < tol


# Weyl rescaling laws -------------------------------------------------------------------------

def coordinate_schouten(e: Jet) -> Jet:
    """P_{mu nu} = e^a_mu P_ab e^b_nu from the normal connection block."""
    sch = schouten_frame_jet(e)
    ek = e.truncate(sch.order)
    return ek.T @ sch @ ek


def schouten_law_prediction(e: Jet, z: Jet) -> Jet:
    """P + nabla Upsilon - Upsilon Upsilon + 1/2 |Upsilon|^2 g in coordinates.

    The last term is the tensor form of the spinor product with swapped primed
    indices in the spinor-index law.
    """
    P = coordinate_schouten(e)
    k = P.order
    dz = Jet.stack([z.partial(mu) for mu in range(4)], axis=0)
    U = dz * z.truncate(dz.order).reciprocal()                      # Upsilon_mu
    dU = Jet.stack([U.partial(mu) for mu in range(4)], axis=0)      # d_mu Upsilon_nu
    G = christoffel_jet(e).truncate(k)
    Uk = U.truncate(k)
    nablaU = dU.truncate(k) - (Uk.reshape(1, 4) @ G.reshape(4, 16)).reshape(4, 4)
    ek = e.truncate(k)
    g = ek.T @ Jet.constant(spin.ETA, e.point, k) @ ek
    UU = Uk.reshape(4, 1) @ Uk.reshape(1, 4)
    norm2 = (Uk.reshape(1, 4) @ g.inv() @ Uk.reshape(4, 1))[0, 0]
    return P + nablaU - UU + g * norm2 * 0.5


def weyl_transformation_laws(e: Field, z: Field, point, order: int = 5, psi: Jet | None = None) -> dict:
    """Residuals of the Weyl rescaling laws, each computed by two routes."""
    ej, zj = e.jet(point, order), z.jet(point, order)
    ze = conformal_frame(z, e)
    zej = ze.jet(point, order)
    out = {}
    # dressed residual Weyl action on the normal connection vs the normal connection of z e
    direct = normal_connection_from_jet(zej)
    closed = weyl_conn_closed(normal_connection_from_jet(ej), zj)
    out["connection"] = max((getattr(direct, k) - getattr(closed, k)).norm()
                            for k in ("a", "A", "P", "theta"))
    # coordinate Schouten law
    out["schouten"] = (coordinate_schouten(zej) - schouten_law_prediction(ej, zj)).norm()
    # twistor law of the section: strip the z weights and compare with the bare law
    if psi is None:
        rng = np.random.default_rng(0)
        psi = Jet.constant((rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))),
                           tuple(point), order)
    new = weyl_section_closed(psi, zj, ej)
    rz = zj.truncate(new.order) ** 0.5
    stripped_pi, stripped_om = new[0:2] * rz, new[2:4] * rz.reciprocal()
    U = spin.covec_to_herm(upsilon(zj, ej))
    pi, om = psi[0:2], psi[2:4]
    out["twistor"] = max((stripped_pi - (pi + U @ om * 1j)).norm(), (stripped_om - om).norm())
    return out
