"""Killing forms, Yang-Mills densities and the Merkulov modified twistor connection.

Densities are the real coefficient of dx^0 ^ dx^1 ^ dx^2 ^ dx^3 of a 4-form.

The spin Killing forms are normalized so that they coincide with the vector
ones under the spin morphism, B_sl2(Abar, Bbar) = Tr(A B):

    B_sl2(A, B) = B_su22(A, B) = 2 (Tr(A B) + Tr(B^* A^*)).

``HALF_SCALE`` converts to the normalization 1/2 (Tr(A B) + Tr(B^* A^*)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spin
from .cartan import (CartanError, SpinCartanConn, curvature_matrix, normal_connection_from_jet,
                     vector_normal_data)
from .calculus.forms import Form, hodge_star, to_frame, top_coefficient
from .calculus.jets import Jet
from .fields import Field

SPIN_SCALE = 2.0
HALF_SCALE = 0.5     # B = 1/2 (Tr AB + Tr B*A*)
IMAG_TOL = 1e-10


class YangMillsError(ValueError):
    pass


# Killing forms --------------------------------------------------------------------------

_ALGEBRA_DIM = {"su22": 4, "sl2": 2, "so24": 6, "so13": 4}


def killing(algebra: str, A, B, scale: float = SPIN_SCALE):
    """Killing form of matrices or matrix-valued forms.

    For forms the product is the wedge product, so B(Omega, *Omega) is a
    4-form.  ``scale`` only affects the spin algebras su22 and sl2.
    """
    n = _ALGEBRA_DIM.get(algebra)
    if n is None:
        raise YangMillsError(f"unknown algebra {algebra!r}")
    shape_a = A.vshape if isinstance(A, Form) else np.shape(A)
    shape_b = B.vshape if isinstance(B, Form) else np.shape(B)
    if tuple(shape_a) != (n, n) or tuple(shape_b) != (n, n):
        raise YangMillsError(f"dimension mismatch: expected {n}x{n}")
    if algebra in ("so24", "so13"):
        return (A @ B).trace() if isinstance(A, Form) else np.trace(A @ B)
    if isinstance(A, Form):
        sign = (-1) ** (A.degree * B.degree)
        return ((A @ B).trace() + (B.H @ A.H).trace() * sign) * scale
    return scale * (np.trace(A @ B) + np.trace(spin.dagger(B) @ spin.dagger(A)))


def density(four_form: Form) -> Jet:
    """Real top coefficient; raises if the imaginary part is not negligible."""
    c = top_coefficient(four_form)
    if c.imag.norm() > IMAG_TOL * max(1.0, c.norm()):
        raise YangMillsError("density is not real")
    return c.real * 1.0


# Yang-Mills and Weyl densities --------------------------------------------------------------

def _require_normal(Om: Form, tol: float = 1e-8):
    from .cartan import SpinCurvature
    cv = SpinCurvature.from_matrix(Om)
    if cv.Theta.norm() > tol or cv.f.norm() > tol:
        raise CartanError("connection is not normal (Theta or f nonzero)")
    return cv


def ym_lagrangian(conn: SpinCartanConn, scale: float = SPIN_SCALE) -> Jet:
    """1/4 B_su22(Omega, *Omega) for a normal connection (any K1 gauge)."""
    Om = curvature_matrix(conn.matrix())
    _require_normal(Om)
    e = conn.vierbein()
    return density(killing("su22", Om, hodge_star(Om, e.truncate(Om.order)), scale) * 0.25)


def ym_lagrangian_weyl_block(conn: SpinCartanConn, scale: float = SPIN_SCALE) -> Jet:
    """1/2 B_sl2(W, *W) from the Weyl block of a normal connection."""
    Om = curvature_matrix(conn.matrix())
    cv = _require_normal(Om)
    e = conn.vierbein()
    return density(killing("sl2", cv.W, hodge_star(cv.W, e.truncate(Om.order)), scale) * 0.5)


def weyl_lagrangian(e: Jet) -> Jet:
    """1/2 Tr(W ^ *W) with W the vector-representation Weyl 2-form of e."""
    data = vector_normal_data(e)
    W = data.W
    return density(killing("so13", W, hodge_star(W, e.truncate(W.order))) * 0.5)


def weyl_lagrangian_fd(e: Field, point, h: float = 2e-3, fd=None) -> float:
    """1/2 Tr(W ^ *W) at a point from the finite-difference Weyl tensor (oracle)."""
    from .oracles import MetricFD
    fd = fd or MetricFD(e, h)
    ev = fd.frame(point)
    Wf = fd.weyl_frame(point)                               # W^a_{bcd}
    Wc = np.einsum("abcd,cm,dn->abmn", Wf, ev, ev)          # coordinate 2-form comps
    W = Form.from_antisymmetric(2, Jet.constant(Wc, tuple(point), 0))
    ej = Jet.constant(ev, tuple(point), 0)
    return float(np.real(density(killing("so13", W, hodge_star(W, ej)) * 0.5).value))


def lagrangian_routes(e: Jet) -> dict:
    """The three pointwise routes to the Weyl-gravity density."""
    conn = normal_connection_from_jet(e)
    return {
        "su22": ym_lagrangian(conn),
        "sl2": ym_lagrangian_weyl_block(conn),
        "so13": weyl_lagrangian(e),
    }


# Merkulov modified connection -------------------------------------------------------------------

def _frame_two_form(f: Form, e: Jet) -> Jet:
    """Antisymmetric frame components f_{cd} of a scalar 2-form."""
    E = e.truncate(f.order).inv()
    return to_frame(f, E)


@dataclass(frozen=True)
class MerkulovConnection:
    """varpi' = [[-A^*, -i (P + F)], [i theta, A]] with F the f-shift of the Schouten block."""
    base: SpinCartanConn
    f: Form

    @property
    def P(self) -> Form:
        e = self.base.vierbein()
        fc = _frame_two_form(self.f, e)                        # f_{cd}
        k = min(fc.order, e.order)
        # shift P_b by 1/2 f_{cb} theta^c so that P ^ theta gains exactly f
        shift = Form(1, (fc.truncate(k).T @ e.truncate(k)) * 0.5)   # [b, mu]
        return self.base.P + spin.covec_to_herm(shift)

    def matrix(self) -> Form:
        return SpinCartanConn(self.base.a, self.base.A, self.P, self.base.theta).matrix()

    def curvature(self) -> Form:
        return curvature_matrix(self.matrix())


def _check_antisymmetric(f: Form):
    if not isinstance(f, Form) or f.degree != 2 or f.vshape != ():
        raise YangMillsError("f must be a scalar 2-form")


def merkulov_connection(e: Jet, f: Form) -> MerkulovConnection:
    _check_antisymmetric(f)
    return MerkulovConnection(normal_connection_from_jet(e), f)


def merkulov_lagrangian(e: Jet, f: Form, scale: float = SPIN_SCALE) -> dict:
    """Both sides of the Weyl-plus-Maxwell decomposition of 1/4 B_su22(Omega', *Omega').

    The Maxwell coefficient is scale / 2 (1 with the spin normalization,
    1/4 with HALF_SCALE), and W' is the trace-free part of the diagonal block.
    ``weyl_e`` is the Weyl-gravity density of e itself; W' differs from the
    Weyl block by an f-dependent piece, and lhs equals weyl_e for every f.
    """
    from .cartan import SpinCurvature
    m = merkulov_connection(e, f)
    Om = m.curvature()
    k = Om.order
    ek = e.truncate(k)
    cv = SpinCurvature.from_matrix(Om)
    lhs = density(killing("su22", Om, hodge_star(Om, ek), scale) * 0.25)
    weyl = density(killing("sl2", cv.W, hodge_star(cv.W, ek), scale) * 0.5)
    fk = cv.f
    maxwell = density(fk.wedge(hodge_star(fk, ek))) * (scale / 2)
    weyl_e = ym_lagrangian_weyl_block(m.base, scale)
    return {"lhs": lhs, "weyl": weyl, "maxwell": maxwell, "weyl_e": weyl_e, "f": fk,
            "torsion": cv.Theta.norm(), "input_f": (fk - f.truncate(k)).norm()}


def weyl_identity(conn: SpinCartanConn) -> Form:
    """theta W^* + W theta for the trace-free Weyl block (a 3-form)."""
    from .cartan import SpinCurvature
    Om = curvature_matrix(conn.matrix())
    W = SpinCurvature.from_matrix(Om).W
    th = conn.theta.truncate(W.order)
    return th @ W.H + W @ th


def f_theta_matrix(e: np.ndarray) -> np.ndarray:
    """Real 16 x 6 matrix of f -> f ^ theta^a on antisymmetric 2-forms at a point."""
    e = np.asarray(e, dtype=float)
    cols = []
    pt = (0.0,) * 4
    th = Form(1, Jet.constant(e, pt, 0))
    for (c, d) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]:
        fc = np.zeros((4, 4))
        fc[c, d], fc[d, c] = 1.0, -1.0
        coord = e.T @ fc @ e
        f = Form.from_antisymmetric(2, Jet.constant(coord, pt, 0))
        ft = Form(3, _scalar_wedge_vector(f, th))
        cols.append(np.real(ft.coeffs.value).ravel())
    return np.array(cols).T


def _scalar_wedge_vector(f: Form, th: Form) -> Jet:
    """Coefficients of f ^ theta^a for a scalar 2-form and a vector 1-form."""
    parts = [f.wedge(th[a]).coeffs for a in range(4)]
    return Jet.stack(parts, axis=0)


def merkulov_obstruction(e: Jet, f: Form | None = None, tol: float = 1e-8) -> dict:
    """Residual of theta W^* + W theta = f theta and the f it forces.

    identity_residual: |theta W^* + W theta| for the Weyl block of e.
    rank: numeric rank of f -> f ^ theta (6 means injective).
    forced_f_norm: least-squares f solving f ^ theta = theta W^* + W theta.
    relation_residual: |theta W^* + W theta - f theta| for the injected f.
    """
    if abs(np.linalg.det(e.value)) < 1e-12:
        raise CartanError("degenerate frame")
    conn = normal_connection_from_jet(e)
    lhs = weyl_identity(conn)
    M = f_theta_matrix(np.real(e.value))
    rank = int(np.linalg.matrix_rank(M, tol=1e-10))
    # theta W^* + W theta is Herm-valued; its vector components give 16 real numbers
    rhs = np.real(spin.herm_to_vec(Form(3, Jet.constant(lhs.coeffs.value, e.point, 0))).coeffs.value).ravel()
    forced, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    out = {"identity_residual": lhs.norm(), "rank": rank,
           "forced_f_norm": float(np.linalg.norm(forced))}
    if f is not None:
        _check_antisymmetric(f)
        th = conn.theta.truncate(lhs.order)
        ft = _herm_f_theta(f.truncate(lhs.order), th)
        out["relation_residual"] = (lhs - ft).norm()
        out["consistent"] = out["relation_residual"] < tol
    return out


def _herm_f_theta(f: Form, th: Form) -> Form:
    """f ^ theta for a scalar 2-form and a matrix 1-form."""
    return (f * np.eye(2)) @ th
