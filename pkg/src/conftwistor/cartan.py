"""The spin conformal Cartan connection on a chart.

Everything here is point-local: a connection is a set of matrix-valued forms
whose coefficients are jets at one chart point.  The 4x4 spin connection is

    varpi = [[-(A^* - a/2), -i P], [i theta, A - a/2]]

with ``A`` in sl(2, C), ``a`` a real 1-form and ``P``, ``theta`` hermitian.
The normal connection is built directly from a vierbein in the gauge a = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import spin
from .calculus.forms import ETA, Form, block_form, ext_d, graded_commutator, linmap, to_frame
from .calculus.jets import Jet, JetError, sqrt
from .fields import Field

NORMAL_TOL = 1e-8
ONE = np.eye(2)


class CartanError(ValueError):
    pass


def _times_one(a: Form) -> Form:
    """Scalar form times the 2x2 identity."""
    return a * ONE


def tracefree(X: Form) -> Form:
    """Trace-free part of a 2x2 matrix form."""
    return X - _times_one(X.trace()) * 0.5


# connection and curvature containers ------------------------------------------------

@dataclass(frozen=True)
class SpinCartanConn:
    a: Form
    A: Form
    P: Form
    theta: Form

    @property
    def order(self) -> int:
        return min(f.order for f in (self.a, self.A, self.P, self.theta))

    @property
    def point(self):
        return self.theta.point

    def matrix(self) -> Form:
        half_a = _times_one(self.a) * 0.5
        return block_form([[-(self.A.H - half_a), self.P * -1j],
                           [self.theta * 1j, self.A - half_a]])

    @classmethod
    def from_matrix(cls, M: Form) -> "SpinCartanConn":
        lr = M[2:4, 2:4]
        a = -lr.trace()
        return cls(a=a, A=lr + _times_one(a) * 0.5, P=M[0:2, 2:4] * 1j,
                   theta=M[2:4, 0:2] * -1j)

    def truncate(self, order: int) -> "SpinCartanConn":
        return SpinCartanConn(*(f.truncate(order) for f in (self.a, self.A, self.P, self.theta)))

    def vierbein(self) -> Jet:
        """e^a_mu read off the soldering block."""
        return spin.herm_to_vec(self.theta).coeffs.real * 1.0


@dataclass(frozen=True)
class SpinCurvature:
    f: Form
    W: Form
    C: Form
    Theta: Form

    def matrix(self) -> Form:
        half_f = _times_one(self.f) * 0.5
        return block_form([[-(self.W.H - half_f), self.C * -1j],
                           [self.Theta * 1j, self.W - half_f]])

    @classmethod
    def from_matrix(cls, M: Form) -> "SpinCurvature":
        lr = M[2:4, 2:4]
        f = -lr.trace()
        return cls(f=f, W=lr + _times_one(f) * 0.5, C=M[0:2, 2:4] * 1j,
                   Theta=M[2:4, 0:2] * -1j)


def su22_residual(M: Form) -> float:
    """Max of |M^* Sigma + Sigma M| over components and Taylor coefficients."""
    S = spin.SIGMA_BAR
    return (M.H @ S + S @ M).norm()


def structure_residual(M: Form) -> float:
    """Membership in the spin algebra: su(2, 2) and real a-block."""
    conn = SpinCartanConn.from_matrix(M)
    return max(su22_residual(M), conn.a.imag.norm())


def curvature_matrix(M: Form) -> Form:
    if M.order < 1:
        raise CartanError("insufficient jet order")
    return ext_d(M) + M @ M


def curvature(conn: SpinCartanConn) -> SpinCurvature:
    return SpinCurvature.from_matrix(curvature_matrix(conn.matrix()))


def bianchi_residual(M: Form) -> float:
    """|d Omega + [varpi, Omega]| for a connection matrix form."""
    Om = curvature_matrix(M)
    if Om.order < 1:
        raise CartanError("insufficient jet order for the Bianchi identity")
    return (ext_d(Om) + graded_commutator(M, Om)).norm()


# gauge group ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpinGaugeJets:
    """Jets at one point of a structure group field (z, S, r) with r a covector."""
    z: Jet
    S: Jet
    r: Jet

    @property
    def rbar(self) -> Jet:
        return spin.covec_to_herm(self.r)

    def k0(self) -> Jet:
        if np.any(self.z.value.real <= 0):
            raise CartanError("z must be positive")
        rz = sqrt(self.z)
        zero = Jet.constant(np.zeros((2, 2)), self.z.point, self.z.order)
        return _block([[self.S.inv().H * rz, zero], [zero, self.S * rz.reciprocal()]])

    def k1(self) -> Jet:
        one = Jet.constant(ONE, self.r.point, self.r.order)
        zero = Jet.constant(np.zeros((2, 2)), self.r.point, self.r.order)
        return _block([[one, self.rbar * -1j], [zero, one]])

    def matrix(self) -> Jet:
        return self.k0() @ self.k1()


def _block(rows) -> Jet:
    from .calculus.jets import block
    return block(rows)


class SpinGauge:
    """A structure-group valued field gamma = gamma_0(z, S) gamma_1(r)."""

    def __init__(self, z: Field | None = None, S: Field | None = None, r: Field | None = None):
        self.z = z or Field.constant(1.0, "1")
        self.S = S or Field.constant(ONE, "1")
        self.r = r or Field.constant(np.zeros(4), "0")

    def jets(self, point, order: int) -> SpinGaugeJets:
        gj = SpinGaugeJets(self.z.jet(point, order), self.S.jet(point, order),
                           self.r.jet(point, order))
        det = np.linalg.det(gj.S.value)
        if abs(det - 1) > 1e-10:
            raise CartanError("det S must be 1")
        if np.any(gj.z.value.real <= 0):
            raise CartanError(f"z must be positive (z <= 0 at {tuple(point)})")
        return gj

    def matrix(self, point, order: int) -> Jet:
        return self.jets(point, order).matrix()


def gauge_transform_matrix(M: Form, g: Jet) -> Form:
    """varpi^g = g^-1 varpi g + g^-1 dg."""
    gi = g.inv()
    return gi @ M @ g + gi @ ext_d(Form.from_jet(g))


def gauge_transform(conn: SpinCartanConn, g: Jet) -> SpinCartanConn:
    return SpinCartanConn.from_matrix(gauge_transform_matrix(conn.matrix(), g))


def conjugate(X, g: Jet):
    """g^-1 X g for curvature forms or sections."""
    return g.inv() @ X @ g


def gt0_closed(conn: SpinCartanConn, z: Jet, S: Jet) -> SpinCartanConn:
    """Closed-form K0 transformation (Weyl z and Lorentz S)."""
    Si = S.inv()
    dz = ext_d(Form.from_jet(z))
    return SpinCartanConn(
        a=conn.a + dz * z.reciprocal(),
        A=Si @ conn.A @ S + Si @ ext_d(Form.from_jet(S)),
        P=(S.H @ conn.P @ S) * z.reciprocal(),
        theta=(Si @ conn.theta @ Si.H) * z,
    )


def gt1_closed(conn: SpinCartanConn, r: Jet) -> SpinCartanConn:
    """Closed-form K1 (conformal boost) transformation for a covector field r."""
    rb = spin.covec_to_herm(r)
    drb = ext_d(Form.from_jet(rb))
    rtheta = (conn.theta @ rb).trace()
    return SpinCartanConn(
        a=conn.a - rtheta,
        A=conn.A + tracefree(conn.theta @ rb),
        P=conn.P + drb - (rb @ conn.A + conn.A.H @ rb) + (conn.a * rb) - rb @ conn.theta @ rb,
        theta=conn.theta,
    )


# vierbein and the normal connection -----------------------------------------------------

def frame_jet(e: Field, point, order: int) -> Jet:
    ej = e.jet(point, order)
    if ej.shape != (4, 4):
        raise CartanError(f"vierbein must be 4x4, got {ej.shape}")
    if abs(np.linalg.det(ej.value)) < 1e-12:
        raise CartanError("singular frame")
    return ej


def metric(e: Jet) -> Jet:
    """g = e^T eta e."""
    return e.T @ Jet.constant(ETA, e.point, e.order) @ e


def check_signature(e: Jet) -> None:
    g = np.real(metric(e.truncate(0)).value)
    ev = np.linalg.eigvalsh(0.5 * (g + g.T))
    if np.sum(ev > 0) != 1 or np.sum(ev < 0) != 3:
        raise CartanError("metric signature is not (1, 3)")


@lru_cache(maxsize=None)
def _torsion_solver() -> np.ndarray:
    """Q with A^a_{bc} = Q[a,b,c, a',c',b'] T^{a'}_{c'b'} solving d theta + A theta = 0."""
    basis = []
    for a in range(4):
        for b in range(a + 1, 4):
            for c in range(4):
                low = np.zeros((4, 4, 4))
                low[a, b, c], low[b, a, c] = 1.0, -1.0
                basis.append(np.einsum("ai,ibc->abc", ETA, low))
    basis = np.array(basis)                                    # (24, a, b, c)
    # F^a_{cb} = A^a_{bc} - A^a_{cb}
    F = np.transpose(basis, (0, 1, 3, 2)) - basis              # index order (a, c, b)
    M = F.reshape(24, 64).T
    Q = -basis.reshape(24, 64).T @ np.linalg.pinv(M)
    return Q.reshape(4, 4, 4, 4, 4, 4)


@dataclass(frozen=True)
class VectorNormalData:
    """Vector-representation ingredients of the normal connection."""
    e: Jet
    E: Jet
    theta: Form        # (4,) column 1-form
    A: Form            # (4, 4) so(1, 3) 1-form
    R: Form            # dA + A^2
    ricci: Jet         # Ric_{bd} = R^a_{bad} in frame indices
    scalar: Jet
    schouten: Jet      # P_{cb} in frame indices
    P: Form            # row covector 1-form P_b = P_{cb} theta^c
    W: Form            # R + theta P + P^t theta^t


def vector_normal_data(e: Jet) -> VectorNormalData:
    if e.order < 2:
        raise JetError("derivative order exhausted")
    E = e.inv()
    theta = Form(1, e)
    T = to_frame(ext_d(theta), E)                          # (a, c, b)
    A_frame = Jet(np.tensordot(_torsion_solver(), T.coeffs, axes=3), T.order, T.point)
    A = Form(1, A_frame @ e.truncate(T.order))
    R = ext_d(A) + A @ A
    Rf = to_frame(R, E)
    ric = Jet(np.einsum("abadn->bdn", Rf.coeffs), Rf.order, Rf.point)
    eta = Jet.constant(ETA, ric.point, ric.order)
    scal = Jet(np.einsum("bd,bdn->n", ETA, ric.coeffs), ric.order, ric.point)
    sch = (ric.T - eta * scal * (1.0 / 6)) * -0.5
    P = Form(1, sch.T @ e.truncate(sch.order))
    Pt = linmap(ETA, P, 1).reshape(4, 1)
    theta_t = linmap(ETA, theta, 1).reshape(1, 4)
    W = R + theta.reshape(4, 1) @ P.reshape(1, 4) + Pt @ theta_t
    return VectorNormalData(e, E, theta, A, R, ric, scal, sch, P, W)


def normal_connection_from_jet(e: Jet) -> SpinCartanConn:
    v = vector_normal_data(e)
    A = spin.sl2_of_so13(v.A)
    zero = Form.zero(1, (), e.point, v.P.order)
    return SpinCartanConn(a=zero, A=A, P=spin.covec_to_herm(v.P), theta=spin.vec_to_herm(v.theta))


def normal_connection(e: Field, point, order: int = 4) -> SpinCartanConn:
    ej = frame_jet(e, point, order)
    check_signature(ej)
    return normal_connection_from_jet(ej)


def flat_connection(point, order: int = 4) -> SpinCartanConn:
    return normal_connection_from_jet(Jet.constant(np.eye(4), point, order))


def cotton_and_weyl(conn: SpinCartanConn, tol: float = NORMAL_TOL):
    """(C, W) blocks of the curvature of a normal connection."""
    curv = curvature(conn)
    bad = max(curv.Theta.norm(), curv.f.norm(), conn.a.norm())
    if bad > tol:
        raise CartanError(f"connection is not normal (residual {bad:.3g})")
    return curv.C, curv.W
