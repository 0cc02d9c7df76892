"""Ghosts, the BRST differential and the dressed ghost.

Grassmann-valued matrix forms are stored as ``{(mask, p): Form}`` where the
bitmask lists the ghost generators (written to the left of the form) and p is
the form degree.  Signs follow the total degree (form degree + ghost degree):

    (g_S a)(g_T b) = (-1)^(p_a |T|) sign(S, T) g_{S u T} (a b),
    d(g_S a)       = (-1)^|S| g_S da.

Generators: 0 is the Weyl ghost epsilon, 1..6 the Lorentz ghost s (real
coordinates on sl(2, C)), 7..10 the boost ghost rho.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from . import spin
from .cartan import SpinCartanConn
from .calculus.forms import Form, ext_d
from .calculus.jets import Jet
from .fields import Field

N_GEN = 11
EPS_GEN = (0,)
S_GENS = tuple(range(1, 7))
RHO_GENS = tuple(range(7, 11))
MAX_GHOST = 3


class GrassmannError(ValueError):
    pass


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _merge_sign(S: int, T: int) -> int:
    """Sign of sorting the generators of S followed by those of T."""
    inversions = 0
    for j in range(N_GEN):
        if T >> j & 1:
            inversions += _popcount(S >> (j + 1))
    return -1 if inversions & 1 else 1


class GrassmannElement:
    """Finite sum of ghost monomials times matrix-valued forms."""

    def __init__(self, terms: dict | None = None):
        self.terms = {k: v for k, v in (terms or {}).items()}

    @classmethod
    def field(cls, form: Form) -> "GrassmannElement":
        return cls({(0, form.degree): form})

    @classmethod
    def monomial(cls, gens, form: Form) -> "GrassmannElement":
        """g_{i1} ... g_{ik} form, with generators in the given order."""
        mask, sign = 0, 1
        for g in gens:
            if mask >> g & 1:
                return cls()
            sign *= _merge_sign(mask, 1 << g)
            mask |= 1 << g
        return cls({(mask, form.degree): form * sign})

    # bookkeeping -------------------------------------------------------------------
    def ghost_degrees(self) -> set:
        return {_popcount(m) for m, _ in self.terms}

    def coefficient(self, mask: int, degree: int | None = None) -> Form | None:
        for (m, p), f in self.terms.items():
            if m == mask and (degree is None or p == degree):
                return f
        return None

    def norm(self) -> float:
        return max((f.norm() for f in self.terms.values()), default=0.0)

    def norm_on(self, gens) -> float:
        """Largest coefficient on monomials containing any of the given generators."""
        sel = sum(1 << g for g in gens)
        return max((f.norm() for (m, _), f in self.terms.items() if m & sel), default=0.0)

    def __repr__(self):
        return f"GrassmannElement({len(self.terms)} terms, ghost degrees {sorted(self.ghost_degrees())})"

    # linear structure -------------------------------------------------------------------
    def _combine(self, other: "GrassmannElement", sign: int) -> "GrassmannElement":
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out[k] + f * sign if k in out else f * sign
        return GrassmannElement(out)

    def __add__(self, other):
        if isinstance(other, (int, float)) and other == 0:
            return self
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return GrassmannElement({k: -f for k, f in self.terms.items()})

    def __mul__(self, c):
        """Multiplication by an even scalar, constant array or 0-form jet."""
        return GrassmannElement({k: f * c for k, f in self.terms.items()})

    __rmul__ = __mul__

    def map(self, fn) -> "GrassmannElement":
        """Apply an even linear map to every coefficient."""
        out = {}
        for (m, _), f in self.terms.items():
            g = fn(f)
            out[(m, g.degree)] = g
        return GrassmannElement(out)

    def __getitem__(self, key) -> "GrassmannElement":
        return self.map(lambda f: f[key])

    @property
    def H(self) -> "GrassmannElement":
        """Conjugate transpose of the coefficients; the generators are real."""
        return self.map(lambda f: f.H)

    def trace(self) -> "GrassmannElement":
        return self.map(lambda f: f.trace())

    # products and d --------------------------------------------------------------------------
    def __matmul__(self, other) -> "GrassmannElement":
        if not isinstance(other, GrassmannElement):
            other = _lift(other)
        acc = defaultdict(list)
        for (S, p), a in self.terms.items():
            for (T, q), b in other.terms.items():
                if S & T:
                    continue
                U = S | T
                if _popcount(U) > MAX_GHOST:
                    raise GrassmannError("ghost-degree overflow")
                sign = _merge_sign(S, T) * (-1) ** (p * _popcount(T))
                acc[(U, p + q)].append((a @ b) * sign)
        return GrassmannElement({k: _sum(v) for k, v in acc.items()})

    def __rmatmul__(self, other) -> "GrassmannElement":
        return _lift(other) @ self

    def d(self) -> "GrassmannElement":
        return GrassmannElement({(m, p + 1): ext_d(f) * (-1) ** _popcount(m)
                                 for (m, p), f in self.terms.items()})


def _sum(forms):
    out = forms[0]
    for f in forms[1:]:
        out = out + f
    return out


def _lift(x) -> GrassmannElement:
    if isinstance(x, GrassmannElement):
        return x
    if isinstance(x, Form):
        return GrassmannElement.field(x)
    if isinstance(x, Jet):
        return GrassmannElement.field(Form.from_jet(x))
    raise TypeError(f"cannot lift {type(x).__name__} into the Grassmann algebra")


def commutator(A: GrassmannElement, B: GrassmannElement, degA: int, degB: int) -> GrassmannElement:
    """Graded commutator for homogeneous total degrees."""
    return A @ B - (B @ A) * ((-1) ** (degA * degB))


# ghosts -------------------------------------------------------------------------------------

_SL2_BASIS = [spin.PAULI[k] for k in (1, 2, 3)] + [1j * spin.PAULI[k] for k in (1, 2, 3)]


def _diag_block(X: np.ndarray) -> np.ndarray:
    return np.block([[-spin.dagger(X), np.zeros((2, 2))], [np.zeros((2, 2)), X]])


def ghost_matrices() -> list:
    """Constant 4x4 matrices multiplying each generator's coefficient field."""
    eps = np.diag([0.5, 0.5, -0.5, -0.5]).astype(complex)
    mats = [eps] + [_diag_block(T) for T in _SL2_BASIS]
    for a in range(4):
        r = np.zeros(4)
        r[a] = 1.0
        m = np.zeros((4, 4), dtype=complex)
        m[0:2, 2:4] = -1j * spin.covec_to_herm(r)
        mats.append(m)
    return mats


GHOST_MATRICES = ghost_matrices()


class GhostField:
    """v = v_eps + v_s + v_rho with coefficient fields eps (scalar), s (6 reals), rho (covector)."""

    def __init__(self, eps: Field | None = None, s: Field | None = None, rho: Field | None = None):
        self.eps = eps or Field.constant(0.0)
        self.s = s or Field.constant(np.zeros(6))
        self.rho = rho or Field.constant(np.zeros(4))

    def coefficients(self, point, order: int) -> list:
        """The 11 scalar coefficient jets, in generator order."""
        e = self.eps.jet(point, order)
        s = self.s.jet(point, order)
        r = self.rho.jet(point, order)
        return [e] + [s[k] for k in range(6)] + [r[k] for k in range(4)]

    def parameter_matrix(self, point, order: int) -> Jet:
        """The even matrix field sum_k c_k M_k (the linear gauge parameter)."""
        cs = self.coefficients(point, order)
        return _sum_jets([Jet.constant(M, point, order) * c for M, c in zip(GHOST_MATRICES, cs)])

    def element(self, point, order: int, gens=None) -> GrassmannElement:
        cs = self.coefficients(point, order)
        out = GrassmannElement()
        for k, (M, c) in enumerate(zip(GHOST_MATRICES, cs)):
            if gens is not None and k not in gens:
                continue
            form = Form.from_jet(Jet.constant(M, point, order) * c)
            out = out + GrassmannElement.monomial([k], form)
        return out


def _sum_jets(js):
    out = js[0]
    for j in js[1:]:
        out = out + j
    return out


# the BRST differential ------------------------------------------------------------------------

def s_connection(w: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    """s varpi = -dv - [varpi, v]."""
    return -v.d() - commutator(w, v, 1, 1)


def s_curvature(Om: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    """s Omega = [Omega, v]."""
    return commutator(Om, v, 2, 1)


def s_section(psi: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    return -(v @ psi)


def s_ghost(v: GrassmannElement) -> GrassmannElement:
    return -(v @ v)


def brst_s(kind: str, chi: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    if max(chi.ghost_degrees() | {0}) > MAX_GHOST - 1:
        raise GrassmannError("ghost-degree overflow")
    rule = {"connection": s_connection, "curvature": s_curvature, "section": s_section}
    if kind == "ghost":
        return s_ghost(chi)
    if kind not in rule:
        raise ValueError(f"unknown field kind {kind!r}")
    return rule[kind](chi, v)


def s_squared(kind: str, chi: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    """s^2 chi expanded with s an antiderivation, s v = -v^2 and sd = -ds."""
    sv = s_ghost(v)
    if kind == "connection":
        sw = s_connection(chi, v)
        return sv.d() - sw @ v + chi @ sv - sv @ chi + v @ sw
    if kind == "curvature":
        sO = s_curvature(chi, v)
        return sO @ v + chi @ sv - sv @ chi + v @ sO
    if kind == "section":
        return -(sv @ chi) + v @ s_section(chi, v)
    if kind == "ghost":
        return -(sv @ v) + v @ sv
    raise ValueError(f"unknown field kind {kind!r}")


def s_of_curvature_expression(w: GrassmannElement, v: GrassmannElement) -> GrassmannElement:
    """s(d varpi + varpi^2) expanded: -d(s varpi) + (s varpi) varpi - varpi (s varpi)."""
    sw = s_connection(w, v)
    return -sw.d() + sw @ w - w @ sw


def russian_residual(w: GrassmannElement, v: GrassmannElement) -> float:
    """(d + s)(varpi + v) + (varpi + v)^2 - Omega, all ghost degrees."""
    Om = w.d() + w @ w
    total = w.d() + v.d() + s_connection(w, v) + s_ghost(v) + (w + v) @ (w + v) - Om
    return total.norm()


# dressed ghost -------------------------------------------------------------------------------------

def d_eps_frame(eps: Jet, e: Jet) -> Jet:
    """(d eps)_a = d_mu eps E^mu_a."""
    de = Jet.stack([eps.partial(mu) for mu in range(4)], axis=0)
    k = min(de.order, e.order)
    E = e.truncate(k).inv()
    return (E.T @ de.truncate(k).reshape(4, 1)).reshape(4)


def dressed_ghost_closed(ghost: GhostField, e: Jet, point, order: int) -> GrassmannElement:
    """v_1 = c(eps) + v_s = [[-(s^* - eps/2), -i d-eps], [0, s - eps/2]]."""
    cs = ghost.coefficients(point, order)
    eps = cs[0]
    deps = spin.covec_to_herm(d_eps_frame(eps, e))
    k = deps.order
    zero = Jet.constant(np.zeros((2, 2)), point, k)
    eps_part = Jet.constant(GHOST_MATRICES[0], point, k) * eps.truncate(k)
    kick = _block4([[zero, deps * -1j], [zero, zero]])
    out = GrassmannElement.monomial([0], Form.from_jet(eps_part + kick))
    for g in S_GENS:
        form = Form.from_jet(Jet.constant(GHOST_MATRICES[g], point, k) * cs[g].truncate(k))
        out = out + GrassmannElement.monomial([g], form)
    return out


def _block4(rows) -> Jet:
    from .calculus.jets import block
    return block(rows)


def dressing_ghost_rules(ghost: GhostField, u: Jet, e: Jet, point, order: int) -> GrassmannElement:
    """u^-1 v u + u^-1 s u with s u assembled from the sector rules.

    s_w u = -v_eps u + u c(eps),  s_l u = [u, v_s],  s_1 u = -v_rho u.
    """
    v_eps = ghost.element(point, order, EPS_GEN)
    v_s = ghost.element(point, order, S_GENS)
    v_rho = ghost.element(point, order, RHO_GENS)
    c_eps = dressed_ghost_closed(GhostField(eps=ghost.eps), e, point, order)
    U = _lift(u)
    su = -(v_eps @ U) + U @ c_eps + (U @ v_s - v_s @ U) - v_rho @ U
    Ui = _lift(u.inv())
    v = v_eps + v_s + v_rho
    return Ui @ v @ U + Ui @ su


def dressing_ghost_from_s(conn: SpinCartanConn, ghost: GhostField, point, order: int) -> GrassmannElement:
    """u^-1 v u + u^-1 s u with s u derived from s varpi (s q from the a and theta blocks)."""
    from .dressing import extract_dressing
    M = conn.matrix()
    v = ghost.element(point, order)
    sw = s_connection(GrassmannElement.field(M), v)
    u = extract_dressing(conn)
    e = conn.vierbein()
    k = min(sw.terms[next(iter(sw.terms))].order, e.order) if sw.terms else e.order
    E = e.truncate(k).inv()
    a = conn.a.coeffs.truncate(k)
    su = GrassmannElement()
    for (mask, p), f in sw.terms.items():
        blocks = SpinCartanConn.from_matrix(f)
        sa = blocks.a.coeffs.truncate(k)                             # (s a)_mu
        se = spin.herm_to_vec(blocks.theta).coeffs.truncate(k)       # (s e)^b_nu
        sE = -(E @ se @ E)
        sq = (E.T @ sa.reshape(4, 1) + sE.T @ a.reshape(4, 1)).reshape(4)
        sqbar = spin.covec_to_herm(sq)
        zero = Jet.constant(np.zeros((2, 2)), point, sq.order)
        su = su + GrassmannElement({(mask, 0): Form.from_jet(
            _block4([[zero, sqbar * -1j], [zero, zero]]))})
    U = u.matrix()
    Ui = _lift(U.inv())
    return Ui @ v @ _lift(U) + Ui @ su


# the displayed dressed BRST algebra ------------------------------------------------------------

def _two(x) -> GrassmannElement:
    return GrassmannElement.field(x) if isinstance(x, Form) else x


def _tracefree(X: GrassmannElement) -> GrassmannElement:
    return X - X.trace().map(lambda f: f * np.eye(2)) * 0.5


def ghost_blocks(ghost: GhostField, e: Jet, point, order: int) -> dict:
    """The 2x2 Grassmann pieces eps, s, s^*, d-eps of a ghost field."""
    cs = ghost.coefficients(point, order)
    eps = GrassmannElement.monomial([0], Form.from_jet(cs[0] * np.eye(2)))
    s = GrassmannElement()
    for k, g in enumerate(S_GENS):
        s = s + GrassmannElement.monomial([g], Form.from_jet(cs[g] * _SL2_BASIS[k]))
    deps = spin.covec_to_herm(d_eps_frame(cs[0], e))
    return {"eps": eps, "s": s, "s*": s.H,
            "deps": GrassmannElement.monomial([0], Form.from_jet(deps))}


def displayed_brst(conn1: SpinCartanConn, ghost: GhostField, psi1: Jet, point, order: int) -> dict:
    """Each displayed block next to its generic counterpart.

    Returns {name: (generic, displayed, corrected)} for the blocks of
    s varpi_1, s Omega_1, s psi_1 and s v_1, all as Grassmann elements.
    ``displayed`` is the expression as usually printed; ``corrected`` differs
    from it only in the blocks listed in CORRECTED_BLOCKS.
    """
    from .cartan import curvature_matrix, SpinCurvature
    M = conn1.matrix()
    e = conn1.vierbein()
    v1 = dressed_ghost_closed(ghost, e, point, order)
    g = ghost_blocks(ghost, e, point, order)
    eps, s, ss, de = g["eps"], g["s"], g["s*"], g["deps"]
    A, As, P, th = (_two(x) for x in (conn1.A, conn1.A.H, conn1.P, conn1.theta))
    out = {}

    sw = s_connection(GrassmannElement.field(M), v1)
    nab_s = s.d() + commutator(A, s, 1, 1)
    nab_ss = ss.d() - commutator(As, ss, 1, 1)
    nab_de = de.d() + de @ A - As @ de
    out["conn.UL"] = (sw[0:2, 0:2], nab_ss - _tracefree(de @ th))
    out["conn.UR"] = (sw[0:2, 2:4], (-(eps @ P) - nab_de - (P @ s - ss @ P)) * -1j)
    out["conn.LL"] = (sw[2:4, 0:2], (-(eps @ th) + s @ th - th @ ss) * 1j,
                      (eps @ th - s @ th + th @ ss) * 1j)
    out["conn.LR"] = (sw[2:4, 2:4], -nab_s - _tracefree(th @ de))

    Om = curvature_matrix(M)
    cv = SpinCurvature.from_matrix(Om)
    W, Ws, C, Th = (_two(x) for x in (cv.W, cv.W.H, cv.C, cv.Theta))
    sO = s_curvature(GrassmannElement.field(Om), v1)
    out["curv.UL"] = (sO[0:2, 0:2], -(de @ Th) + commutator(Ws, ss, 2, 1))
    f_de = de @ GrassmannElement.field(cv.f * np.eye(2))
    out["curv.UR"] = (sO[0:2, 2:4], (-(eps @ C) + (de @ W - Ws @ de) + (C @ s - ss @ C)) * -1j,
                      (-(eps @ C) - (de @ W + Ws @ de) + f_de + (C @ s + ss @ C)) * -1j)
    out["curv.LL"] = (sO[2:4, 0:2], (-(eps @ Th) - s @ Th - Th @ ss) * 1j,
                      (eps @ Th - s @ Th - Th @ ss) * 1j)
    out["curv.LR"] = (sO[2:4, 2:4], commutator(W, s, 2, 1) + Th @ de)

    psi = GrassmannElement.field(Form.from_jet(psi1))
    pi, om = psi[0:2, 0:1], psi[2:4, 0:1]
    sp = s_section(psi, v1)
    out["section.top"] = (sp[0:2, 0:1], (ss - eps * 0.5) @ pi + (de @ om) * 1j)
    out["section.bottom"] = (sp[2:4, 0:1], -((s - eps * 0.5) @ om))

    sv = s_ghost(v1)
    out["ghost.UL"] = (sv[0:2, 0:2], ss @ ss, -(ss @ ss))
    out["ghost.UR"] = (sv[0:2, 2:4], (de @ s - ss @ de) * -1j, (de @ s - ss @ de) * 1j)
    out["ghost.LL"] = (sv[2:4, 0:2], GrassmannElement())
    out["ghost.LR"] = (sv[2:4, 2:4], s @ s, -(s @ s))
    return {k: v if len(v) == 3 else (v[0], v[1], v[1]) for k, v in out.items()}


CORRECTED_BLOCKS = ("conn.LL", "curv.UR", "curv.LL", "ghost.UL", "ghost.UR", "ghost.LR")


def display_residuals(conn1: SpinCartanConn, ghost: GhostField, psi1: Jet, point, order: int,
                      which: str = "corrected") -> dict:
    """|generic - displayed| or |generic - corrected| per block."""
    idx = {"displayed": 1, "corrected": 2}[which]
    return {k: (v[0] - v[idx]).norm()
            for k, v in displayed_brst(conn1, ghost, psi1, point, order).items()}


# linearization ------------------------------------------------------------------------------------

def linear_part(chi: GrassmannElement, gens=None) -> Form | None:
    """Sum of the ghost-degree-1 coefficients (the gauge parameter set to its fields)."""
    forms = [f for (m, _), f in chi.terms.items()
             if _popcount(m) == 1 and (gens is None or (m.bit_length() - 1) in gens)]
    return _sum(forms) if forms else None


def finite_vs_infinitesimal(conn: SpinCartanConn, ghost: GhostField, point, order: int,
                            t: float = 1e-4) -> float:
    """|varpi^{exp(tX)} - varpi - t s varpi|_{ghosts -> X} with X the ghost parameter.

    With ghosts written to the left, s varpi = -dv - [varpi, v] reproduces the
    linearized gauge transformation, so the residual is O(t^2).
    """
    from .cartan import gauge_transform_matrix
    from .calculus.jets import expm
    M = conn.matrix()
    X = ghost.parameter_matrix(point, order)
    g = expm(X * t)
    finite = gauge_transform_matrix(M, g)
    sw = s_connection(GrassmannElement.field(M), ghost.element(point, order))
    lin = linear_part(sw)
    return (finite - M - lin * t).norm()


def dressed_finite_vs_infinitesimal(conn1: SpinCartanConn, eps: Field, s: Field | None,
                                    point, order: int, t: float = 1e-4) -> float:
    """Residual Weyl and Lorentz actions (z = e^{t eps}, S = e^{t s}) vs s varpi_1 with v_1.

    Returns |finite - varpi_1 - t (s varpi_1)|_lin, which is O(t^2).
    """
    from .calculus.jets import exp, expm
    from .dressing import lorentz_conn_closed, weyl_conn_closed
    ghost = GhostField(eps=eps, s=s)
    cs = ghost.coefficients(point, order)
    zj = exp(cs[0] * t)
    sbar = _sum_jets([cs[g] * _SL2_BASIS[k] for k, g in enumerate(S_GENS)])
    S = expm(sbar * t)
    moved = lorentz_conn_closed(weyl_conn_closed(conn1, zj), S)
    M1 = conn1.matrix()
    v1 = dressed_ghost_closed(ghost, conn1.vierbein(), point, order)
    lin = linear_part(s_connection(GrassmannElement.field(M1), v1))
    return (moved.matrix() - M1 - lin * t).norm()
