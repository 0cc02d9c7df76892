"""Independent metric-side routes used to cross-check the Cartan machinery.

``MetricFD`` works only with point values of g = e^T eta e and nested central
finite differences: Christoffels, Riemann, Ricci, Schouten and Weyl in
coordinate indices.  ``christoffel_jet`` computes Christoffels exactly from
jets of g, for the spinor-side prolongation oracle.
"""

from __future__ import annotations

import numpy as np

from .calculus.forms import ETA
from .calculus.jets import Jet
from .fields import Field

# 4th-order central first-derivative stencil
_OFFSETS = np.array([-2, -1, 1, 2])
_WEIGHTS = np.array([1, -8, 8, -1]) / 12.0


def _fd(fn, x, h):
    """Gradient of an array-valued fn at x; derivative index is the first axis."""
    x = np.asarray(x, dtype=float)
    out = []
    for mu in range(4):
        acc = 0.0
        for o, w in zip(_OFFSETS, _WEIGHTS):
            y = x.copy()
            y[mu] += o * h
            acc = acc + w * fn(y)
        out.append(acc / h)
    return np.array(out)


class MetricFD:
    """Curvature of g = e^T eta e from finite differences of point values."""

    def __init__(self, e: Field, h: float = 2e-3):
        self.e = e
        self.h = h
        self._cache = {}

    def _memo(self, name, fn, x):
        key = (name, tuple(np.asarray(x, dtype=float)))
        if key not in self._cache:
            self._cache[key] = fn(x)
        return self._cache[key]

    def frame(self, x) -> np.ndarray:
        return np.real(self.e.value(tuple(x)))

    def g(self, x) -> np.ndarray:
        e = self.frame(x)
        return e.T @ ETA @ e

    def christoffel(self, x) -> np.ndarray:
        """Gamma[l, m, n] = Gamma^l_{mn}."""
        return self._memo("christoffel", self._christoffel, x)

    def _christoffel(self, x) -> np.ndarray:
        dg = _fd(self.g, x, self.h)                   # dg[s, m, n] = d_s g_{mn}
        ginv = np.linalg.inv(self.g(x))
        low = 0.5 * (np.einsum("mSn->Smn", dg) + np.einsum("nSm->Smn", dg) - dg)
        return np.einsum("ls,smn->lmn", ginv, low)

    def riemann(self, x) -> np.ndarray:
        """R[r, s, m, n] = R^r_{smn}."""
        return self._memo("riemann", self._riemann, x)

    def _riemann(self, x) -> np.ndarray:
        G = self.christoffel(x)
        dG = _fd(self.christoffel, x, self.h)         # dG[m, r, n, s] = d_m Gamma^r_{ns}
        R = (np.einsum("mrns->rsmn", dG) - np.einsum("nrms->rsmn", dG)
             + np.einsum("rml,lns->rsmn", G, G) - np.einsum("rnl,lms->rsmn", G, G))
        return R

    def ricci(self, x) -> np.ndarray:
        return np.einsum("rsrn->sn", self.riemann(x))

    def schouten(self, x) -> np.ndarray:
        """Coordinate components of P = -1/2 (Ric - R/6 g) (sign of the Cartan block)."""
        g = self.g(x)
        ric = self.ricci(x)
        scal = np.einsum("mn,mn->", np.linalg.inv(g), ric)
        return -0.5 * (ric - scal / 6.0 * g)

    def schouten_frame(self, x) -> np.ndarray:
        E = np.linalg.inv(self.frame(x))
        return E.T @ self.schouten(x) @ E

    def weyl(self, x) -> np.ndarray:
        """W^r_{smn}: Riemann minus its Ricci parts, trace-free on every pair."""
        g = self.g(x)
        R = self.riemann(x)
        S = -self.schouten(x)
        Rlow = np.einsum("rq,qsmn->rsmn", g, R)
        kn = (np.einsum("rm,sn->rsmn", g, S) - np.einsum("rn,sm->rsmn", g, S)
              - np.einsum("sm,rn->rsmn", g, S) + np.einsum("sn,rm->rsmn", g, S))
        return np.einsum("rq,qsmn->rsmn", np.linalg.inv(g), Rlow - kn)

    def weyl_frame(self, x) -> np.ndarray:
        """W^a_{bcd} in the orthonormal frame."""
        e = self.frame(x)
        E = np.linalg.inv(e)
        return np.einsum("ar,rsmn,sb,mc,nd->abcd", e, self.weyl(x), E, E, E)


def christoffel_jet(e: Jet) -> Jet:
    """Gamma^l_{mn} as a jet, from jets of g = e^T eta e (loses one order)."""
    g = e.T @ Jet.constant(ETA, e.point, e.order) @ e
    dg = Jet.stack([g.partial(mu) for mu in range(4)], axis=0)    # [s, m, n]
    ginv = g.truncate(dg.order).inv()
    c = dg.coeffs
    low = 0.5 * (np.einsum("mSn...->Smn...", c) + np.einsum("nSm...->Smn...", c) - c)
    low = Jet(low, dg.order, dg.point)
    out = ginv @ low.reshape(4, 16)
    return out.reshape(4, 4, 4)


def spin_connection_jet(e: Jet) -> Jet:
    """omega^a_{b mu} = e^a_nu (d_mu E^nu_b + Gamma^nu_{mu l} E^l_b); loses one order."""
    G = christoffel_jet(e)
    k = G.order
    E = e.inv()                                                  # E[nu, b]
    dE = Jet.stack([E.partial(mu) for mu in range(4)], axis=0)   # [mu, nu, b]
    Ek = E.truncate(k)
    # Gamma^nu_{mu l} E^l_b -> [mu, nu, b]
    GE = Jet(np.transpose(G.coeffs, (1, 0, 2, 3)), k, e.point) @ Ek
    inner = dE + GE
    # e^a_nu inner[mu, nu, b] -> [mu, a, b]
    out = e.truncate(k) @ inner
    return Jet(np.transpose(out.coeffs, (1, 2, 0, 3)), k, e.point)


def riemann_jet(e: Jet) -> Jet:
    """R^r_{smn} from jets of Christoffels (loses two orders)."""
    G = christoffel_jet(e)
    dG = Jet.stack([G.partial(mu) for mu in range(4)], axis=0)     # [m, r, n, s]
    k = dG.order
    Gk = G.truncate(k)
    c = dG.coeffs
    lin = np.einsum("mrns...->rsmn...", c) - np.einsum("nrms...->rsmn...", c)
    # Gamma^r_{m l} Gamma^l_{n s}
    GG = Gk.reshape(16, 4) @ Gk.reshape(4, 16)                     # [(r m), (n s)]
    GG = np.einsum("rmnsk->rsmnk", GG.coeffs.reshape(4, 4, 4, 4, -1))
    quad = GG - np.einsum("rsmnk->rsnmk", GG)
    return Jet(lin + quad, k, e.point)


def schouten_frame_jet(e: Jet) -> Jet:
    """P_{ab} = -1/2 (Ric - R/6 g) in the frame of e, via the coordinate Riemann tensor."""
    R = riemann_jet(e)
    k = R.order
    ek = e.truncate(k)
    g = ek.T @ Jet.constant(ETA, e.point, k) @ ek
    ric = Jet(np.einsum("rsrn...->sn...", R.coeffs), k, e.point)
    scal = (g.inv() * ric).sum(0).sum(0)
    P = (ric - g * scal * (1.0 / 6)) * -0.5
    E = ek.inv()
    return E.T @ P @ E
