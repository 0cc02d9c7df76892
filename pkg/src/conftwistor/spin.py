"""Minkowski space as hermitian 2x2 matrices and the spin coverings.

Vectors map to hermitian matrices with the factor one half placed in the map,
``x -> 1/2 x^a sigma_a``, so that ``|x|^2 = 4 det(xbar)``.  Covectors map
without the half, ``r -> r_a sigma_a``; with this pairing the trace of
``xbar rbar`` equals the scalar ``r x`` and the spin algebra map below is a
Lie algebra homomorphism.

The linear maps accept ndarrays, jets or forms; value axes come first.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .calculus.forms import ETA, linmap

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# metric of the conformal group and of its spin cover
SIGMA6 = np.zeros((6, 6))
SIGMA6[0, 5] = SIGMA6[5, 0] = -1.0
SIGMA6[1:5, 1:5] = ETA
SIGMA_BAR = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]]).astype(complex)

_VEC_TO_HERM = 0.5 * np.transpose(PAULI, (1, 2, 0))       # (2, 2, 4)
_HERM_TO_VEC = np.transpose(PAULI, (0, 2, 1))             # tr(X sigma_a)
_COVEC_TO_HERM = np.transpose(PAULI, (1, 2, 0))
_HERM_TO_COVEC = 0.5 * np.transpose(PAULI, (0, 2, 1))

TOL = 1e-10


class SpinError(ValueError):
    pass


# Minkowski <-> Herm(2, C) ---------------------------------------------------

def vec_to_herm(x):
    """x^a -> 1/2 x^a sigma_a."""
    return linmap(_VEC_TO_HERM, x, 1)


def herm_to_vec(X):
    return linmap(_HERM_TO_VEC, X, 2)


def covec_to_herm(r):
    """r_a -> r_a sigma_a (for r = x^T eta this is x^0 sigma_0 - x^i sigma_i)."""
    return linmap(_COVEC_TO_HERM, r, 1)


def herm_to_covec(R):
    return linmap(_HERM_TO_COVEC, R, 2)


def eta_transpose(v):
    """Column vector <-> row covector via eta (eta is its own inverse)."""
    return linmap(ETA, v, 1)


def minkowski_norm(x) -> float:
    x = np.asarray(x)
    return x @ ETA @ x


def dagger(M):
    M = np.asarray(M)
    return np.conj(np.swapaxes(M, -1, -2))


# Lorentz group and algebra ----------------------------------------------------

_SIGMA_BAR_BASIS = np.array([vec_to_herm(v) for v in np.eye(4)])


def lorentz_of_sl2(S: np.ndarray) -> np.ndarray:
    """Lambda with vec_to_herm(Lambda x) = S vec_to_herm(x) S^*."""
    S = np.asarray(S, dtype=complex)
    if abs(np.linalg.det(S) - 1) > TOL:
        raise SpinError("det S must be 1")
    cols = [herm_to_vec(S @ b @ dagger(S)) for b in _SIGMA_BAR_BASIS]
    return np.real(np.array(cols).T)


def _sign_fix(S: np.ndarray) -> np.ndarray:
    tr = np.trace(S)
    if abs(tr.real) > TOL:
        return S if tr.real > 0 else -S
    if abs(tr.imag) > TOL:
        return S if tr.imag > 0 else -S
    return S


def sl2_of_lorentz(L: np.ndarray) -> np.ndarray:
    """One of the two SL(2, C) preimages of a proper orthochronous Lorentz matrix.

    The representative with positive real trace is returned (positive
    imaginary trace if the real part vanishes).
    """
    L = np.asarray(L, dtype=float)
    if np.max(np.abs(L.T @ ETA @ L - ETA)) > 1e-9:
        raise SpinError("not a Lorentz matrix")
    # X -> S X S^* as a matrix on vec(X) equals kron(S, conj S)
    B = _SIGMA_BAR_BASIS.reshape(4, 4).T
    K = (B @ L @ np.linalg.inv(B)).reshape(2, 2, 2, 2)
    i, k, j, l = np.unravel_index(np.argmax(np.abs(K)), K.shape)
    S = K[:, k, :, l]
    det = np.linalg.det(S)
    if abs(det) < 1e-14:
        raise SpinError("not in the identity component")
    return _sign_fix(S / np.sqrt(det))


def _so13_tensors():
    # s^a_b = tr((s sigmabar_b + sigmabar_b s^*) sigma_a)
    t1 = np.einsum("bij,ajk->abki", _SIGMA_BAR_BASIS, PAULI)
    t2 = np.einsum("aij,bjk->abik", PAULI, _SIGMA_BAR_BASIS)
    return t1, t2


_SO13_T1, _SO13_T2 = _so13_tensors()


def so13_of_sl2(s):
    """Vector-representation image s^a_b of s in sl(2, C)."""
    return linmap(_SO13_T1, s, 2) + linmap(_SO13_T2, s.conj() if hasattr(s, "conj")
                                          else np.conj(s), 2)


def _sl2_lift_tensor() -> np.ndarray:
    basis = [PAULI[k] for k in (1, 2, 3)] + [1j * PAULI[k] for k in (1, 2, 3)]
    images = np.array([np.real(so13_of_sl2(b)).ravel() for b in basis]).T  # (16, 6)
    lift = np.array(basis).transpose(1, 2, 0) @ np.linalg.pinv(images)     # (2, 2, 16)
    return lift.reshape(2, 2, 4, 4)


_SL2_LIFT = _sl2_lift_tensor()


def sl2_of_so13(s):
    """Inverse of so13_of_sl2 on so(1, 3); complex linear extension elsewhere."""
    return linmap(_SL2_LIFT, s, 2)


# conformal algebra and its spin image ---------------------------------------------

def conf_algebra(eps: float, s, tau, rho) -> np.ndarray:
    """Assemble the so(2, 4) matrix [[eps, rho, 0], [tau, s, rho^t], [0, tau^t, -eps]]."""
    s = np.asarray(s, dtype=float)
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    M = np.zeros((6, 6))
    M[0, 0], M[5, 5] = eps, -eps
    M[0, 1:5] = rho
    M[1:5, 0] = tau
    M[1:5, 1:5] = s
    M[1:5, 5] = ETA @ rho
    M[5, 1:5] = tau @ ETA
    return M


def conf_algebra_parts(M: np.ndarray):
    M = np.asarray(M)
    return M[0, 0], M[1:5, 1:5], M[1:5, 0], M[0, 1:5]


def spin_algebra(eps, sbar, taubar, rhobar) -> np.ndarray:
    """[[-(sbar^* - eps/2), -i rhobar], [i taubar, sbar - eps/2]]."""
    one = np.eye(2)
    return np.block([
        [-(dagger(sbar) - eps / 2 * one), -1j * np.asarray(rhobar)],
        [1j * np.asarray(taubar), np.asarray(sbar) - eps / 2 * one],
    ])


def so24_residual(M: np.ndarray) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M.T @ SIGMA6 + SIGMA6 @ M)))


def su22_residual(M: np.ndarray) -> float:
    M = np.asarray(M)
    return float(max(np.max(np.abs(dagger(M) @ SIGMA_BAR + SIGMA_BAR @ M)),
                     abs(np.trace(M))))


def algebra_morphism(M: np.ndarray) -> np.ndarray:
    """so(2, 4) -> su(2, 2)."""
    if so24_residual(M) > TOL * max(1.0, np.max(np.abs(M))):
        raise SpinError("input is not in so(2, 4)")
    eps, s, tau, rho = conf_algebra_parts(M)
    return spin_algebra(eps, sl2_of_so13(s), vec_to_herm(tau), covec_to_herm(rho))


def structure_group(z: float, S: np.ndarray, r) -> np.ndarray:
    """H element K0(z, S) K1(r) in the 6x6 representation."""
    if z <= 0:
        raise SpinError("z must be positive")
    r = np.asarray(r, dtype=float)
    rt = ETA @ r
    K0 = np.zeros((6, 6))
    K0[0, 0], K0[5, 5] = z, 1.0 / z
    K0[1:5, 1:5] = S
    K1 = np.eye(6)
    K1[0, 1:5] = r
    K1[0, 5] = 0.5 * r @ rt
    K1[1:5, 5] = rt
    return K0 @ K1


def spin_structure_group(z, Sbar, rbar) -> np.ndarray:
    """H-bar element diag(z^1/2 S^-1*, z^-1/2 S) [[1, -i r], [0, 1]]."""
    if np.any(np.asarray(z) <= 0):
        raise SpinError("z must be positive")
    Sbar = np.asarray(Sbar, dtype=complex)
    rz = np.sqrt(z)
    k0 = np.block([[rz * dagger(np.linalg.inv(Sbar)), np.zeros((2, 2))],
                   [np.zeros((2, 2)), Sbar / rz]])
    k1 = np.block([[np.eye(2), -1j * np.asarray(rbar)], [np.zeros((2, 2)), np.eye(2)]])
    return k0 @ k1


def group_morphism(h: np.ndarray) -> np.ndarray:
    """H -> H-bar, sign fixed by a positive real trace of the S-bar factor."""
    h = np.asarray(h, dtype=float)
    if np.max(np.abs(h.T @ SIGMA6 @ h - SIGMA6)) > 1e-9 * max(1.0, np.max(np.abs(h)) ** 2):
        raise SpinError("input is not in the conformal group")
    z = h[0, 0]
    if z <= 0 or np.max(np.abs(h[1:5, 0])) > 1e-9 * max(1.0, abs(z)):
        raise SpinError("input is not in the structure group")
    S = h[1:5, 1:5]
    r = h[0, 1:5] / z
    return spin_structure_group(z, sl2_of_lorentz(S), covec_to_herm(r))


def su22_group_residual(M: np.ndarray) -> float:
    M = np.asarray(M)
    return float(max(np.max(np.abs(dagger(M) @ SIGMA_BAR @ M - SIGMA_BAR)),
                     abs(np.linalg.det(M) - 1)))


# random elements for tests and demos -------------------------------------------------

def random_sl2_algebra(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    c = scale * (rng.normal(size=3) + 1j * rng.normal(size=3))
    return np.einsum("k,kij->ij", c, PAULI[1:])


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return scipy.linalg.expm(random_sl2_algebra(rng, scale))


def random_herm(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return vec_to_herm(scale * rng.normal(size=4))


def random_conf_algebra(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    s = np.real(so13_of_sl2(random_sl2_algebra(rng, scale)))
    return conf_algebra(scale * rng.normal(), s, scale * rng.normal(size=4),
                        scale * rng.normal(size=4))


def random_structure_group(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = float(np.exp(scale * rng.normal()))
    S = lorentz_of_sl2(random_sl2(rng, scale))
    return structure_group(z, S, scale * rng.normal(size=4))
