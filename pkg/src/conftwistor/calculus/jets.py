"""Truncated multivariate Taylor expansions ("jets") on a 4D chart.

A jet of order K at a base point x0 stores the Taylor coefficients
``c_alpha = d^alpha f(x0) / alpha!`` for every multi-index alpha over the
four chart variables with ``|alpha| <= K``.  Coefficients are laid out along
the last array axis in graded order, so the order-(K-1) jet is a prefix of
the order-K one.  Leading axes are value axes: a jet of a 4x4 matrix-valued
function has ``coeffs.shape == (4, 4, N)``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

DIM = 4


class JetError(ValueError):
    pass


@lru_cache(maxsize=None)
def multi_indices(order: int) -> np.ndarray:
    """All multi-indices with total degree <= order, graded then lexicographic."""
    out = []
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(DIM), deg):
            alpha = [0] * DIM
            for mu in combo:
                alpha[mu] += 1
            out.append(tuple(alpha))
    # combinations_with_replacement already yields a deterministic order per degree
    arr = np.array(out, dtype=np.int64).reshape(-1, DIM)
    arr.setflags(write=False)
    return arr


def n_coeffs(order: int) -> int:
    return math.comb(order + DIM, DIM)


@lru_cache(maxsize=None)
def _index_lookup(order: int) -> dict:
    return {tuple(a): i for i, a in enumerate(multi_indices(order))}


@lru_cache(maxsize=None)
def _product_table(order: int):
    """Pairs (i, j) -> t with alpha_i + alpha_j = alpha_t, sorted by t."""
    idx = multi_indices(order)
    lookup = _index_lookup(order)
    deg = idx.sum(axis=1)
    I, J, T = [], [], []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            if deg[i] + deg[j] > order:
                continue
            I.append(i)
            J.append(j)
            T.append(lookup[tuple(a + b)])
    I, J, T = map(np.asarray, (I, J, T))
    perm = np.argsort(T, kind="stable")
    I, J, T = I[perm], J[perm], T[perm]
    starts = np.flatnonzero(np.r_[True, T[1:] != T[:-1]])
    return I, J, starts


@lru_cache(maxsize=None)
def _partial_table(order: int, mu: int):
    """Source indices and multiplicities for d/dx^mu: order K -> order K-1."""
    src_lookup = _index_lookup(order)
    dst = multi_indices(order - 1)
    src = np.empty(len(dst), dtype=np.int64)
    mult = np.empty(len(dst))
    for k, a in enumerate(dst):
        b = list(a)
        b[mu] += 1
        src[k] = src_lookup[tuple(b)]
        mult[k] = b[mu]
    return src, mult


def _mul_coeffs(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    I, J, starts = _product_table(order)
    prod = a[..., I] * b[..., J]
    return np.add.reduceat(prod, starts, axis=-1)


def _is_form(obj) -> bool:
    # forms wrap jets; let them handle mixed products
    return hasattr(obj, "degree") and hasattr(obj, "coeffs")


class Jet:
    """Array-valued truncated Taylor expansion at a chart point."""

    __array_priority__ = 1000

    def __init__(self, coeffs, order: int, point):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape[-1] != n_coeffs(order):
            raise JetError(
                f"expected {n_coeffs(order)} coefficients for order {order}, "
                f"got {coeffs.shape[-1]}")
        self.coeffs = coeffs
        self.order = order
        self.point = tuple(float(p) for p in point)

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, point, order: int) -> "Jet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros(value.shape + (n_coeffs(order),), dtype=complex)
        c[..., 0] = value
        return cls(c, order, point)

    @classmethod
    def variable(cls, mu: int, point, order: int) -> "Jet":
        c = np.zeros(n_coeffs(order), dtype=complex)
        c[0] = point[mu]
        if order >= 1:
            c[1 + mu] = 1.0
        return cls(c, order, point)

    @classmethod
    def coordinates(cls, point, order: int) -> list:
        return [cls.variable(mu, point, order) for mu in range(DIM)]

    @classmethod
    def stack(cls, jets: Sequence["Jet"], axis: int = 0) -> "Jet":
        order = min(j.order for j in jets)
        point = jets[0].point
        arrs = [j.truncate(order).coeffs for j in jets]
        if axis < 0:
            axis -= 1
        return cls(np.stack(arrs, axis=axis), order, point)

    # basic protocol ------------------------------------------------------
    @property
    def shape(self):
        return self.coeffs.shape[:-1]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[..., 0]

    def __repr__(self):
        return f"Jet(shape={self.shape}, order={self.order}, point={self.point})"

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        if any(k is Ellipsis for k in key):
            raise JetError("Ellipsis indexing is ambiguous on jets")
        return Jet(self.coeffs[key + (Ellipsis,)], self.order, self.point)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[..., :n_coeffs(order)], order, self.point)

    def reshape(self, *shape) -> "Jet":
        return Jet(self.coeffs.reshape(tuple(shape) + (self.coeffs.shape[-1],)),
                   self.order, self.point)

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.point != self.point:
                raise JetError("jets at different base points")
            order = min(self.order, other.order)
            return self.truncate(order).coeffs, other.truncate(order).coeffs, order
        other = np.asarray(other, dtype=complex)
        c = np.zeros(other.shape + (self.coeffs.shape[-1],), dtype=complex)
        c[..., 0] = other
        return self.coeffs, c, self.order

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        a, b, k = self._coerce(other)
        return Jet(a + b, k, self.point)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, k = self._coerce(other)
        return Jet(a - b, k, self.point)

    def __rsub__(self, other):
        a, b, k = self._coerce(other)
        return Jet(b - a, k, self.point)

    def __neg__(self):
        return Jet(-self.coeffs, self.order, self.point)

    def __mul__(self, other):
        if _is_form(other):
            return NotImplemented
        if np.isscalar(other) or (isinstance(other, np.ndarray) and other.ndim == 0):
            return Jet(self.coeffs * other, self.order, self.point)
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=complex)
            return Jet(self.coeffs * other[..., None], self.order, self.point)
        a, b, k = self._coerce(other)
        return Jet(_mul_coeffs(a, b, k), k, self.point)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=complex)
        return Jet(self.coeffs / other[..., None], self.order, self.point)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            if n < 0:
                return self.reciprocal() ** (-n)
            out = Jet.constant(np.ones(self.shape), self.point, self.order)
            base = self
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        return power(self, float(n))

    def conj(self) -> "Jet":
        return Jet(self.coeffs.conj(), self.order, self.point)

    @property
    def real(self) -> "Jet":
        return Jet(self.coeffs.real, self.order, self.point)

    @property
    def imag(self) -> "Jet":
        return Jet(self.coeffs.imag, self.order, self.point)

    @property
    def T(self) -> "Jet":
        return Jet(np.swapaxes(self.coeffs, -2, -3), self.order, self.point)

    @property
    def H(self) -> "Jet":
        return self.T.conj()

    def sum(self, axis) -> "Jet":
        axis = axis if axis >= 0 else axis - 1
        return Jet(self.coeffs.sum(axis=axis), self.order, self.point)

    def trace(self) -> "Jet":
        return Jet(np.trace(self.coeffs, axis1=-3, axis2=-2), self.order, self.point)

    def __matmul__(self, other: "Jet") -> "Jet":
        if _is_form(other):
            return NotImplemented
        if not isinstance(other, Jet):
            other = Jet.constant(other, self.point, self.order)
        a, b, k = self._coerce(other)
        # (..., n, m, N) @ (..., m, p, N)
        prod = _mul_coeffs(a[..., :, :, None, :], b[..., None, :, :, :], k)
        return Jet(prod.sum(axis=-3), k, self.point)

    def __rmatmul__(self, other) -> "Jet":
        return Jet.constant(other, self.point, self.order) @ self

    def reciprocal(self) -> "Jet":
        a0 = self.value
        if np.any(a0 == 0):
            raise JetError("division by a jet with vanishing constant term")
        return power(self, -1.0)

    def inv(self) -> "Jet":
        """Inverse of a square-matrix-valued jet (Neumann series about the value)."""
        m0 = self.value
        try:
            x = np.linalg.inv(m0)
        except np.linalg.LinAlgError as exc:
            raise JetError("singular matrix jet") from exc
        X = Jet.constant(x, self.point, self.order)
        nil = self - Jet.constant(m0, self.point, self.order)
        step = -(X @ nil)
        term = X
        out = X
        for _ in range(self.order):
            term = step @ term
            out = out + term
        return out

    def partial(self, mu: int) -> "Jet":
        return jet_partial(self, mu)

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0


def jet_partial(j: Jet, mu: int) -> Jet:
    """d/dx^mu of a jet; the result has order reduced by one."""
    if j.order < 1:
        raise JetError("derivative order exhausted")
    if not 0 <= mu < DIM:
        raise JetError(f"direction {mu} out of range")
    src, mult = _partial_table(j.order, mu)
    return Jet(j.coeffs[..., src] * mult, j.order - 1, j.point)


def derivative(j: Jet, alpha: Sequence[int]) -> complex | np.ndarray:
    """Value of the mixed partial d^alpha at the base point."""
    alpha = tuple(alpha)
    idx = _index_lookup(j.order)[alpha]
    return j.coeffs[..., idx] * math.prod(math.factorial(a) for a in alpha)


def _compose(j: Jet, derivs: Callable[[np.ndarray, int], list]) -> Jet:
    """f(j) from the derivative sequence f^(k)(a0), k = 0..order."""
    a0 = j.value
    fk = derivs(a0, j.order)
    nil = j - Jet.constant(a0, j.point, j.order)
    out = Jet.constant(fk[0], j.point, j.order)
    term = Jet.constant(np.ones_like(a0), j.point, j.order)
    for k in range(1, j.order + 1):
        term = term * nil
        out = out + term * (fk[k] / math.factorial(k))
    return out


def exp(j: Jet) -> Jet:
    return _compose(j, lambda a, K: [np.exp(a)] * (K + 1))


def log(j: Jet) -> Jet:
    def d(a, K):
        return [np.log(a)] + [(-1) ** (k - 1) * math.factorial(k - 1) / a ** k
                              for k in range(1, K + 1)]
    return _compose(j, d)


def power(j: Jet, p: float) -> Jet:
    def d(a, K):
        out, c = [], 1.0
        for k in range(K + 1):
            out.append(c * a ** (p - k))
            c *= p - k
        return out
    return _compose(j, d)


def sqrt(j: Jet) -> Jet:
    return power(j, 0.5)


def sin(j: Jet) -> Jet:
    return _compose(j, lambda a, K: [[np.sin(a), np.cos(a), -np.sin(a), -np.cos(a)][k % 4]
                                     for k in range(K + 1)])


def cos(j: Jet) -> Jet:
    return _compose(j, lambda a, K: [[np.cos(a), -np.sin(a), -np.cos(a), np.sin(a)][k % 4]
                                     for k in range(K + 1)])


def expm(m: Jet, terms: int = 30) -> Jet:
    """Matrix exponential of a square-matrix jet by truncated power series."""
    n = m.shape[-1]
    eye = Jet.constant(np.broadcast_to(np.eye(n), m.shape), m.point, m.order)
    out, term = eye, eye
    for k in range(1, terms + 1):
        term = (term @ m) * (1.0 / k)
        out = out + term
        if term.norm() < 1e-18:
            break
    return out


def eye(n: int, point, order: int) -> Jet:
    return Jet.constant(np.eye(n), point, order)


def zeros(shape, point, order: int) -> Jet:
    return Jet.constant(np.zeros(shape), point, order)


def block(rows: Sequence[Sequence[Jet]]) -> Jet:
    """Assemble a matrix jet from a grid of matrix jets."""
    order = min(b.order for row in rows for b in row)
    point = rows[0][0].point

    def as_matrix(b):
        c = b.truncate(order).coeffs
        return c.reshape(1, 1, -1) if c.ndim == 1 else c

    arr = np.concatenate(
        [np.concatenate([as_matrix(b) for b in row], axis=-2) for row in rows],
        axis=-3)
    return Jet(arr, order, point)
