"""Differential forms with jet coefficients on a 4D chart.

A ``Form`` of degree p stores one jet per strictly increasing index tuple
``mu_1 < ... < mu_p`` of the coordinate coframe ``dx^mu``.  Forms may be
array valued; matrix-valued forms (connections, curvatures, block matrices)
are simply forms whose value shape is ``(rows, cols)``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .jets import DIM, Jet, JetError, _mul_coeffs, jet_partial

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


class FormError(ValueError):
    pass


@lru_cache(maxsize=None)
def components(p: int) -> tuple:
    return tuple(itertools.combinations(range(DIM), p))


@lru_cache(maxsize=None)
def _component_index(p: int) -> dict:
    return {c: i for i, c in enumerate(components(p))}


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _wedge_table(p: int, q: int) -> np.ndarray:
    out = np.zeros((len(components(p)), len(components(q)), len(components(p + q))))
    index = _component_index(p + q)
    for i, a in enumerate(components(p)):
        for j, b in enumerate(components(q)):
            if set(a) & set(b):
                continue
            merged = a + b
            out[i, j, index[tuple(sorted(merged))]] = _perm_sign(merged)
    return out


@lru_cache(maxsize=None)
def _d_table(p: int):
    index = _component_index(p + 1)
    rows = []
    for i, comp in enumerate(components(p)):
        for mu in range(DIM):
            if mu in comp:
                continue
            sign = (-1) ** sum(1 for nu in comp if nu < mu)
            rows.append((mu, i, index[tuple(sorted(comp + (mu,)))], sign))
    return rows


@lru_cache(maxsize=None)
def levi_civita() -> np.ndarray:
    """epsilon_{abcd} with epsilon_{0123} = +1."""
    eps = np.zeros((DIM,) * 4)
    for perm in itertools.permutations(range(DIM)):
        eps[perm] = _perm_sign(perm)
    return eps


def linmap(tensor: np.ndarray, obj, n_in: int):
    """Apply a constant linear map to the leading ``n_in`` value axes of obj.

    ``tensor`` has shape ``(*out_axes, *in_axes)``.  Works on ndarrays, jets
    and forms alike.
    """
    tensor = np.asarray(tensor)
    n_out = tensor.ndim - n_in
    axes = (list(range(n_out, tensor.ndim)), list(range(n_in)))
    if isinstance(obj, Form):
        return Form(obj.degree, linmap(tensor, obj.coeffs, n_in))
    if isinstance(obj, Jet):
        return Jet(np.tensordot(tensor, obj.coeffs, axes=axes), obj.order, obj.point)
    return np.tensordot(tensor, np.asarray(obj), axes=axes)


class Form:
    """Array-valued p-form with jet coefficients in the coordinate coframe."""

    __array_priority__ = 1001

    def __init__(self, degree: int, coeffs: Jet):
        if not 0 <= degree <= DIM:
            raise FormError(f"degree {degree} out of range")
        if coeffs.shape[-1:] != (math.comb(DIM, degree),):
            raise FormError(
                f"degree-{degree} form needs a trailing component axis of size "
                f"{math.comb(DIM, degree)}, got shape {coeffs.shape}")
        self.degree = degree
        self.coeffs = coeffs

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, degree: int, vshape, point, order: int) -> "Form":
        shape = tuple(vshape) + (math.comb(DIM, degree),)
        return cls(degree, Jet.constant(np.zeros(shape), point, order))

    @classmethod
    def from_jet(cls, j: Jet) -> "Form":
        """A 0-form with the given jet as coefficient."""
        return cls(0, Jet(j.coeffs[..., None, :], j.order, j.point))

    @classmethod
    def one_form(cls, comps: Jet) -> "Form":
        """1-form from a jet whose last value axis indexes dx^mu."""
        return cls(1, comps)

    @classmethod
    def from_antisymmetric(cls, degree: int, full: Jet) -> "Form":
        """p-form from its fully antisymmetric component array (last p axes)."""
        vnd = len(full.shape) - degree
        comps = [full[(slice(None),) * vnd + c] for c in components(degree)]
        return cls(degree, Jet.stack(comps, axis=-1))

    @classmethod
    def dx(cls, mu: int, point, order: int) -> "Form":
        c = np.zeros(DIM)
        c[mu] = 1.0
        return cls(1, Jet.constant(c, point, order))

    # basic protocol ------------------------------------------------------
    @property
    def vshape(self):
        return self.coeffs.shape[:-1]

    @property
    def order(self) -> int:
        return self.coeffs.order

    @property
    def point(self):
        return self.coeffs.point

    def __repr__(self):
        return f"Form(degree={self.degree}, vshape={self.vshape}, order={self.order})"

    def __getitem__(self, key) -> "Form":
        if not isinstance(key, tuple):
            key = (key,)
        return Form(self.degree, Jet(self.coeffs.coeffs[key + (Ellipsis, slice(None), slice(None))],
                                     self.order, self.point))

    def component(self, *indices) -> Jet:
        """Coefficient jet along dx^{i1} ^ ... ^ dx^{ip} (any index order)."""
        if len(indices) != self.degree:
            raise FormError("wrong number of indices")
        if len(set(indices)) < len(indices):
            return Jet(np.zeros_like(self.coeffs.coeffs[..., 0, :]), self.order, self.point)
        k = _component_index(self.degree)[tuple(sorted(indices))]
        sign = _perm_sign(indices)
        return Jet(sign * self.coeffs.coeffs[..., k, :], self.order, self.point)

    def antisymmetric(self) -> Jet:
        """Full antisymmetric component array with p trailing index axes."""
        vshape = self.vshape
        n = self.coeffs.coeffs.shape[-1]
        full = np.zeros(vshape + (DIM,) * self.degree + (n,), dtype=complex)
        for k, comp in enumerate(components(self.degree)):
            for perm in itertools.permutations(range(self.degree)):
                idx = tuple(comp[i] for i in perm)
                full[(Ellipsis,) + idx + (slice(None),)] = (
                    _perm_sign(perm) * self.coeffs.coeffs[..., k, :])
        return Jet(full, self.order, self.point)

    def truncate(self, order: int) -> "Form":
        return Form(self.degree, self.coeffs.truncate(order))

    def reshape(self, *vshape) -> "Form":
        return Form(self.degree, self.coeffs.reshape(*vshape, self.coeffs.shape[-1]))

    def _same_degree(self, other: "Form"):
        if not isinstance(other, Form):
            raise FormError("can only add forms to forms")
        if other.degree != self.degree:
            raise FormError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)) and other == 0:
            return self
        self._same_degree(other)
        return Form(self.degree, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        self._same_degree(other)
        return Form(self.degree, self.coeffs - other.coeffs)

    def __neg__(self):
        return Form(self.degree, -self.coeffs)

    def __mul__(self, other):
        """Pointwise product with a scalar, constant array or 0-form jet."""
        if isinstance(other, Form):
            return self.wedge(other)
        if isinstance(other, Jet):
            # broadcast the function's value axes against ours, not the component axis
            lifted = Jet(other.coeffs[..., None, :], other.order, other.point)
            return Form(self.degree, self.coeffs * lifted)
        if np.isscalar(other):
            return Form(self.degree, self.coeffs * other)
        other = np.asarray(other)
        return Form(self.degree, self.coeffs * other[..., None])

    __rmul__ = __mul__

    def conj(self) -> "Form":
        return Form(self.degree, self.coeffs.conj())

    @property
    def T(self) -> "Form":
        c = self.coeffs.coeffs
        return Form(self.degree, Jet(np.swapaxes(c, -3, -4), self.order, self.point))

    @property
    def H(self) -> "Form":
        return self.T.conj()

    @property
    def real(self) -> "Form":
        return Form(self.degree, self.coeffs.real)

    @property
    def imag(self) -> "Form":
        return Form(self.degree, self.coeffs.imag)

    def trace(self) -> "Form":
        c = np.trace(self.coeffs.coeffs, axis1=-4, axis2=-3)
        return Form(self.degree, Jet(c, self.order, self.point))

    def norm(self) -> float:
        """Max modulus over all components and Taylor coefficients."""
        return self.coeffs.norm()

    def value_norm(self) -> float:
        """Max modulus of the components at the base point."""
        v = self.coeffs.value
        return float(np.max(np.abs(v))) if v.size else 0.0

    # algebra ---------------------------------------------------------------
    def wedge(self, other: "Form") -> "Form":
        """Pointwise (broadcast) exterior product."""
        p, q = self.degree, other.degree
        if p + q > DIM:
            raise FormError("degrees sum above 4")
        order = min(self.order, other.order)
        a = self.coeffs.truncate(order).coeffs
        b = other.coeffs.truncate(order).coeffs
        prod = _mul_coeffs(a[..., :, None, :], b[..., None, :, :], order)
        out = np.einsum("...abn,abo->...on", prod, _wedge_table(p, q))
        return Form(p + q, Jet(out, order, self.point))

    def __matmul__(self, other: "Form") -> "Form":
        return matrix_product(self, other)

    def __rmatmul__(self, other) -> "Form":
        return matrix_product(other, self)

    def d(self) -> "Form":
        return ext_d(self)


def wedge(alpha: Form, beta: Form) -> Form:
    return alpha.wedge(beta)


def matrix_product(A: Form, B: Form) -> Form:
    """Matrix product of matrix-valued forms, entries combined with the wedge."""
    if not isinstance(B, Form):
        if isinstance(B, Jet):
            B = Form.from_jet(B)
        else:
            B = Form.from_jet(Jet.constant(B, A.point, A.order))
    if not isinstance(A, Form):
        if isinstance(A, Jet):
            A = Form.from_jet(A)
        else:
            A = Form.from_jet(Jet.constant(A, B.point, B.order))
    if len(A.vshape) < 2 or len(B.vshape) < 2:
        raise FormError("matrix product needs matrix-valued forms")
    if A.vshape[-1] != B.vshape[-2]:
        raise FormError(f"dimension mismatch: {A.vshape} @ {B.vshape}")
    p, q = A.degree, B.degree
    if p + q > DIM:
        raise FormError("degrees sum above 4")
    order = min(A.order, B.order)
    a = A.coeffs.truncate(order).coeffs   # (..., r, k, ca, N)
    b = B.coeffs.truncate(order).coeffs   # (..., k, c, cb, N)
    a = a[..., :, :, None, :, None, :]
    b = b[..., None, :, :, None, :, :]
    prod = _mul_coeffs(a, b, order).sum(axis=-5)  # (..., r, c, ca, cb, N)
    out = np.einsum("...abn,abo->...on", prod, _wedge_table(p, q))
    return Form(p + q, Jet(out, order, A.point))


def ext_d(alpha: Form) -> Form:
    """Exterior derivative; coefficient jets lose one order."""
    if alpha.degree >= DIM:
        raise FormError("top degree")
    if alpha.order < 1:
        raise JetError("derivative order exhausted")
    partials = [jet_partial(alpha.coeffs, mu).coeffs for mu in range(DIM)]
    p = alpha.degree
    shape = alpha.vshape + (math.comb(DIM, p + 1), partials[0].shape[-1])
    out = np.zeros(shape, dtype=complex)
    for mu, i, o, sign in _d_table(p):
        out[..., o, :] += sign * partials[mu][..., i, :]
    return Form(p + 1, Jet(out, alpha.order - 1, alpha.point))


def differential(j: Jet) -> Form:
    """d of an array-valued function given as a jet: a 1-form."""
    return ext_d(Form.from_jet(j))


def graded_commutator(A: Form, B: Form) -> Form:
    """[A, B] = AB - (-1)^{pq} BA for matrix-valued forms."""
    sign = (-1) ** (A.degree * B.degree)
    return A @ B - (B @ A) * sign


# frames and the Hodge star ----------------------------------------------------

def to_frame(alpha: Form, E: Jet) -> Jet:
    """Frame components alpha_{a1..ap} = E^mu1_a1 ... alpha_{mu1..mup}.

    ``E`` is the inverse vierbein with ``E[mu, a] = E^mu_a``.  Returns the full
    antisymmetric array in frame indices.
    """
    full = alpha.antisymmetric()
    vnd = len(alpha.vshape)
    for k in range(alpha.degree):
        axis = vnd + k
        full = _contract_axis(full, E, axis)
    return full


def from_frame(degree: int, full: Jet, e: Jet) -> Form:
    """Inverse of to_frame: frame components -> coordinate-coframe form."""
    vnd = len(full.shape) - degree
    for k in range(degree):
        full = _contract_axis(full, e, vnd + k)
    return Form.from_antisymmetric(degree, full)


def _contract_axis(full: Jet, M: Jet, axis: int) -> Jet:
    """Replace index i on ``axis`` with sum_i full[.., i, ..] M[i, j]."""
    order = min(full.order, M.order)
    f = np.moveaxis(full.truncate(order).coeffs, axis, -2)   # (..., i, N)
    m = M.truncate(order).coeffs                              # (i, j, N)
    prod = _mul_coeffs(f[..., :, None, :], m, order).sum(axis=-3)  # (..., j, N)
    return Jet(np.moveaxis(prod, -2, axis), order, full.point)


@lru_cache(maxsize=None)
def _star_tensor() -> np.ndarray:
    """S[c, d, a, b] = 1/2 eps^{ab}_{cd} (indices raised with eta)."""
    eps = levi_civita()
    eps_up = np.einsum("ai,bj,ijcd->abcd", ETA, ETA, eps)
    return 0.5 * np.transpose(eps_up, (2, 3, 0, 1))


def hodge_star(alpha: Form, e: Jet) -> Form:
    """Hodge dual of a 2-form for the metric e^T eta e.

    Convention: *(theta^a ^ theta^b) = 1/2 eps^{ab}_{cd} theta^c ^ theta^d with
    eps_{0123} = +1, so that ** = -1 on 2-forms.
    """
    if alpha.degree != 2:
        raise FormError("hodge_star is implemented on 2-forms")
    if abs(np.linalg.det(e.value)) < 1e-12:
        raise FormError("degenerate frame")
    E = e.inv()
    frame = to_frame(alpha, E)
    vnd = len(alpha.vshape)
    c = np.moveaxis(frame.coeffs, (vnd, vnd + 1), (0, 1))
    starred = np.tensordot(_star_tensor(), c, axes=([2, 3], [0, 1]))
    starred = np.moveaxis(starred, (0, 1), (vnd, vnd + 1))
    return from_frame(2, Jet(starred, frame.order, frame.point), e)


def top_coefficient(alpha: Form) -> Jet:
    """Coefficient of dx^0 ^ dx^1 ^ dx^2 ^ dx^3 of a 4-form."""
    if alpha.degree != DIM:
        raise FormError("not a top-degree form")
    return alpha.coeffs[(slice(None),) * len(alpha.vshape) + (0,)]


def block_form(rows) -> Form:
    """Assemble a matrix-valued form from a grid of equal-degree matrix forms."""
    degree = rows[0][0].degree
    order = min(b.order for row in rows for b in row)
    point = rows[0][0].point
    for row in rows:
        for b in row:
            if b.degree != degree:
                raise FormError("blocks of different degree")
    arr = np.concatenate(
        [np.concatenate([b.coeffs.truncate(order).coeffs for b in row], axis=-3)
         for row in rows], axis=-4)
    return Form(degree, Jet(arr, order, point))
