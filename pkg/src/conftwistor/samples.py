"""Seeded random sample points, fields, connections and ghosts."""

from __future__ import annotations

import numpy as np

from . import spin
from .cartan import SpinCartanConn
from .calculus.forms import Form
from .calculus.jets import Jet
from .fields import Field

BOX = (-0.5, 0.5)


def sample_points(n: int, seed: int = 42, box=BOX) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(box[0], box[1], size=(n, 4))


def random_poly_field(rng: np.random.Generator, shape=(), scale: float = 0.1,
                      complex_valued: bool = False, name: str = "") -> Field:
    """Quadratic polynomial field c0 + c1.x + x.c2.x with random coefficients."""
    n = int(np.prod(shape, dtype=int))

    def draw(*s):
        out = rng.normal(size=s)
        if complex_valued:
            out = out + 1j * rng.normal(size=s)
        return scale * out

    c0, c1, c2 = draw(n), draw(n, 4), draw(n, 4, 4)

    def fn(x):
        comps = []
        for k in range(n):
            v = x[0] * 0 + c0[k]
            for mu in range(4):
                v = v + x[mu] * c1[k, mu]
                for nu in range(4):
                    v = v + x[mu] * x[nu] * c2[k, mu, nu]
            comps.append(v)
        return Jet.stack(comps, axis=0).reshape(*shape) if shape else comps[0]

    return Field(fn, name or "random")


def random_frame(rng: np.random.Generator, scale: float = 0.05) -> Field:
    """Identity plus a small random quadratic perturbation."""
    pert = random_poly_field(rng, (4, 4), scale)
    return Field(lambda x: pert.fn(x) + np.eye(4), "random-frame")


def random_connection(rng: np.random.Generator, point, order: int, scale: float = 0.1) -> SpinCartanConn:
    """A generic (non-normal) spin Cartan connection with polynomial coefficients."""
    point = tuple(point)
    a = random_poly_field(rng, (4,), scale).jet(point, order).real
    c = random_poly_field(rng, (3, 4), scale, complex_valued=True).jet(point, order)
    A = Jet(np.einsum("kij,kmn->ijmn", spin.PAULI[1:], c.coeffs), order, point)
    Pco = random_poly_field(rng, (4, 4), scale).jet(point, order).real
    e = random_frame(rng, scale).jet(point, order).real
    return SpinCartanConn(
        a=Form(1, a),
        A=Form(1, A),
        P=spin.covec_to_herm(Form(1, Pco)),
        theta=spin.vec_to_herm(Form(1, e)),
    )


def random_ghost(rng: np.random.Generator, scale: float = 0.2, eps=True, s=True, rho=True):
    from .brst import GhostField
    return GhostField(
        eps=random_poly_field(rng, (), scale) if eps else None,
        s=random_poly_field(rng, (6,), scale) if s else None,
        rho=random_poly_field(rng, (4,), scale) if rho else None,
    )
