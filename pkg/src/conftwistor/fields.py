"""Fields on the chart: callables evaluated into jets at a point."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .calculus.jets import Jet


def as_jet(obj, point, order: int) -> Jet:
    """Convert a jet, number, array or nested list of those into one jet."""
    if isinstance(obj, Jet):
        return obj.truncate(min(order, obj.order)) if obj.order > order else obj
    if isinstance(obj, (list, tuple)):
        parts = [as_jet(o, point, order) for o in obj]
        return Jet.stack(parts, axis=0)
    return Jet.constant(np.asarray(obj, dtype=complex), point, order)


class Field:
    """A (possibly array-valued) function of the chart coordinates.

    ``fn`` receives the four coordinate jets and returns anything ``as_jet``
    understands, so ordinary arithmetic like ``lambda x: 1 + 0.1 * x[1]``
    works unchanged.
    """

    def __init__(self, fn: Callable, name: str = ""):
        self.fn = fn
        self.name = name

    def jet(self, point, order: int) -> Jet:
        xs = Jet.coordinates(point, order)
        return as_jet(self.fn(xs), point, order)

    def __call__(self, point, order: int = 0) -> Jet:
        return self.jet(point, order)

    def value(self, point) -> np.ndarray:
        return self.jet(point, 0).value

    @classmethod
    def constant(cls, value, name: str = "") -> "Field":
        value = np.asarray(value, dtype=complex)
        return cls(lambda x: value, name or "constant")

    def __repr__(self):
        return f"Field({self.name or self.fn!r})"


def identity_frame() -> Field:
    return Field.constant(np.eye(4), "flat")


def conformal_frame(z: Field, base: Field | None = None) -> Field:
    """The vierbein z * base (base defaults to the identity)."""
    base = base or identity_frame()

    def fn(x):
        point, order = x[0].point, x[0].order
        return base.jet(point, order) * z.jet(point, order)

    return Field(fn, f"{z.name}*{base.name}")
