"""Scene files: a vierbein, gauge parameters, sampling and tolerances in TOML.

Schema (unknown keys are rejected)::

    name = "bumpy"                      # required
    description = "..."                 # optional
    vierbein = [["1 + 0.05*x1*x2", "0", "0", "0"], ...]   # required, 4x4 strings

    [gauge]          # optional parameters for the gauge/dressing/BRST checks
    z = "1 + 0.1*x1"                    # Weyl factor, must stay positive
    s = ["0.1*x0", "0", "0", "0", "0.05*x2", "0"]   # sl(2,C) coordinates, S = exp(sbar)
    r = ["0.2*x1", "0.1", "-0.1*x2", "0.03"]        # conformal boost covector
    eps = "0.3 + 0.2*x0*x1"             # Weyl ghost coefficient

    [maxwell]        # optional antisymmetric 2-form f = sum f_{mn} dx^m ^ dx^n (m < n)
    f = { "23" = "0.1" }

    [sampling]
    points = 20
    box = [-0.5, 0.5]
    seed = 42
    order = 4

    [tolerance]
    identity = 1e-8
    oracle = 1e-6

    [expect]
    conformally_flat = false
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .. import spin
from ..calculus import jets as J
from ..calculus.forms import Form
from ..calculus.jets import Jet
from ..fields import Field
from ..samples import sample_points
from .expr import DomainError, ExpressionError, parse_expression

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_GAUGE = {
    "z": "1 + 0.1*x1 + 0.05*x0*x2",
    "s": ["0.1*x0", "0.05", "-0.1*x3", "0.02", "0.05*x2", "0.1*x1"],
    "r": ["0.2*x1", "0.1 + 0.05*x0*x3", "-0.1*x2", "0.03"],
    "eps": "0.3 + 0.2*x0*x1",
}
DEFAULT_F = {"23": "0.1"}

_TOP_KEYS = {"name", "description", "vierbein", "gauge", "maxwell", "sampling", "tolerance", "expect"}
_TABLE_KEYS = {
    "gauge": {"z", "s", "r", "eps"},
    "maxwell": {"f"},
    "sampling": {"points", "box", "seed", "order"},
    "tolerance": {"identity", "oracle"},
    "expect": {"conformally_flat"},
}
_PAIRS = ["01", "02", "03", "12", "13", "23"]


class SceneError(ValueError):
    pass


@dataclass
class Scene:
    name: str
    vierbein: list
    description: str = ""
    gauge: dict = field(default_factory=lambda: dict(DEFAULT_GAUGE))
    maxwell: dict | None = None
    points: int = 20
    box: tuple = (-0.5, 0.5)
    seed: int = 42
    order: int = 4
    tol_identity: float = 1e-8
    tol_oracle: float = 1e-6
    conformally_flat: bool = False

    # compiled fields -----------------------------------------------------------------
    def __post_init__(self):
        try:
            self._e = [[parse_expression(s) for s in row] for row in self.vierbein]
            g = self.gauge
            self._z = parse_expression(g["z"])
            self._s = [parse_expression(x) for x in g["s"]]
            self._r = [parse_expression(x) for x in g["r"]]
            self._eps = parse_expression(g["eps"])
            f = self.maxwell if self.maxwell is not None else DEFAULT_F
            self._f = {k: parse_expression(v) for k, v in f.items()}
        except ExpressionError as exc:
            raise SceneError(f"scene {self.name!r}: {exc}") from None

    @property
    def e(self) -> Field:
        rows = self._e
        return Field(lambda x: [[c.fn(x) for c in row] for row in rows], self.name)

    @property
    def z(self) -> Field:
        return self._z

    @property
    def r(self) -> Field:
        rs = self._r
        return Field(lambda x: [c.fn(x) for c in rs], "r")

    @property
    def s(self) -> Field:
        ss = self._s
        return Field(lambda x: [c.fn(x) for c in ss], "s")

    @property
    def S(self) -> Field:
        """S = exp(sbar) with sbar = sum s_k T_k over the basis (sigma_k, i sigma_k)."""
        basis = [spin.PAULI[k] for k in (1, 2, 3)] + [1j * spin.PAULI[k] for k in (1, 2, 3)]
        ss = self._s

        def fn(x):
            point, order = x[0].point, x[0].order
            sbar = Jet.constant(np.zeros((2, 2)), point, order)
            for T, c in zip(basis, ss):
                sbar = sbar + Jet.constant(T, point, order) * c.jet(point, order)
            return J.expm(sbar)

        return Field(fn, "S")

    @property
    def eps(self) -> Field:
        return self._eps

    def maxwell_form(self, point, order: int) -> Form:
        zero = Jet.constant(0.0, point, order)
        comps = []
        for pair in _PAIRS:
            f = self._f.get(pair)
            comps.append(f.jet(point, order) if f is not None else zero)
        return Form(2, Jet.stack(comps, axis=-1))

    def sample_points(self, n: int | None = None, seed: int | None = None) -> np.ndarray:
        return sample_points(n or self.points, self.seed if seed is None else seed, self.box)

    def echo(self) -> dict:
        return {"name": self.name, "description": self.description, "vierbein": self.vierbein,
                "gauge": self.gauge, "maxwell": self.maxwell,
                "sampling": {"points": self.points, "box": list(self.box), "seed": self.seed,
                             "order": self.order},
                "tolerance": {"identity": self.tol_identity, "oracle": self.tol_oracle},
                "expect": {"conformally_flat": self.conformally_flat}}


def _str_list(v, n: int, what: str) -> list:
    if not isinstance(v, list) or len(v) != n or not all(isinstance(s, (str, int, float)) for s in v):
        raise SceneError(f"{what} must be a list of {n} expression strings")
    return [str(s) for s in v]


def scene_from_dict(data: dict) -> Scene:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise SceneError(f"unknown key(s): {', '.join(sorted(unknown))}")
    for t, keys in _TABLE_KEYS.items():
        if t in data:
            if not isinstance(data[t], dict):
                raise SceneError(f"[{t}] must be a table")
            bad = set(data[t]) - keys
            if bad:
                raise SceneError(f"unknown key(s) in [{t}]: {', '.join(sorted(bad))}")
    if "name" not in data or "vierbein" not in data:
        raise SceneError("scene needs 'name' and 'vierbein'")
    vb = data["vierbein"]
    if not isinstance(vb, list) or len(vb) != 4:
        raise SceneError("vierbein must be 4 rows of 4 expression strings")
    vierbein = [_str_list(row, 4, "vierbein row") for row in vb]

    gauge = dict(DEFAULT_GAUGE)
    g = data.get("gauge", {})
    if "z" in g:
        gauge["z"] = str(g["z"])
    if "eps" in g:
        gauge["eps"] = str(g["eps"])
    if "s" in g:
        gauge["s"] = _str_list(g["s"], 6, "gauge.s")
    if "r" in g:
        gauge["r"] = _str_list(g["r"], 4, "gauge.r")

    maxwell = None
    if "maxwell" in data:
        f = data["maxwell"].get("f", {})
        if not isinstance(f, dict) or set(f) - set(_PAIRS):
            raise SceneError(f"maxwell.f keys must be among {_PAIRS}")
        maxwell = {k: str(v) for k, v in f.items()}

    smp = data.get("sampling", {})
    tol = data.get("tolerance", {})
    box = smp.get("box", [-0.5, 0.5])
    if not (isinstance(box, list) and len(box) == 2 and box[0] < box[1]):
        raise SceneError("sampling.box must be [low, high] with low < high")
    try:
        return Scene(
            name=str(data["name"]), vierbein=vierbein,
            description=str(data.get("description", "")),
            gauge=gauge, maxwell=maxwell,
            points=int(smp.get("points", 20)), box=(float(box[0]), float(box[1])),
            seed=int(smp.get("seed", 42)), order=int(smp.get("order", 4)),
            tol_identity=float(tol.get("identity", 1e-8)), tol_oracle=float(tol.get("oracle", 1e-6)),
            conformally_flat=bool(data.get("expect", {}).get("conformally_flat", False)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SceneError):
            raise
        raise SceneError(str(exc)) from None


def builtin_names() -> list:
    files = resources.files("conftwistor.cli") / "scenes"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".toml"))


def load_scene(ref: str) -> Scene:
    """Load a scene file path, or a built-in scene by name."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif ref in builtin_names():
        text = (resources.files("conftwistor.cli") / "scenes" / f"{ref}.toml").read_text(encoding="utf-8")
    else:
        raise SceneError(f"no scene file or built-in scene named {ref!r}")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SceneError(f"invalid TOML: {exc}") from None
    return scene_from_dict(data)


def validate(scene: Scene, points=None) -> None:
    """Evaluate every expression at the sample points; check det e != 0 and z > 0."""
    points = scene.sample_points() if points is None else points
    for p in points:
        p = tuple(float(c) for c in p)
        try:
            e = np.real(scene.e.value(p))
            z = scene.z.value(p)
            scene.s.value(p), scene.r.value(p), scene.eps.value(p)
            scene.maxwell_form(p, 0)
        except DomainError as exc:
            raise SceneError(f"scene {scene.name!r}: {exc}") from None
        if abs(np.linalg.det(e)) < 1e-12:
            raise SceneError(f"scene {scene.name!r}: singular vierbein at point {p}")
        if np.real(z) <= 0:
            raise SceneError(f"scene {scene.name!r}: z <= 0 at point {p}")
