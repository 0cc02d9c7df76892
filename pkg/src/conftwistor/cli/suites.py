"""Verification suites: named residual checks evaluated over a scene's sample points."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .. import brst, cartan, dressing, spin, twistor, yang_mills
from ..calculus.forms import Form, ext_d, hodge_star, to_frame
from ..calculus.jets import Jet
from ..oracles import MetricFD
from .scenes import Scene

SUITES = ("calculus", "spin", "cartan", "dressing", "twistor", "brst", "ym")
BRST_POINTS = 3           # the Grassmann expansions are the slow part
N_RANDOM = 100            # algebra samples for point-independent checks
DENSITY_FLOOR = 1e-8      # denominator floor for relative density residuals

# fixed anchor table: every check record points at one of these
ANCHORS = {
    "calculus.d_squared": "exterior derivative: d^2 = 0",
    "calculus.hodge": "Hodge star on 2-forms: ** = -1",
    "spin.covering": "spin morphism: SL(2,C) double cover of the Lorentz group",
    "spin.homomorphism": "spin morphism: so(2,4) to su(2,2) Lie algebra isomorphism",
    "spin.minkowski": "spin morphism: |x|^2 = 4 det xbar",
    "cartan.structure": "spin Cartan connection: su(2,2)-valued connection and curvature",
    "cartan.normality": "normal connection: torsion-free and trace-free curvature",
    "cartan.weyl_trace": "normal connection: Ricci contraction of the Weyl block vanishes",
    "cartan.bianchi": "structure equations: Bianchi identity",
    "cartan.weyl_oracle": "normal connection: Weyl block equals the metric Weyl tensor",
    "cartan.schouten_oracle": "normal connection: P block equals the metric Schouten tensor",
    "cartan.gauge_k0": "gauge law: Weyl and Lorentz subgroup K0",
    "cartan.gauge_k1": "gauge law: conformal boosts K1",
    "cartan.composition": "gauge law: right action composition",
    "dressing.a_zero": "dressing: dressed connection has a-block 0",
    "dressing.k1_invariance": "dressing: composite fields are K1-invariant",
    "dressing.lorentz": "dressing: residual Lorentz action on composite fields",
    "dressing.weyl": "dressing: residual Weyl action through the cocycle C(z)",
    "dressing.cocycle": "dressing: cocycle identity of C(z)",
    "twistor.prolongation": "twistor: dressed normal derivative equals the prolonged twistor equation",
    "twistor.metric": "twistor: D Sigma = 0 and compatibility of the bilinear form",
    "twistor.curvature": "twistor: D^2 psi = Omega psi",
    "twistor.weyl_laws": "twistor: Weyl rescaling laws of connection, Schouten tensor and sections",
    "twistor.bilinear_invariance": "twistor: Weyl and Lorentz invariance of the bilinear form",
    "twistor.conformally_flat": "twistor: conformal flatness iff flat twistor curvature",
    "brst.nilpotency": "BRST: s^2 = 0",
    "brst.russian": "BRST: horizontality condition",
    "brst.dressed_ghost": "BRST: dressed ghost v1 = c(eps) + v_s, free of the boost ghost",
    "brst.dressed_algebra": "BRST: explicit dressed BRST algebra",
    "brst.linearization": "BRST: finite vs infinitesimal gauge transformations",
    "ym.routes": "Yang-Mills: L_YM = 1/2 B_sl2(W, *W) = 1/2 Tr(W ^ *W)",
    "ym.fd_oracle": "Yang-Mills: Weyl density from the metric Weyl tensor",
    "ym.conformal": "Yang-Mills: conformal invariance of the Weyl density",
    "ym.dressing_invariance": "Yang-Mills: L_YM(varpi_N) = L_YM(varpi_N,1)",
    "ym.killing": "Killing forms: B_sl2 = B_so13 under the spin morphism",
    "ym.weyl_identity": "Merkulov obstruction: theta W^* + W theta = 0",
    "ym.f_rank": "Merkulov obstruction: f -> f theta is injective",
    "ym.forced_f": "Merkulov obstruction: the Bianchi relation forces f = 0",
    "ym.lag_merk": "Merkulov Lagrangian: Weyl plus Maxwell decomposition",
}


def _max(*xs) -> float:
    return float(max(xs))


def _rel(a, b) -> float:
    a, b = float(np.real(a)), float(np.real(b))
    return abs(a - b) / max(abs(a), abs(b), DENSITY_FLOOR)


def _conn_diff(c1, c2) -> float:
    return max((getattr(c1, k) - getattr(c2, k)).norm() for k in ("a", "A", "P", "theta"))


class PointContext:
    """Lazily computed objects at one sample point."""

    def __init__(self, scene: Scene, point, order: int):
        self.scene = scene
        self.point = tuple(float(c) for c in point)
        self.order = order

    @cached_property
    def e(self) -> Jet:
        return cartan.frame_jet(self.scene.e, self.point, self.order)

    @cached_property
    def conn(self):
        cartan.check_signature(self.e)
        return cartan.normal_connection_from_jet(self.e)

    @cached_property
    def vdata(self):
        return cartan.vector_normal_data(self.e)

    @cached_property
    def gauge(self):
        g = cartan.SpinGauge(z=self.scene.z, S=self.scene.S, r=self.scene.r)
        return g.jets(self.point, self.order)

    @cached_property
    def k1(self) -> Jet:
        return cartan.SpinGaugeJets(self.gauge.z * 0 + 1, self.gauge.S * 0 + np.eye(2),
                                    self.gauge.r).matrix()

    @cached_property
    def boosted(self):
        """The normal connection moved out of the a = 0 gauge by the scene's boost."""
        return cartan.gauge_transform(self.conn, self.k1)

    @cached_property
    def psi(self) -> Jet:
        rng = np.random.default_rng(np.frombuffer(np.asarray(self.point).tobytes(), dtype=np.uint32))
        c = rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))
        x = Jet.coordinates(self.point, self.order)
        lin = sum(x[mu] * (0.1 * (mu + 1)) for mu in range(4))
        return Jet.constant(c, self.point, self.order) * (lin + 1.0)

    @cached_property
    def fd(self) -> MetricFD:
        return MetricFD(self.scene.e)


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    kind: str                                  # "identity" or "oracle"
    fn: Callable
    per_point: bool = True
    max_points: int | None = None
    applies: Callable = lambda scene: True
    tolerance: float | None = None             # fixed tolerance overriding the scene's


# calculus ----------------------------------------------------------------------------------------

def _d_squared(c: PointContext):
    M = c.conn.matrix()
    return ext_d(ext_d(M)).norm()


def _hodge(c: PointContext):
    Om = cartan.curvature_matrix(c.boosted.matrix())
    e = c.e.truncate(Om.order)
    return (hodge_star(hodge_star(Om, e), e) + Om).norm()


# spin ---------------------------------------------------------------------------------------------

def _covering(scene: Scene):
    rng = np.random.default_rng(scene.seed)
    worst = 0.0
    for _ in range(N_RANDOM):
        S1, S2 = spin.random_sl2(rng), spin.random_sl2(rng)
        L1, L2 = spin.lorentz_of_sl2(S1), spin.lorentz_of_sl2(S2)
        worst = max(worst, np.abs(spin.lorentz_of_sl2(S1 @ S2) - L1 @ L2).max())
        back = spin.sl2_of_lorentz(L1)
        worst = max(worst, min(np.abs(back - S1).max(), np.abs(back + S1).max()))
    return worst


def _homomorphism(scene: Scene):
    rng = np.random.default_rng(scene.seed + 1)
    worst = 0.0
    for _ in range(N_RANDOM):
        X, Y = spin.random_conf_algebra(rng), spin.random_conf_algebra(rng)
        mX, mY = spin.algebra_morphism(X), spin.algebra_morphism(Y)
        worst = max(worst, np.abs(spin.algebra_morphism(X @ Y - Y @ X) - (mX @ mY - mY @ mX)).max())
    return worst


def _minkowski(scene: Scene):
    rng = np.random.default_rng(scene.seed + 2)
    worst = 0.0
    for _ in range(N_RANDOM):
        x = rng.normal(size=4)
        worst = max(worst, abs(spin.minkowski_norm(x) - 4 * np.real(np.linalg.det(spin.vec_to_herm(x)))))
    return worst


# cartan ---------------------------------------------------------------------------------------------

def _structure(c: PointContext):
    M = c.boosted.matrix()
    return _max(cartan.structure_residual(M), cartan.su22_residual(cartan.curvature_matrix(M)))


def _normality(c: PointContext):
    cv = cartan.curvature(c.conn)
    return _max(cv.Theta.norm(), cv.f.norm())


def _weyl_trace(c: PointContext):
    v = c.vdata
    Wf = to_frame(v.W, v.E.truncate(v.W.order))
    return Jet(np.einsum("abadn->bdn", Wf.coeffs), Wf.order, Wf.point).norm()


def _bianchi(c: PointContext):
    return _max(cartan.bianchi_residual(c.conn.matrix()), cartan.bianchi_residual(c.boosted.matrix()))


def _weyl_oracle(c: PointContext):
    v = c.vdata
    Wf = to_frame(v.W, v.E.truncate(v.W.order)).value
    Wlow = np.einsum("ab,bcde->acde", spin.ETA, c.fd.weyl_frame(c.point))
    Wmine = np.einsum("ab,bcde->acde", spin.ETA, np.real(Wf))
    return float(np.abs(Wmine - Wlow).max())


def _schouten_oracle(c: PointContext):
    return float(np.abs(np.real(c.vdata.schouten.value) - c.fd.schouten_frame(c.point)).max())


def _gauge_k0(c: PointContext):
    g = c.gauge
    k0 = cartan.SpinGaugeJets(g.z, g.S, g.r * 0).matrix()
    base = c.boosted
    return _conn_diff(cartan.gauge_transform(base, k0), cartan.gt0_closed(base, g.z, g.S))


def _gauge_k1(c: PointContext):
    base = c.boosted
    return _conn_diff(cartan.gauge_transform(base, c.k1), cartan.gt1_closed(base, c.gauge.r))


def _composition(c: PointContext):
    M = c.conn.matrix()
    g0 = c.gauge.matrix()
    g1 = c.k1
    lhs = cartan.gauge_transform_matrix(cartan.gauge_transform_matrix(M, g0), g1)
    return (lhs - cartan.gauge_transform_matrix(M, g0 @ g1)).norm()


# dressing -------------------------------------------------------------------------------------------

def _a_zero(c: PointContext):
    return dressing.dress(c.boosted).a.norm()


def _k1_invariance(c: PointContext):
    c1 = dressing.dress(c.conn)
    b1 = dressing.dress(c.boosted)
    u, ub = dressing.extract_dressing(c.conn), dressing.extract_dressing(c.boosted)
    Om = cartan.curvature_matrix(c.conn.matrix())
    Omb = cartan.curvature_matrix(c.boosted.matrix())
    curv = (dressing.dress_curvature(Om, u) - dressing.dress_curvature(Omb, ub)).norm()
    psib = c.k1.inv() @ c.psi
    sect = (dressing.dress_section(c.psi, u) - dressing.dress_section(psib, ub)).norm()
    return _max(_conn_diff(c1, b1), curv, sect)


def _lorentz(c: PointContext):
    c1 = dressing.dress(c.boosted)
    S = c.gauge.S
    L = dressing.lorentz_matrix(S)
    conn = _conn_diff(cartan.gauge_transform(c1, L), dressing.lorentz_conn_closed(c1, S))
    Om = cartan.curvature_matrix(c1.matrix())
    curv = cartan.SpinCurvature.from_matrix(Om)
    moved = cartan.SpinCurvature.from_matrix(cartan.conjugate(Om, L))
    closed = dressing.lorentz_curv_closed(curv, S)
    cres = max((getattr(moved, k) - getattr(closed, k)).norm() for k in ("f", "W", "C", "Theta"))
    sres = (L.inv() @ c.psi - dressing.lorentz_section_closed(c.psi, S)).norm()
    return _max(conn, cres, sres)


def _weyl(c: PointContext):
    c1 = dressing.dress(c.boosted)
    z = c.gauge.z
    e = c1.vierbein()
    C = dressing.cocycle(z, e)
    conn = _conn_diff(cartan.gauge_transform(c1, C), dressing.weyl_conn_closed(c1, z))
    Om = cartan.curvature_matrix(c1.matrix())
    curv = cartan.SpinCurvature.from_matrix(Om)
    cres = (cartan.conjugate(Om, C) - dressing.weyl_curv_closed(curv, z, e)).norm()
    sres = (C.inv() @ c.psi - dressing.weyl_section_closed(c.psi, z, e)).norm()
    return _max(conn, cres, sres)


def _cocycle(c: PointContext):
    z = c.gauge.z
    zp = c.scene.eps.jet(c.point, c.order) * 0.5 + 1.0
    res = dressing.cocycle_residuals(z, zp, c.e)
    return _max(res["cocycle"], res["commute"], res["conjugation"])


# twistor ---------------------------------------------------------------------------------------------

def _prolongation(c: PointContext):
    a, b = twistor.twistor_deriv(c.conn, c.psi)
    oa, ob = twistor.prolongation_oracle(c.e, c.psi)
    return _max((a - oa).norm(), (b - ob).norm())


def _metric(c: PointContext):
    psi2 = c.psi.conj() * 0.5 + c.psi * 1j
    res = twistor.metric_compatibility(c.boosted.matrix(), c.psi, psi2)
    return _max(res["sigma"], res["bilinear"])


def _curvature_sections(c: PointContext):
    return twistor.curvature_on_sections(c.boosted.matrix(), c.psi)


def _weyl_laws(c: PointContext):
    res = twistor.weyl_transformation_laws(c.scene.e, c.scene.z, c.point, c.order + 1)
    return _max(*res.values())


def _bilinear_invariance(c: PointContext):
    e = c.e
    psi2 = c.psi.conj() * 0.5 + c.psi * 1j
    z, S = c.gauge.z, c.gauge.S
    w1 = dressing.lorentz_section_closed(dressing.weyl_section_closed(c.psi, z, e), S)
    w2 = dressing.lorentz_section_closed(dressing.weyl_section_closed(psi2, z, e), S)
    k = w1.order
    before = twistor.bilinear(c.psi.truncate(k), psi2.truncate(k))
    after = twistor.bilinear(w1, w2)
    return (after - before).norm()


def _conformally_flat(c: PointContext):
    C, W = twistor.twistor_curvature(c.conn)
    return _max(C.norm(), W.norm())


# brst --------------------------------------------------------------------------------------------------

def _ghost(c: PointContext):
    from ..fields import Field
    sc = c.scene
    return brst.GhostField(eps=sc.eps, s=sc.s,
                           rho=Field(lambda x: [0.1 + 0.2 * x[1], 0.05 * x[0], -0.1, 0.2 * x[3]]))


def _nilpotency(c: PointContext):
    v = _ghost(c).element(c.point, c.order)
    M = c.boosted.matrix()
    W = brst.GrassmannElement.field(M)
    Om = brst.GrassmannElement.field(cartan.curvature_matrix(M))
    psi = brst.GrassmannElement.field(Form.from_jet(c.psi))
    return _max(*(brst.s_squared(k, chi, v).norm()
                  for k, chi in (("connection", W), ("curvature", Om), ("section", psi), ("ghost", v))))


def _russian(c: PointContext):
    v = _ghost(c).element(c.point, c.order)
    W = brst.GrassmannElement.field(c.boosted.matrix())
    return _max(brst.russian_residual(W, v),
                (brst.s_of_curvature_expression(W, v)
                 - brst.s_curvature(W.d() + W @ W, v)).norm())


def _dressed_ghost(c: PointContext):
    g = _ghost(c)
    b = c.boosted
    u = dressing.extract_dressing(b)
    closed = brst.dressed_ghost_closed(g, dressing.dress(b).vierbein(), c.point, c.order)
    rules = brst.dressing_ghost_rules(g, u.matrix(), b.vierbein(), c.point, c.order)
    from_s = brst.dressing_ghost_from_s(b, g, c.point, c.order)
    return _max((rules - closed).norm(), (from_s - closed).norm(), from_s.norm_on(brst.RHO_GENS))


def _dressed_algebra(c: PointContext):
    c1 = dressing.dress(c.boosted)
    res = brst.display_residuals(c1, _ghost(c), c.psi, c.point, c.order - 1)
    return _max(*res.values())


def _linearization(c: PointContext):
    g = _ghost(c)
    undressed = brst.finite_vs_infinitesimal(c.boosted, g, c.point, c.order)
    dressed = brst.dressed_finite_vs_infinitesimal(c.conn, c.scene.eps, c.scene.s, c.point, c.order)
    return _max(undressed, dressed)


# ym ----------------------------------------------------------------------------------------------------

def _routes(c: PointContext):
    r = yang_mills.lagrangian_routes(c.e)
    v = {k: float(np.real(x.value)) for k, x in r.items()}
    return _max(_rel(v["su22"], v["so13"]), _rel(v["sl2"], v["so13"]))


def _ym_fd(c: PointContext):
    jet = float(np.real(yang_mills.weyl_lagrangian(c.e).value))
    return _rel(jet, yang_mills.weyl_lagrangian_fd(c.scene.e, c.point, fd=c.fd))


def _conformal(c: PointContext):
    from ..fields import conformal_frame
    ze = conformal_frame(c.scene.z, c.scene.e).jet(c.point, c.order)
    a = yang_mills.weyl_lagrangian(c.e).value
    b = yang_mills.weyl_lagrangian(ze).value
    return _rel(a, b)


def _dressing_invariance(c: PointContext):
    a = yang_mills.ym_lagrangian(c.conn).value
    b = yang_mills.ym_lagrangian(c.boosted).value
    return _rel(a, b)


def _killing(scene: Scene):
    rng = np.random.default_rng(scene.seed + 3)
    worst = 0.0
    for _ in range(N_RANDOM):
        A, B = spin.random_sl2_algebra(rng), spin.random_sl2_algebra(rng)
        a, b = np.real(spin.so13_of_sl2(A)), np.real(spin.so13_of_sl2(B))
        worst = max(worst, abs(yang_mills.killing("sl2", A, B) - yang_mills.killing("so13", a, b)))
    return worst


def _weyl_identity(c: PointContext):
    return yang_mills.merkulov_obstruction(c.e)["identity_residual"]


def _f_rank(c: PointContext):
    return float(abs(yang_mills.merkulov_obstruction(c.e)["rank"] - 6))


def _forced_f(c: PointContext):
    return yang_mills.merkulov_obstruction(c.e)["forced_f_norm"]


def _lag_merk(c: PointContext):
    f = c.scene.maxwell_form(c.point, c.order)
    worst = 0.0
    for scale in (yang_mills.SPIN_SCALE, yang_mills.HALF_SCALE):
        m = yang_mills.merkulov_lagrangian(c.e, f, scale)
        lhs = float(np.real(m["lhs"].value))
        rhs = float(np.real(m["weyl"].value + m["maxwell"].value))
        worst = max(worst, _rel(lhs, rhs), m["torsion"], m["input_f"])
    return worst


CHECKS = [
    Check("calculus.d_squared", "calculus", "identity", _d_squared),
    Check("calculus.hodge", "calculus", "identity", _hodge),
    Check("spin.covering", "spin", "identity", _covering, per_point=False),
    Check("spin.homomorphism", "spin", "identity", _homomorphism, per_point=False),
    Check("spin.minkowski", "spin", "identity", _minkowski, per_point=False),
    Check("cartan.structure", "cartan", "identity", _structure),
    Check("cartan.normality", "cartan", "identity", _normality),
    Check("cartan.weyl_trace", "cartan", "identity", _weyl_trace),
    Check("cartan.bianchi", "cartan", "identity", _bianchi),
    Check("cartan.weyl_oracle", "cartan", "oracle", _weyl_oracle),
    Check("cartan.schouten_oracle", "cartan", "oracle", _schouten_oracle),
    Check("cartan.gauge_k0", "cartan", "identity", _gauge_k0),
    Check("cartan.gauge_k1", "cartan", "identity", _gauge_k1),
    Check("cartan.composition", "cartan", "identity", _composition),
    Check("dressing.a_zero", "dressing", "identity", _a_zero),
    Check("dressing.k1_invariance", "dressing", "identity", _k1_invariance),
    Check("dressing.lorentz", "dressing", "identity", _lorentz),
    Check("dressing.weyl", "dressing", "identity", _weyl),
    Check("dressing.cocycle", "dressing", "identity", _cocycle),
    Check("twistor.prolongation", "twistor", "identity", _prolongation),
    Check("twistor.metric", "twistor", "identity", _metric),
    Check("twistor.curvature", "twistor", "identity", _curvature_sections),
    Check("twistor.weyl_laws", "twistor", "identity", _weyl_laws),
    Check("twistor.bilinear_invariance", "twistor", "identity", _bilinear_invariance),
    Check("twistor.conformally_flat", "twistor", "identity", _conformally_flat,
          applies=lambda scene: scene.conformally_flat),
    Check("brst.nilpotency", "brst", "identity", _nilpotency, max_points=BRST_POINTS),
    Check("brst.russian", "brst", "identity", _russian, max_points=BRST_POINTS),
    Check("brst.dressed_ghost", "brst", "identity", _dressed_ghost, max_points=BRST_POINTS),
    Check("brst.dressed_algebra", "brst", "identity", _dressed_algebra, max_points=BRST_POINTS),
    Check("brst.linearization", "brst", "oracle", _linearization, max_points=BRST_POINTS),
    Check("ym.routes", "ym", "identity", _routes),
    Check("ym.fd_oracle", "ym", "oracle", _ym_fd),
    Check("ym.conformal", "ym", "identity", _conformal),
    Check("ym.dressing_invariance", "ym", "identity", _dressing_invariance),
    Check("ym.killing", "ym", "identity", _killing, per_point=False),
    Check("ym.weyl_identity", "ym", "identity", _weyl_identity),
    Check("ym.f_rank", "ym", "identity", _f_rank, tolerance=0.5),
    Check("ym.forced_f", "ym", "identity", _forced_f),
    Check("ym.lag_merk", "ym", "identity", _lag_merk),
]

assert all(c.id in ANCHORS for c in CHECKS)


@dataclass
class CheckResult:
    id: str
    suite: str
    paper_anchor: str
    max_residual: float
    tolerance: float
    points_evaluated: int

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    def as_dict(self) -> dict:
        return {"id": self.id, "suite": self.suite, "paper_anchor": self.paper_anchor,
                "max_residual": self.max_residual, "tolerance": self.tolerance,
                "points_evaluated": self.points_evaluated, "passed": self.passed}


def select(suite: str = "all") -> list:
    if suite == "all":
        return list(CHECKS)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    return [c for c in CHECKS if c.suite == suite]


def run_suite(scene: Scene, suite: str = "all", points=None, order: int | None = None,
              tol: float | None = None) -> list:
    """Evaluate the selected checks; tol overrides both scene tolerances."""
    order = order or scene.order
    points = scene.sample_points() if points is None else np.asarray(points)
    contexts = [PointContext(scene, p, order) for p in points]
    results = []
    for check in select(suite):
        if not check.applies(scene):
            continue
        if check.tolerance is not None:
            t = check.tolerance
        elif tol is not None:
            t = tol
        else:
            t = scene.tol_identity if check.kind == "identity" else scene.tol_oracle
        if check.per_point:
            ctxs = contexts[: check.max_points] if check.max_points else contexts
            residuals = [float(check.fn(c)) for c in ctxs]
            n = len(ctxs)
        else:
            residuals, n = [float(check.fn(scene))], N_RANDOM
        worst = max(residuals) if residuals else 0.0
        results.append(CheckResult(check.id, check.suite, ANCHORS[check.id], worst, t, n))
    return results
