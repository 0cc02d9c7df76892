"""
Dressing away conformal boosts
==============================

A connection moved out of the normal gauge by a boost field is dressed
back.  The composite connection has no Weyl 1-form and the dressed BRST
ghost no longer contains the boost ghost.
"""

from conftwistor.brst import (RHO_GENS, GhostField, GrassmannElement, dressing_ghost_from_s,
                              s_squared)
from conftwistor.cartan import SpinGauge, gauge_transform, normal_connection
from conftwistor.cli import load_scene
from conftwistor.dressing import dress, extract_dressing
from conftwistor.fields import Field

point, order = (0.15, -0.1, 0.2, 0.3), 4
normal = normal_connection(load_scene("bumpy").e, point, order)

r = Field(lambda x: [x[1] * 0.2, 0.1 + x[0] * x[3], -0.1 * x[2], 0.03])
boosted = gauge_transform(normal, SpinGauge(r=r).matrix(point, order))
print("|a| after boost  ", boosted.a.norm())

u = extract_dressing(boosted)
dressed = dress(boosted)
print("|q|              ", u.q.norm())
print("|a| after dress  ", dressed.a.norm())

# a ghost with Weyl, Lorentz and boost parts
ghost = GhostField(eps=Field(lambda x: 0.3 + 0.2 * x[0] * x[1]),
                   s=Field.constant([0.1, 0.05, -0.1, 0.02, 0.05, 0.1]),
                   rho=Field(lambda x: [0.1, 0.05 * x[0], -0.1, 0.2 * x[3]]))
v1 = dressing_ghost_from_s(boosted, ghost, point, order)
print("boost ghost left ", v1.norm_on(RHO_GENS))
print("|s^2 varpi_1|    ", s_squared("connection", GrassmannElement.field(dressed.matrix()), v1).norm())
