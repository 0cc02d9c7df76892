"""
Weyl gravity as Yang-Mills
==========================

The Yang-Mills density of the normal connection is computed three ways
and compared with the Weyl density from the metric.  A Maxwell-type
field strength added to the Schouten block does not change the density.
"""

import numpy as np

from conftwistor import yang_mills as ym
from conftwistor.calculus.forms import Form
from conftwistor.calculus.jets import Jet
from conftwistor.cli import load_scene

point, order = (0.1, 0.25, -0.2, 0.3), 4
scene = load_scene("bumpy")
e = scene.e.jet(point, order)

for name, value in ym.lagrangian_routes(e).items():
    print(f"{name:<5} {float(np.real(value.value)):.12e}")
print("metric", f"{ym.weyl_lagrangian_fd(scene.e, point):.12e}")

# Merkulov: add f = 0.1 dx2 ^ dx3 to the Schouten block
full = np.zeros((4, 4))
full[2, 3], full[3, 2] = 0.1, -0.1
f = Form.from_antisymmetric(2, Jet.constant(full, point, order))
m = ym.merkulov_lagrangian(e, f)
for k in ("lhs", "weyl", "maxwell", "weyl_e"):
    print(f"{k:<8}{float(np.real(m[k].value)):+.12e}")

# the Bianchi relation forces f = 0 for torsion-free connections
obs = ym.merkulov_obstruction(e, f)
print("rank", obs["rank"], "consistent", obs["consistent"], "residual", obs["relation_residual"])
