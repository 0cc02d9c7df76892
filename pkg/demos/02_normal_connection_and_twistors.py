"""
The normal Cartan connection and the twistor derivative
=======================================================

A vierbein field determines the normal spin Cartan connection.  Its
curvature carries the Weyl and Cotton tensors, and the twistor
derivative acting on sections is checked against an independent
prolongation of the twistor equation.
"""

import numpy as np

from conftwistor import twistor
from conftwistor.calculus.jets import Jet
from conftwistor.cartan import curvature, normal_connection
from conftwistor.cli import load_scene

point = (0.1, -0.2, 0.3, 0.15)

# the "bumpy" scene is not conformally flat
e = load_scene("bumpy").e
conn = normal_connection(e, point, 4)
cv = curvature(conn)
print("torsion     ", cv.Theta.norm())
print("Weyl block  ", cv.W.norm())

# a conformally flat frame has flat twistor curvature
flat_ish = load_scene("conformally-flat").e
C, W = twistor.twistor_curvature(normal_connection(flat_ish, point, 4))
print("conf. flat  ", C.norm(), W.norm())

# twistor derivative of a section vs the prolonged twistor equation
rng = np.random.default_rng(1)
c = rng.normal(size=(4, 1)) + 1j * rng.normal(size=(4, 1))
x = Jet.coordinates(point, 4)
psi = Jet.constant(c, point, 4) * (x[0] * 0.3 + 1.0)
top, bottom = twistor.twistor_deriv(conn, psi)
otop, obottom = twistor.prolongation_oracle(conn.vierbein(), psi)
print("prolongation", max((top - otop).norm(), (bottom - obottom).norm()))

# helicity of a constant twistor
z = np.array([1.0, 0.5j, 0.2, -1.0])
print("helicity    ", twistor.helicity(z))
