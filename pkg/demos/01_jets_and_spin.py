"""
Jets, forms and the spin morphisms
==================================

Fields are carried as truncated Taylor jets at a point, so derivatives
are exact up to the chosen order.  The spin maps send Minkowski vectors
to Hermitian 2x2 matrices and Lorentz transformations to SL(2, C).
"""

import numpy as np

from conftwistor import spin
from conftwistor.calculus import jets as J
from conftwistor.calculus.forms import Form, hodge_star
from conftwistor.calculus.jets import Jet, derivative

point = (0.1, 0.2, -0.3, 0.05)

# a jet of f = exp(x0 * x3) to order 3
x = Jet.coordinates(point, 3)
f = J.exp(x[0] * x[3])
print("f                 ", complex(f.value).real)
print("d0 d3 f           ", derivative(f, (1, 0, 0, 1)).real)

# d^2 = 0 on a 1-form built from jets
alpha = Form.dx(1, point, 3) * f
print("|d d alpha|       ", alpha.d().d().norm())

# the Hodge star on the flat frame: *(dx0 ^ dx1) = -dx2 ^ dx3
e = Jet.constant(np.eye(4), point, 1)
print("*(dx0^dx1) comps  ", np.real(hodge_star(Form.dx(0, point, 1).wedge(Form.dx(1, point, 1)), e)
                                    .coeffs.value).round(12))

# Minkowski norm as a determinant
v = np.array([2.0, 0.3, -0.5, 1.1])
print("|v|^2, 4 det vbar ", spin.minkowski_norm(v), 4 * np.linalg.det(spin.vec_to_herm(v)).real)

# SL(2, C) covers the Lorentz group
rng = np.random.default_rng(0)
S = spin.random_sl2(rng)
L = spin.lorentz_of_sl2(S)
print("L^T eta L - eta   ", np.abs(L.T @ spin.ETA @ L - spin.ETA).max())
print("preimage up to +-1", min(np.abs(spin.sl2_of_lorentz(L) - S).max(),
                                np.abs(spin.sl2_of_lorentz(L) + S).max()))
