"""Jet arithmetic and exterior calculus on a 4D chart."""

from .jets import (DIM, Jet, JetError, block, derivative, eye, exp, expm, jet_partial,
                   log, n_coeffs, power, sin, cos, sqrt, zeros)
from .forms import (ETA, Form, FormError, block_form, differential, ext_d, from_frame,
                    graded_commutator, hodge_star, levi_civita, linmap, matrix_product,
                    to_frame, top_coefficient, wedge)

__all__ = [
    "DIM", "ETA", "Form", "FormError", "Jet", "JetError", "block", "block_form", "cos",
    "derivative", "differential", "exp", "expm", "ext_d", "eye", "from_frame",
    "graded_commutator", "hodge_star", "jet_partial", "levi_civita", "linmap", "log",
    "matrix_product", "n_coeffs", "power", "sin", "sqrt", "to_frame", "top_coefficient",
    "wedge", "zeros",
]
