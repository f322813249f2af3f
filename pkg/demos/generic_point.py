"""
A generic parameter point
=========================

Build the four generators as banded matrices, check the Hecke relations and
the product relation, and look at the circle polynomials they carry.
"""

import numpy as np

from daha_opuc import opuc, rep
from daha_opuc.params import derive_parameters

P = derive_parameters((0.6, 0.5, -0.5, -0.4), 0.7)
N = 64
print("a_0 =", rep.coeff_a(0, P), "(= -53/235)")

c = rep.rep_coefficients(P, N)
print("first coefficients a_n:", np.round(c.a[:6], 6))
print("first coefficients alpha_n:", np.round(c.alpha[:6], 6))

# R3 and R4 carry the gauge; the entries above the diagonal grow like q^-n/2
R3 = rep.build_reflection("R3", N, P).entries
print("largest |R3| entry:", np.abs(R3).max())

# absolute residuals pick up eps times that size, the scaled ones do not
for w in ("R1", "R2", "R3", "R4"):
    print(w, "max|R^2 - I| =", rep.involution_residual(w, N, P, c))
print("scaled:", rep.scaled_relation_residuals(N, P, c))

pr = rep.verify_product_relation(N, P)
print(f"T1 T2 T3 T4 - Q I on the {pr.full_window}x{pr.full_window} interior: {pr.full_residual:.2e}")

# the pencil (L - z M) v = 0 holds at any unimodular z with v the Laurent vector
src = opuc.VerblunskySource.from_params(P, "a")
for z in np.exp(1j * np.array([0.3, 1.7, 2.9])):
    print(f"pencil residual at z = {z:.3f}: {opuc.pencil_residual(z, N, src):.1e}")

# zeros of Phi_n stay inside the disk
phi = opuc.szego_polynomial(12, src)
print("max |zero of Phi_12|:", np.abs(np.roots(phi.coeffs[::-1])).max())
