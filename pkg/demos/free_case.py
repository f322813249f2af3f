"""
The free point
==============

At t1 = t2 = t3 = t4 = i every Verblunsky coefficient vanishes and the whole
construction collapses onto Chebyshev polynomials. A good first sanity check.
"""

import numpy as np

from daha_opuc import aw3, interval, opuc, rep
from daha_opuc.params import free_parameters

q = 0.64
P = free_parameters(q)
print("beta =", P.beta, " t =", P.t)

# Verblunsky coefficients of both families: zero up to rounding
a = rep.sequence(rep.coeff_a, P, 16)
al = rep.sequence(rep.coeff_alpha, P, 16)
print("max |a_n|, |alpha_n| for n < 16:", np.abs(a).max(), np.abs(al).max())

# so the monic OPUC are monomials
src = opuc.VerblunskySource.from_params(P, "a")
print("Phi_5 coefficients:", np.round(opuc.szego_polynomial(5, src).coeffs, 15))

# interval side: v_1 = 1/2 then 1/4 forever (first kind), 1/4 throughout (second kind)
print("v(1):", interval.v1(src, 6))
print("v(2):", interval.v2(src, 6))

x = np.linspace(-0.9, 0.9, 5)
S1 = interval.family_recurrence("s1", src, 8)(6, x)
print("S(1)_6 vs monic T_6:", np.abs(S1 - interval.chebyshev_monic("T", 6, x)).max())

# the AW(3) constants: only the two linear ones survive, both -(q - 1/q)^2
xy = aw3.build_xy(64, P)
fit = aw3.fit_structure_constants("even", xy)
print("even-sector constants:", np.round(fit.c, 10), " expected", -(q - 1 / q) ** 2)

cas = aw3.casimir(xy)
print(f"Casimir scalar {cas.scalar:.12f}  closed form {cas.expected:.12f}")
