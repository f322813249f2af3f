"""
Finite truncation
=================

With beta_1 beta_4 = q^-(M+1) the coefficient a_{2M+1} reaches 1 and the
CMV matrix closes up into a (2M+2)-dimensional unitary. Its eigenvalues give a
discrete measure on the circle for which Phi_0..Phi_{2M+1} are orthogonal.
"""

import numpy as np

from daha_opuc import truncation

q, M = 0.8, 3
P = truncation.solve_truncation("b1b4", M, q=q)
K = 2 * M + 1
print("beta =", np.round(P.beta, 6), " t real:", [round(t.real, 6) for t in P.t])

L, Mm = truncation.build_finite_lm(K, P)
src = truncation.finite_source(P, K)
print("a_n:", np.round(src.values(K + 1), 6))

spec = truncation.finite_spectrum(L, Mm, src)
for s, theta, w in spec.rows():
    print(f"  s={s}  theta={theta:.6f}  weight={w:.3e}")
print("unitarity", spec.unitarity, " conjugate pairing", spec.conjugate_pairing)

orth = truncation.finite_orthogonality(spec, src, K)
print(f"off-diagonal / min norm: {orth.off_diagonal:.1e} refined,"
      f" {orth.double_off_diagonal:.1e} in plain double precision")
print("norms h_n:", np.round(orth.norms, 8))
