"""
Askey-Wilson polynomials two ways
=================================

The even/odd parts of the symmetric interval families are Askey-Wilson
polynomials. Compare the recurrence with the 4phi3 series, then compare the
spectrum of Y with the Askey-Wilson grid.
"""

import numpy as np

from daha_opuc import askey_wilson as aw
from daha_opuc import aw3
from daha_opuc.params import derive_parameters

P = derive_parameters((0.6, 0.5, -0.5, -0.4), 0.7)

for which in aw.IDENTIFICATIONS:
    rpt = aw.verify_circle_identity(which, 10, 20, P)
    print(f"{which}: worst relative gap over n <= 10 = {rpt.residual:.1e}")

# one value by hand
awp = aw.AWParameters.for_identification("P1", P)
x = 0.3
print("V_3 at", awp.sigma * x + awp.tau, "=", aw.aw_monic(3, awp.sigma * x + awp.tau, awp))

xy = aw3.build_xy(64, P)
y = aw.aw_spectrum_array(8, P)
print("y_n   :", np.round(y, 6))
print("S Y S :", np.round(np.real(np.diag(xy.Y.entries))[:8], 6))
