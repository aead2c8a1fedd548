"""
Marginal jacobians and total volumes
====================================

The flat (Hilbert-Schmidt) volume element puts a weight on the diagonal.
Projecting that weight onto the ratio ``nu`` gives the marginal jacobian
``J(nu)``, and every volume in the package is an integral against it.
"""

import math

import numpy as np

from bloore.jacobians import (
    C_REAL,
    JacobianSpec,
    ansatz_integral,
    jac_integral,
    jac_integral_quadrature,
    jac_quadrature,
    jac_real_closed,
    total_volume,
)

# %%
# The real jacobian has a closed form, but it cancels catastrophically near
# nu = 1. The library switches to a series there; the two-dimensional
# quadrature is the independent reference.
for nu in (0.25, 0.9, 0.999, 1.0, 4.0):
    print(f"nu = {nu:6.3f}   closed/series {jac_real_closed(nu):.12e}   quadrature {jac_quadrature(nu):.12e}")

# %%
# J is symmetric under nu -> 1/nu (with the 1/nu^2 from the change of
# variable), so the mass below and above 1 agree.
lo, hi = jac_integral_quadrature(JacobianSpec(1))
print(f"int_0^1 J = {lo:.15e}\nint_1^oo J = {hi:.15e}")
print(f"exact total pi^2/1146880 = {math.pi**2 / 1146880:.15e}")

# %%
# Total volumes follow from the constant c of the full scenario.
print(f"real volume    {total_volume(1):.15e}   pi^4/60480      = {math.pi**4 / 60480:.15e}")
print(f"complex volume {total_volume(2):.15e}   pi^6/851350500  = {math.pi**6 / 851350500:.15e}")
assert np.isclose(C_REAL * jac_integral(JacobianSpec(1)), total_volume(1))

# %%
# Weighting J by powers of the regularized incomplete beta function gives
# the integrals behind the conjectured probabilities.
for beta in (1, 2, 4):
    print(f"beta = {beta}:  2 int_0^1 J I^beta = {ansatz_integral(beta):.12e}")
