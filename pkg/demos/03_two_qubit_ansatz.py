"""
The full two-qubit separability function
========================================

With all six off-diagonal pairs present, the separability function is not
known in closed form. A striking guess is that, normalised at nu = 1, it
equals ``I_nu(1/2, 2)**beta``, the Dyson-index power of a regularized
incomplete beta function. Here it is tested against Monte Carlo, and the
probability it implies is compared with direct sampling of random states.
"""

import numpy as np

from bloore.catalog import conjectures, evaluate
from bloore.estimators import estimate_prob_direct, estimate_sepfunc
from bloore.jacobians import ansatz_integral, total_volume
from bloore.specialfns import dyson_ansatz
from bloore.statespace import NumberField, ScenarioSpec, SystemSplit

# %%
# States with a given correlation structure are drawn from the Ginibre
# ensemble, which is uniform on the shape variables of a full scenario.
grid = np.array([0.05, 0.1, 0.2, 0.4, 0.7, 1.0])
for field, beta in ((NumberField.COMPLEX, 2), (NumberField.REAL, 1)):
    spec = ScenarioSpec.full(SystemSplit.TWO_QUBIT, field)
    t = estimate_sepfunc(spec, grid, 100_000, seed=beta, sampler="correlation")
    ratio = t.normalized / t.normalized[-1]
    print(f"{field.label}: max |S/S(1) - I^beta| = {np.max(np.abs(ratio - dyson_ansatz(grid, beta))):.4f}")

# %%
# If the guess held exactly, the probability would follow from one integral.
for con, beta in zip(conjectures()[:2], (1, 2)):
    implied = evaluate(con.scale) * ansatz_integral(beta) / total_volume(beta)
    print(f"{con.name}: implied P = {implied:.6f} = {con.p}")

# %%
# Direct sampling of random density matrices settles it. The complex case
# agrees with 8/33; the real case sits well below 8/17.
for field, name in ((NumberField.COMPLEX, "complex two-qubit"), (NumberField.REAL, "real two-qubit")):
    target = next(c for c in conjectures() if c.name == name).p_value
    est = estimate_prob_direct(4, field, SystemSplit.TWO_QUBIT, 400_000, seed=7, target=target)
    print(f"{name}: P = {est.p_hat:.5f} +- {est.std_err:.5f}, z against conjecture = {est.z_score:+.1f}")
