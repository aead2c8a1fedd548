"""
A tour of the scenario catalogue
================================

Every catalogued scenario records its constant ``c``, the grid variable,
the piecewise separability function and the volumes. Where a reference
value could not be reproduced, the record is flagged and carries the value
that follows from its own function.
"""

from collections import Counter

from bloore import catalog
from bloore.estimators import assemble_probability

recs = catalog.records()
print(len(recs), "scenarios;", Counter(r.spec.split.label for r in recs))

# %%
# Exact assembly: integrate S against the scenario's jacobian.
rec = catalog.lookup("2x2:mixed:[(1,4)c,(2,3)r]")
res = assemble_probability(rec.S, rec.c_value, rec.jacobian())
print(f"{rec.id}: P = {res.p:.12f}, catalogued {rec.p}")

# %%
# Flagged records, with the value their own separability function implies.
for r in recs:
    if r.p_derived:
        print(f"{r.id:32s} reference {str(r.p):10s} derived {r.p_derived:8s} {sorted(r.flags)}")

# %%
# Duality: swapping the roles of numerator and denominator entries maps
# S_A(nu) to S_B(1/nu).
a = catalog.lookup("2x2:complex:[(2,3)]")
b = catalog.lookup(a.dual)
print(a.id, "<->", b.id, ":", a.S(0.5), "=", b.S(2.0))

# %%
# The whole registry serialises to JSON.
text = catalog.export_json()
print(len(text), "characters of JSON")
