"""
Cube relations on mu_{2q+1}
===========================

The group of (2q+1)-th roots of unity is cyclic, with Frobenius acting as
multiplication by q on exponents.  x y = z^3 and x sigma(y) = z^3 become
congruences mod 2q+1.
"""

from graphonreg import algreg
from graphonreg.defgraphs import classify_case, generate, twisted_case_report
from graphonreg.finfield import mu_group, prime_powers

for q in (2, 4, 8):
    print(f"mu_{2 * q + 1} lives in F_{mu_group(q).smallest_field_order()} (4q^2 = {4 * q * q})")

for q in (4, 5, 7, 16):
    g = generate("frob_twisted_cubes", q)
    print(q, classify_case("frob_twisted_cubes", q), "edges", g.edge_count)

report = twisted_case_report(prime_powers(2, 343))
print("cases realized:", report["realized"], "| third case empty:", report["case3_vacuous"])
print(report["explanation"])

grid = prime_powers(5, 60)
res = algreg.accumulation_scan("frob_twisted_cubes", grid)
for c in res.clusters:
    print(len(c.members), "instances around", c.representative.values.tolist())
