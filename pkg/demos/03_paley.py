"""
Paley graphs look like the constant 1/2
=======================================

x ~ y iff x + y is a square.  For odd q the graph is quasirandom and its
distance to the constant graphon 1/2 decays like q^(-1/2); in
characteristic 2 every element is a square and the graph is complete.
"""

import numpy as np

from graphonreg import kernel as K
from graphonreg.defgraphs import generate
from graphonreg.finfield import prime_powers
from graphonreg.norms import cut_norm

qs = [q for q in prime_powers(5, 200) if q % 2]
dist = []
for q in qs:
    g = K.from_graph_uniform(generate("paley_sum_squares", q))
    dist.append(cut_norm(K.subtract(g, K.constant(0.5))).value)

for q, d in list(zip(qs, dist))[::6]:
    print(f"q={q:4d}  d={d:.4f}  d*sqrt(q)={d * np.sqrt(q):.3f}")

slope = np.polyfit(np.log(qs), np.log(dist), 1)[0]
print("log-log slope:", round(slope, 3))

for q in (2, 4, 8, 16):
    print(q, "edges:", generate("paley_sum_squares", q).edge_count, "of", q * q)
