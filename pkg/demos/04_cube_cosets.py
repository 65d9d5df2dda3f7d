"""
Recovering cube cosets from walk counts
=======================================

For xy = z^3 with q = 1 mod 3 the nonzero elements split into three cube
cosets and the graph is a 3x3 permutation pattern of cosets plus the vertex 0.
Rows of the sixth-power walk-count kernel are constant on cells, so
clustering them recovers the cosets without knowing the field.
"""

import warnings

import numpy as np

from graphonreg import algreg
from graphonreg.defgraphs import generate, predict_limit
from graphonreg.norms import cut_distance

g = generate("prod_cubes", 13)
k = algreg.profile_kernel(g)
print("distinct profile values:", np.unique(np.round(k.values, 6)).size)

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    dec = algreg.algebraic_regularize(g)
print("column cells:", dec.col_cells)
print("large:", dec.col_large)
print("densities:\n", dec.densities)

pred = predict_limit("prod_cubes", 13).representative
print("distance to predicted limit:", cut_distance(dec.large_cell_kernel(), pred))

# over many q the large-cell stepfunctions fall into two classes
res = algreg.accumulation_scan("prod_cubes", [5, 7, 11, 13, 17, 19, 23, 25, 29, 31, 37])
for c in res.clusters:
    print("cluster at q =", c.members, "\n", np.round(c.representative.values, 3))
