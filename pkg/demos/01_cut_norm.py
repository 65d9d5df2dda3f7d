"""
Cut norm and cut distance of stepfunctions
==========================================

A stepfunction is stored as two measure vectors and a value matrix.
"""

import numpy as np

from graphonreg import kernel as K
from graphonreg.norms import cut_distance, cut_norm_exact, cut_norm_heuristic, lp_norm

# a signed 2x2 checkerboard: the best rectangle is one diagonal block
d = K.from_matrix([[0.5, -0.5], [-0.5, 0.5]])
r = cut_norm_exact(d)
print("cut norm", r.value, "rows", r.witness_rows, "cols", r.witness_cols)
print("L1, L2, Linf:", lp_norm(d, 1), lp_norm(d, 2), lp_norm(d, np.inf))

# larger kernels fall back on alternating maximisation, a lower bound
rng = np.random.default_rng(0)
w = K.StepKernel(np.full(40, 1 / 40), np.full(40, 1 / 40), rng.uniform(-1, 1, (40, 40)))
for restarts in (1, 5, 20):
    print(f"heuristic, {restarts:2d} restarts:", round(cut_norm_heuristic(w, restarts).value, 4))

# cut distance ignores relabelling of steps
a = K.from_matrix([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
b = K.from_matrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
print("delta(a, b) =", cut_distance(a, b))
print("delta(a, 1/3) =", round(cut_distance(a, K.constant(1 / 3), mode="heuristic"), 4))
