"""Graphon calculus and algebraic regularity for definable bipartite graphs."""

from .kernel import (BipartiteGraph, StepKernel, add, common_refinement, constant, direct_sum,
                     from_graph_uniform, from_graph_weighted, from_matrix, operator_product,
                     sixth_power, subtract, symmetrize, transpose, zero)
from .norms import (BudgetError, CutNormResult, PremiseError, cut_distance, cut_metric,
                    cut_norm, cut_norm_exact, cut_norm_heuristic, homogeneity_check, lp_norm)
from .spectral import svd, weak_regularize
from .finfield import CyclicFrobenius, FiniteField, cubes, make_field, mu_group, squares
from .defgraphs import FAMILIES, generate, predict_limit
from .algreg import accumulation_scan, algebraic_regularize, cluster_profiles, profile_kernel
from .expander import expansion_probe, image_fraction, quadruple_image_ratio

__version__ = "0.1.0"
