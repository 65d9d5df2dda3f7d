"""Catalog of definable bipartite graph families and their limit stepfunctions.

Each family is evaluated at a prime power ``q``.  Field families live on
``F_q x F_q``; the two Frobenius families live on ``mu_{2q+1}`` in exponent
form (vertex ``a`` is ``g^a``), where ``x y = z^3`` and ``x sigma(y) = z^3``
become the congruences ``a + b = 3c`` and ``a + q b = 3c`` mod ``2q+1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .finfield import (CyclicFrobenius, FiniteField, cubes, field_of_order, mu_group,
                       prime_power, squares)
from .kernel import BipartiteGraph, StepKernel, constant, from_matrix
from .norms import BudgetError

FAMILIES = {
    "paley_sum_squares": "exists z: x + y = z^2",
    "prod_squares": "exists z: x y = z^2",
    "sum_cubes": "exists z: x + y = z^3",
    "prod_cubes": "exists z: x y = z^3",
    "frob_cubes": "exists z in U: x y = z^3, U = {x : x sigma(x)^2 = 1}",
    "frob_twisted_cubes": "exists z in U: x sigma(y) = z^3, U = {x : x sigma(x)^2 = 1}",
}
FROBENIUS_FAMILIES = ("frob_cubes", "frob_twisted_cubes")

MAX_FIELD_SIZE = 2000
MAX_GROUP_ORDER = 4001

CYCLIC_3 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)
TWISTED_CASE_2 = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
TWISTED_CASE_3 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)

CASE_ODD = "odd characteristic"
CASE_CHAR2 = "characteristic 2"
CASE_3_DIVIDES = "3|q-1"
CASE_3_NOT = "3∤q-1"
CASE_FROB_3_DIVIDES = "3|2q+1"
CASE_FROB_3_NOT = "3∤2q+1"
TWISTED_CASES = {
    1: "case 1: 3∤2q+1",
    2: "case 2: 3|2q+1 and 3|q-1",
    3: "case 3: 3|2q+1 and 3∤q-1",
}
UNREACHABLE = "unreachable"

BLOCK_NOTE = ("representative is defined up to independent block permutations of rows "
              "and columns; compare with cut_distance, not matrix identity")


def _check_family(fam: str) -> None:
    if fam not in FAMILIES:
        raise ValueError(f"unknown family {fam!r}; expected one of {sorted(FAMILIES)}")


def _check_q(fam: str, q: int) -> None:
    prime_power(q)
    if fam in FROBENIUS_FAMILIES:
        if 2 * q + 1 > MAX_GROUP_ORDER:
            raise BudgetError(f"group order 2q+1={2 * q + 1} exceeds {MAX_GROUP_ORDER}")
    elif q > MAX_FIELD_SIZE:
        raise BudgetError(f"field size {q} exceeds {MAX_FIELD_SIZE}")


def generate(fam: str, q: int) -> BipartiteGraph:
    """Exact edge set of the family at ``q`` by direct evaluation of its relation."""
    _check_family(fam)
    _check_q(fam, q)
    if fam in FROBENIUS_FAMILIES:
        g = mu_group(q)
        e = g.elements()
        if fam == "frob_cubes":
            target = g.mul(e[:, None], e[None, :])
        else:
            target = g.mul(e[:, None], g.sigma(e)[None, :])
        adj = g.is_cube(target)
    else:
        f = field_of_order(q)
        table = f.add_table() if fam in ("paley_sum_squares", "sum_cubes") else f.mul_table()
        image = squares(f) if fam in ("paley_sum_squares", "prod_squares") else cubes(f)
        mask = np.zeros(q, dtype=bool)
        mask[list(image)] = True
        adj = mask[table]
    return BipartiteGraph(adj.astype(float), label=f"{fam}@{q}")


def twisted_case(q: int) -> int | None:
    """Which listed subclass ``K_q`` falls into, decided by computing ``zeta^q``.

    Returns 1, 2, 3 or ``None`` when no listed condition matches.
    """
    g = mu_group(q)
    zeta = g.primitive_cube_root()
    if zeta is None:
        return 1
    frob = int(g.sigma(zeta))
    if frob == zeta:
        return 2
    if frob == int(g.power(zeta, 2)):
        return 3
    return None


def classify_case(fam: str, q: int) -> str:
    _check_family(fam)
    p, _ = prime_power(q)
    if fam in ("paley_sum_squares", "prod_squares"):
        return CASE_CHAR2 if p == 2 else CASE_ODD
    if fam in ("sum_cubes", "prod_cubes"):
        return CASE_3_DIVIDES if (q - 1) % 3 == 0 else CASE_3_NOT
    if fam == "frob_cubes":
        return CASE_FROB_3_DIVIDES if (2 * q + 1) % 3 == 0 else CASE_FROB_3_NOT
    case = twisted_case(q)
    return UNREACHABLE if case is None else TWISTED_CASES[case]


@dataclass(frozen=True, eq=False)
class LimitPrediction:
    family: str
    q: int
    case_label: str
    representative: StepKernel
    large_row_cells: int
    large_col_cells: int
    small_row_cells: int
    small_col_cells: int
    notes: str = BLOCK_NOTE

    @property
    def structured(self) -> bool:
        """True when the limit is not a constant graphon."""
        return self.representative.shape != (1, 1)


def predict_limit(fam: str, q: int) -> LimitPrediction:
    """Limit stepfunction of the family on the arithmetic class of ``q``.

    Cells of measure ``O(1/q)`` (the vertex 0 in the product families) are
    omitted from the representative.
    """
    case = classify_case(fam, q)
    rep, large, small = constant(1.0), 1, 0
    if fam == "paley_sum_squares" and case == CASE_ODD:
        rep = constant(0.5)
    elif fam == "prod_squares" and case == CASE_ODD:
        rep, large, small = from_matrix(np.eye(2)), 2, 1
    elif fam == "sum_cubes" and case == CASE_3_DIVIDES:
        rep = constant(1 / 3)
    elif fam == "prod_cubes" and case == CASE_3_DIVIDES:
        rep, large, small = from_matrix(CYCLIC_3), 3, 1
    elif fam == "frob_cubes" and case == CASE_FROB_3_DIVIDES:
        rep, large = from_matrix(CYCLIC_3), 3
    elif fam == "frob_twisted_cubes" and case == TWISTED_CASES[2]:
        rep, large = from_matrix(TWISTED_CASE_2), 3
    elif fam == "frob_twisted_cubes" and case == TWISTED_CASES[3]:
        rep, large = from_matrix(TWISTED_CASE_3), 3
    return LimitPrediction(fam, q, case, rep, large, large, small, small)


def vertex_classes(fam: str, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Block index of every vertex in ``predict_limit(fam, q).representative``.

    Vertices belonging to omitted small cells get label -1.  Cube cosets are
    labelled by the discrete logarithm mod 3; this also covers ``q = 1 mod 9``,
    where the least primitive cube root is itself a cube and the cells
    ``zeta^i U^3`` would coincide.
    """
    pred = predict_limit(fam, q)
    if fam in FROBENIUS_FAMILIES:
        n = 2 * q + 1
        if not pred.structured:
            z = np.zeros(n, dtype=np.int64)
            return z, z.copy()
        a = np.arange(n) % 3
        if fam == "frob_cubes":
            return a, a.copy()
        # case 2 has q = 1 mod 3, so the edge condition is a + b = 0 mod 3
        return a, (1 - a) % 3
    if not pred.structured:
        z = np.zeros(q, dtype=np.int64)
        return z, z.copy()
    f = field_of_order(q)
    logs = f._log.copy()
    if fam == "prod_squares":
        lab = logs % 2
    else:
        lab = logs % 3
    lab[0] = -1
    return lab, lab.copy()


def twisted_case_report(q_list) -> dict:
    """Which of the three listed twisted-family cases occur for the given ``q``.

    Case 3 is never realized: ``3 | 2q+1`` forces ``q = 1 mod 3``.
    """
    counts = {1: [], 2: [], 3: [], None: []}
    for q in q_list:
        counts[twisted_case(q)].append(int(q))
    return {
        "realized": sorted(c for c, qs in counts.items() if c is not None and qs),
        "members": {TWISTED_CASES[c]: counts[c] for c in (1, 2, 3)},
        "unclassified": counts[None],
        "case3_vacuous": not counts[3],
        "explanation": "3 | 2q+1 iff 2q = 2 mod 3 iff q = 1 mod 3 iff 3 | q-1, "
                       "so zeta^q = zeta whenever zeta lies in mu_{2q+1}",
    }
