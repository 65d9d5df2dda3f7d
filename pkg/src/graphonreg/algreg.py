"""Algebraic regularisation of catalog graphs through sixth-power profile kernels.

For a bipartite graph with 0/1 adjacency ``A`` on ``U x V`` the kernel of
``T T* T T* T T*`` on the column side counts the walks
``v - u1 - v2 - u2 - v3 - u3 - v'``:

    K3(v, v') = (A^T A)^3[v, v'] / (|U|^3 |V|^2).

Vertices with (nearly) equal rows of ``K3`` form the column cells; the row
cells come from the transposed construction.  Exact edge densities between
cells give the regularising stepfunction.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from . import defgraphs
from .kernel import BipartiteGraph, StepKernel, from_graph_uniform, subtract
from .norms import BudgetError, cut_distance, cut_norm_heuristic

PROFILE_BUDGET = 4_000_000
MIN_RELATIVE_GAP = 0.5
MIN_SEPARATION = 4.0
NORMALIZATION_NOTE = (
    "walk counts are divided by |U|^3 |V|^2 (three U-coordinates, two interior "
    "V-coordinates), so the complete graph gives the constant kernel 1; a "
    "|U|^3 |V|^3 divisor would not match the continuum operator")


class ProfileBudgetError(BudgetError):
    pass


@dataclass(frozen=True, eq=False)
class ProfileMatrix:
    side: str
    values: np.ndarray
    counts: np.ndarray  # integer walk counts before normalisation
    normalization: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def _exact_cube_of_gram(a: np.ndarray, bound: float) -> np.ndarray:
    """(A^T A)^3 as int64; float BLAS is exact while every partial sum stays below 2**53."""
    if bound < 2 ** 53:
        af = a.astype(float)
        m = af.T @ af
        return np.rint(m @ m @ m).astype(np.int64)
    m = a.T @ a
    return m @ m @ m


def profile_kernel(g: BipartiteGraph, side: str = "column") -> ProfileMatrix:
    """Sixth-power profile kernel ``K3`` (column side) or ``K3*`` (row side)."""
    if side not in ("column", "row"):
        raise ValueError("side must be 'column' or 'row'")
    nu, nv = g.left_count, g.right_count
    if nu * nv > PROFILE_BUDGET:
        raise ProfileBudgetError(f"|U||V| = {nu * nv} exceeds {PROFILE_BUDGET}")
    a = g.adjacency()
    if side == "row":
        a = a.T
        nu, nv = nv, nu
    divisor = nu ** 3 * nv ** 2
    counts = _exact_cube_of_gram(a, float(divisor))
    return ProfileMatrix(side, counts / divisor, counts,
                         {"divisor": divisor,
                          "formula": "|U|^3 |V|^2" if side == "column" else "|V|^3 |U|^2",
                          "note": NORMALIZATION_NOTE})


def profile_kernel_bruteforce(g: BipartiteGraph, side: str = "column") -> np.ndarray:
    """Integer walk counts by an explicit loop over ``(u1, v2, u2, v3, u3)``."""
    a = g.adjacency()
    if side == "row":
        a = a.T
    nu, nv = a.shape
    counts = np.zeros((nv, nv), dtype=np.int64)
    for v in range(nv):
        for w in range(nv):
            total = 0
            for u1 in range(nu):
                if not a[u1, v]:
                    continue
                for v2 in range(nv):
                    if not a[u1, v2]:
                        continue
                    for u2 in range(nu):
                        if not a[u2, v2]:
                            continue
                        for v3 in range(nv):
                            if not a[u2, v3]:
                                continue
                            for u3 in range(nu):
                                total += int(a[u3, v3] and a[u3, w])
            counts[v, w] = total
    return counts


@dataclass(frozen=True)
class ClusterReport:
    labels: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]
    tau: float
    gap: float
    relative_gap: float
    separation: float
    clear_gap: bool
    closure_merged: bool
    warnings: tuple[str, ...] = ()


def _components(dist: np.ndarray, tau: float) -> np.ndarray:
    return connected_components(dist <= tau, directed=False)[1]


def _separation(dist: np.ndarray, comp: np.ndarray) -> tuple[float, float]:
    """(largest within-cell diameter, smallest between-cell distance)."""
    same = comp[:, None] == comp[None, :]
    within = float(dist[same].max())
    between = float(dist[~same].min()) if (~same).any() else np.inf
    return within, between


def cluster_profiles(k, strategy: str = "gap_auto", tau: float | None = None,
                     min_relative_gap: float = MIN_RELATIVE_GAP,
                     min_separation: float = MIN_SEPARATION) -> ClusterReport:
    """Group vertices whose profile rows agree within ``tau`` in sup norm.

    ``gap_auto`` looks at the sorted distinct sup-distances ``L_1 < L_2 < ...``
    between profile rows.  Every jump with ``L_{k+1} - L_k >= min_relative_gap
    * L_{k+1}`` proposes ``tau = (L_k + L_{k+1}) / 2``; a proposal is kept when
    the smallest distance between its cells is at least ``min_separation``
    times the largest cell diameter, and the best separated one wins (finer
    on ties).  With no admissible proposal every vertex lands in one cell and
    ``clear_gap`` is False.  ``fixed_tolerance`` uses the given ``tau``.
    Groups are closed transitively; ``closure_merged`` flags a cell whose
    diameter exceeds ``tau``.
    """
    values = np.asarray(k.values if isinstance(k, ProfileMatrix) else k, dtype=float)
    n = values.shape[0]
    notes = []
    dist = cdist(values, values, metric="chebyshev")
    scale = float(np.abs(values).max()) or 1.0
    dist[dist <= 1e-10 * scale] = 0.0
    gap = rel = 0.0
    separation = np.inf
    if strategy == "gap_auto":
        levels = np.unique(dist[np.triu_indices(n, 1)]) if n > 1 else np.zeros(0)
        best = None
        for lo, hi in zip(levels[:-1], levels[1:]):
            if hi - lo < min_relative_gap * hi:
                continue
            cand = (lo + hi) / 2
            within, between = _separation(dist, _components(dist, cand))
            score = np.inf if within == 0 else between / within
            if score >= min_separation and (best is None or score > best[0]):
                best = (score, cand, hi - lo, (hi - lo) / hi)
        if best is not None:
            separation, tau, gap, rel = best
            clear = True
        elif levels.size and levels.max() > 0:
            tau, clear = float(levels.max()), False
            separation = 1.0
            notes.append("no clear gap between profile distances; using a single cell")
        else:
            tau, clear = 0.0, True
    elif strategy == "fixed_tolerance":
        if tau is None or tau < 0:
            raise ValueError("fixed_tolerance needs tau >= 0")
        clear = True
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    comp = _components(dist, tau)
    within, between = _separation(dist, comp)
    merged = within > tau
    if strategy == "fixed_tolerance":
        separation = np.inf if within == 0 else between / within
    if merged and clear:
        notes.append("transitive closure merged vertices further apart than tau")
    groups = [tuple(np.flatnonzero(comp == c).tolist()) for c in np.unique(comp)]
    groups.sort(key=lambda cell: (-len(cell), cell[0]))
    labels = np.empty(n, dtype=np.int64)
    for i, cell in enumerate(groups):
        labels[list(cell)] = i
    return ClusterReport(tuple(labels.tolist()), tuple(groups), float(tau), float(gap),
                         float(rel), float(separation), clear, bool(merged), tuple(notes))


@dataclass(frozen=True, eq=False)
class RegularityDecomposition:
    row_cells: tuple[tuple[int, ...], ...]
    col_cells: tuple[tuple[int, ...], ...]
    row_large: tuple[bool, ...]
    col_large: tuple[bool, ...]
    densities: np.ndarray
    residual_cut_norm: float
    profile_gap: float
    row_report: ClusterReport
    col_report: ClusterReport
    left_count: int
    right_count: int

    @property
    def row_representatives(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.row_cells)

    @property
    def col_representatives(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.col_cells)

    @property
    def n_large_rows(self) -> int:
        return sum(self.row_large)

    @property
    def n_large_cols(self) -> int:
        return sum(self.col_large)

    def block_matrix(self) -> np.ndarray:
        """The regularising stepfunction evaluated on the vertex grid."""
        rl = np.empty(self.left_count, dtype=np.int64)
        cl = np.empty(self.right_count, dtype=np.int64)
        for i, c in enumerate(self.row_cells):
            rl[list(c)] = i
        for j, c in enumerate(self.col_cells):
            cl[list(c)] = j
        return self.densities[np.ix_(rl, cl)]

    def stepfunction(self) -> StepKernel:
        rows = np.array([len(c) for c in self.row_cells]) / self.left_count
        cols = np.array([len(c) for c in self.col_cells]) / self.right_count
        return StepKernel(rows, cols, self.densities)

    def large_cell_kernel(self) -> StepKernel:
        """Stepfunction on the large cells only, with measures renormalised to 1."""
        ri = [i for i, big in enumerate(self.row_large) if big]
        ci = [j for j, big in enumerate(self.col_large) if big]
        rows = np.array([len(self.row_cells[i]) for i in ri], dtype=float)
        cols = np.array([len(self.col_cells[j]) for j in ci], dtype=float)
        return StepKernel(rows / rows.sum(), cols / cols.sum(), self.densities[np.ix_(ri, ci)])

    def to_dict(self) -> dict:
        return {
            "row_cells": [list(c) for c in self.row_cells],
            "col_cells": [list(c) for c in self.col_cells],
            "row_large": list(self.row_large),
            "col_large": list(self.col_large),
            "densities": self.densities.tolist(),
            "residual_cut_norm": self.residual_cut_norm,
            "profile_gap": self.profile_gap,
            "row_representatives": list(self.row_representatives),
            "col_representatives": list(self.col_representatives),
            "warnings": list(self.row_report.warnings + self.col_report.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _large_flags(cells, n: int, threshold: float | None) -> tuple[bool, ...]:
    sizes = np.array([len(c) for c in cells])
    thr = n ** -0.5 if threshold is None else threshold
    large = sizes / n >= thr
    if not large.any():
        large = sizes == sizes.max()
    return tuple(bool(x) for x in large)


def algebraic_regularize(g: BipartiteGraph, cell_threshold: float | None = None,
                         strategy: str = "gap_auto", tau: float | None = None,
                         restarts: int = 20, seed: int = 0) -> RegularityDecomposition:
    """Cells from both profile kernels, exact block densities and a residual estimate.

    A cell is small when its relative size is below ``cell_threshold``
    (default ``n^(-1/2)`` for a side with ``n`` vertices).  If that would leave
    a side without large cells, the cells of maximal size count as large.
    ``residual_cut_norm`` is the heuristic cut norm of the graph minus the
    blockwise-constant kernel, so it estimates the residual from below.
    """
    col = cluster_profiles(profile_kernel(g, "column"), strategy, tau)
    row = cluster_profiles(profile_kernel(g, "row"), strategy, tau)
    a = g.adjacency()
    rl = np.asarray(row.labels)
    cl = np.asarray(col.labels)
    nr, nc = len(row.cells), len(col.cells)
    counts = np.zeros((nr, nc))
    np.add.at(counts, (rl[:, None], cl[None, :]), a)
    sizes = np.outer([len(c) for c in row.cells], [len(c) for c in col.cells])
    densities = counts / sizes

    block = densities[np.ix_(rl, cl)]
    resid = cut_norm_heuristic(subtract(from_graph_uniform(g), from_graph_uniform(
        BipartiteGraph(block))), restarts, seed).value
    gaps = [r.gap for r in (row, col) if r.clear_gap and r.gap > 0]
    for rep in (row, col):
        for msg in rep.warnings:
            warnings.warn(f"{g.label or 'graph'}: {msg}", stacklevel=2)
    return RegularityDecomposition(
        row.cells, col.cells,
        _large_flags(row.cells, g.left_count, cell_threshold),
        _large_flags(col.cells, g.right_count, cell_threshold),
        densities, resid, min(gaps) if gaps else 0.0, row, col,
        g.left_count, g.right_count)


# -- accumulation scan --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScanRow:
    family: str
    q: int
    case_label: str
    n_row_cells: int
    n_col_cells: int
    n_large_row_cells: int
    n_large_col_cells: int
    residual_cut_norm: float
    d_cut_to_prediction: float
    kernel: StepKernel
    cluster: int = -1


@dataclass(frozen=True, eq=False)
class AccumulationCluster:
    representative: StepKernel
    representative_q: int
    members: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class AccumulationResult:
    family: str
    merge_tol: float
    rows: tuple[ScanRow, ...]
    clusters: tuple[AccumulationCluster, ...]

    @property
    def assignment(self) -> dict[int, int]:
        return {r.q: r.cluster for r in self.rows}

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "merge_tol": self.merge_tol,
            "rows": [{"q": r.q, "case_label": r.case_label, "n_row_cells": r.n_row_cells,
                      "n_col_cells": r.n_col_cells, "residual_cut_norm": r.residual_cut_norm,
                      "d_cut_to_prediction": r.d_cut_to_prediction, "cluster": r.cluster}
                     for r in self.rows],
            "clusters": [{"representative_q": c.representative_q, "members": list(c.members),
                          "representative": c.representative.to_dict()}
                         for c in self.clusters],
        }


def _kernel_key(k: StepKernel) -> bytes:
    return b"|".join(np.round(x, 12).tobytes()
                     for x in (k.row_measures, k.col_measures, k.values))


def scan_instance(fam: str, q: int, restarts: int = 20, seed: int = 0) -> ScanRow:
    g = defgraphs.generate(fam, q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dec = algebraic_regularize(g, restarts=restarts, seed=seed)
    kern = dec.large_cell_kernel()
    pred = defgraphs.predict_limit(fam, q)
    return ScanRow(fam, q, pred.case_label, len(dec.row_cells), len(dec.col_cells),
                   dec.n_large_rows, dec.n_large_cols, dec.residual_cut_norm,
                   cut_distance(kern, pred.representative, mode="auto"), kern)


def accumulation_scan(fam: str, q_list: Sequence[int], merge_tol: float = 0.1,
                      restarts: int = 20, seed: int = 0,
                      rows: Sequence[ScanRow] | None = None) -> AccumulationResult:
    """Regularise every instance and single-linkage merge the large-cell
    stepfunctions under ``cut_distance <= merge_tol``.

    Each cluster is represented by its member with the largest ``q``.
    Precomputed ``rows`` (in ``q_list`` order) may be passed in.
    """
    if not q_list:
        raise ValueError("empty q grid")
    if rows is None:
        rows = [scan_instance(fam, int(q), restarts, seed) for q in q_list]
    rows = list(rows)
    uniq: dict[bytes, int] = {}
    kernels: list[StepKernel] = []
    idx = []
    for r in rows:
        key = _kernel_key(r.kernel)
        if key not in uniq:
            uniq[key] = len(kernels)
            kernels.append(r.kernel)
        idx.append(uniq[key])

    parent = list(range(len(kernels)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(kernels)):
        for j in range(i + 1, len(kernels)):
            if find(i) != find(j) and cut_distance(kernels[i], kernels[j], "auto") <= merge_tol:
                parent[find(i)] = find(j)

    roots: dict[int, int] = {}
    for r, k in zip(rows, idx):
        roots.setdefault(find(k), len(roots))
    out_rows = []
    members: dict[int, list[ScanRow]] = {}
    for r, k in zip(rows, idx):
        c = roots[find(k)]
        out_rows.append(ScanRow(**{**r.__dict__, "cluster": c}))
        members.setdefault(c, []).append(out_rows[-1])
    clusters = []
    for c in range(len(roots)):
        best = max(members[c], key=lambda r: r.q)
        clusters.append(AccumulationCluster(best.kernel, best.q,
                                            tuple(r.q for r in members[c])))
    return AccumulationResult(fam, merge_tol, tuple(out_rows), tuple(clusters))
