"""Singular systems of kernel operators and spectral weak regularisation.

The operator convention follows the regularity argument: for a kernel ``W``
on ``U x V`` the operator ``T`` sends a function on the row side to

    (T f)(v) = int W(u, v) f(u) du,

so ``T u_i = sigma_i y_i`` with ``u_i`` living on the row partition and
``y_i`` on the column partition.  ``T T*`` then acts on the column side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .kernel import StepKernel, sixth_power, transpose
from .norms import BudgetError

SIGMA_CUTOFF = 1e-12
MAX_CELL_BOUND = 1e9


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    singular_values: np.ndarray  # descending
    left_vectors: np.ndarray  # (rank, m), step functions on the row partition
    right_vectors: np.ndarray  # (rank, n), step functions on the column partition
    row_measures: np.ndarray
    col_measures: np.ndarray

    @property
    def rank(self) -> int:
        return self.singular_values.size

    def reconstruct(self) -> StepKernel:
        vals = (self.left_vectors.T * self.singular_values) @ self.right_vectors
        if self.rank == 0:
            vals = np.zeros((self.row_measures.size, self.col_measures.size))
        return StepKernel(self.row_measures, self.col_measures, vals)

    def column_power_kernel(self, power: int = 6, below: float | None = None,
                            at_least: float | None = None) -> np.ndarray:
        """Matrix of ``sum_i sigma_i^power y_i(v) y_i(v')`` over the selected indices.

        ``power=6`` gives the kernel of ``T T* T T* T T*``; ``below`` keeps only
        the tail ``sigma_i < below``, ``at_least`` only ``sigma_i >= at_least``.
        """
        keep = np.ones(self.rank, dtype=bool)
        if below is not None:
            keep &= self.singular_values < below
        if at_least is not None:
            keep &= self.singular_values >= at_least
        y = self.right_vectors[keep]
        s = self.singular_values[keep] ** power
        return (y.T * s) @ y


def svd(w: StepKernel) -> SpectralDecomposition:
    """Singular value decomposition of ``T_W`` on measure-weighted L^2.

    Computed from ``diag(sqrt a) W diag(sqrt b)``; triples with
    ``sigma < 1e-12`` are dropped.  Each ``y_i`` is signed so that its first
    nonzero entry is positive.
    """
    sa = np.sqrt(w.row_measures)
    sb = np.sqrt(w.col_measures)
    p, s, qt = np.linalg.svd(sa[:, None] * w.values * sb[None, :], full_matrices=False)
    keep = s >= SIGMA_CUTOFF
    s = s[keep]
    u = (p[:, keep] / sa[:, None]).T
    y = qt[keep] / sb[None, :]
    for i in range(s.size):
        nz = np.flatnonzero(np.abs(y[i]) > 1e-12)
        if nz.size and y[i, nz[0]] < 0:
            y[i] *= -1
            u[i] *= -1
    return SpectralDecomposition(s, u, y, w.row_measures.copy(), w.col_measures.copy())


def step_count_bound(eps: float) -> float:
    """``(5 / eps^3)^(1 / eps^2)``; ``inf`` when it overflows a double."""
    log_bound = math.log(5 / eps ** 3) / eps ** 2
    return math.exp(log_bound) if log_bound < 700 else math.inf


@dataclass(frozen=True, eq=False)
class WeakRegularityResult:
    eps: float
    delta: float
    cell_count: int
    column_cells: tuple[tuple[int, ...], ...]
    approx_kernel: StepKernel
    achieved_inf_error: float
    cell_bound: float
    retained_rank: int
    side: str = "column"

    @property
    def error_bound(self) -> float:
        return 2 * self.eps ** 2

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "side": self.side,
            "cell_count": self.cell_count,
            "cell_bound": self.cell_bound if math.isfinite(self.cell_bound) else None,
            "retained_rank": self.retained_rank,
            "column_cells": [list(c) for c in self.column_cells],
            "achieved_inf_error": self.achieved_inf_error,
            "error_bound": self.error_bound,
            "approx_kernel": self.approx_kernel.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _round_half_to_zero(r: np.ndarray) -> np.ndarray:
    return (np.sign(r) * np.ceil(np.abs(r) - 0.5)).astype(np.int64)


def weak_regularize(w: StepKernel, eps: float, side: str = "column") -> WeakRegularityResult:
    """Step approximation of the sixth-power kernel within ``2 eps^2`` in sup norm.

    Singular directions with ``sigma_i >= eps`` are kept, each kept ``y_i`` is
    rounded to the grid ``delta * Z`` with ``delta = eps^2 / 5``, and the
    column steps are grouped by their joint rounded values.  The returned
    kernel is that of ``sum sigma_i^6 <., y'_i> y'_i``.  ``side='row'`` runs
    the same construction on the transposed kernel.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    if not w.is_graphon:
        raise ValueError("weak_regularize expects a graphon (values in [0, 1])")
    if side not in ("column", "row"):
        raise ValueError("side must be 'column' or 'row'")
    bound = step_count_bound(eps)
    if not math.isfinite(bound):
        raise BudgetError(f"step bound (5/eps^3)^(1/eps^2) overflows for eps={eps}")
    if side == "row":
        w = transpose(w)
    n = w.col_measures.size
    if min(bound, n) > MAX_CELL_BOUND:
        raise BudgetError("more than 1e9 cells would be needed")

    delta = eps ** 2 / 5
    dec = svd(w)
    kept = dec.singular_values >= eps
    sigma = dec.singular_values[kept]
    grid = _round_half_to_zero(dec.right_vectors[kept] / delta)  # (r, n)
    y_disc = grid * delta

    labels = np.empty(n, dtype=np.int64)
    first_seen: dict[bytes, int] = {}
    for col in range(n):
        key = grid[:, col].tobytes()
        labels[col] = first_seen.setdefault(key, len(first_seen))
    cells = tuple(tuple(np.flatnonzero(labels == c).tolist()) for c in range(len(first_seen)))

    fine = (y_disc.T * sigma ** 6) @ y_disc  # W' on the original column steps
    reps = [c[0] for c in cells]
    cell_measures = np.array([w.col_measures[list(c)].sum() for c in cells])
    approx = StepKernel(cell_measures, cell_measures, fine[np.ix_(reps, reps)])

    k3 = sixth_power(transpose(w))  # kernel of T T* T T* T T* on the column partition
    err = float(np.abs(k3.values - fine).max())
    return WeakRegularityResult(eps, delta, len(cells), cells, approx, err, bound,
                                int(sigma.size), side)
