"""Stepfunction kernels on the unit square and their algebra.

A :class:`StepKernel` is described by a row partition of ``[0, 1]`` (the
measures ``a_i`` of consecutive intervals), a column partition (``b_j``) and a
value matrix ``w_ij``.  Interval positions are implicit: step ``i`` occupies
``[a_1 + ... + a_{i-1}, a_1 + ... + a_i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MEASURE_TOL = 1e-9
BREAKPOINT_TOL = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepKernel:
    """Kernel constant on every product ``U_i x V_j`` of two interval partitions."""

    row_measures: np.ndarray
    col_measures: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rows = _readonly(np.atleast_1d(self.row_measures))
        cols = _readonly(np.atleast_1d(self.col_measures))
        vals = _readonly(np.atleast_2d(self.values))
        if rows.ndim != 1 or cols.ndim != 1:
            raise ValueError("measures must be one-dimensional")
        if vals.shape != (rows.size, cols.size):
            raise ValueError(
                f"values shape {vals.shape} does not match measures ({rows.size}, {cols.size})"
            )
        for name, m in (("row", rows), ("col", cols)):
            if m.size == 0:
                raise ValueError(f"{name} partition is empty")
            if not np.all(np.isfinite(m)) or np.any(m <= 0):
                raise ValueError(f"{name} measures must be finite and positive")
            if abs(m.sum() - 1.0) > MEASURE_TOL:
                raise ValueError(f"{name} measures sum to {m.sum()!r}, not 1")
        if not np.all(np.isfinite(vals)):
            raise ValueError("kernel values must be finite")
        object.__setattr__(self, "row_measures", rows)
        object.__setattr__(self, "col_measures", cols)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def is_graphon(self) -> bool:
        return bool(np.all(self.values >= 0) and np.all(self.values <= 1))

    @property
    def is_w1(self) -> bool:
        return bool(np.all(np.abs(self.values) <= 1))

    def act(self, f: Sequence[float]) -> np.ndarray:
        """Apply the integral operator ``(T f)(x) = int W(x, y) f(y) dy``.

        ``f`` is a step function on the column partition; the result is a
        step function on the row partition.
        """
        f = np.asarray(f, dtype=float)
        return self.values @ (self.col_measures * f)

    def to_dict(self) -> dict:
        return {
            "row_measures": self.row_measures.tolist(),
            "col_measures": self.col_measures.tolist(),
            "values": self.values.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "StepKernel":
        try:
            rows, cols, vals = data["row_measures"], data["col_measures"], data["values"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed kernel object: {exc}") from None
        return cls(np.asarray(rows, dtype=float), np.asarray(cols, dtype=float),
                   np.asarray(vals, dtype=float))

    @classmethod
    def from_json(cls, text: str) -> "StepKernel":
        def reject(token):
            raise ValueError(f"non-finite number {token} in kernel JSON")

        try:
            data = json.loads(text, parse_constant=reject)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid kernel JSON: {exc}") from None
        return cls.from_dict(data)

    def __repr__(self) -> str:
        return (f"StepKernel(rows={np.round(self.row_measures, 6).tolist()}, "
                f"cols={np.round(self.col_measures, 6).tolist()}, "
                f"values={np.round(self.values, 6).tolist()})")


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Finite weighted bipartite graph ``(U, V, E, w)``.

    ``edge_weights[i, j]`` is the weight of the edge ``(u_i, v_j)``; zero means
    no edge.  ``vertex_weights`` optionally holds a pair of arrays (left, right).
    """

    edge_weights: np.ndarray
    vertex_weights: tuple[np.ndarray, np.ndarray] | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        w = np.atleast_2d(np.array(self.edge_weights, dtype=float, copy=True))
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError("both sides of a bipartite graph must be nonempty")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("edge weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "edge_weights", w)
        if self.vertex_weights is not None:
            left, right = (np.array(x, dtype=float) for x in self.vertex_weights)
            if left.shape != (w.shape[0],) or right.shape != (w.shape[1],):
                raise ValueError("vertex weight arrays do not match the graph sides")
            if any(not np.all(np.isfinite(x)) or np.any(x < 0) for x in (left, right)):
                raise ValueError("vertex weights must be finite and nonnegative")
            object.__setattr__(self, "vertex_weights", (left, right))

    @property
    def left_count(self) -> int:
        return self.edge_weights.shape[0]

    @property
    def right_count(self) -> int:
        return self.edge_weights.shape[1]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.edge_weights))

    def adjacency(self) -> np.ndarray:
        """0/1 adjacency matrix as int64."""
        return (self.edge_weights != 0).astype(np.int64)

    def transpose(self) -> "BipartiteGraph":
        vw = None if self.vertex_weights is None else self.vertex_weights[::-1]
        return BipartiteGraph(self.edge_weights.T, vw, self.label)

    def to_dict(self) -> dict:
        out = {
            "left_count": self.left_count,
            "right_count": self.right_count,
            "edge_count": self.edge_count,
            "edge_weights": self.edge_weights.tolist(),
        }
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "BipartiteGraph":
        return cls(np.asarray(data["edge_weights"], dtype=float), label=data.get("label", ""))


def constant(c: float) -> StepKernel:
    """The constant kernel ``W(c)``."""
    if not math.isfinite(c):
        raise ValueError(f"constant must be finite, got {c!r}")
    return StepKernel([1.0], [1.0], [[float(c)]])


def zero() -> StepKernel:
    return constant(0.0)


def from_matrix(values, row_measures=None, col_measures=None) -> StepKernel:
    """Kernel with the given value matrix; equal step measures unless given."""
    vals = np.atleast_2d(np.asarray(values, dtype=float))
    m, n = vals.shape
    rows = np.full(m, 1.0 / m) if row_measures is None else row_measures
    cols = np.full(n, 1.0 / n) if col_measures is None else col_measures
    return StepKernel(rows, cols, vals)


def from_graph_uniform(g: BipartiteGraph) -> StepKernel:
    """Graphon of ``g`` with every vertex given the same measure."""
    return from_matrix(g.edge_weights)


def from_graph_weighted(g: BipartiteGraph) -> StepKernel:
    """The stepfunction ``W(g)`` whose vertex measures are proportional to
    weighted degrees: ``mu(U_i) = w_i / w_U`` and ``mu(V_j) = w_j / w_V``."""
    w = g.edge_weights
    left = w.sum(axis=1)
    right = w.sum(axis=0)
    if left.sum() <= 0:
        raise ValueError("graph has zero total edge weight")
    for side, deg in (("left", left), ("right", right)):
        isolated = np.flatnonzero(deg <= 0)
        if isolated.size:
            raise ValueError(f"{side} vertex {int(isolated[0])} is isolated (zero weighted degree)")
    return StepKernel(left / left.sum(), right / right.sum(), w)


def transpose(w: StepKernel) -> StepKernel:
    return StepKernel(w.col_measures, w.row_measures, w.values.T)


def _refine(m1: np.ndarray, m2: np.ndarray):
    """Common refinement of two partitions of [0, 1].

    Returns the refined measures and, for each refined step, the index of the
    step of each input that contains it.
    """
    c1 = np.cumsum(m1)
    c2 = np.cumsum(m2)
    c1 /= c1[-1]
    c2 /= c2[-1]
    pts = np.sort(np.concatenate([c1[:-1], c2[:-1]]))
    merged = [0.0]
    for p in pts:
        if p - merged[-1] > BREAKPOINT_TOL:
            merged.append(float(p))
    if 1.0 - merged[-1] <= BREAKPOINT_TOL:
        merged.pop()
    edges = np.array(merged + [1.0])
    measures = np.diff(edges)
    mids = (edges[:-1] + edges[1:]) / 2
    i1 = np.minimum(np.searchsorted(c1, mids, side="right"), m1.size - 1)
    i2 = np.minimum(np.searchsorted(c2, mids, side="right"), m2.size - 1)
    return measures, i1, i2


def common_refinement(u: StepKernel, w: StepKernel) -> tuple[StepKernel, StepKernel]:
    """Re-express both kernels on the common refinement of their partitions."""
    rows, ru, rw = _refine(u.row_measures, w.row_measures)
    cols, cu, cw = _refine(u.col_measures, w.col_measures)
    return (StepKernel(rows, cols, u.values[np.ix_(ru, cu)]),
            StepKernel(rows, cols, w.values[np.ix_(rw, cw)]))


def add(u: StepKernel, w: StepKernel, alpha: float = 1.0) -> StepKernel:
    """``u + alpha * w`` on the common refinement."""
    ur, wr = common_refinement(u, w)
    return StepKernel(ur.row_measures, ur.col_measures, ur.values + alpha * wr.values)


def subtract(u: StepKernel, w: StepKernel) -> StepKernel:
    return add(u, w, -1.0)


def scale(w: StepKernel, c: float) -> StepKernel:
    return StepKernel(w.row_measures, w.col_measures, c * w.values)


def product(u: StepKernel, w: StepKernel) -> StepKernel:
    """Pointwise product ``(UW)(x, y) = U(x, y) W(x, y)``."""
    ur, wr = common_refinement(u, w)
    return StepKernel(ur.row_measures, ur.col_measures, ur.values * wr.values)


def operator_product(u: StepKernel, w: StepKernel) -> StepKernel:
    """``(U o W)(x, y) = int U(x, z) W(z, y) dz``."""
    mid, iu, iw = _refine(u.col_measures, w.row_measures)
    vals = (u.values[:, iu] * mid) @ w.values[iw, :]
    return StepKernel(u.row_measures, w.col_measures, vals)


def direct_sum(parts: Sequence[StepKernel], a: Sequence[float], b: Sequence[float]) -> StepKernel:
    """Block-diagonal sum: part ``i`` rescaled into an ``a_i x b_i`` rectangle."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (len(parts) == a.size == b.size) or not parts:
        raise ValueError("parts and weight sequences must be nonempty and of equal length")
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("direct sum weights must be positive")
    if abs(a.sum() - 1) > MEASURE_TOL or abs(b.sum() - 1) > MEASURE_TOL:
        raise ValueError(f"direct sum weights must sum to 1 (got {a.sum()!r}, {b.sum()!r})")
    rows = np.concatenate([ai * p.row_measures for ai, p in zip(a, parts)])
    cols = np.concatenate([bi * p.col_measures for bi, p in zip(b, parts)])
    vals = np.zeros((rows.size, cols.size))
    r = c = 0
    for p in parts:
        m, n = p.shape
        vals[r:r + m, c:c + n] = p.values
        r += m
        c += n
    return StepKernel(rows, cols, vals)


def symmetrize(w: StepKernel) -> StepKernel:
    """Symmetric bipartite kernel: ``W`` on ``[0,1/2] x [1/2,1]``, ``W*`` on the
    mirrored square, zero on the two diagonal squares."""
    m, n = w.shape
    half = np.concatenate([w.row_measures, w.col_measures]) / 2
    vals = np.zeros((m + n, m + n))
    vals[:m, m:] = w.values
    vals[m:, :m] = w.values.T
    return StepKernel(half, half, vals)


def sixth_power(w: StepKernel) -> StepKernel:
    """``W o W* o W o W* o W o W*``, a kernel on the row partition of ``w``."""
    wt = transpose(w)
    out = operator_product(w, wt)
    for nxt in (w, wt, w, wt):
        out = operator_product(out, nxt)
    return out


def allclose(u: StepKernel, w: StepKernel, atol: float = 1e-10) -> bool:
    """Equality as functions on [0, 1]^2, up to ``atol`` pointwise."""
    ur, wr = common_refinement(u, w)
    return bool(np.allclose(ur.values, wr.values, rtol=0.0, atol=atol))
