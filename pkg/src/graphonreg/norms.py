"""Norms on step kernels: L^p norms, the cut norm and the cut distance.

For a step kernel the cut-norm objective

    sum_ij w_ij a_i b_j s_i t_j,   s in [0,1]^m, t in [0,1]^n

is affine in every coordinate, so the supremum over measurable rectangles
is attained on unions of whole steps.  :func:`cut_norm_exact` enumerates the
subsets of the smaller side and picks the best other side by sign.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .kernel import (BipartiteGraph, StepKernel, constant, from_graph_uniform,
                     subtract)

EXACT_CUT_BUDGET = 26
EXACT_DISTANCE_BUDGET = 8
BRUTEFORCE_REGULARITY_BUDGET = 16


class BudgetError(ValueError):
    """Input is too large for an exact enumeration; use the heuristic path."""


class PremiseError(ValueError):
    """The premises of an inequality check do not hold."""


@dataclass(frozen=True)
class CutNormResult:
    value: float
    witness_rows: tuple[int, ...]
    witness_cols: tuple[int, ...]
    exact: bool

    def to_dict(self) -> dict:
        return {"value": self.value, "witness_rows": list(self.witness_rows),
                "witness_cols": list(self.witness_cols), "exact": self.exact}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _weighted(w: StepKernel) -> np.ndarray:
    return w.values * np.outer(w.row_measures, w.col_measures)


def _rectangle_value(mw: np.ndarray, rows, cols) -> float:
    rows = list(rows)
    cols = list(cols)
    if not rows or not cols:
        return 0.0
    return abs(float(mw[np.ix_(rows, cols)].sum()))


def lp_norm(w: StepKernel, p) -> float:
    """Measure-weighted L^p norm for p in {1, 2, inf}."""
    if p in (np.inf, "inf", math.inf):
        return float(np.abs(w.values).max())
    weights = np.outer(w.row_measures, w.col_measures)
    if p == 1:
        return float((np.abs(w.values) * weights).sum())
    if p == 2:
        return float(math.sqrt((w.values ** 2 * weights).sum()))
    raise ValueError(f"unsupported p={p!r}; expected 1, 2 or inf")


def _subset_bits(k: int) -> np.ndarray:
    masks = np.arange(1 << k, dtype=np.int64)
    return ((masks[:, None] >> np.arange(k)) & 1).astype(float)


def _best_subset(mw: np.ndarray) -> tuple[float, int, int]:
    """Max of |sum over S x T| with S ranging over subsets of the rows of ``mw``.

    Returns (value, row mask, sign) where sign is +1 when the optimum is the
    positive part and -1 for the negative part.  The first optimal mask in
    increasing mask order wins.
    """
    k, n = mw.shape
    low = min(k, 13)
    high = k - low
    low_sums = _subset_bits(low) @ mw[:low]
    high_sums = _subset_bits(high) @ mw[low:] if high else np.zeros((1, n))
    best, best_mask, best_sign = -1.0, 0, 1
    chunk = max(1, (1 << 22) // max(1, low_sums.size))
    for start in range(0, high_sums.shape[0], chunk):
        block = low_sums[None, :, :] + high_sums[start:start + chunk, None, :]
        pos = np.maximum(block, 0).sum(axis=-1).ravel()
        neg = -np.minimum(block, 0).sum(axis=-1).ravel()
        for sign, vals in ((1, pos), (-1, neg)):
            idx = int(np.argmax(vals))
            if vals[idx] > best:
                best = float(vals[idx])
                h, lo = divmod(idx, low_sums.shape[0])
                best_mask = ((start + h) << low) | lo
                best_sign = sign
    return best, best_mask, best_sign


def cut_norm_exact(w: StepKernel) -> CutNormResult:
    """Exact cut norm by enumerating step subsets of the smaller side."""
    mw = _weighted(w)
    m, n = mw.shape
    if min(m, n) > EXACT_CUT_BUDGET:
        raise BudgetError(
            f"exact cut norm needs min side <= {EXACT_CUT_BUDGET} steps, got {min(m, n)}; "
            "use cut_norm_heuristic")
    flipped = n < m
    side = mw.T if flipped else mw
    _, mask, sign = _best_subset(side)
    chosen = [i for i in range(side.shape[0]) if mask >> i & 1]
    col_sums = side[chosen].sum(axis=0) if chosen else np.zeros(side.shape[1])
    other = np.flatnonzero(sign * col_sums > 0).tolist()
    rows, cols = (other, chosen) if flipped else (chosen, other)
    return CutNormResult(_rectangle_value(mw, rows, cols), tuple(rows), tuple(cols), True)


def _alternate(mw: np.ndarray, s: np.ndarray, max_iter: int = 1000):
    """Alternating maximisation of s^T mw t over 0/1 vectors."""
    t = (s @ mw > 0).astype(float)
    for _ in range(max_iter):
        s_new = (mw @ t > 0).astype(float)
        t_new = (s_new @ mw > 0).astype(float)
        if np.array_equal(s_new, s) and np.array_equal(t_new, t):
            break
        s, t = s_new, t_new
    return float(s @ mw @ t), s, t


def cut_norm_heuristic(w: StepKernel, restarts: int = 20, seed: int = 0) -> CutNormResult:
    """Lower bound on the cut norm by alternating maximisation.

    The first restart starts from the full row set; later restarts use seeded
    random row subsets, so adding restarts never lowers the result.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    mw = _weighted(w)
    rng = np.random.default_rng(seed)
    best = (-1.0, None, None)
    for r in range(restarts):
        start = np.ones(mw.shape[0]) if r == 0 else (rng.random(mw.shape[0]) < 0.5).astype(float)
        for sign in (1.0, -1.0):
            val, s, t = _alternate(sign * mw, start.copy())
            if val > best[0]:
                best = (val, s, t)
    _, s, t = best
    rows = tuple(np.flatnonzero(s).tolist())
    cols = tuple(np.flatnonzero(t).tolist())
    return CutNormResult(_rectangle_value(mw, rows, cols), rows, cols, False)


def cut_norm(w: StepKernel, restarts: int = 20, seed: int = 0) -> CutNormResult:
    """Exact cut norm when within budget, heuristic lower bound otherwise."""
    if min(w.shape) <= EXACT_CUT_BUDGET:
        return cut_norm_exact(w)
    return cut_norm_heuristic(w, restarts, seed)


def cut_metric(u: StepKernel, w: StepKernel, restarts: int = 20, seed: int = 0) -> float:
    """``d_cut(U, W) = ||U - W||_cut`` without rearrangement."""
    return cut_norm(subtract(u, w), restarts, seed).value


# -- cut distance -------------------------------------------------------------

def _measure_classes(m: np.ndarray) -> list[int]:
    order = np.argsort(m, kind="stable")
    labels = [0] * m.size
    cls = 0
    for prev, cur in zip(order[:-1], order[1:]):
        if m[cur] - m[prev] > 1e-9:
            cls += 1
        labels[cur] = cls
    return labels


def _alignable(m1: np.ndarray, m2: np.ndarray) -> bool:
    return m1.size == m2.size and bool(np.allclose(np.sort(m1), np.sort(m2), rtol=0, atol=1e-9))


def _aligned_permutations(target: np.ndarray, source: np.ndarray, values: np.ndarray):
    """Bijections p (target step i <- source step p[i]) preserving measures,
    deduplicated by the rearranged value matrix."""
    classes = {}
    for i, lab in enumerate(_measure_classes(np.concatenate([target, source]))):
        classes.setdefault(lab, ([], []))[0 if i < target.size else 1].append(i % target.size)
    seen = set()
    slots = [c for c in classes.values()]
    for choice in itertools.product(*(itertools.permutations(src) for _, src in slots)):
        perm = [0] * target.size
        for (tgt, _), src in zip(slots, choice):
            for t, s in zip(tgt, src):
                perm[t] = s
        key = values[perm].tobytes()
        if key not in seen:
            seen.add(key)
            yield perm


def _small_cut_norm(mw: np.ndarray, bits: np.ndarray) -> float:
    sums = bits @ mw
    return float(max(np.maximum(sums, 0).sum(axis=1).max(), -np.minimum(sums, 0).sum(axis=1).min()))


def _sign_split_bound(r: np.ndarray) -> float:
    return float(max(r[r > 0].sum(), -r[r < 0].sum()))


def _exact_permutation_distance(u: StepKernel, w: StepKernel) -> float:
    a, b = u.row_measures, u.col_measures
    uw = u.values
    row_perms = list(_aligned_permutations(a, w.row_measures, w.values))
    col_perms = list(_aligned_permutations(b, w.col_measures, w.values.T))
    # row sums of the difference do not depend on the column bijection (and
    # vice versa), which gives cheap lower bounds for pruning
    u_rows, u_cols = uw @ b, a @ uw
    w_rows, w_cols = w.values @ w.col_measures, w.row_measures @ w.values
    row_lb = [_sign_split_bound(a * (u_rows - w_rows[p])) for p in row_perms]
    col_lb = [_sign_split_bound(b * (u_cols - w_cols[p])) for p in col_perms]
    row_order = np.argsort(row_lb, kind="stable")
    col_order = np.argsort(col_lb, kind="stable")
    bits = _subset_bits(a.size)
    weights = np.outer(a, b)
    best = math.inf
    for ri in row_order:
        if row_lb[ri] >= best:
            break
        wp = w.values[row_perms[ri]]
        for ci in col_order:
            if col_lb[ci] >= best:
                break
            d = _small_cut_norm((uw - wp[:, col_perms[ci]]) * weights, bits)
            best = min(best, d)
            if best <= 1e-15:
                return 0.0
    return best


def _overlay_distance(u: StepKernel, w: StepKernel, rp, cp) -> float:
    """d_cut(U, W rearranged by step orders rp, cp), an upper bound on delta_cut."""
    wr = StepKernel(w.row_measures[rp], w.col_measures[cp], w.values[np.ix_(rp, cp)])
    return cut_metric(u, wr)


def _heuristic_distance(u: StepKernel, w: StepKernel) -> float:
    m, n = w.shape
    if math.factorial(m) * math.factorial(n) <= 576:
        return min(_overlay_distance(u, w, list(rp), list(cp))
                   for rp in itertools.permutations(range(m))
                   for cp in itertools.permutations(range(n)))

    def by_mean(k: StepKernel):
        rmean = k.values @ k.col_measures
        cmean = k.row_measures @ k.values
        return np.argsort(-rmean, kind="stable"), np.argsort(-cmean, kind="stable")

    ur, uc = by_mean(u)
    u_sorted = StepKernel(u.row_measures[ur], u.col_measures[uc], u.values[np.ix_(ur, uc)])
    rp, cp = (list(x) for x in by_mean(w))
    best = _overlay_distance(u_sorted, w, rp, cp)
    improved = True
    passes = 0
    while improved and passes < 20:
        improved = False
        passes += 1
        for order in (rp, cp):
            for i, j in itertools.combinations(range(len(order)), 2):
                order[i], order[j] = order[j], order[i]
                d = _overlay_distance(u_sorted, w, rp, cp)
                if d < best - 1e-15:
                    best = d
                    improved = True
                else:
                    order[i], order[j] = order[j], order[i]
    return best


def cut_distance(u: StepKernel, w: StepKernel, mode: str = "exact_permutation") -> float:
    """Cut distance ``delta_cut(U, W)``.

    ``exact_permutation`` minimises ``d_cut`` over all measure-preserving
    bijections of whole steps (both kernels need equal measure multisets and
    at most 8 steps per side).  ``heuristic`` overlays rearrangements of the
    steps of ``w`` on ``u`` and returns the best ``d_cut`` found, an upper bound
    on the true distance.  ``auto`` picks ``exact_permutation`` when allowed.
    """
    if mode == "auto":
        mode = ("exact_permutation" if _exact_allowed(u, w) else "heuristic")
    if mode == "exact_permutation":
        if not (_alignable(u.row_measures, w.row_measures)
                and _alignable(u.col_measures, w.col_measures)):
            raise ValueError("step measures are not alignable by a bijection of steps; "
                             "use mode='heuristic'")
        if max(u.shape + w.shape) > EXACT_DISTANCE_BUDGET:
            raise BudgetError(f"exact cut distance supports at most {EXACT_DISTANCE_BUDGET} "
                              "steps per side; use mode='heuristic'")
        return _exact_permutation_distance(u, w)
    if mode == "heuristic":
        return _heuristic_distance(u, w)
    raise ValueError(f"unknown cut distance mode {mode!r}")


def _exact_allowed(u: StepKernel, w: StepKernel) -> bool:
    return (_alignable(u.row_measures, w.row_measures)
            and _alignable(u.col_measures, w.col_measures)
            and max(u.shape + w.shape) <= EXACT_DISTANCE_BUDGET)


# -- homogeneity and regularity ----------------------------------------------

@dataclass(frozen=True)
class HomogeneityResult:
    """Outcome of a homogeneity test; truthy when the graph passes.

    With ``exact=False`` the distance is a heuristic lower bound, so a pass
    is not a certificate.
    """

    passed: bool
    distance: float
    exact: bool
    notes: str = field(default="")

    def __bool__(self) -> bool:
        return self.passed


def homogeneity_check(g: BipartiteGraph, density: float, eps: float,
                      restarts: int = 20, seed: int = 0) -> HomogeneityResult:
    """Is ``g`` eps-homogeneous of the given density, i.e. ``d_cut(g, W(density)) <= eps``?"""
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density!r}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    diff = subtract(from_graph_uniform(g), constant(density))
    res = cut_norm(diff, restarts, seed)
    notes = "" if res.exact else "heuristic lower bound: a pass is not certified"
    return HomogeneityResult(res.value <= eps, res.value, res.exact, notes)


def regularity_check_bruteforce(g: BipartiteGraph, density: float, eps: float) -> bool:
    """Exhaustive test of eps-regularity of density ``density``.

    Every A with |A| > eps|U| is enumerated; for a fixed A and a fixed size
    |B| = k the extreme values of e(A, B) - density |A| |B| come from the k
    largest / smallest column discrepancies, which covers every B of that size.
    """
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density!r}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    nu, nv = g.left_count, g.right_count
    if max(nu, nv) > BRUTEFORCE_REGULARITY_BUDGET:
        raise BudgetError(f"brute-force regularity supports at most "
                          f"{BRUTEFORCE_REGULARITY_BUDGET} vertices per side")
    adj = (g.edge_weights != 0).astype(float)
    bits = _subset_bits(nu)
    sizes = bits.sum(axis=1)
    keep = sizes > eps * nu
    bits, sizes = bits[keep], sizes[keep]
    if bits.size == 0:
        return True
    disc = bits @ adj - density * sizes[:, None]
    disc.sort(axis=1)
    top = np.cumsum(disc[:, ::-1], axis=1)
    bottom = np.cumsum(disc, axis=1)
    k = np.arange(1, nv + 1)
    admissible = k > eps * nv
    bound = eps * sizes[:, None] * k[None, :]
    slack = 1e-9
    ok = (top <= bound + slack) & (-bottom <= bound + slack)
    return bool(np.all(ok[:, admissible]))


# -- appendix inequalities ------------------------------------------------------

def holder_triple_check(a: Sequence[float], b: Sequence[float], u: float, v: float) -> bool:
    """Check ``sum a_i b_i <= u^(1/3) v`` given ``sum a_i^3 b_i <= u v`` and ``sum b_i <= v``.

    Raises :class:`PremiseError` when the premises fail.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise PremiseError("a and b must be sequences of equal length")
    if np.any(a <= 0) or np.any(b <= 0) or u <= 0 or v <= 0:
        raise PremiseError("all quantities must be positive")
    tol = 1e-12
    if (a ** 3 * b).sum() > u * v * (1 + tol) or b.sum() > v * (1 + tol):
        raise PremiseError("premises sum a^3 b <= u v and sum b <= v do not hold")
    return bool((a * b).sum() <= u ** (1 / 3) * v * (1 + tol))


def step_inner(f, g, measures) -> float:
    """``<f, g>`` for step functions on a partition with the given measures."""
    return float(np.sum(np.asarray(f) * np.asarray(g) * np.asarray(measures)))


def step_norm(f, measures, p=2) -> float:
    f = np.abs(np.asarray(f, dtype=float))
    if p in (np.inf, "inf", math.inf):
        return float(f.max())
    return float((np.sum(f ** p * np.asarray(measures))) ** (1 / p))


def holder_sides(f, g, measures, p: float) -> tuple[float, float]:
    """Both sides of ``||fg||_1 <= ||f||_p ||g||_q`` with ``1/p + 1/q = 1``."""
    q = math.inf if p == 1 else (1.0 if p in (np.inf, math.inf) else p / (p - 1))
    lhs = step_norm(np.asarray(f) * np.asarray(g), measures, 1)
    return lhs, step_norm(f, measures, p) * step_norm(g, measures, q)
