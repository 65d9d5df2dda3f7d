"""Command-line front end: ``graphonreg {gen,weakreg,sweep,expander}``.

Exit codes: 0 success, 2 usage or validation error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

from . import algreg, defgraphs, expander
from .finfield import is_prime_power, prime_powers, primes
from .kernel import BipartiteGraph, StepKernel, from_graph_uniform
from .norms import BudgetError
from .spectral import weak_regularize

CSV_VERSION = "# graphon-reg v1"
SWEEP_COLUMNS = ("family", "q", "case_label", "n_row_cells", "n_col_cells",
                 "residual_cut_norm", "d_cut_to_prediction")
EXPANDER_COLUMNS = ("morphism", "q", "quadruple_ratio", "min_image_fraction", "verdict")

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3


class UsageError(ValueError):
    pass


def parse_grid(spec: str) -> list[int]:
    """``"5,7,11"``, ``"primes:a..b"`` or ``"primepowers:a..b"`` to a sorted-as-given list."""
    spec = spec.strip()
    if ":" in spec:
        kind, _, rng = spec.partition(":")
        lo, sep, hi = rng.partition("..")
        if not sep:
            raise UsageError(f"grid range must look like a..b, got {rng!r}")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad grid bounds in {spec!r}") from None
        if kind == "primes":
            grid = primes(lo, hi)
        elif kind == "primepowers":
            grid = prime_powers(lo, hi)
        else:
            raise UsageError(f"unknown grid kind {kind!r}")
    else:
        try:
            grid = [int(x) for x in spec.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad grid {spec!r}") from None
    if not grid:
        raise UsageError(f"grid {spec!r} is empty")
    bad = [q for q in grid if not is_prime_power(q)]
    if bad:
        raise UsageError(f"not prime powers: {bad}")
    return grid


def _threads() -> int:
    raw = os.environ.get("GRAPHONREG_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _map_ordered(fn, items):
    """``map`` over a thread pool; results come back in input order."""
    n = _threads()
    if n == 1 or len(items) == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


def _emit(text: str, path: str | None) -> None:
    """Write to stdout or atomically to ``path`` (temp file in the same directory, then rename)."""
    if path is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".graphonreg-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.10g}"
    return str(x)


def _csv(header: tuple[str, ...], rows, comments=()) -> str:
    buf = io.StringIO()
    buf.write(CSV_VERSION + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    for line in comments:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _check_instance(fam: str, q: int) -> None:
    defgraphs._check_q(fam, q)
    n = 2 * q + 1 if fam in defgraphs.FROBENIUS_FAMILIES else q
    if n * n > algreg.PROFILE_BUDGET:
        raise BudgetError(f"{n} vertices per side exceed the profile kernel budget")


# -- commands ------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.family not in defgraphs.FAMILIES:
        raise UsageError(f"unknown family {args.family!r}")
    if not is_prime_power(args.q):
        raise UsageError(f"{args.q} is not a prime power")
    g = defgraphs.generate(args.family, args.q)
    doc = {"family": args.family, "q": args.q, "relation": defgraphs.FAMILIES[args.family],
           **g.to_dict()}
    _emit(json.dumps(doc) + "\n", args.out)
    msg = (f"{g.label}: {g.left_count} + {g.right_count} vertices, "
           f"{g.edge_count} edges\n")
    (sys.stderr if args.out is None else sys.stdout).write(msg)
    return EXIT_OK


def _load_kernel(path: str) -> StepKernel:
    try:
        with open(path) as fh:
            text = fh.read()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read kernel JSON {path!r}: {exc}") from None
    try:
        if isinstance(doc, dict) and "edge_weights" in doc:
            return from_graph_uniform(BipartiteGraph.from_dict(doc))
        return StepKernel.from_json(text)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid kernel JSON: {exc}") from None


def cmd_weakreg(args) -> int:
    if not 0 < args.eps <= 1:
        raise UsageError("--eps must lie in (0, 1]")
    w = _load_kernel(args.input)
    res = weak_regularize(w, args.eps, side=args.side)
    if args.out:
        _emit(res.to_json() + "\n", args.out)
    ok = res.achieved_inf_error <= res.error_bound + 1e-12
    print(f"cells {res.cell_count}")
    print(f"retained_rank {res.retained_rank}")
    print(f"achieved_inf_error {res.achieved_inf_error:.6e}")
    print(f"bound {res.error_bound:.6e}")
    print(f"cell_bound {res.cell_bound:.6e}")
    if not ok:
        print("error bound violated", file=sys.stderr)
        return 1
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.family not in defgraphs.FAMILIES:
        raise UsageError(f"unknown family {args.family!r}")
    if args.merge_tol < 0:
        raise UsageError("--merge-tol must be >= 0")
    grid = parse_grid(args.grid)
    over = []
    for q in grid:
        try:
            _check_instance(args.family, q)
        except BudgetError:
            over.append(q)
    if over:
        raise BudgetError(f"q outside budget for {args.family}: {over}")
    rows = _map_ordered(lambda q: algreg.scan_instance(args.family, q, args.restarts,
                                                       args.seed), grid)
    res = algreg.accumulation_scan(args.family, grid, args.merge_tol, args.restarts,
                                   args.seed, rows=rows)
    if args.format == "json":
        text = json.dumps(res.to_dict(), sort_keys=True) + "\n"
    else:
        body = [(r.family, r.q, r.case_label, r.n_row_cells, r.n_col_cells,
                 r.residual_cut_norm, r.d_cut_to_prediction) for r in res.rows]
        notes = [f"clusters {len(res.clusters)}"]
        for i, c in enumerate(res.clusters):
            vals = json.dumps(c.representative.values.round(4).tolist())
            notes.append(f"cluster {i}: representative_q={c.representative_q} "
                         f"members={len(c.members)} values={vals}")
        text = _csv(SWEEP_COLUMNS, body, notes)
    _emit(text, args.out)
    return EXIT_OK


def cmd_expander(args) -> int:
    if args.morphism not in expander.MORPHISMS:
        raise UsageError(f"unknown morphism {args.morphism!r}")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.C <= 0 or not 0 <= args.c <= 1:
        raise UsageError("need --C > 0 and 0 <= --c <= 1")
    grid = parse_grid(args.grid)
    over = [q for q in grid if q > expander.MAX_PROBE_Q]
    if over:
        raise BudgetError(f"q outside budget for expansion_probe: {over}")
    reports = _map_ordered(lambda q: expander.expansion_probe(
        args.morphism, q, args.c, args.C, args.trials, args.seed), grid)
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in reports], sort_keys=True) + "\n"
    else:
        text = _csv(EXPANDER_COLUMNS, [(r.morphism, r.q, r.quadruple_ratio,
                                        r.min_image_fraction, r.verdict) for r in reports])
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphonreg",
                                 description="Graphon regularity tools for definable graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a catalog graph as JSON")
    p.add_argument("--family", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("weakreg", help="spectral weak regularisation of a kernel")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--side", choices=("column", "row"), default="column")
    p.add_argument("--out")
    p.set_defaults(func=cmd_weakreg)

    p = sub.add_parser("sweep", help="accumulation scan of a family over a q grid")
    p.add_argument("--family", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--merge-tol", type=float, default=0.1)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("expander", help="quadruple-map and expansion statistics")
    p.add_argument("--morphism", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_expander)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
