"""Command-line interface: pairwise distance matrices, random trees,
validation, strict consensus, and timing tables.

    treedist dist --metric=rf [--raw] [--format=csv|json] [--no-pendant] FILE...
    treedist random --n=8 --count=3 --seed=0 [--weighted] [--rooted]
    treedist validate FILE...
    treedist bench --metric=rf --sizes=10000,20000,40000 [--reps=5]
    treedist consensus FILE

Tree identifiers are ``basename:index`` (0-based within each file).  All
randomness is seeded (default 0).  TREEDIST_THREADS caps the worker count
used for independent matrix cells; results merge by index, so the output
is identical at any thread count.  Exit codes: 0 on success, 2 when inputs
break a metric's preconditions (one diagnostic line per offending tree).
"""

from __future__ import annotations

import argparse
import gc
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import compare, geodesic, newick, quartets, rf, spr
from .errors import AmbiguousMatchingError, TreeDistError
from .generate import random_binary_tree
from .tree import Tree, is_binary, validate as validate_tree


# ---------------------------------------------------------------------------
# Metric registry
# ---------------------------------------------------------------------------


@dataclass
class _Metric:
    name: str
    compute: object            # (a, b, options) -> float
    needs_rooted: bool | None  # True / False / None (anything consistent)
    needs_weights: bool = False
    needs_binary: bool = False
    max_leaves: int | None = None
    symmetric: bool = True


def _d_rf(a, b, opt):
    return rf.rf_distance(a, b)


def _d_rfl(a, b, opt):
    return rf.rfl_distance(a, b, raw=opt.raw).value


def _d_quartet(a, b, opt):
    return quartets.quartet_distance(a, b)


def _d_triplet(a, b, opt):
    return quartets.triplet_distance(a, b)


def _d_triplet_length(a, b, opt):
    return quartets.triplet_length_distance(a, b)


def _d_geodesic(a, b, opt):
    return geodesic.geodesic_distance(a, b, include_pendant=not opt.no_pendant).length


def _d_mast(a, b, opt):
    return compare.mast_distance(a, b)[0]


def _d_align(a, b, opt):
    return compare.align_score(a, b).total


def _d_ccc(a, b, opt):
    return compare.ccc(a, b)


def _d_node(a, b, opt):
    return compare.node_distance(a, b, k=1)


def _d_path_diff(a, b, opt):
    return compare.node_distance(a, b, k=2)


def _d_sim(a, b, opt):
    return compare.similarity_probability_distance(a, b)


def _d_spr(a, b, opt):
    return spr.spr_distance_maf(a, b)[0]


METRICS = {
    "rf": _Metric("rf", _d_rf, needs_rooted=None),
    "rfl": _Metric("rfl", _d_rfl, needs_rooted=None, needs_weights=True),
    "quartet": _Metric("quartet", _d_quartet, needs_rooted=False),
    "triplet": _Metric("triplet", _d_triplet, needs_rooted=True),
    "triplet-length": _Metric(
        "triplet-length", _d_triplet_length, needs_rooted=True, needs_weights=True
    ),
    "geodesic": _Metric("geodesic", _d_geodesic, needs_rooted=None, needs_weights=True),
    "mast": _Metric("mast", _d_mast, needs_rooted=True),
    "align": _Metric("align", _d_align, needs_rooted=None, symmetric=True),
    "ccc": _Metric("ccc", _d_ccc, needs_rooted=True),
    "node": _Metric("node", _d_node, needs_rooted=None),
    "path-diff": _Metric("path-diff", _d_path_diff, needs_rooted=None),
    "sim": _Metric("sim", _d_sim, needs_rooted=True, needs_weights=True),
    "spr": _Metric(
        "spr", _d_spr, needs_rooted=True, needs_binary=True, max_leaves=10
    ),
}


@dataclass
class MatrixReport:
    metric: str
    labels: list
    values: list                       # row-major, None for undefined cells
    diagnostics: dict = field(default_factory=dict)
    symmetric: bool = True

    def to_json(self) -> str:
        return json.dumps(
            {
                "metric": self.metric,
                "labels": self.labels,
                "matrix": self.values,
                "diagnostics": self.diagnostics,
            },
            indent=2,
            sort_keys=True,
        )

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for lab, row in zip(self.labels, self.values):
            cells = [lab]
            for v in row:
                cells.append("nan" if v is None else repr(v))
            lines.append(",".join(cells))
        for key in sorted(self.diagnostics):
            lines.append(f"# {key}: {self.diagnostics[key]}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dist
# ---------------------------------------------------------------------------


def _load_trees(paths):
    out = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        doc = newick.parse(text)
        base = os.path.basename(path)
        for i, t in enumerate(doc):
            out.append((f"{base}:{i}", t))
    return out


def _check_preconditions(metric: _Metric, trees) -> list:
    problems = []
    rootedness = {t.is_rooted for _, t in trees}
    if metric.needs_rooted is True:
        for ident, t in trees:
            if not t.is_rooted:
                problems.append(f"{ident}: metric {metric.name!r} needs rooted trees")
    elif metric.needs_rooted is False:
        for ident, t in trees:
            if t.is_rooted:
                problems.append(f"{ident}: metric {metric.name!r} needs unrooted trees")
    elif len(rootedness) > 1:
        problems.append(
            f"metric {metric.name!r} needs consistently rooted or unrooted inputs"
        )
    if metric.needs_weights:
        for ident, t in trees:
            if not t.is_weighted:
                problems.append(f"{ident}: metric {metric.name!r} needs edge weights")
    if metric.needs_binary:
        for ident, t in trees:
            if not is_binary(t):
                problems.append(f"{ident}: metric {metric.name!r} needs binary trees")
    if metric.max_leaves is not None:
        for ident, t in trees:
            if len(t.label_set) > metric.max_leaves:
                problems.append(
                    f"{ident}: metric {metric.name!r} is exact and capped at "
                    f"{metric.max_leaves} leaves"
                )
    label_sets = {t.label_set for _, t in trees}
    if len(label_sets) > 1:
        problems.append("input trees do not share one label set")
    return problems


def _worker_count() -> int:
    raw = os.environ.get("TREEDIST_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_dist(args) -> int:
    metric = METRICS[args.metric]
    try:
        trees = _load_trees(args.files)
    except TreeDistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    problems = _check_preconditions(metric, trees)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 2

    n = len(trees)
    symmetric = metric.symmetric and not (args.metric == "rfl" and args.raw)
    values = [[None] * n for _ in range(n)]
    diagnostics = {}

    if symmetric:
        jobs = [(i, j) for i in range(n) for j in range(i, n)]
    else:
        jobs = [(i, j) for i in range(n) for j in range(n)]

    def cell(job):
        i, j = job
        try:
            return i, j, metric.compute(trees[i][1], trees[j][1], args), None
        except AmbiguousMatchingError as exc:
            note = "ambiguous matching; candidates: " + ", ".join(
                repr(c) for c in exc.candidates
            )
            return i, j, None, note
        except TreeDistError as exc:
            return i, j, None, str(exc)

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(cell, jobs))
    else:
        results = [cell(job) for job in jobs]

    failed = False
    for i, j, val, note in results:
        values[i][j] = val
        if symmetric:
            values[j][i] = val
        if note is not None:
            diagnostics[f"{trees[i][0]} vs {trees[j][0]}"] = note
            if "ambiguous" not in note:
                failed = True

    report = MatrixReport(
        metric=args.metric,
        labels=[ident for ident, _ in trees],
        values=values,
        diagnostics=diagnostics,
        symmetric=symmetric,
    )
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.to_csv(), end="")
    return 2 if failed else 0


# ---------------------------------------------------------------------------
# random / validate / consensus / bench
# ---------------------------------------------------------------------------


def cmd_random(args) -> int:
    import random as _random

    if args.n < 2:
        print("error: --n must be at least 2", file=sys.stderr)
        return 2
    rng = _random.Random(args.seed)
    for _ in range(args.count):
        t = random_binary_tree(
            args.n, rng=rng, rooted=args.rooted, weighted=args.weighted
        )
        print(newick.serialize(t))
    return 0


def cmd_validate(args) -> int:
    status = 0
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = newick.parse(fh.read())
        except TreeDistError as exc:
            print(f"{os.path.basename(path)}: error: {exc}")
            status = 2
            continue
        base = os.path.basename(path)
        for i, t in enumerate(doc):
            violations = validate_tree(t)
            if violations:
                status = 2
                for v in violations:
                    print(f"{base}:{i}: {v}")
            else:
                print(f"{base}:{i}: OK")
    return status


def cmd_consensus(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            doc = newick.parse(fh.read())
        trees = list(doc)
        for t in trees:
            if not t.is_rooted:
                print("error: consensus needs rooted trees", file=sys.stderr)
                return 2
        result = rf.strict_consensus(trees)
    except TreeDistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(newick.serialize(result))
    return 0


def bench_metric(metric_name: str, sizes, reps: int = 5, seed: int = 0):
    """Median wall time per size.  Returns [(n, median_seconds)].

    Timing runs with the cyclic GC paused so allocation spikes don't mask
    the scaling behaviour being measured.
    """
    metric = METRICS[metric_name]
    rows = []
    for n in sizes:
        import random as _random

        rng = _random.Random(seed)
        rooted = metric.needs_rooted is not False
        a = random_binary_tree(n, rng=rng, rooted=rooted, weighted=metric.needs_weights)
        b = random_binary_tree(n, rng=rng, rooted=rooted, weighted=metric.needs_weights)

        class _Opt:
            raw = False
            no_pendant = False

        metric.compute(a, b, _Opt())  # warm caches once, untimed
        times = []
        for _ in range(reps):
            gc.disable()
            t0 = time.perf_counter()
            metric.compute(a, b, _Opt())
            times.append(time.perf_counter() - t0)
            gc.enable()
        times.sort()
        rows.append((n, times[len(times) // 2]))
    return rows


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = bench_metric(args.metric, sizes, reps=args.reps)
    print(f"metric: {args.metric}")
    print("n,median_seconds,ratio_to_previous")
    prev = None
    for n, med in rows:
        ratio = "" if prev is None else f"{med / prev:.2f}"
        print(f"{n},{med:.6f},{ratio}")
        prev = med
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treedist", description="distances between leaf-labeled trees"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="all-pairs distance matrix")
    p.add_argument("--metric", required=True, choices=sorted(METRICS))
    p.add_argument("--raw", action="store_true",
                   help="rfl only: keep degree-2 chains, surface ambiguity")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-pendant", action="store_true",
                   help="geodesic only: ignore pendant edge weights")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("random", help="emit seeded random binary trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--rooted", action="store_true")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("validate", help="check tree invariants")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="timing table for one metric")
    p.add_argument("--metric", required=True, choices=sorted(METRICS))
    p.add_argument("--sizes", required=True, help="comma-separated leaf counts")
    p.add_argument("--reps", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("consensus", help="strict consensus of all trees in FILE")
    p.add_argument("file", metavar="FILE")
    p.set_defaults(func=cmd_consensus)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TreeDistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
