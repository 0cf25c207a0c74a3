"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest -s tests/test_acceptance.py`` to watch).

Every tolerance is pinned here; nothing is deferred to later calibration.
"""

import math
import random
import time
from collections import deque
from itertools import combinations

import pytest

from treedist import cli
from treedist.compare import ccc, similarity_probability_distance
from treedist.errors import AmbiguousMatchingError
from treedist.generate import (
    all_rooted_binary_trees,
    random_binary_tree,
    random_tree_pair,
)
from treedist.geodesic import (
    cone_path_length,
    decompose,
    geodesic_distance,
    geodesic_oracle,
)
from treedist.newick import parse, parse_one, serialize
from treedist.quartets import categorize, quartet_distance, triplet_distance
from treedist.rf import metric_axioms_report, rf_distance, rf_distance_oracle, rfl_distance
from treedist.spr import spr_distance_bfs, spr_distance_maf, spr_neighbors
from treedist.tree import (
    Tree,
    canonical_key,
    count_binary_topologies,
    is_identical,
    is_weight_identical,
    suppress_degree_two,
)


def _report(number, description):
    def decorator(fn):
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number:2d} FAIL - {description}")
                raise
            print(f"ACCEPTANCE {number:2d} PASS - {description}")

        wrapper.__name__ = fn.__name__
        return wrapper

    return decorator


@_report(1, "RF fast path equals the oracle on 500 pairs per n in 4..64, under 10 s")
def test_criterion_01_rf_oracle_equivalence():
    start = time.perf_counter()
    pairs = 0
    for n in range(4, 65):
        for seed in range(500):
            a, b = random_tree_pair(n, seed=seed ^ (n << 16), rooted=True)
            assert rf_distance(a, b) == rf_distance_oracle(a, b), (n, seed)
            pairs += 1
    elapsed = time.perf_counter() - start
    assert pairs == 500 * 61
    assert elapsed < 10.0, f"took {elapsed:.1f} s"


@_report(2, "closed-form counts: 3 and 15 topologies; 10,000 samples hit all 15")
def test_criterion_02_closed_forms(capsys):
    assert count_binary_topologies(3) == 3
    assert count_binary_topologies(4) == 15
    code = cli.main(["random", "--n=4", "--count=10000", "--seed=0", "--rooted"])
    out = capsys.readouterr().out
    assert code == 0
    seen = {canonical_key(t) for t in parse(out)}
    with capsys.disabled():
        assert len(seen) == 15


@_report(3, "geodesic worked values: 2.0 exact and 2*sqrt(2) within 1e-9")
def test_criterion_03_geodesic_worked_values():
    a = parse_one("((1:1,2:1):1,3:1,4:1);", rooted=False)
    b = parse_one("((1:1,3:1):1,2:1,4:1);", rooted=False)
    assert geodesic_distance(a, b).length == 2.0

    a2 = parse_one("((1:1,2:1):1,3:1,(4:1,(5:1,6:1):1):1);", rooted=False)
    b2 = parse_one("((1:1,3:1):1,2:1,(5:1,(4:1,6:1):1):1);", rooted=False)
    got = geodesic_distance(a2, b2).length
    assert abs(got - 2.0 * math.sqrt(2.0)) <= 1e-9
    assert abs(got - geodesic_oracle(a2, b2)) <= 1e-9


@_report(4, "geodesic sandwich bounds and oracle agreement on 200 weighted pairs")
def test_criterion_04_geodesic_oracle():
    checked = 0
    seed = 0
    while checked < 200:
        seed += 1
        rooted = seed % 2 == 0
        n = 4 + seed % 4 if rooted else 5 + seed % 4
        a, b = random_tree_pair(n, seed=seed * 7919, rooted=rooted, weighted=True)
        common, au, bu = decompose(a, b)
        if len(au.entries) > 5 or len(bu.entries) > 5:
            continue
        res = geodesic_distance(a, b)
        oracle = geodesic_oracle(a, b)
        assert abs(res.length - oracle) <= 1e-9, (seed, res.length, oracle)
        quad = sum((wa - wb) ** 2 for wa, wb in common.values())
        quad += sum(
            (au.leaf_weights.get(k, 0.0) - bu.leaf_weights.get(k, 0.0)) ** 2
            for k in set(au.leaf_weights) | set(bu.leaf_weights)
        )
        lower = math.sqrt(quad + au.norm**2 + bu.norm**2)
        upper = math.sqrt(quad + (cone_path_length(au, bu)) ** 2)
        assert lower - 1e-9 <= res.length <= upper + 1e-9, seed
        checked += 1


@_report(5, "metric axioms on 100 seeded triples per metric; raw RFL pathology flagged")
def test_criterion_05_metric_axioms():
    cases = [
        ("rf", rf_distance, True, 8, False, 0.0, is_identical),
        ("triplet", triplet_distance, True, 7, False, 0.0, is_identical),
        ("quartet", quartet_distance, False, 7, False, 0.0, is_identical),
        (
            "node",
            lambda a, b: __import__("treedist.compare", fromlist=["node_distance"]).node_distance(a, b, 1),
            True,
            8,
            False,
            1e-12,
            is_identical,
        ),
        (
            "geodesic",
            lambda a, b: geodesic_distance(a, b).length,
            False,
            6,
            True,
            1e-9,
            is_weight_identical,
        ),
        ("spr", lambda a, b: spr_distance_maf(a, b)[0], True, 5, False, 0.0, is_identical),
    ]
    for name, dist, rooted, n, weighted, tol, identity in cases:
        rng = random.Random(hash(name) & 0xFFFF)
        for trial in range(100):
            sample = [
                random_binary_tree(n, rng=rng, rooted=rooted, weighted=weighted)
                for _ in range(3)
            ]
            report = metric_axioms_report(sample, distance=dist, identity=identity, tol=tol)
            assert report.ok, (name, trial, report.violations)

    # the raw-mode pathology: chain against single edge, non-unique matching
    a = Tree([(0, 1)], {0: "1", 1: "2"}, weights={(0, 1): 1.0})
    b = Tree([(0, 2), (2, 1)], {0: "1", 1: "2"},
             weights={(0, 2): 1.0, (2, 1): 2.0})
    with pytest.raises(AmbiguousMatchingError) as excinfo:
        rfl_distance(a, b, raw=True)
    candidates = excinfo.value.candidates
    assert len(candidates) == 2
    reverse = rfl_distance(b, a, raw=True).value
    # not all forward candidates equal the reverse value: asymmetry exposed
    assert any(abs(c - reverse) > 0 for c in candidates)
    # and with unit weights the identity of indiscernibles fails outright
    b_unit = Tree([(0, 2), (2, 1)], {0: "1", 1: "2"},
                  weights={(0, 2): 1.0, (2, 1): 1.0})
    assert rfl_distance(b_unit, a, raw=True).value == 0.0


@_report(6, "SPR: forest count matches BFS on all 5-leaf pairs and 200 6-leaf pairs")
def test_criterion_06_spr_cross_validation():
    start = time.perf_counter()
    trees = {canonical_key(t): t for t in all_rooted_binary_trees("12345")}
    assert len(trees) == 105
    adjacency = {
        key: {canonical_key(o) for o in spr_neighbors(tree)}
        for key, tree in trees.items()
    }

    def bfs_from(source):
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in adjacency[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    keys = list(trees)
    graph_dist = {}
    for key in keys:
        d = bfs_from(key)
        assert len(d) == 105  # move graph is connected
        graph_dist[key] = d

    for ka, kb in combinations(keys, 2):
        dm, forest = spr_distance_maf(trees[ka], trees[kb])
        assert dm == graph_dist[ka][kb], (ka, kb)

    # tie the per-pair BFS entry point to the graph distances on a sample
    rng = random.Random(42)
    for _ in range(25):
        ka, kb = rng.sample(keys, 2)
        assert spr_distance_bfs(trees[ka], trees[kb]) == graph_dist[ka][kb]

    for seed in range(200):
        a, b = random_tree_pair(6, seed=seed * 613, rooted=True)
        assert spr_distance_maf(a, b)[0] == spr_distance_bfs(a, b), seed

    elapsed = time.perf_counter() - start
    assert elapsed < 300.0, f"took {elapsed:.1f} s"


@_report(7, "category table conservation holds exactly on every invocation")
def test_criterion_07_category_conservation():
    def binom(n, k):
        out = 1
        for i in range(k):
            out = out * (n - i) // (i + 1)
        return out

    # categorize raises internally when the cells leak; verify the totals
    # across shapes: binary, stars, multifurcations, rooted and unrooted
    for n in (4, 5, 6, 7, 8, 10):
        for seed in range(10):
            a, b = random_tree_pair(n, seed=seed * 31 + n, rooted=True)
            assert categorize(a, b, 3).total == binom(n, 3)
            ua, ub = random_tree_pair(n, seed=seed * 37 + n, rooted=False)
            assert categorize(ua, ub, 4).total == binom(n, 4)
    star5 = parse_one("(1,2,3,4,5);", rooted=True)
    assert categorize(star5, star5, 3).both_unresolved == binom(5, 3)
    ustar = parse_one("(1,2,3,4,5);", rooted=False)
    caterpillar = parse_one("((((1,2),3),4),5);", rooted=False)
    table = categorize(ustar, caterpillar, 4)
    assert table.total == binom(5, 4)
    assert table.second_resolved_only == binom(5, 4)


@_report(8, "RF at n=100000 under 1 s median; doubling above 10^4 stays within 2.5x")
def test_criterion_08_performance_smoke():
    rows = cli.bench_metric("rf", [10_000, 20_000, 40_000], reps=7)
    medians = {n: med for n, med in rows}
    assert medians[20_000] <= 2.5 * medians[10_000], medians
    assert medians[40_000] <= 2.5 * medians[20_000], medians
    assert medians[20_000] >= medians[10_000] * 0.5  # sanity: monotone-ish

    (row,) = cli.bench_metric("rf", [100_000], reps=5)
    assert row[1] < 1.0, f"median {row[1]:.3f} s"


@_report(9, "Newick round-trip preserves weighted identity on 1,000 random trees")
def test_criterion_09_round_trip():
    rng = random.Random(2024)
    for trial in range(1000):
        rooted = trial % 2 == 0
        n = rng.randint(2 if rooted else 3, 64)
        tree = random_binary_tree(n, rng=rng, rooted=rooted, weighted=True)
        again = parse_one(serialize(tree))
        assert is_weight_identical(tree, again), trial


@_report(10, "correlation and similarity stay inside their ranges, rescale-exact")
def test_criterion_10_ccc_sim_bounds():
    rng = random.Random(7)
    checked_ccc = checked_sim = 0
    for trial in range(100):
        n = rng.randint(4, 10)
        a, b = random_tree_pair(n, seed=trial * 101, rooted=True, weighted=True)
        val = ccc(a, b)
        assert -1.0 - 1e-12 <= val <= 1.0 + 1e-12
        assert ccc(a, a) == pytest.approx(1.0)
        checked_ccc += 1

        sim = similarity_probability_distance(a, b)
        assert 0.0 <= sim <= 1.0
        assert similarity_probability_distance(a, a) == pytest.approx(0.0)
        scaled = Tree(
            a.edge_list,
            a.labels,
            root=a.root,
            weights={e: w * 3.0 for e, w in a.weights.items()},
        )
        assert similarity_probability_distance(scaled, b) == sim
        checked_sim += 1
    assert checked_ccc == checked_sim == 100
