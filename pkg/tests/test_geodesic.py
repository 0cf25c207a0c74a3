import math
import random

import pytest

from treedist.errors import (
    DomainError,
    RootednessError,
    TooLargeError,
    UnweightedInputError,
)
from treedist.generate import random_binary_tree, random_tree_pair
from treedist.geodesic import (
    SplitSet,
    cone_path_length,
    decompose,
    geodesic_distance,
    geodesic_oracle,
    interior_point,
    verify_support,
)
from treedist.newick import parse_one
from treedist.tree import (
    Split,
    is_weight_identical,
    splits,
    suppress_degree_two,
    unrooted_view,
)


def quad_part(a, b, include_pendant=True):
    common, au, bu = decompose(a, b)
    q = sum((wa - wb) ** 2 for wa, wb in common.values())
    if include_pendant:
        q += sum(
            (au.leaf_weights.get(lab, 0.0) - bu.leaf_weights.get(lab, 0.0)) ** 2
            for lab in set(au.leaf_weights) | set(bu.leaf_weights)
        )
    return q


class TestConePath:
    def test_empty_sets(self):
        assert cone_path_length(SplitSet(), SplitSet()) == 0.0

    def test_unit_incompatible_pair(self):
        a = parse_one("((1:1,2:1):1,3:1,4:1);", rooted=False)
        b = parse_one("((1:1,3:1):1,2:1,4:1);", rooted=False)
        _, au, bu = decompose(a, b)
        assert cone_path_length(au, bu) == 2.0

    def test_norms_three_four(self):
        s = frozenset("1234")
        sp1 = Split({"1", "2"}, {"3", "4"})
        sp2 = Split({"1", "3"}, {"2", "4"})
        assert cone_path_length(SplitSet({sp1: 3.0}), SplitSet({sp2: 4.0})) == 7.0


class TestDecompose:
    def test_identical_topologies_all_common(self):
        tree = random_binary_tree(7, seed=1, rooted=False, weighted=True)
        common, au, bu = decompose(tree, tree)
        assert not au.entries and not bu.entries
        assert len(common) == len(
            [s for s in splits(tree).values() if not s.is_trivial]
        )

    def test_disjoint_topologies_nothing_common(self):
        a = parse_one("((1:1,2:1):1,(3:1,4:1):1,5:1);", rooted=False)
        b = parse_one("((1:1,3:1):1,(2:1,4:1):1,5:1);", rooted=False)
        common, au, bu = decompose(a, b)
        assert not common
        assert len(au.entries) == 2 and len(bu.entries) == 2

    def test_shared_single_split(self):
        a = parse_one("((1:1,2:1):2,3:1,(4:1,5:1):3);", rooted=False)
        b = parse_one("((1:1,2:1):5,4:1,(3:1,5:1):7);", rooted=False)
        common, au, bu = decompose(a, b)
        assert list(common.values()) == [(2.0, 5.0)]
        assert len(au.entries) == 1 and len(bu.entries) == 1


class TestWorkedValues:
    def test_single_incompatible_pair_is_two(self):
        a = parse_one("((1:1,2:1):1,3:1,4:1);", rooted=False)
        b = parse_one("((1:1,3:1):1,2:1,4:1);", rooted=False)
        res = geodesic_distance(a, b)
        assert res.length == 2.0
        assert geodesic_oracle(a, b) == 2.0

    def test_two_independent_pairs_is_two_root_two(self):
        a = parse_one("((1:1,2:1):1,3:1,(4:1,(5:1,6:1):1):1);", rooted=False)
        b = parse_one("((1:1,3:1):1,2:1,(5:1,(4:1,6:1):1):1);", rooted=False)
        res = geodesic_distance(a, b)
        assert abs(res.length - 2.0 * math.sqrt(2.0)) < 1e-9
        assert abs(res.length - geodesic_oracle(a, b)) < 1e-9


class TestAgainstOracle:
    def test_random_pairs(self):
        checked = 0
        for rooted in (False, True):
            for n in (4, 5, 6):
                for seed in range(20):
                    a, b = random_tree_pair(
                        n, seed=seed * 1009 + n, rooted=rooted, weighted=True
                    )
                    res = geodesic_distance(a, b)
                    oracle = geodesic_oracle(a, b)
                    assert abs(res.length - oracle) <= 1e-9
                    checked += 1
        assert checked == 120

    def test_oracle_refuses_large(self):
        a, b = random_tree_pair(12, seed=0, rooted=False, weighted=True)
        with pytest.raises(TooLargeError):
            geodesic_oracle(a, b, max_unique=5)

    def test_single_block_support_is_cone(self):
        a = parse_one("((1:1,2:1):2,3:1,4:1);", rooted=False)
        b = parse_one("((1:1,3:1):3,2:1,4:1);", rooted=False)
        res = geodesic_distance(a, b)
        _, au, bu = decompose(a, b)
        assert res.internal_length == pytest.approx(cone_path_length(au, bu))


class TestInvariants:
    def test_sandwich_bounds(self):
        for seed in range(40):
            a, b = random_tree_pair(7, seed=seed, rooted=False, weighted=True)
            res = geodesic_distance(a, b)
            _, au, bu = decompose(a, b)
            q = quad_part(a, b)
            lower = math.sqrt(q + au.norm**2 + bu.norm**2)
            upper = math.sqrt(q + (au.norm + bu.norm) ** 2)
            assert lower - 1e-9 <= res.length <= upper + 1e-9

    def test_support_satisfies_all_conditions(self):
        for seed in range(30):
            a, b = random_tree_pair(8, seed=seed * 3, rooted=False, weighted=True)
            res = geodesic_distance(a, b)
            assert verify_support(res) == []

    def test_identity_of_indiscernibles(self):
        for seed in range(10):
            a, b = random_tree_pair(6, seed=seed, rooted=False, weighted=True)
            assert geodesic_distance(a, a).length == 0.0
            if not is_weight_identical(suppress_degree_two(a), suppress_degree_two(b)):
                assert geodesic_distance(a, b).length > 0

    def test_symmetry_and_triangle(self):
        rng = random.Random(7)
        for trial in range(25):
            trees = [
                random_binary_tree(6, rng=rng, rooted=False, weighted=True)
                for _ in range(3)
            ]
            d01 = geodesic_distance(trees[0], trees[1]).length
            d10 = geodesic_distance(trees[1], trees[0]).length
            assert abs(d01 - d10) <= 1e-12
            d12 = geodesic_distance(trees[1], trees[2]).length
            d02 = geodesic_distance(trees[0], trees[2]).length
            assert d02 <= d01 + d12 + 1e-9

    def test_monotone_refinement_never_beats_oracle(self):
        # every refinement step only shortens the path, so the result can
        # never undercut the true minimum
        for seed in range(15):
            a, b = random_tree_pair(6, seed=seed + 500, rooted=False, weighted=True)
            assert geodesic_distance(a, b).length >= geodesic_oracle(a, b) - 1e-9

    def test_pendant_flag(self):
        # same topology, only pendant weights differ
        a = parse_one("((1:1,2:1):1,3:1,4:1);", rooted=False)
        b = parse_one("((1:2,2:1):1,3:1,4:1);", rooted=False)
        assert geodesic_distance(a, b).length == 1.0
        assert geodesic_distance(a, b, include_pendant=False).length == 0.0

    def test_requires_weights_and_consistent_rooting(self, t):
        with pytest.raises(UnweightedInputError):
            geodesic_distance(t("((1,2),3);"), t("((1,2),3);"))
        a = t("((1:1,2:1):1,3:1);")
        b = parse_one("((1:1,2:1):1,3:1,4:1);", rooted=False)
        with pytest.raises(Exception):
            geodesic_distance(a, b)


class TestInteriorPoint:
    def test_endpoints(self):
        a, b = random_tree_pair(6, seed=9, rooted=False, weighted=True)
        res = geodesic_distance(a, b)
        assert is_weight_identical(interior_point(res, 0.0), suppress_degree_two(a))
        assert is_weight_identical(interior_point(res, 1.0), suppress_degree_two(b))

    def test_rooted_endpoints(self):
        a, b = random_tree_pair(6, seed=11, rooted=True, weighted=True)
        res = geodesic_distance(a, b)
        assert is_weight_identical(interior_point(res, 0.0), suppress_degree_two(a))
        assert is_weight_identical(interior_point(res, 1.0), suppress_degree_two(b))

    def test_domain(self):
        a, b = random_tree_pair(5, seed=1, rooted=False, weighted=True)
        res = geodesic_distance(a, b)
        with pytest.raises(DomainError):
            interior_point(res, 1.5)

    def test_cone_boundary_is_starlike(self):
        # unique splits all vanish exactly where the cone path crosses the
        # shared face
        a = parse_one("((1:1,2:1):1,3:1,4:1);", rooted=False)
        b = parse_one("((1:1,3:1):1,2:1,4:1);", rooted=False)
        res = geodesic_distance(a, b)
        ((_, _, na, nb),) = res.legs
        t_star = na / (na + nb)
        mid = interior_point(res, t_star)
        assert all(sp.is_trivial for sp in splits(mid).values())

    def test_path_length_additivity(self):
        # distance from a to the midpoint plus midpoint to b equals the
        # total length (the path is a geodesic)
        a, b = random_tree_pair(6, seed=21, rooted=False, weighted=True)
        res = geodesic_distance(a, b)
        mid = interior_point(res, 0.5)
        left = geodesic_distance(suppress_degree_two(a), mid).length
        right = geodesic_distance(mid, suppress_degree_two(b)).length
        assert left + right == pytest.approx(res.length, abs=1e-9)
        assert left == pytest.approx(right, abs=1e-9)
