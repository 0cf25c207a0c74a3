import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tree_pool, tree_strategy
from treedist.errors import (
    DomainError,
    EdgeNotFoundError,
    LabelSetMismatchError,
    UnknownLabelError,
    UnrootedInputError,
)
from treedist.generate import all_rooted_binary_trees, random_binary_tree
from treedist.newick import parse_one
from treedist.tree import (
    Split,
    Tree,
    _decontract,
    canonical_key,
    clusters,
    compatible,
    contract,
    count_binary_topologies,
    edge_key,
    is_binary,
    is_identical,
    is_weight_identical,
    restrict,
    splits,
    suppress_degree_two,
    tree_from_clusters,
    tree_from_splits,
    unrooted_view,
    validate,
)


def labset(*labels):
    return frozenset(labels)


class TestValidate:
    def test_minimal_single_leaf(self):
        tree = Tree([], {0: "1"}, root=0, n_vertices=1)
        assert validate(tree) == []

    def test_duplicate_label(self):
        tree = Tree([(0, 1), (0, 2)], {1: "1", 2: "1"}, root=0)
        kinds = {v.kind for v in validate(tree)}
        assert "DuplicateLabel" in kinds

    def test_negative_weight(self):
        tree = Tree([(0, 1), (0, 2)], {1: "1", 2: "2"}, root=0,
                    weights={(0, 1): -0.5, (0, 2): 1.0})
        kinds = {v.kind for v in validate(tree)}
        assert "NegativeWeight" in kinds

    def test_unlabeled_leaf_and_cycle_free(self):
        tree = Tree([(0, 1), (0, 2)], {1: "1"}, root=0)
        kinds = {v.kind for v in validate(tree)}
        assert "UnlabeledLeaf" in kinds

    def test_reserved_root_label(self):
        tree = Tree([(0, 1), (0, 2)], {1: "root", 2: "2"}, root=0)
        kinds = {v.kind for v in validate(tree)}
        assert "ReservedLabel" in kinds

    def test_edge_vertex_count_mismatch(self):
        tree = Tree([(0, 1)], {0: "1", 1: "2"}, n_vertices=3)
        kinds = {v.kind for v in validate(tree)}
        assert "NotATree" in kinds or "Disconnected" in kinds

    def test_parsed_trees_are_valid(self):
        for seed in range(20):
            tree = random_binary_tree(9, seed=seed, rooted=seed % 2 == 0,
                                      weighted=seed % 3 == 0)
            assert validate(tree) == []


class TestClusters:
    def test_two_leaf_cherry(self, t):
        tree = t("(1,2);")
        assert clusters(tree) == {labset("1"), labset("2")}

    def test_three_leaves(self, t):
        assert clusters(t("((1,2),3);")) == {
            labset("1"), labset("2"), labset("3"), labset("1", "2"),
        }

    def test_caterpillar(self, t):
        assert clusters(t("(((1,2),3),4);")) == {
            labset("1"), labset("2"), labset("3"), labset("4"),
            labset("1", "2"), labset("1", "2", "3"),
        }

    def test_rejects_unrooted(self, t):
        with pytest.raises(UnrootedInputError):
            clusters(t("(1,2,3);"))

    def test_edge_cluster_correspondence(self):
        # one cluster per non-root vertex, i.e. per edge
        for seed in range(10):
            tree = random_binary_tree(8, seed=seed, rooted=True)
            assert len(clusters(tree)) == tree.n_edges


class TestSplits:
    def test_partitioning_example(self, t):
        # removing the inner edge separates {1,2} from {3}; removing the
        # pendant edge at 2 separates {2} from {1,3}
        tree = t("((1,2),3);")
        values = set(splits(tree).values())
        assert Split(labset("1", "2"), labset("3")) in values
        assert Split(labset("2"), labset("1", "3")) in values

    def test_two_leaf_single_edge(self):
        tree = Tree([(0, 1)], {0: "1", 1: "2"})
        (split,) = splits(tree).values()
        assert split == Split(labset("1"), labset("2"))

    def test_split_sides_partition_labels(self, t):
        tree = t("((1,2),(3,(4,5)));")
        for sp in splits(tree).values():
            a, b = sp.two_sides()
            assert a | b == tree.label_set
            assert not (a & b)

    def test_cluster_is_one_side_of_split(self, t):
        tree = t("((1,2),(3,(4,5)));")
        cl = clusters(tree)
        for sp in splits(tree).values():
            assert any(side in cl for side in sp.sides)


class TestCompatible:
    def test_self_compatible(self):
        sp = Split(labset("1", "2"), labset("3", "4", "5"))
        assert compatible(sp, sp)

    def test_nested_compatible(self):
        s = labset("1", "2", "3", "4", "5")
        s1 = Split(labset("1", "2"), s - labset("1", "2"))
        s2 = Split(labset("1", "2", "3"), s - labset("1", "2", "3"))
        assert compatible(s1, s2)

    def test_crossing_incompatible(self):
        s = labset("1", "2", "3", "4")
        s1 = Split(labset("1", "2"), labset("3", "4"))
        s2 = Split(labset("1", "3"), labset("2", "4"))
        assert not compatible(s1, s2)

    def test_label_set_mismatch(self):
        s1 = Split(labset("1"), labset("2"))
        s2 = Split(labset("1"), labset("3"))
        with pytest.raises(LabelSetMismatchError):
            compatible(s1, s2)


class TestContract:
    def test_internal_edge_gives_star(self, t):
        tree = unrooted_view(t("((1,2),3);"))
        internal = [e for e, sp in splits(tree).items() if not sp.is_trivial]
        # the 3-leaf unrooted tree is already a star: no internal edges
        assert internal == []
        tree4 = unrooted_view(t("((1,2),(3,4));"))
        (edge,) = [e for e, sp in splits(tree4).items() if not sp.is_trivial]
        star = contract(tree4, edge)
        degrees = sorted(len(star.adj[v]) for v in range(star.n_vertices))
        assert degrees == [1, 1, 1, 1, 4]

    def test_pendant_contraction_merges_label(self, t):
        tree = unrooted_view(t("((1,2),(3,4));"))
        leaf = tree.vertex_by_label["1"]
        inner = tree.adj[leaf][0]
        out = contract(tree, (leaf, inner))
        assert "1" in out.labels.values()
        v1 = out.vertex_by_label["1"]
        assert len(out.adj[v1]) > 1  # label now sits on an internal vertex

    def test_double_contraction_gives_four_star(self, t):
        tree = unrooted_view(t("((1,2),(3,4));"))
        (edge,) = [e for e, sp in splits(tree).items() if not sp.is_trivial]
        out = contract(tree, edge)
        assert max(len(out.adj[v]) for v in range(out.n_vertices)) == 4

    def test_vertex_and_edge_counts_drop_by_one(self, t):
        tree = t("((1,2),(3,4));")
        edge = tree.edge_list[0]
        out = contract(tree, edge)
        assert out.n_vertices == tree.n_vertices - 1
        assert out.n_edges == tree.n_edges - 1

    def test_missing_edge(self, t):
        tree = t("((1,2),3);")
        with pytest.raises(EdgeNotFoundError):
            contract(tree, (0, tree.n_vertices - 1))

    def test_contract_decontract_round_trip(self):
        for seed in range(15):
            tree = random_binary_tree(7, seed=seed, rooted=True)
            internal = [
                e for e in tree.edge_list
                if e[0] not in tree.labels and e[1] not in tree.labels
            ]
            if not internal:
                continue
            u, v = internal[seed % len(internal)]
            if tree.parent[v] == u:
                parent_side, child = u, v
            else:
                parent_side, child = v, u
            moved = [w for w in tree.adj[child] if w != parent_side]
            merged = contract(tree, (parent_side, child))
            # vertex ids above the removed one shifted down by one
            removed = max(edge_key(parent_side, child))
            kept = min(edge_key(parent_side, child))
            moved_new = [w if w < removed else w - 1 for w in moved]
            rebuilt = _decontract(merged, kept, moved_new)
            assert is_identical(rebuilt, tree)


class TestRestrict:
    def test_restrict_to_full_set_is_identity(self, t):
        tree = t("((1,2),(3,4));")
        assert is_identical(restrict(tree, tree.label_set), tree)

    def test_cherry_extraction(self, t):
        out = restrict(t("((1,2),(3,4));"), {"1", "3"})
        assert is_identical(out, t("(1,3);"))

    def test_weight_addition_through_suppression(self, t):
        tree = t("((1:1,2:2):1,3:4);")
        out = restrict(tree, {"1", "3"})
        # path 1..top keeps 1+1, path 3 keeps 4
        v1 = out.vertex_by_label["1"]
        v3 = out.vertex_by_label["3"]
        assert out.weight(out.parent[v1], v1) == 2.0
        assert out.weight(out.parent[v3], v3) == 4.0

    def test_unknown_label(self, t):
        with pytest.raises(UnknownLabelError):
            restrict(t("((1,2),3);"), {"1", "9"})

    def test_restrict_preserves_splits(self):
        for seed in range(10):
            tree = random_binary_tree(8, seed=seed, rooted=False)
            again = restrict(tree, tree.label_set)
            assert set(splits(again).values()) == set(splits(tree).values())


class TestIdentity:
    def test_self_identity(self, t):
        tree = t("((1,2),3);")
        assert is_identical(tree, tree)

    def test_different_clades(self, t):
        assert not is_identical(t("((1,2),3);"), t("((1,3),2);"))

    def test_weight_identity_vs_identity(self, t):
        a = t("((1:1,2:1):1,3:1);")
        b = t("((1:1,2:1):2,3:1);")
        assert is_identical(a, b)
        assert not is_weight_identical(a, b)

    def test_label_set_mismatch(self, t):
        with pytest.raises(LabelSetMismatchError):
            is_identical(t("(1,2);"), t("(1,3);"))

    def test_unrooted_relabeled_vertices(self, t):
        a = parse_one("((1,2),(3,4));", rooted=False)
        b = parse_one("((3,4),(2,1));", rooted=False)
        assert is_identical(a, b)

    @settings(max_examples=40, deadline=None)
    @given(tree_strategy(3, 10), st.integers(0, 5))
    def test_equivalence_relation_on_samples(self, tree, k):
        # reflexive; symmetric against a shuffled-id copy
        assert is_identical(tree, tree)
        relabeled = Tree(
            [(v + 1, w + 1) for v, w in tree.edge_list],
            {v + 1: lab for v, lab in tree.labels.items()},
            root=tree.root + 1,
            n_vertices=tree.n_vertices + 1,
        )
        cleaned = suppress_degree_two(relabeled)  # drops the unused id 0
        assert is_identical(tree, relabeled) == is_identical(relabeled, tree)


class TestCounting:
    def test_paper_values(self):
        assert count_binary_topologies(3) == 3
        assert count_binary_topologies(4) == 15

    def test_trivial_two(self):
        assert count_binary_topologies(2) == 1

    def test_domain_error(self):
        with pytest.raises(DomainError):
            count_binary_topologies(1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
    def test_matches_exhaustive_enumeration(self, n):
        labels = [str(i) for i in range(1, n + 1)]
        forms = {canonical_key(t) for t in all_rooted_binary_trees(labels)}
        assert len(forms) == count_binary_topologies(n)


class TestConstruction:
    def test_tree_from_clusters_round_trip(self):
        for seed in range(10):
            tree = random_binary_tree(8, seed=seed, rooted=True)
            rebuilt = tree_from_clusters(tree.label_set, clusters(tree))
            assert is_identical(rebuilt, tree)

    def test_tree_from_clusters_rejects_crossing(self):
        with pytest.raises(DomainError):
            tree_from_clusters(
                labset("1", "2", "3", "4"),
                [labset("1", "2"), labset("2", "3")],
            )

    def test_tree_from_splits_round_trip(self):
        for seed in range(10):
            tree = random_binary_tree(8, seed=seed, rooted=False, weighted=True)
            internal = {
                sp: tree.weights[e]
                for e, sp in splits(tree).items()
                if not sp.is_trivial
            }
            pendants = {}
            for e, sp in splits(tree).items():
                if sp.is_trivial:
                    (leaf,) = min(sp.sides, key=len)
                    pendants[leaf] = tree.weights[e]
            rebuilt = tree_from_splits(tree.label_set, internal, pendants)
            assert is_weight_identical(rebuilt, tree)


class TestNormalization:
    def test_suppress_chain(self):
        # path 1 - a - b - 2 collapses to a single edge
        tree = Tree([(0, 2), (2, 3), (3, 1)], {0: "1", 1: "2"},
                    weights={(0, 2): 1.0, (2, 3): 2.0, (3, 1): 3.0})
        out = suppress_degree_two(tree)
        assert out.n_vertices == 2
        assert out.weights[out.edge_list[0]] == 6.0

    def test_unrooted_view_of_rooted(self, t):
        tree = t("((1,2),3);")
        out = unrooted_view(tree)
        assert not out.is_rooted
        assert out.n_vertices == 4  # degree-2 root suppressed

    def test_is_binary(self, t):
        assert is_binary(t("((1,2),(3,4));"))
        assert not is_binary(t("(1,2,3);", rooted=True))
        assert is_binary(parse_one("((1,2),3,(4,5));", rooted=False))
