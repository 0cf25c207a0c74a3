import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tree_strategy
from treedist.errors import (
    DuplicateLabelError,
    EmptyInputError,
    NegativeWeightError,
    NewickSyntaxError,
)
from treedist.newick import NewickWarning, parse, parse_one, serialize
from treedist.tree import clusters, is_identical, is_weight_identical, validate


class TestParse:
    def test_smallest_nested_case(self):
        tree = parse_one("((1,2),3);")
        assert tree.is_rooted
        assert frozenset({"1", "2"}) in clusters(tree)

    def test_weighted(self):
        tree = parse_one("((1:0.5,2:0.5):0.5,3:1.0);")
        v1 = tree.vertex_by_label["1"]
        inner = tree.parent[v1]
        assert tree.weight(inner, v1) == 0.5
        assert tree.weight(tree.root, inner) == 0.5
        assert tree.weight(tree.root, tree.vertex_by_label["3"]) == 1.0

    def test_single_child_group_strict_vs_lenient(self):
        with pytest.raises(NewickSyntaxError):
            parse_one("((1,2,3));", strict=True)
        tree = parse_one("((1,2,3));", strict=False)
        assert not tree.is_rooted
        assert tree.n_vertices == 4

    def test_rootedness_rule(self):
        assert parse_one("((1,2),3);").is_rooted
        assert not parse_one("(1,2,3);").is_rooted
        assert parse_one("(1,2,3);", rooted=True).is_rooted
        assert not parse_one("((1,2),3);", rooted=False).is_rooted

    def test_quoted_labels(self):
        tree = parse_one("('a b','it''s',c);")
        assert tree.label_set == {"a b", "it's", "c"}

    def test_scientific_notation_weight(self):
        tree = parse_one("(1:1e-3,2:2.5E2,3:1);")
        weights = sorted(tree.weights.values())
        assert weights == [0.001, 1.0, 250.0]

    def test_negative_weight_rejected(self):
        with pytest.raises(NegativeWeightError):
            parse_one("(1:-0.5,2:1,3:1);")

    def test_duplicate_label_rejected(self):
        with pytest.raises(DuplicateLabelError):
            parse_one("((1,1),3);")

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            parse("   \n ")

    def test_syntax_error_carries_position(self):
        with pytest.raises(NewickSyntaxError) as err:
            parse_one("((1,2),3;")
        assert err.value.line == 1
        assert err.value.column > 1

    def test_internal_labels_dropped_with_warning(self):
        with pytest.warns(NewickWarning):
            tree = parse_one("((1,2)anc,3);")
        assert tree.label_set == {"1", "2", "3"}

    def test_multiple_trees_and_positions(self):
        doc = parse("(1,2,3);\n((1,2),3);")
        assert len(doc) == 2
        assert doc.source_positions[0] == 0
        assert doc.source_positions[1] > 0
        assert not doc[0].is_rooted
        assert doc[1].is_rooted

    def test_single_leaf(self):
        tree = parse_one("alpha;")
        assert tree.n_vertices == 1
        assert tree.label_set == {"alpha"}

    def test_whitespace_between_tokens(self):
        tree = parse_one(" ( ( 1 , 2 ) , 3 ) ; ")
        assert tree.label_set == {"1", "2", "3"}

    def test_parsed_trees_validate(self):
        doc = parse("((a:1,b:2):0.5,(c:1,d:1):0.25);((a,b),(c,d));")
        for tree in doc:
            assert validate(tree) == []


class TestSerialize:
    def test_canonical_order_already_sorted(self):
        assert serialize(parse_one("((1,2),3);")) == "((1,2),3);"

    def test_canonicalization_reorders_children(self):
        assert serialize(parse_one("((2,1),3);")) == "((1,2),3);"

    def test_weighted_round_trip_precision(self):
        tree = parse_one("((1:0.123456,2:0.5):0.25,3:1.0);")
        text = serialize(tree, precision=6)
        again = parse_one(text)
        assert is_weight_identical(tree, again)

    def test_unweighted_has_no_colons(self):
        assert ":" not in serialize(parse_one("((1,2),3);"))

    def test_unrooted_top_level_degree(self):
        tree = parse_one("((1,2),3,(4,5));")
        text = serialize(tree)
        assert not parse_one(text).is_rooted

    def test_deterministic_for_weight_identical_trees(self):
        a = parse_one("((2:1,1:2):1,3:1);")
        b = parse_one("((1:2,2:1):1.0,3:1);")
        assert serialize(a) == serialize(b)

    def test_deep_tree_no_recursion_limit(self):
        n = 5000
        text = "(" * (n - 1) + "1," + ",".join(
            f"{i})" for i in range(2, n + 1)
        ) + ";"
        tree = parse_one(text)
        assert len(tree.label_set) == n
        assert parse_one(serialize(tree)).label_set == tree.label_set


class TestRoundTrip:
    @settings(max_examples=60, deadline=None)
    @given(tree_strategy(2, 64, rooted=True, weighted=True))
    def test_rooted_weighted_round_trip(self, tree):
        assert is_weight_identical(parse_one(serialize(tree)), tree)

    @settings(max_examples=40, deadline=None)
    @given(tree_strategy(3, 64, rooted=False, weighted=True))
    def test_unrooted_weighted_round_trip(self, tree):
        assert is_weight_identical(parse_one(serialize(tree)), tree)

    @settings(max_examples=40, deadline=None)
    @given(tree_strategy(2, 32, rooted=True, weighted=False))
    def test_serialization_is_deterministic(self, tree):
        assert serialize(tree) == serialize(parse_one(serialize(tree)))

    @settings(max_examples=60, deadline=None)
    @given(tree_strategy(3, 24, rooted=True), st.data())
    def test_unbalanced_paren_mutations_rejected(self, tree, data):
        text = serialize(tree)
        positions = [i for i, c in enumerate(text) if c not in "()"]
        pos = data.draw(st.sampled_from(positions))
        flip = data.draw(st.sampled_from("()"))
        mutated = text[:pos] + flip + text[pos + 1:]
        # swapping one non-paren byte for a paren always unbalances
        with pytest.raises((NewickSyntaxError, DuplicateLabelError)):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                parse(mutated)
