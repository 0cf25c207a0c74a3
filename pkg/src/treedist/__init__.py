"""treedist: distances between leaf-labeled trees.

Topological and length-aware comparison of rooted and unrooted dendrograms:
Robinson-Foulds and strict consensus, Robinson-Foulds Length, quartet and
triplet counts, tree-space geodesics, maximum agreement subtrees, Align,
cophenetic correlation, node distance, probability-based similarity, and
subtree prune-and-regraft via maximum agreement forests.  Exact brute-force
oracles back every fast path at desk scale.
"""

from .errors import TreeDistError
from .newick import NewickDocument, parse, parse_one, serialize
from .tree import (
    Split,
    Tree,
    canonical_key,
    clusters,
    compatible,
    contract,
    count_binary_topologies,
    is_identical,
    is_weight_identical,
    restrict,
    splits,
    suppress_degree_two,
    unrooted_view,
    validate,
)

__all__ = [
    "NewickDocument",
    "Split",
    "Tree",
    "TreeDistError",
    "canonical_key",
    "clusters",
    "compatible",
    "contract",
    "count_binary_topologies",
    "is_identical",
    "is_weight_identical",
    "parse",
    "parse_one",
    "restrict",
    "serialize",
    "splits",
    "suppress_degree_two",
    "unrooted_view",
    "validate",
]

__version__ = "0.1.0"
