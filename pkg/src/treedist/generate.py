"""Random and exhaustive tree generation for tests, benchmarks and the CLI.

Random binary trees grow by sequential leaf insertion: a rooted tree with k
leaves offers 2k-1 insertion points (every edge, plus a new vertex above the
root), an unrooted one offers its 2k-3 edges.  Every labeled topology arises
from exactly one insertion sequence, so uniform choices give the uniform
distribution over the (2n-3)!! rooted / (2n-5)!! unrooted binary shapes.
"""

from __future__ import annotations

import random
from typing import Iterator

from .errors import DomainError
from .tree import Tree, edge_key

#: leaf labels are "1", "2", ... by default, matching common usage
def default_labels(n: int) -> list:
    return [str(i) for i in range(1, n + 1)]


def random_binary_tree(
    n: int,
    seed=0,
    rooted: bool = False,
    weighted: bool = False,
    labels=None,
    rng: random.Random | None = None,
) -> Tree:
    """Uniform random binary tree on n leaves.

    Weights, when requested, are independent uniform draws from (0, 1] for
    every edge.  Passing an ``rng`` reuses a caller-owned stream (the seed is
    then ignored), which is what the CLI does to emit reproducible batches.
    """
    if n < 2:
        raise DomainError("need at least two leaves")
    if rng is None:
        rng = random.Random(seed)
    if labels is None:
        labels = default_labels(n)
    if len(labels) != n:
        raise DomainError("label count does not match n")

    # edges kept in a mutable list so subdivision is O(1): replace the hit
    # edge in place and append the two new ones
    edges: list[list[int]] = [[0, 1]]
    label_map = {0: labels[0], 1: labels[1]}
    next_vertex = 2
    root = None

    if rooted:
        root = next_vertex
        edges = [[root, 0], [root, 1]]
        next_vertex += 1

    rnd = rng.random
    for i in range(2, n):
        leaf = next_vertex
        label_map[leaf] = labels[i]
        next_vertex += 1
        n_slots = len(edges) + (1 if rooted else 0)
        slot = int(rnd() * n_slots)  # cheaper than randrange at this volume
        if rooted and slot == len(edges):
            # new root above the old one
            new_root = next_vertex
            next_vertex += 1
            edges.append([new_root, root])
            edges.append([new_root, leaf])
            root = new_root
        else:
            u, v = edges[slot]
            mid = next_vertex
            next_vertex += 1
            edges[slot] = [u, mid]
            edges.append([mid, v])
            edges.append([mid, leaf])

    weights = None
    if weighted:
        weights = {edge_key(u, v): 1.0 - rnd() for u, v in edges}
    return Tree(edges, label_map, root=root, weights=weights,
                n_vertices=next_vertex)


def random_tree_pair(n, seed=0, rooted=False, weighted=False, labels=None):
    """Two independent random trees over one label set and seed stream."""
    rng = random.Random(seed)
    if labels is None:
        labels = default_labels(n)
    a = random_binary_tree(n, rooted=rooted, weighted=weighted, labels=labels, rng=rng)
    b = random_binary_tree(n, rooted=rooted, weighted=weighted, labels=labels, rng=rng)
    return a, b


def all_rooted_binary_trees(labels) -> Iterator[Tree]:
    """Every rooted binary topology on the given labels, one per identity.

    Recursive leaf insertion; (2n-3)!! trees, so keep n small (n <= 7 is
    5,105 trees and fine, n = 8 is 135,135).
    """
    labels = list(labels)
    n = len(labels)
    if n < 2:
        raise DomainError("need at least two labels")

    def grow(tree: Tree, i: int) -> Iterator[Tree]:
        if i == n:
            yield tree
            return
        lab = labels[i]
        n_edges = len(tree.edge_list)
        for slot in range(n_edges + 1):
            nv = tree.n_vertices
            leaf, mid = nv, nv + 1
            label_map = dict(tree.labels)
            label_map[leaf] = lab
            if slot == n_edges:
                new_edges = list(tree.edge_list) + [(mid, tree.root), (mid, leaf)]
                root = mid
            else:
                u, v = tree.edge_list[slot]
                new_edges = [e for k, e in enumerate(tree.edge_list) if k != slot]
                new_edges += [(u, mid), (mid, v), (mid, leaf)]
                root = tree.root
            yield from grow(
                Tree(new_edges, label_map, root=root, n_vertices=nv + 2), i + 1
            )

    base = Tree([(2, 0), (2, 1)], {0: labels[0], 1: labels[1]}, root=2)
    yield from grow(base, 2)
