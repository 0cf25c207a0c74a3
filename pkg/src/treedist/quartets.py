"""Quartet and triplet distances via induced-subtree categorization.

Every 4-subset of the labels induces one of three resolved pairings or a
star in an unrooted tree; every 3-subset does the same in a rooted tree.
Comparing the induced shapes across two trees buckets each subset into one
of five cells:

    A  resolved in both, same shape        (agree)
    B  resolved in both, different shape   (disagree)
    C  resolved in the first only
    D  resolved in the second only
    E  unresolved in both

and the distance is B + C + D.  The cells always sum to C(n, k); that
conservation is asserted on every call.

The enumeration is the reference implementation (cubic for triplets,
quartic for quartets).  Per-subset shapes come from closed-form tests on
precomputed leaf-to-leaf paths: a quartet resolves as ij|kl exactly when
d(i,j) + d(k,l) is strictly smaller than the other two pairings' sums, and
a rooted triplet's cherry is the pair whose ancestor sits strictly deeper
than the joint ancestor.  ``induced_topology`` is the literal
restrict-and-classify reading, kept as the cross-check.

The weighted variant accumulates, over triplets whose shapes agree, the
path-length differences anchored at the cherry pair (smaller label first);
disagreeing triplets contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import (
    RootednessError,
    SubsetSizeError,
    UnweightedInputError,
)
from .tree import (
    Tree,
    _require_same_labels,
    edge_key,
    restrict,
    unrooted_view,
)


@dataclass(frozen=True)
class SubsetTopology:
    """Shape a tree induces on one 3- or 4-subset of its labels.

    ``pairing`` is None for stars; for resolved shapes it holds the cherry
    pair, canonicalized as the side containing the smallest label so the
    three possible quartet pairings compare cleanly.
    """

    resolved: bool
    pairing: frozenset | None = None

    @staticmethod
    def star():
        return SubsetTopology(False, None)

    @staticmethod
    def cherry(x, y):
        return SubsetTopology(True, frozenset((x, y)))


def _canonical_quartet_pairing(subset, pair) -> frozenset:
    lo = min(subset)
    if lo in pair:
        return frozenset(pair)
    return frozenset(set(subset) - set(pair))


def induced_topology(tree: Tree, subset) -> SubsetTopology:
    """Restrict the tree to the subset and read off the shape.

    Rooted trees take 3-subsets, unrooted trees take 4-subsets.  This is
    the literal definition; the bulk counting below reproduces it through
    distance arithmetic and the two are cross-checked in the test suite.
    """
    subset = sorted(set(subset))
    if tree.is_rooted:
        if len(subset) != 3:
            raise SubsetSizeError("rooted trees induce topologies on 3-subsets")
    else:
        if len(subset) != 4:
            raise SubsetSizeError("unrooted trees induce topologies on 4-subsets")

    sub = restrict(tree, subset)
    if tree.is_rooted:
        top_kids = sub.children[sub.root]
        if len(top_kids) == 3:
            return SubsetTopology.star()
        if len(top_kids) != 2:
            raise RootednessError("unexpected restricted shape")
        for c in top_kids:
            if sub.children[c]:
                pair = [sub.labels[g] for g in sub.children[c]]
                return SubsetTopology.cherry(*pair)
        return SubsetTopology.star()
    internal = [v for v in range(sub.n_vertices) if sub.degree(v) >= 3]
    if len(internal) <= 1:
        return SubsetTopology.star()
    a, b = internal
    pair = [sub.labels[w] for w in sub.adj[a] if w != b]
    return SubsetTopology(True, _canonical_quartet_pairing(subset, pair))


@dataclass
class CategoryTable:
    """The five-cell census of subset shapes across two trees."""

    agree: int = 0                 # A: resolved in both, same pairing
    disagree: int = 0              # B: resolved in both, different pairing
    first_resolved_only: int = 0   # C
    second_resolved_only: int = 0  # D
    both_unresolved: int = 0       # E
    subset_size: int = 0

    @property
    def total(self) -> int:
        return (
            self.agree
            + self.disagree
            + self.first_resolved_only
            + self.second_resolved_only
            + self.both_unresolved
        )

    @property
    def distance(self) -> int:
        return self.disagree + self.first_resolved_only + self.second_resolved_only


def _binomial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def _leaf_path_lengths(tree: Tree, weighted: bool):
    """Dense leaf-pair path lengths via one BFS per leaf.

    Topological lengths count edges; weighted lengths sum edge weights.
    Returns (labels in order, {label: row dict}).
    """
    labs = sorted(tree.label_set)
    dist: dict = {}
    for lab in labs:
        src = tree.vertex_by_label[lab]
        d = {src: 0.0 if weighted else 0}
        stack = [src]
        while stack:
            v = stack.pop()
            dv = d[v]
            for w in tree.adj[v]:
                if w not in d:
                    if weighted:
                        d[w] = dv + tree.weights[edge_key(v, w)]
                    else:
                        d[w] = dv + 1
                    stack.append(w)
        dist[lab] = {
            other: d[tree.vertex_by_label[other]] for other in labs
        }
    return labs, dist


def _quartet_shape(dist, i, j, k, l) -> SubsetTopology:
    """Four-point test on topological distances.

    In a tree metric the two largest of the three pairing sums are equal;
    a strictly smallest sum names the cherry pairing, all-equal is a star.
    """
    di = dist[i]
    dj = dist[j]
    dk = dist[k]
    s1 = di[j] + dk[l]
    s2 = di[k] + dj[l]
    s3 = di[l] + dj[k]
    if s1 < s2 or s1 < s3:
        return SubsetTopology.cherry(i, j)
    if s2 < s1 or s2 < s3:
        return SubsetTopology.cherry(i, k)
    if s3 < s1 or s3 < s2:
        return SubsetTopology.cherry(i, l)
    return SubsetTopology.star()


def _pairwise_lca_depths(tree: Tree):
    """depth of lca(x, y) for every leaf-label pair of a rooted tree."""
    parent = tree.parent
    depth = [0] * tree.n_vertices
    for v in tree.bfs_order[1:]:
        depth[v] = depth[parent[v]] + 1
    labs = sorted(tree.label_set)
    out: dict = {lab: {} for lab in labs}
    for idx, x in enumerate(labs):
        vx = tree.vertex_by_label[x]
        for y in labs[idx + 1:]:
            u, v = vx, tree.vertex_by_label[y]
            while u != v:
                if depth[u] >= depth[v]:
                    u = parent[u]
                else:
                    v = parent[v]
            out[x][y] = out[y][x] = depth[u]
    return labs, out


def _triplet_shape(lca_depth, i, j, k) -> SubsetTopology:
    """Cherry of a rooted triplet: the pair with the strictly deepest
    common ancestor; all three equal is a star."""
    dij = lca_depth[i][j]
    dik = lca_depth[i][k]
    djk = lca_depth[j][k]
    if dij > dik and dij > djk:
        return SubsetTopology.cherry(i, j)
    if dik > dij and dik > djk:
        return SubsetTopology.cherry(i, k)
    if djk > dij and djk > dik:
        return SubsetTopology.cherry(j, k)
    return SubsetTopology.star()


def categorize(a: Tree, b: Tree, k: int) -> CategoryTable:
    """Bucket every size-k subset by its induced shapes in both trees.

    k = 3 needs two rooted trees, k = 4 two unrooted ones.  The cell sum is
    asserted to equal C(n, k) unconditionally.
    """
    _require_same_labels(a, b)
    if k == 3:
        if not (a.is_rooted and b.is_rooted):
            raise RootednessError("triplet categorization takes rooted trees")
    elif k == 4:
        if a.is_rooted or b.is_rooted:
            raise RootednessError("quartet categorization takes unrooted trees")
    else:
        raise SubsetSizeError("subset size must be 3 or 4")

    if k == 3:
        labs, da = _pairwise_lca_depths(a)
        _, db = _pairwise_lca_depths(b)
        shape = _triplet_shape
    else:
        labs, da = _leaf_path_lengths(a, weighted=False)
        _, db = _leaf_path_lengths(b, weighted=False)
        shape = _quartet_shape
    table = CategoryTable(subset_size=k)
    for combo in combinations(labs, k):
        ta = shape(da, *combo)
        tb = shape(db, *combo)
        if ta.resolved and tb.resolved:
            if ta.pairing == tb.pairing:
                table.agree += 1
            else:
                table.disagree += 1
        elif ta.resolved:
            table.first_resolved_only += 1
        elif tb.resolved:
            table.second_resolved_only += 1
        else:
            table.both_unresolved += 1

    expected = _binomial(len(labs), k)
    if table.total != expected:
        raise AssertionError(
            f"category cells sum to {table.total}, expected C(n,{k}) = {expected}"
        )
    return table


def quartet_distance(a: Tree, b: Tree) -> int:
    """Number of 4-subsets whose induced unrooted shapes differ (B+C+D)."""
    return categorize(a, b, 4).distance


def triplet_distance(a: Tree, b: Tree) -> int:
    """Number of 3-subsets whose induced rooted shapes differ (B+C+D)."""
    return categorize(a, b, 3).distance


def triplet_length_distance(a: Tree, b: Tree) -> float:
    """Weighted triplet score: path-length drift over agreeing triplets.

    For each 3-subset inducing the same shape in both trees, add
    |d_A(i,j) - d_B(i,j)| + |d_A(i,k) - d_B(i,k)| where {i,j} is the cherry
    pair (i the smaller label, k the outgroup); agreeing stars anchor both
    terms at the smallest label.  Disagreeing triplets contribute 0, so a
    zero value does not imply the trees are equal.
    """
    _require_same_labels(a, b)
    if not (a.is_rooted and b.is_rooted):
        raise RootednessError("triplet length distance takes rooted trees")
    if not (a.is_weighted and b.is_weighted):
        raise UnweightedInputError("triplet length distance needs weights")

    labs, ta = _pairwise_lca_depths(a)
    _, tb = _pairwise_lca_depths(b)
    _, wa = _leaf_path_lengths(a, weighted=True)
    _, wb = _leaf_path_lengths(b, weighted=True)

    total = 0.0
    for i, j, k in combinations(labs, 3):
        sa = _triplet_shape(ta, i, j, k)
        sb = _triplet_shape(tb, i, j, k)
        if sa != sb:
            continue
        if sa.resolved:
            x, y = sorted(sa.pairing)
            (out,) = set((i, j, k)) - sa.pairing
        else:
            x, y, out = i, j, k
        total += abs(wa[x][y] - wb[x][y]) + abs(wa[x][out] - wb[x][out])
    return total
