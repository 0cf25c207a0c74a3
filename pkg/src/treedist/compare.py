"""Agreement subtrees, edge alignment, and the pairwise-path family.

Five looser comparison measures live here:

* mast_distance: n minus the largest leaf set on which both trees induce
  the same rooted shape.  Binary pairs get the quadratic vertex-pair DP;
  anything else falls back to exhaustive subset search at desk scale.
* align_score: optimal edge-to-edge assignment where an edge pair scores
  the best Jaccard agreement between the label-set sides of their splits.
  Higher means more alike; the paper-family treats the maximized sum
  itself, so this is exposed as a score, not a distance.
* ccc / ccc_data: Pearson product-moment correlation of cophenetic
  matrices (class value of the leaf pair's deepest common ancestor).
* node_distance: mean |path-length difference|^k over leaf pairs (k = 1,
  or k = 2 for the squared path-difference variant).
* similarity_probability_distance: one minus the symmetrized probability
  that random points on the two trees sit on branches leading to the same
  leaf set.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    DegenerateVarianceError,
    LabelSetMismatchError,
    TooLargeError,
    UnrootedInputError,
    UnweightedInputError,
    ZeroTotalLengthError,
)
from .quartets import _leaf_path_lengths
from .tree import (
    Tree,
    _require_same_labels,
    _subtree_label_sets,
    is_binary,
    is_identical,
    restrict,
    splits as tree_splits,
    unrooted_view,
)


# ---------------------------------------------------------------------------
# Maximum agreement subtree
# ---------------------------------------------------------------------------

_MAST_SUBSET_LIMIT = 12


def mast_distance(a: Tree, b: Tree):
    """(n - t, witness): t is the size of a maximum agreeing leaf subset.

    The witness satisfies is_identical(restrict(a, w), restrict(b, w)) and
    no strictly larger subset does.  Binary rooted pairs use the exact
    vertex-pair DP; non-binary pairs are searched exhaustively and refused
    above 12 leaves.
    """
    _require_same_labels(a, b)
    if not (a.is_rooted and b.is_rooted):
        raise UnrootedInputError("agreement subtrees are computed on rooted trees")
    n = len(a.label_set)
    if is_binary(a) and is_binary(b):
        witness = _mast_binary_witness(a, b)
    else:
        if n > _MAST_SUBSET_LIMIT:
            raise TooLargeError(
                f"exact non-binary agreement search is capped at {_MAST_SUBSET_LIMIT} leaves"
            )
        witness = _mast_subset_search(a, b)
    return n - len(witness), witness


def _mast_subset_search(a: Tree, b: Tree):
    labels = sorted(a.label_set)
    for size in range(len(labels), 0, -1):
        for subset in combinations(labels, size):
            if is_identical(restrict(a, subset), restrict(b, subset)):
                return frozenset(subset)
    return frozenset()


def _mast_binary_witness(a: Tree, b: Tree):
    """Vertex-pair DP for rooted binary trees, with witness backtracking.

    M[u][v] = best agreement between the subtrees at u and v; match both
    children pairings or descend one side.  Leaf rows reduce to membership.
    """
    below_a = _subtree_label_sets(a)
    below_b = _subtree_label_sets(b)
    order_a = a.postorder()
    order_b = b.postorder()
    kids_a = a.children
    kids_b = b.children
    m: dict = {}
    for u in order_a:
        au = below_a[u]
        ka = kids_a[u]
        for v in order_b:
            bv = below_b[v]
            if not ka:
                m[u, v] = 1 if au <= bv else 0
                continue
            if not kids_b[v]:
                m[u, v] = 1 if bv <= au else 0
                continue
            a1, a2 = ka
            b1, b2 = kids_b[v]
            best = max(
                m[a1, b1] + m[a2, b2],
                m[a1, b2] + m[a2, b1],
                m[u, b1],
                m[u, b2],
                m[a1, v],
                m[a2, v],
            )
            m[u, v] = best

    witness: set = set()

    def backtrack(u, v):
        ka = kids_a[u]
        kv = kids_b[v]
        if not ka:
            if m[u, v]:
                witness.add(a.labels[u])
            return
        if not kv:
            if m[u, v]:
                witness.add(b.labels[v])
            return
        a1, a2 = ka
        b1, b2 = kv
        best = m[u, v]
        if best == m[a1, b1] + m[a2, b2]:
            backtrack(a1, b1)
            backtrack(a2, b2)
        elif best == m[a1, b2] + m[a2, b1]:
            backtrack(a1, b2)
            backtrack(a2, b1)
        elif best == m[u, b1]:
            backtrack(u, b1)
        elif best == m[u, b2]:
            backtrack(u, b2)
        elif best == m[a1, v]:
            backtrack(a1, v)
        else:
            backtrack(a2, v)

    backtrack(a.root, b.root)
    return frozenset(witness)


# ---------------------------------------------------------------------------
# Align
# ---------------------------------------------------------------------------


@dataclass
class AlignResult:
    total: float
    matching: dict        # edge of A -> edge of B (dummy-padded pairs omitted)
    scores: np.ndarray    # |E_A| x |E_B| matrix of edge pair scores


def _pair_score(split_a, split_b) -> float:
    """Best of the two side-to-side Jaccard pairings."""
    pa0, pa1 = split_a.two_sides()
    pb0, pb1 = split_b.two_sides()

    def jac(x, y):
        return len(x & y) / len(x | y)

    return max(
        min(jac(pa0, pb0), jac(pa1, pb1)),
        min(jac(pa0, pb1), jac(pa1, pb0)),
    )


def align_score(a: Tree, b: Tree) -> AlignResult:
    """Maximum-total edge assignment under the split-overlap score.

    Trees are read unrooted with degree-2 vertices suppressed; if the edge
    counts still differ (multifurcation mismatch) the smaller side is
    padded with zero-score dummies so the assignment stays square.  Every
    per-edge score is in [0, 1] and identical trees score |E| exactly.
    """
    _require_same_labels(a, b)
    an = unrooted_view(a)
    bn = unrooted_view(b)
    sa = list(tree_splits(an).items())
    sb = list(tree_splits(bn).items())
    na, nb = len(sa), len(sb)
    size = max(na, nb)
    scores = np.zeros((size, size))
    for i, (_, spa) in enumerate(sa):
        for j, (_, spb) in enumerate(sb):
            scores[i, j] = _pair_score(spa, spb)
    rows, cols = linear_sum_assignment(scores, maximize=True)
    total = float(scores[rows, cols].sum())
    matching = {
        sa[i][0]: sb[j][0]
        for i, j in zip(rows, cols)
        if i < na and j < nb
    }
    return AlignResult(total=total, matching=matching, scores=scores[:na, :nb])


# ---------------------------------------------------------------------------
# Cophenetic correlation
# ---------------------------------------------------------------------------


@dataclass
class CopheneticMatrix:
    """Leaf-pair class values of one dendrogram, plus provenance."""

    labels: list
    values: np.ndarray
    class_fn: str


def depth_class_values(tree: Tree) -> dict:
    """Default class assignment: depth + 1, so the root sits in class 1."""
    parent = tree.parent
    values = {tree.root: 1}
    for v in tree.bfs_order[1:]:
        values[v] = values[parent[v]] + 1
    return values


def cophenetic_matrix(tree: Tree, class_fn=None) -> CopheneticMatrix:
    """Matrix of class values of each leaf pair's deepest common ancestor.

    ``class_fn`` maps a tree to vertex class values; deeper vertices must
    not get smaller values (checked).  The default uses depth + 1.
    """
    if not tree.is_rooted:
        raise UnrootedInputError("cophenetic relations need a rooted dendrogram")
    if class_fn is None:
        values = depth_class_values(tree)
        desc = "depth+1"
    else:
        values = class_fn(tree)
        desc = getattr(class_fn, "__name__", "custom")
    parent = tree.parent
    labels = sorted(tree.label_set)
    n = len(labels)
    depth = {tree.root: 0}
    for v in tree.bfs_order[1:]:
        depth[v] = depth[parent[v]] + 1
    # as deep or deeper implies a class value at least as large, so equal
    # depths share one value and values never decrease with depth
    per_depth: dict = {}
    for v in tree.bfs_order:
        if len(tree.adj[v]) > 1 or v == tree.root:
            per_depth.setdefault(depth[v], set()).add(values[v])
    prev = None
    for d in sorted(per_depth):
        vals = per_depth[d]
        if len(vals) > 1:
            raise ValueError(f"equally deep vertices got different class values: depth {d}")
        val = next(iter(vals))
        if prev is not None and val < prev:
            raise ValueError("class values must be non-decreasing with depth")
        prev = val
    out = np.zeros((n, n))
    for i, x in enumerate(labels):
        for j in range(i + 1, n):
            u = tree.vertex_by_label[x]
            v = tree.vertex_by_label[labels[j]]
            while u != v:
                if depth[u] >= depth[v]:
                    u = parent[u]
                else:
                    v = parent[v]
            out[i, j] = out[j, i] = values[u]
    return CopheneticMatrix(labels=labels, values=out, class_fn=desc)


def _lower_triangle(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    idx = np.tril_indices(n, k=-1)
    return mat[idx]


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateVarianceError(
            "correlation undefined: zero variance on one side"
        )
    return float((xc @ yc) / np.sqrt(vx * vy))


def ccc(a: Tree, b: Tree, class_fn=None) -> float:
    """Product-moment correlation of the two cophenetic matrices."""
    _require_same_labels(a, b)
    ma = cophenetic_matrix(a, class_fn)
    mb = cophenetic_matrix(b, class_fn)
    return _pearson(_lower_triangle(ma.values), _lower_triangle(mb.values))


def ccc_data(a: Tree, data_distances, labels=None, class_fn=None) -> float:
    """Correlation between the dendrogram's cophenetic relation and a
    symmetric data-distance matrix indexed by the same labels."""
    ma = cophenetic_matrix(a, class_fn)
    mat = np.asarray(data_distances, dtype=float)
    if labels is None:
        labels = ma.labels
    if sorted(labels) != ma.labels:
        raise LabelSetMismatchError("matrix labels do not match the tree's leaves")
    if list(labels) != ma.labels:
        order = [list(labels).index(lab) for lab in ma.labels]
        mat = mat[np.ix_(order, order)]
    if mat.shape != ma.values.shape:
        raise LabelSetMismatchError("distance matrix shape does not match labels")
    if not np.allclose(mat, mat.T):
        raise ValueError("data distance matrix must be symmetric")
    return _pearson(_lower_triangle(ma.values), _lower_triangle(mat))


def read_distance_matrix_csv(path):
    """Square distance matrix in CSV: header row of labels, one row per
    label in the same order.  Returns (labels, matrix)."""
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    labels = [c.strip() for c in rows[0] if c.strip()]
    n = len(labels)
    mat = np.zeros((n, n))
    for i, row in enumerate(rows[1:n + 1]):
        vals = row[-n:]
        for j, v in enumerate(vals):
            mat[i, j] = float(v)
    return labels, mat


# ---------------------------------------------------------------------------
# Node distance and the path-difference variant
# ---------------------------------------------------------------------------


def node_distance(a: Tree, b: Tree, k: int = 1) -> float:
    """Mean |path length difference|^k over unordered leaf pairs.

    Path lengths count edges in the tree as given (a rooted tree's root
    vertex lies on paths crossing it).  k = 2 is the squared
    path-difference variant.
    """
    _require_same_labels(a, b)
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    n = len(a.label_set)
    if n < 2:
        raise LabelSetMismatchError("need at least two labels")
    labs, da = _leaf_path_lengths(a, weighted=False)
    _, db = _leaf_path_lengths(b, weighted=False)
    total = 0.0
    for x, y in combinations(labs, 2):
        diff = abs(da[x][y] - db[x][y])
        total += diff if k == 1 else diff * diff
    return 2.0 * total / (n * (n - 1))


# ---------------------------------------------------------------------------
# Similarity based on probability
# ---------------------------------------------------------------------------


def _clade_weight_vector(tree: Tree) -> dict:
    """clade label set -> total weight of edges directly above vertices
    carrying that clade (one edge each in suppressed trees)."""
    below = _subtree_label_sets(tree)
    parent = tree.parent
    out: dict = {}
    for v in tree.bfs_order[1:]:
        w = tree.weight(parent[v], v)
        c = below[v]
        out[c] = out.get(c, 0.0) + w
    return out


def similarity_probability_distance(a: Tree, b: Tree) -> float:
    """1 - mean of the two normalized same-clade probability measures.

    M_XY is the probability that random points (weight-proportional) on X
    and Y sit on branches leading to the same leaf set; S(A,B) = M_AB/M_AA
    normalizes it, and the two directions average into a value in [0, 1].
    Invariant under global rescaling of either tree's weights.
    """
    _require_same_labels(a, b)
    for t in (a, b):
        if not t.is_rooted:
            raise UnrootedInputError("similarity is defined on rooted trees")
        if not t.is_weighted:
            raise UnweightedInputError("similarity needs edge weights")
    la = a.total_weight()
    lb = b.total_weight()
    if la <= 0.0 or lb <= 0.0:
        raise ZeroTotalLengthError("total edge weight must be positive")
    va = _clade_weight_vector(a)
    vb = _clade_weight_vector(b)
    m_ab = sum(w * vb[c] for c, w in va.items() if c in vb) / (la * lb)
    m_aa = sum(w * w for w in va.values()) / (la * la)
    m_bb = sum(w * w for w in vb.values()) / (lb * lb)
    s_ab = m_ab / m_aa
    s_ba = m_ab / m_bb
    return 1.0 - (s_ab + s_ba) / 2.0
