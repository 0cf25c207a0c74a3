"""Core tree representation and the structural primitives every metric uses.

A :class:`Tree` is an immutable, connected, acyclic graph whose degree-1
vertices carry string labels (a dendrogram).  Rooted trees additionally
designate one vertex as the root; edge weights are optional and non-negative.

The module also provides the label-set machinery the distance modules are
built from:

* clusters   -- leaf-label set of every clade of a rooted tree
* splits     -- the bipartition of the label set induced by deleting an edge
* contract   -- edge collapse (and a private inverse used only by tests)
* restrict   -- minimal connecting subtree with degree-2 suppression
* canonical forms, used for identity tests and deterministic serialization
* tree_from_clusters / tree_from_splits -- constructive direction of the
  split-compatibility correspondence between trees and laminar families

Vertices are integers ``0..n_vertices-1``; an edge is a pair of vertices and
is keyed by the sorted tuple ``(min(u,v), max(u,v))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    DomainError,
    EdgeNotFoundError,
    LabelSetMismatchError,
    TreeDistError,
    UnknownLabelError,
    UnrootedInputError,
)

#: Reserved label for root vertices and root markers; never a leaf label.
ROOT_LABEL = "root"


def edge_key(u: int, v: int) -> tuple[int, int]:
    """Canonical dictionary key for the undirected edge {u, v}."""
    return (u, v) if u <= v else (v, u)


class Tree:
    """Immutable leaf-labeled tree, optionally rooted and/or edge-weighted.

    Parameters
    ----------
    edges : iterable of (int, int)
        Undirected edges over vertices 0..n-1.
    labels : mapping int -> str
        Vertex labels.  For a valid dendrogram these sit exactly on the
        degree-1 vertices (plus nothing on a rooted root).
    root : int, optional
        Distinguished root vertex; None for unrooted trees.
    weights : mapping edge-key -> float, optional
        Edge weights.  None means the tree is unweighted.
    n_vertices : int, optional
        Vertex count; inferred from the edges when omitted (needed only for
        the single-vertex tree, which has no edges).
    """

    def __init__(self, edges, labels, root=None, weights=None, n_vertices=None):
        edge_list = [(u, v) if u <= v else (v, u) for u, v in edges]
        if n_vertices is None:
            n_vertices = max((max(e) for e in edge_list), default=-1) + 1
            if not edge_list and labels:
                n_vertices = max(labels) + 1
        adj: list[list[int]] = [[] for _ in range(n_vertices)]
        for u, v in edge_list:
            adj[u].append(v)
            adj[v].append(u)
        self.n_vertices = n_vertices
        self.adj = tuple(map(tuple, adj))
        self.edge_list = tuple(edge_list)
        self.labels = dict(labels)
        self.root = root
        self.weights = None if weights is None else {
            edge_key(*e): float(w) for e, w in weights.items()
        }

    # -- basic queries ---------------------------------------------------

    @property
    def is_rooted(self) -> bool:
        return self.root is not None

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    @property
    def n_edges(self) -> int:
        return len(self.edge_list)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self._edge_set

    def weight(self, u: int, v: int) -> float:
        return self.weights[edge_key(u, v)]

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edge_list)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        """Degree-1 vertices (excluding a degree-1 root); the single vertex
        of a one-vertex tree counts as a leaf."""
        if self.n_vertices == 1:
            return (0,)
        return tuple(
            v
            for v in range(self.n_vertices)
            if len(self.adj[v]) == 1 and v != self.root
        )

    @cached_property
    def label_set(self) -> frozenset:
        """All labels carried by vertices of the tree (the set S)."""
        return frozenset(self.labels.values())

    @cached_property
    def vertex_by_label(self) -> dict:
        return {lab: v for v, lab in self.labels.items()}

    def total_weight(self) -> float:
        if not self.is_weighted:
            raise TreeDistError("tree is unweighted")
        return sum(self.weights.values())

    # -- rooted structure -------------------------------------------------

    @cached_property
    def parent(self) -> tuple:
        """Parent of each vertex (root's parent is -1). Rooted trees only."""
        if not self.is_rooted:
            raise UnrootedInputError("parent orientation needs a root")
        par = [-2] * self.n_vertices
        par[self.root] = -1
        order = [self.root]
        for v in order:
            for w in self.adj[v]:
                if par[w] == -2:
                    par[w] = v
                    order.append(w)
        self.__dict__["bfs_order"] = tuple(order)
        return tuple(par)

    @cached_property
    def bfs_order(self) -> tuple:
        self.parent  # noqa: B018 - fills the cache
        return self.__dict__["bfs_order"]

    @cached_property
    def children(self) -> tuple:
        par = self.parent
        kids: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for v in range(self.n_vertices):
            p = par[v]
            if p >= 0:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    def postorder(self) -> list:
        """Vertices of a rooted tree, children always before parents."""
        return list(reversed(self.bfs_order))

    # -- misc -------------------------------------------------------------

    def __repr__(self):  # pragma: no cover - debugging aid
        kind = "rooted" if self.is_rooted else "unrooted"
        return (
            f"<Tree {kind} n_leaves={len(self.leaves)} "
            f"n_vertices={self.n_vertices}>"
        )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One failed invariant; ``subject`` names the offending vertex/edge."""

    kind: str
    subject: object
    message: str

    def __str__(self):
        return f"{self.kind}({self.subject}): {self.message}"


def validate(tree: Tree) -> list:
    """Check every Tree invariant and return the list of violations.

    An empty list means the tree is a valid (optionally rooted, optionally
    weighted) dendrogram.  Purely diagnostic: never raises.
    """
    out = []
    n = tree.n_vertices

    if n == 0:
        out.append(Violation("Empty", None, "tree has no vertices"))
        return out

    # connected and acyclic: |E| = |V| - 1 plus reachability
    if tree.n_edges != n - 1:
        out.append(
            Violation(
                "NotATree",
                None,
                f"|E|={tree.n_edges} but |V|-1={n - 1}",
            )
        )
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for w in tree.adj[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    if count != n:
        out.append(
            Violation("Disconnected", None, f"only {count} of {n} vertices reachable")
        )

    # labels: exactly on leaves, pairwise distinct, never the reserved one
    seen_labels: dict[str, int] = {}
    for v, lab in tree.labels.items():
        if lab in seen_labels:
            out.append(
                Violation("DuplicateLabel", lab, f"vertices {seen_labels[lab]} and {v}")
            )
        else:
            seen_labels[lab] = v
        if lab == ROOT_LABEL:
            out.append(
                Violation("ReservedLabel", v, f"leaf label {ROOT_LABEL!r} is reserved")
            )
    if n > 1:
        for v in range(n):
            deg = len(tree.adj[v])
            if deg == 1 and v != tree.root and v not in tree.labels:
                out.append(Violation("UnlabeledLeaf", v, "degree-1 vertex has no label"))
            if deg > 1 and v in tree.labels:
                out.append(
                    Violation(
                        "LabeledInternal", v, f"internal vertex carries {tree.labels[v]!r}"
                    )
                )
        if tree.root is not None and tree.root in tree.labels and tree.degree(tree.root) == 1:
            out.append(
                Violation("LabeledRoot", tree.root, "degree-1 root must stay unlabeled")
            )
    else:
        if 0 not in tree.labels:
            out.append(Violation("UnlabeledLeaf", 0, "single vertex has no label"))

    if tree.root is not None and not (0 <= tree.root < n):
        out.append(Violation("BadRoot", tree.root, "root is not a vertex"))

    if tree.is_weighted:
        for e in tree.edge_list:
            w = tree.weights.get(e)
            if w is None:
                out.append(Violation("MissingWeight", e, "weighted tree, edge has none"))
            elif w < 0:
                out.append(Violation("NegativeWeight", e, f"weight {w}"))
    return out


def check_valid(tree: Tree) -> None:
    """Raise TreeDistError on the first invariant violation."""
    violations = validate(tree)
    if violations:
        raise TreeDistError("; ".join(str(v) for v in violations))


def _require_same_labels(a: Tree, b: Tree) -> None:
    if a.label_set != b.label_set:
        raise LabelSetMismatchError(
            f"label sets differ: {sorted(a.label_set)!r} vs {sorted(b.label_set)!r}"
        )


# ---------------------------------------------------------------------------
# Splits
# ---------------------------------------------------------------------------


class Split:
    """Unordered bipartition of a label set; the currency of edge matching.

    Two splits are equal when they induce the same unordered pair of sides,
    so ``Split(X, Y) == Split(Y, X)``.
    """

    __slots__ = ("sides", "_hash")

    def __init__(self, side_a: Iterable, side_b: Iterable):
        a = frozenset(side_a)
        b = frozenset(side_b)
        if not a or not b:
            raise DomainError("both sides of a split must be non-empty")
        if a & b:
            raise DomainError("split sides must be disjoint")
        self.sides = frozenset((a, b))
        self._hash = hash(self.sides)

    @property
    def label_set(self) -> frozenset:
        a, b = self.two_sides()
        return a | b

    def two_sides(self):
        """The two sides in a deterministic order (smaller side first,
        ties broken lexicographically)."""
        pair = sorted(self.sides, key=lambda s: (len(s), tuple(sorted(s))))
        if len(pair) == 1:  # pragma: no cover - sides can never be equal
            raise AssertionError("degenerate split")
        return pair[0], pair[1]

    def side_containing(self, label) -> frozenset:
        for s in self.sides:
            if label in s:
                return s
        raise UnknownLabelError(f"{label!r} not in split")

    def side_without(self, label) -> frozenset:
        for s in self.sides:
            if label not in s:
                return s
        raise UnknownLabelError(f"{label!r} on both sides?")

    @property
    def is_trivial(self) -> bool:
        """Pendant splits (one side a singleton) are compatible with all."""
        return min(len(s) for s in self.sides) == 1

    def __eq__(self, other):
        return isinstance(other, Split) and self.sides == other.sides

    def __hash__(self):
        return self._hash

    def __repr__(self):
        a, b = self.two_sides()
        return "{%s | %s}" % (",".join(sorted(a)), ",".join(sorted(b)))


def compatible(s1: Split, s2: Split) -> bool:
    """True iff the two splits can occur in one tree.

    Over a common label set, splits X|X' and Y|Y' are compatible exactly
    when at least one of the four pairwise intersections is empty.
    """
    if s1.label_set != s2.label_set:
        raise LabelSetMismatchError("splits are over different label sets")
    x, xbar = s1.sides
    y, ybar = s2.sides
    return (
        not (x & y) or not (x & ybar) or not (xbar & y) or not (xbar & ybar)
    )


# ---------------------------------------------------------------------------
# Clusters and splits of a tree
# ---------------------------------------------------------------------------


def _subtree_label_sets(tree: Tree):
    """For a rooted tree: vertex -> frozenset of labels in its subtree
    (indexable by vertex id)."""
    adj = tree.adj
    labels = tree.labels
    root = tree.root
    n = tree.n_vertices
    parent = [-1] * n
    order = [root]
    append = order.append
    for v in order:  # BFS; any top-down order works for the parent fold
        pv = parent[v]
        for w in adj[v]:
            if w != pv:
                parent[w] = v
                append(w)
    below: list = [None] * n
    for v, lab in labels.items():
        below[v] = frozenset((lab,))
    for i in range(n - 1, 0, -1):
        v = order[i]
        p = parent[v]
        sv = below[v]
        if sv is None:
            continue
        sp = below[p]
        below[p] = sv if sp is None else sp | sv
    for v in range(n):
        if below[v] is None:
            below[v] = frozenset()
    return below


def clusters(tree: Tree) -> frozenset:
    """The cluster representation of a rooted tree.

    One label set per clade hanging below an edge: singletons included, the
    full label set excluded (it has no edge above it).
    """
    if not tree.is_rooted:
        raise UnrootedInputError("clusters are defined for rooted trees")
    below = _subtree_label_sets(tree)
    return frozenset(
        below[v] for v in range(tree.n_vertices) if v != tree.root and below[v]
    )


def splits(tree: Tree) -> dict:
    """Map every edge to the bipartition of S it induces.

    Works for rooted and unrooted trees alike: a rooted tree is read as an
    unrooted graph whose root vertex carries no label, so the two edges at a
    degree-2 root induce the same split.
    """
    s = tree.label_set
    start = tree.root if tree.is_rooted else tree.leaves[0]
    work = Tree(tree.edge_list, tree.labels, root=start, n_vertices=tree.n_vertices) \
        if not tree.is_rooted else tree
    below = _subtree_label_sets(work)
    out = {}
    for v in range(tree.n_vertices):
        p = work.parent[v]
        if p < 0:
            continue
        side = below[v]
        other = s - side
        if side and other:
            out[edge_key(p, v)] = Split(side, other)
    return out


def internal_splits(tree: Tree) -> dict:
    """Non-trivial splits only (both sides of size >= 2), keyed by edge."""
    return {e: sp for e, sp in splits(tree).items() if not sp.is_trivial}


# ---------------------------------------------------------------------------
# Contraction (edge collapse) and its private inverse
# ---------------------------------------------------------------------------


def contract(tree: Tree, edge) -> Tree:
    """Collapse one edge, merging its endpoints into a single new vertex.

    The merged vertex inherits the union of both neighborhoods and the union
    of the endpoint labels.  Weights of the surviving edges carry over; the
    collapsed edge's weight is discarded (the operation is topological).
    """
    u, v = edge
    key = edge_key(u, v)
    if key not in tree._edge_set:
        raise EdgeNotFoundError(f"edge {edge!r} not in tree")
    if u in tree.labels and v in tree.labels:
        raise TreeDistError(
            "contracting an edge between two labeled vertices would need a "
            "multi-label vertex, which dendrograms do not model"
        )

    # The lower endpoint absorbs the higher one; ids above the removed
    # vertex shift down by one.
    keeper, removed = key

    def remap(w: int) -> int:
        if w == removed:
            w = keeper
        return w if w < removed else w - 1

    new_edges = []
    new_weights = {} if tree.is_weighted else None
    for e in tree.edge_list:
        if e == key:
            continue
        a, b = remap(e[0]), remap(e[1])
        new_edges.append((a, b))
        if new_weights is not None:
            new_weights[edge_key(a, b)] = tree.weights[e]

    new_labels = {}
    for w, lab in tree.labels.items():
        new_labels[remap(w)] = lab

    new_root = tree.root
    if new_root is not None:
        new_root = remap(new_root)

    return Tree(
        new_edges,
        new_labels,
        root=new_root,
        weights=new_weights,
        n_vertices=tree.n_vertices - 1,
    )


def _decontract(tree: Tree, vertex: int, moved_neighbors, moved_label=None,
                new_root=False) -> Tree:
    """Inverse of :func:`contract`, used only by round-trip tests.

    Splits ``vertex`` in two: a fresh vertex takes the neighbors listed in
    ``moved_neighbors`` (and optionally the label / root mark), and an
    unweighted edge joins the pair.
    """
    nv = tree.n_vertices
    moved = set(moved_neighbors)
    new_edges = []
    new_weights = {} if tree.is_weighted else None
    for a, b in tree.edge_list:
        if a == vertex and b in moved:
            a = nv
        elif b == vertex and a in moved:
            b = nv
        new_edges.append((a, b))
        if new_weights is not None:
            new_weights[edge_key(a, b)] = tree.weights[edge_key(
                vertex if a == nv else a, vertex if b == nv else b)]
    new_edges.append((vertex, nv))
    if new_weights is not None:
        new_weights[edge_key(vertex, nv)] = 0.0
    labels = dict(tree.labels)
    if moved_label is not None:
        labels[nv] = moved_label
    root = tree.root
    if new_root:
        root = nv
    return Tree(new_edges, labels, root=root, weights=new_weights,
                n_vertices=nv + 1)


# ---------------------------------------------------------------------------
# Restriction and degree-2 suppression
# ---------------------------------------------------------------------------


def restrict(tree: Tree, subset) -> Tree:
    """Minimal subtree connecting ``subset``, degree-2 vertices suppressed.

    For a rooted tree the restriction is rooted at the deepest common
    ancestor of the subset; that vertex survives even when its degree is 2.
    Suppression of a degree-2 vertex merges its two edges; on weighted trees
    the merged edge gets the sum of the two weights, preserving path lengths.
    """
    subset = frozenset(subset)
    if not subset:
        raise DomainError("restriction subset must be non-empty")
    missing = subset - tree.label_set
    if missing:
        raise UnknownLabelError(f"labels not in tree: {sorted(missing)!r}")

    # Work on a rooted orientation; any leaf works as a starting root for
    # unrooted trees.
    if tree.is_rooted:
        work_root = tree.root
        work = tree
    else:
        work_root = tree.vertex_by_label[next(iter(sorted(subset)))]
        work = Tree(tree.edge_list, tree.labels, root=work_root,
                    weights=tree.weights, n_vertices=tree.n_vertices)

    wanted = {work.vertex_by_label[lab] for lab in subset}
    if len(wanted) == 1 and tree.n_vertices >= 1:
        (only,) = wanted
        lab = tree.labels[only]
        return Tree([], {0: lab}, root=0 if tree.is_rooted else None,
                    weights={} if tree.is_weighted else None, n_vertices=1)

    # keep[v]: v lies on a path between two wanted leaves (Steiner tree)
    count = [0] * work.n_vertices
    for v in wanted:
        count[v] = 1
    for v in work.postorder():
        for c in work.children[v]:
            count[v] += 1 if count[c] else 0
        if v in wanted:
            count[v] = max(count[v], 1)
    # topmost vertex of the Steiner tree: deepest vertex covering all wanted
    top = work_root
    while True:
        kids = [c for c in work.children[top] if count[c]]
        if len(kids) == 1 and top not in wanted:
            top = kids[0]
        else:
            break

    # Collect Steiner edges below top, merging through degree-2 vertices.
    new_labels: dict[int, str] = {}
    new_edges: list[tuple[int, int]] = []
    new_weights: dict = {} if tree.is_weighted else None
    ids: dict[int, int] = {}

    def new_id(old: int) -> int:
        nid = ids.setdefault(old, len(ids))
        lab = work.labels.get(old)
        if lab is not None and old in wanted:
            new_labels[nid] = lab
        return nid

    top_id = new_id(top)
    # stack entries: (old_vertex, kept_parent_new_id, accumulated_weight)
    stack = [(c, top_id, work.weights[edge_key(top, c)] if tree.is_weighted else 0.0)
             for c in work.children[top] if count[c]]
    while stack:
        v, parent_id, acc = stack.pop()
        kids = [c for c in work.children[v] if count[c]]
        if len(kids) == 1 and v not in wanted:
            c = kids[0]
            w = work.weights[edge_key(v, c)] if tree.is_weighted else 0.0
            stack.append((c, parent_id, acc + w))
            continue
        vid = new_id(v)
        new_edges.append((parent_id, vid))
        if new_weights is not None:
            new_weights[edge_key(parent_id, vid)] = acc
        for c in kids:
            w = work.weights[edge_key(v, c)] if tree.is_weighted else 0.0
            stack.append((c, vid, w))

    root = top_id if tree.is_rooted else None
    result = Tree(new_edges, new_labels, root=root, weights=new_weights,
                  n_vertices=len(ids))
    if not tree.is_rooted:
        result = suppress_degree_two(result)
    return result


def suppress_degree_two(tree: Tree) -> Tree:
    """Remove redundant degree-2 vertices, merging their edges.

    Unrooted trees lose every degree-2 vertex.  Rooted trees lose internal
    one-child chains, and a one-child root is collapsed downward until the
    root has two or more children (the surviving top vertex becomes the
    root).  Weights of merged edges add up.
    """
    if tree.n_vertices <= 2:
        return tree

    if tree.is_rooted:
        root = tree.root
        while len(tree.children[root]) == 1 and root not in tree.labels:
            root = tree.children[root][0]
        work = tree if root == tree.root else Tree(
            tree.edge_list, tree.labels, root=root, weights=tree.weights,
            n_vertices=tree.n_vertices)
        ids: dict[int, int] = {}
        new_labels: dict[int, str] = {}
        new_edges: list[tuple[int, int]] = []
        new_weights: dict = {} if tree.is_weighted else None

        def new_id(old):
            nid = ids.setdefault(old, len(ids))
            if old in work.labels:
                new_labels[nid] = work.labels[old]
            return nid

        top_id = new_id(root)
        stack = [(c, top_id,
                  work.weights[edge_key(root, c)] if tree.is_weighted else 0.0)
                 for c in work.children[root]]
        while stack:
            v, parent_id, acc = stack.pop()
            kids = work.children[v]
            if len(kids) == 1 and v not in work.labels:
                c = kids[0]
                w = work.weights[edge_key(v, c)] if tree.is_weighted else 0.0
                stack.append((c, parent_id, acc + w))
                continue
            vid = new_id(v)
            new_edges.append((parent_id, vid))
            if new_weights is not None:
                new_weights[edge_key(parent_id, vid)] = acc
            for c in kids:
                w = work.weights[edge_key(v, c)] if tree.is_weighted else 0.0
                stack.append((c, vid, w))
        return Tree(new_edges, new_labels, root=top_id, weights=new_weights,
                    n_vertices=len(ids))

    # unrooted: orient from a leaf, suppress every degree-2 vertex
    start = tree.leaves[0]
    work = Tree(tree.edge_list, tree.labels, root=start, weights=tree.weights,
                n_vertices=tree.n_vertices)
    ids = {}
    new_labels = {}
    new_edges = []
    new_weights = {} if tree.is_weighted else None

    def new_id2(old):
        nid = ids.setdefault(old, len(ids))
        if old in work.labels:
            new_labels[nid] = work.labels[old]
        return nid

    start_id = new_id2(start)
    stack = [(c, start_id,
              work.weights[edge_key(start, c)] if tree.is_weighted else 0.0)
             for c in work.children[start]]
    while stack:
        v, parent_id, acc = stack.pop()
        kids = work.children[v]
        if len(kids) == 1 and v not in work.labels:
            c = kids[0]
            w = work.weights[edge_key(v, c)] if tree.is_weighted else 0.0
            stack.append((c, parent_id, acc + w))
            continue
        vid = new_id2(v)
        new_edges.append((parent_id, vid))
        if new_weights is not None:
            new_weights[edge_key(parent_id, vid)] = acc
        for c in kids:
            w = work.weights[edge_key(v, c)] if tree.is_weighted else 0.0
            stack.append((c, vid, w))
    return Tree(new_edges, new_labels, root=None, weights=new_weights,
                n_vertices=len(ids))


def unrooted_view(tree: Tree) -> Tree:
    """Forget the root and suppress the degree-2 vertex it may leave behind."""
    if not tree.is_rooted:
        return suppress_degree_two(tree)
    unrooted = Tree(tree.edge_list, tree.labels, root=None,
                    weights=tree.weights, n_vertices=tree.n_vertices)
    return suppress_degree_two(unrooted)


# ---------------------------------------------------------------------------
# Canonical forms and identity
# ---------------------------------------------------------------------------


def _canonical_key_rooted(tree: Tree, with_weights: bool):
    """Nested-tuple canonical form of a rooted tree.

    Children are ordered by the smallest label in their subtree; subtrees of
    siblings have disjoint label sets, so the order is total and any
    label-preserving isomorphism maps the forms onto each other.
    """
    min_label: dict[int, str] = {}
    key: dict[int, object] = {}
    for v in tree.postorder():
        kids = tree.children[v]
        lab = tree.labels.get(v)
        if not kids:
            min_label[v] = lab if lab is not None else ""
            key[v] = ("L", lab)
        else:
            ordered = sorted(kids, key=lambda c: min_label[c])
            min_label[v] = min(
                [min_label[c] for c in ordered] + ([lab] if lab is not None else [])
            )
            if with_weights and tree.is_weighted:
                parts = tuple(
                    (key[c], tree.weights[edge_key(v, c)]) for c in ordered
                )
            else:
                parts = tuple(key[c] for c in ordered)
            key[v] = ("I", lab, parts)
    return key[tree.root]


def canonical_key(tree: Tree, with_weights: bool = False):
    """Hashable canonical form; equal forms mean (weight-)identical trees.

    Unrooted trees are canonically rooted at the pendant edge of their
    smallest leaf label before the rooted form is taken, which any
    label-preserving isomorphism must respect.
    """
    if tree.n_vertices == 1:
        return ("rooted" if tree.is_rooted else "unrooted",
                ("L", tree.labels.get(0)))
    if tree.is_rooted:
        return ("rooted", _canonical_key_rooted(tree, with_weights))
    anchor_label = min(tree.label_set)
    anchor = tree.vertex_by_label[anchor_label]
    rooted = Tree(tree.edge_list, tree.labels, root=anchor,
                  weights=tree.weights, n_vertices=tree.n_vertices)
    return ("unrooted", _canonical_key_rooted(rooted, with_weights))


def is_identical(a: Tree, b: Tree) -> bool:
    """Label-preserving isomorphism test via canonical-form comparison."""
    _require_same_labels(a, b)
    if a.is_rooted != b.is_rooted:
        return False
    return canonical_key(a) == canonical_key(b)


def is_weight_identical(a: Tree, b: Tree) -> bool:
    """Label- and weight-preserving isomorphism test."""
    _require_same_labels(a, b)
    if a.is_rooted != b.is_rooted:
        return False
    if a.is_weighted != b.is_weighted:
        return False
    return canonical_key(a, with_weights=True) == canonical_key(b, with_weights=True)


# ---------------------------------------------------------------------------
# Constructive direction: trees from label-set families
# ---------------------------------------------------------------------------


def tree_from_clusters(label_set, cluster_family, root_children_weights=None) -> Tree:
    """Build the unique rooted tree whose cluster representation is the
    given laminar family (plus the implicit full set at the root).

    Raises DomainError when the family is not laminar.  Singleton clusters
    may be omitted; they are always added for the leaves.
    """
    label_set = frozenset(label_set)
    fam = {frozenset(c) for c in cluster_family}
    fam |= {frozenset((x,)) for x in label_set}
    fam.discard(frozenset())
    for c in fam:
        if not c <= label_set:
            raise DomainError(f"cluster {sorted(c)!r} outside the label set")
    ordered = sorted(fam, key=len, reverse=True)

    # nest clusters by containment; laminarity makes the parent unique
    edges = []
    labels = {}
    node_of: dict[frozenset, int] = {}
    root_id = 0
    node_ids = {label_set: root_id}
    next_id = 1
    parent_sets: list[frozenset] = [label_set]
    for c in ordered:
        if c == label_set:
            continue
        parent = None
        best = None
        for p in parent_sets:
            if c <= p and (best is None or len(p) < len(best)):
                best = p
        parent = best
        if parent is None or not c <= parent:
            raise DomainError("cluster family is not laminar")
        inter = [p for p in parent_sets if (c & p) and not (c <= p or p <= c)]
        if inter:
            raise DomainError("cluster family is not laminar")
        node_ids[c] = next_id
        edges.append((node_ids[parent], next_id))
        if len(c) == 1:
            labels[next_id] = next(iter(c))
        parent_sets.append(c)
        next_id += 1
    node_of.update(node_ids)
    return Tree(edges, labels, root=root_id, n_vertices=next_id)


def tree_from_splits(label_set, split_weights: Mapping, leaf_weights=None) -> Tree:
    """Build the unrooted tree carrying exactly the given internal splits.

    ``split_weights`` maps pairwise-compatible non-trivial :class:`Split`
    objects to edge weights; a compatible family defines a unique tree.
    ``leaf_weights`` (label -> weight) adds pendant edge weights; when both
    are None/empty weights the tree is still weighted if either mapping is
    provided.
    """
    label_set = frozenset(label_set)
    anchor = min(label_set)
    # Clusters: the side of each split away from the anchor label, rooted at
    # the anchor's pendant vertex.
    fam = {}
    for sp, w in split_weights.items():
        if sp.label_set != label_set:
            raise LabelSetMismatchError("split over a different label set")
        if sp.is_trivial:
            raise DomainError("pendant splits belong in leaf_weights")
        fam[sp.side_without(anchor)] = w
    clusters_all = set(fam) | {frozenset((x,)) for x in label_set if x != anchor}
    rest = label_set - {anchor}
    skeleton = tree_from_clusters(rest, clusters_all)

    # skeleton is rooted at the vertex playing the anchor's neighbor; attach
    # the anchor leaf to its root.
    n = skeleton.n_vertices
    edges = list(skeleton.edge_list) + [(skeleton.root, n)]
    labels = dict(skeleton.labels)
    labels[n] = anchor

    weighted = bool(split_weights) or leaf_weights is not None
    weights = None
    if weighted:
        below = _subtree_label_sets(skeleton)
        weights = {}
        leaf_weights = dict(leaf_weights or {})
        for v in range(skeleton.n_vertices):
            p = skeleton.parent[v]
            if p < 0:
                continue
            c = below[v]
            if len(c) == 1:
                weights[edge_key(p, v)] = float(leaf_weights.get(next(iter(c)), 0.0))
            else:
                weights[edge_key(p, v)] = float(fam[c])
        weights[edge_key(skeleton.root, n)] = float(leaf_weights.get(anchor, 0.0))

    tree = Tree(edges, labels, root=None, weights=weights, n_vertices=n + 1)
    return suppress_degree_two(tree)


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def is_binary(tree: Tree) -> bool:
    """Rooted: every internal vertex has exactly two children.
    Unrooted: every internal vertex has degree three."""
    if tree.n_vertices <= 2:
        return True
    if tree.is_rooted:
        for v in range(tree.n_vertices):
            kids = len(tree.children[v])
            if kids not in (0, 2):
                return False
        return True
    return all(
        len(tree.adj[v]) in (1, 3) for v in range(tree.n_vertices)
    )


def count_binary_topologies(n: int) -> int:
    """Number of non-identical rooted binary trees on n labels: (2n-3)!!."""
    if n < 2:
        raise DomainError("need at least two labels")
    out = 1
    for k in range(2 * n - 3, 1, -2):
        out *= k
    return out


def augment_with_root_marker(tree: Tree) -> Tree:
    """Attach a pendant leaf labeled ``root`` above the root and unroot.

    The result is the standard unrooted encoding of a rooted tree: clades
    of the original correspond one-to-one to splits whose marker-free side
    is the clade.  Used by the tree-space and agreement-forest machinery.
    """
    if not tree.is_rooted:
        raise UnrootedInputError("only rooted trees take a root marker")
    n = tree.n_vertices
    edges = list(tree.edge_list) + [(tree.root, n)]
    labels = dict(tree.labels)
    labels[n] = ROOT_LABEL
    weights = None
    if tree.is_weighted:
        weights = dict(tree.weights)
        weights[edge_key(tree.root, n)] = 0.0
    return Tree(edges, labels, root=None, weights=weights, n_vertices=n + 1)
