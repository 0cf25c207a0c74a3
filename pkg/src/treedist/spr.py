"""Subtree prune-and-regraft distance via agreement forests, with a
breadth-first oracle over the literal move definition.

A rooted SPR move detaches the clade below a chosen vertex, suppresses the
vacated degree-2 parent (the old root hands its mark to the surviving
child when it is the one vacated), and reattaches the clade onto an edge
that is neither inside the clade nor adjacent to the old parent.

The distance equals m(A, B) - 1, where m is the smallest component count of
an agreement forest of the two trees after both gain a pendant marker leaf
above the root: the marker-augmented label set is partitioned into blocks
on which both trees induce identical rooted shapes, occupying
vertex-disjoint regions in each tree.  The search enumerates edge-cut sets
of the first tree in increasing size, which generates exactly the
candidate vertex-disjoint decompositions, and validates each block against
the second tree.

Everything here is exact and desk-scale: the forest search is capped at 10
leaves and the breadth-first oracle at 7 (6 unrooted), where the state
space is still enumerable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import (
    InvalidTargetError,
    RootPruneError,
    TooLargeError,
    UnrootedInputError,
)
from .tree import (
    ROOT_LABEL,
    Tree,
    _require_same_labels,
    canonical_key,
    edge_key,
    is_binary,
    is_identical,
    restrict,
)


def _require_rooted_binary(tree: Tree):
    if not tree.is_rooted:
        raise UnrootedInputError("operation requires rooted binary trees")
    if not is_binary(tree):
        raise UnrootedInputError("operation requires rooted *binary* trees")


# ---------------------------------------------------------------------------
# The move
# ---------------------------------------------------------------------------


def _subtree_vertices(tree: Tree, top: int) -> set:
    out = {top}
    stack = [top]
    while stack:
        v = stack.pop()
        for c in tree.children[v]:
            out.add(c)
            stack.append(c)
    return out


def rspr_apply(tree: Tree, pruned: int, target_edge) -> Tree:
    """One rooted prune-and-regraft move.

    ``pruned`` is the top vertex of the clade to move; ``target_edge`` is
    the edge that gets subdivided to receive it.  The target may be neither
    an edge of the pruned clade nor adjacent to the pruned vertex's parent
    (those regrafts would be no-ops or reattachments to the hole).

    ``target_edge=None`` regrafts above the root: the new attachment vertex
    becomes root with the old root as its other child.  This is the regraft
    onto the planted edge of the rooted tree, the move that hands the root
    mark to the fresh vertex; it needs the pruned clade's parent to be a
    non-root vertex (for a root child it would recreate the input).
    """
    _require_rooted_binary(tree)
    if pruned == tree.root:
        raise RootPruneError("cannot prune at the root")

    parent = tree.parent
    v = parent[pruned]
    clade = _subtree_vertices(tree, pruned)

    if target_edge is None:
        if v == tree.root:
            raise InvalidTargetError(
                "replanting a root child above the root recreates the tree"
            )
        target = None
    else:
        target = edge_key(*target_edge)
        if target not in tree._edge_set:
            raise InvalidTargetError(f"target edge {target_edge!r} not in tree")
        forbidden = {edge_key(v, w) for w in tree.adj[v]}
        if target in forbidden or (target[0] in clade and target[1] in clade):
            raise InvalidTargetError(
                "target edge lies in the pruned clade or touches its old parent"
            )

    edges = [e for e in tree.edge_list if e != edge_key(v, pruned)]
    root = tree.root

    # suppress the vacated parent: splice its former partner edges, or hand
    # the root over when the root itself got vacated
    if v == root:
        (w,) = [c for c in tree.children[v] if c != pruned]
        edges = [e for e in edges if v not in e]
        root = w
    else:
        p = parent[v]
        (w,) = [c for c in tree.children[v] if c != pruned]
        edges = [e for e in edges if v not in e]
        edges.append((p, w))

    mid = tree.n_vertices
    if target is None:
        # new top vertex above the old root
        edges += [(mid, root), (mid, pruned)]
        root = mid
    else:
        # subdivide the target and hang the clade there
        x, y = target
        edges = [e for e in edges if e != target]
        edges += [(x, mid), (mid, y), (mid, pruned)]

    result = Tree(edges, tree.labels, root=root, n_vertices=mid + 1)
    return _compact(result)


def _compact(tree: Tree) -> Tree:
    """Drop isolated vertex ids left behind by edge surgery."""
    used = sorted({v for e in tree.edge_list for v in e})
    if len(used) == tree.n_vertices:
        return tree
    remap = {old: new for new, old in enumerate(used)}
    edges = [(remap[u], remap[v]) for u, v in tree.edge_list]
    labels = {remap[v]: lab for v, lab in tree.labels.items() if v in remap}
    root = remap[tree.root] if tree.root is not None else None
    return Tree(edges, labels, root=root, n_vertices=len(used))


def spr_neighbors(tree: Tree) -> list:
    """Every distinct tree reachable by one legal rooted move."""
    _require_rooted_binary(tree)
    seen = {}
    parent = tree.parent
    for pruned in range(tree.n_vertices):
        if pruned == tree.root:
            continue
        v = parent[pruned]
        clade = _subtree_vertices(tree, pruned)
        forbidden = {edge_key(v, w) for w in tree.adj[v]}
        for e in tree.edge_list:
            if e in forbidden or (e[0] in clade and e[1] in clade):
                continue
            out = rspr_apply(tree, pruned, e)
            seen.setdefault(canonical_key(out), out)
        if v != tree.root:
            out = rspr_apply(tree, pruned, None)
            seen.setdefault(canonical_key(out), out)
    return list(seen.values())


def _unrooted_spr_neighbors(tree: Tree) -> list:
    """One-move neighborhood under the unrooted variant of the operation."""
    seen = {}
    for u, v in list(tree.edge_list) + [(b, a) for a, b in tree.edge_list]:
        # prune the component holding u by cutting (v, u)
        if len(tree.adj[v]) == 1:
            continue  # remainder would be a bare leaf, nothing to regraft on
        cut = edge_key(u, v)
        comp = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for w in tree.adj[x]:
                if edge_key(x, w) != cut and w not in comp:
                    comp.add(w)
                    stack.append(w)
        adj_v = {edge_key(v, w) for w in tree.adj[v]}
        for e in tree.edge_list:
            if e == cut or e in adj_v:
                continue
            if e[0] in comp and e[1] in comp:
                continue
            edges = [f for f in tree.edge_list if f not in (cut, e)]
            # suppress v (degree 2 after the cut)
            others = [w for w in tree.adj[v] if w != u]
            if len(others) == 2:
                edges = [f for f in edges if v not in f]
                edges.append(tuple(others))
            mid = tree.n_vertices
            edges += [(e[0], mid), (mid, e[1]), (mid, u)]
            out = _compact(Tree(edges, tree.labels, n_vertices=mid + 1))
            seen.setdefault(canonical_key(out), out)
    return list(seen.values())


# ---------------------------------------------------------------------------
# Breadth-first oracle
# ---------------------------------------------------------------------------

_BFS_LIMIT_ROOTED = 7
_BFS_LIMIT_UNROOTED = 6


def spr_distance_bfs(a: Tree, b: Tree) -> int:
    """Minimum number of moves from a to b, by literal breadth-first search
    over canonicalized trees.  Exponential state space: 7 leaves rooted, 6
    unrooted, at most."""
    _require_same_labels(a, b)
    n = len(a.label_set)
    if a.is_rooted != b.is_rooted:
        raise UnrootedInputError("cannot mix rooted and unrooted trees")
    rooted = a.is_rooted
    if rooted:
        _require_rooted_binary(a)
        _require_rooted_binary(b)
        if n > _BFS_LIMIT_ROOTED:
            raise TooLargeError(f"breadth-first search capped at {_BFS_LIMIT_ROOTED} leaves")
        neighbors = spr_neighbors
    else:
        if n > _BFS_LIMIT_UNROOTED:
            raise TooLargeError(
                f"unrooted breadth-first search capped at {_BFS_LIMIT_UNROOTED} leaves"
            )
        neighbors = _unrooted_spr_neighbors

    goal = canonical_key(b)
    frontier = {canonical_key(a): a}
    if goal in frontier:
        return 0
    visited = set(frontier)
    depth = 0
    while frontier:
        depth += 1
        nxt = {}
        for t in frontier.values():
            for out in neighbors(t):
                key = canonical_key(out)
                if key == goal:
                    return depth
                if key not in visited:
                    visited.add(key)
                    nxt[key] = out
        frontier = nxt
    raise AssertionError("move graph is connected; goal must be reachable")


# ---------------------------------------------------------------------------
# Agreement forests
# ---------------------------------------------------------------------------


@dataclass
class AgreementForest:
    """Partition of the marker-augmented label set into blocks on which
    both trees induce the same rooted shape, vertex-disjointly."""

    components: list  # (frozenset of labels, Tree)

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def label_blocks(self):
        return [labels for labels, _ in self.components]


_MAF_LIMIT = 10


def _augment(tree: Tree) -> Tree:
    """Plant the tree: a marker leaf above the old root becomes the new
    root, and the old root turns into an ordinary internal vertex (so it
    is suppressed like any other once a root child is pruned)."""
    n = tree.n_vertices
    edges = list(tree.edge_list) + [(tree.root, n)]
    labels = dict(tree.labels)
    labels[n] = ROOT_LABEL
    return Tree(edges, labels, root=n, n_vertices=n + 1)


def _steiner_vertices(tree: Tree, leaf_vertices) -> frozenset:
    """Vertices of the minimal connecting subtree of the given leaves."""
    if len(leaf_vertices) == 1:
        return frozenset(leaf_vertices)
    wanted = set(leaf_vertices)
    count = {v: 0 for v in range(tree.n_vertices)}
    for v in tree.postorder():
        c = 1 if v in wanted else 0
        for ch in tree.children[v]:
            c += 1 if count[ch] else 0
        count[v] = c
    top = tree.root
    while True:
        covered = [c for c in tree.children[top] if count[c]]
        if len(covered) == 1 and top not in wanted:
            top = covered[0]
        else:
            break
    out = set()
    stack = [top]
    while stack:
        v = stack.pop()
        out.add(v)
        for c in tree.children[v]:
            if count[c]:
                stack.append(c)
    return frozenset(out)


def spr_distance_maf(a: Tree, b: Tree):
    """(distance, forest): exact agreement-forest computation, m(A,B) - 1.

    Enumerates cut sets of the first augmented tree by increasing size, so
    the first valid forest found is maximum (fewest components).
    """
    _require_same_labels(a, b)
    _require_rooted_binary(a)
    _require_rooted_binary(b)
    n = len(a.label_set)
    if n > _MAF_LIMIT:
        raise TooLargeError(f"exact forest search capped at {_MAF_LIMIT} leaves")

    aa = _augment(a)
    bb = _augment(b)
    if is_identical(aa, bb):
        full = frozenset(aa.label_set)
        return 0, AgreementForest([(full, restrict(aa, full))])

    restrict_key_a: dict = {}
    restrict_key_b: dict = {}
    steiner_b: dict = {}

    def keys_match(block) -> bool:
        ka = restrict_key_a.get(block)
        if ka is None:
            ka = canonical_key(restrict(aa, block))
            restrict_key_a[block] = ka
        kb = restrict_key_b.get(block)
        if kb is None:
            kb = canonical_key(restrict(bb, block))
            restrict_key_b[block] = kb
        return ka == kb

    def b_vertices(block) -> frozenset:
        sv = steiner_b.get(block)
        if sv is None:
            sv = _steiner_vertices(bb, [bb.vertex_by_label[lab] for lab in block])
            steiner_b[block] = sv
        return sv

    edge_list = aa.edge_list
    parent = aa.parent

    for cuts in range(1, len(edge_list) + 1):
        for cut_set in combinations(edge_list, cuts - 1):
            blocks = _cut_blocks(aa, parent, cut_set)
            if blocks is None:
                continue
            if all(keys_match(blk) for blk in blocks):
                if _b_side_disjoint(blocks, b_vertices):
                    forest = AgreementForest(
                        [(blk, restrict(aa, blk)) for blk in blocks]
                    )
                    return cuts - 1, forest
    raise AssertionError("singleton forest always exists")  # pragma: no cover


def _cut_blocks(tree: Tree, parent, cut_set):
    """Leaf-label blocks of the components after removing the cut edges.

    None when some component carries no labels (such a cut set cannot
    yield a forest; the same partition arises from a smaller one).
    """
    if not cut_set:
        return [frozenset(tree.label_set)]
    cut = set(cut_set)
    # component id per vertex: walk down from the root, new component below
    # each cut edge
    comp = [-1] * tree.n_vertices
    comp[tree.root] = 0
    n_comp = 1
    for v in tree.bfs_order[1:]:
        p = parent[v]
        if edge_key(p, v) in cut:
            comp[v] = n_comp
            n_comp += 1
        else:
            comp[v] = comp[p]
    blocks = [set() for _ in range(n_comp)]
    for v, lab in tree.labels.items():
        blocks[comp[v]].add(lab)
    if any(not blk for blk in blocks):
        return None
    return [frozenset(blk) for blk in blocks]


def _b_side_disjoint(blocks, b_vertices) -> bool:
    seen: set = set()
    for blk in blocks:
        sv = b_vertices(blk)
        if seen & sv:
            return False
        seen |= sv
    return True


def maf_is_valid(a: Tree, b: Tree, forest: AgreementForest) -> bool:
    """Independent re-check of the three forest conditions."""
    aa = _augment(a)
    bb = _augment(b)
    blocks = forest.label_blocks
    # condition 1: blocks partition the marker-augmented label set
    union = set()
    for blk in blocks:
        if union & blk:
            return False
        union |= blk
    if union != set(aa.label_set):
        return False
    # condition 2: identical restrictions, matching the stored component
    for blk, comp_tree in forest.components:
        ra = restrict(aa, blk)
        rb = restrict(bb, blk)
        if not is_identical(ra, rb) or not is_identical(ra, comp_tree):
            return False
    # condition 3: vertex-disjoint occupancy in both trees
    for tree in (aa, bb):
        seen: set = set()
        for blk in blocks:
            sv = _steiner_vertices(tree, [tree.vertex_by_label[x] for x in blk])
            if seen & sv:
                return False
            seen |= sv
    return True
