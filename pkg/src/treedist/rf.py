"""Robinson-Foulds distance, strict consensus, and the length-aware variant.

The fast RF path is the interval realization of Day's cluster-table idea:
number the leaves of the first tree in DFS order, so every cluster of that
tree occupies a contiguous index interval (lo, hi).  Walking the second tree
bottom-up while tracking (lo, hi, size) per vertex, a cluster is shared
exactly when size == hi - lo + 1 and (lo, hi) sits in the first tree's
table.  One pass per tree, linear in the leaf count, and the same table
iterated over k trees yields the strict consensus.

`rf_distance_oracle` recomputes everything with explicit label-set algebra;
it is the reference the fast path is validated against.

The length variant sums unmatched edge weights plus weight differences over
split-matched edge pairs.  On degree-2-suppressed trees distinct edges carry
distinct splits, so the matching is unique; raw mode skips the suppression
and then reports every value the competing matchings produce instead of
silently picking one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    AmbiguousMatchingError,
    LabelSetMismatchError,
    TooLargeError,
    UnrootedInputError,
    UnweightedInputError,
)
from .tree import (
    Tree,
    _require_same_labels,
    clusters,
    edge_key,
    is_identical,
    splits,
    suppress_degree_two,
    tree_from_clusters,
    unrooted_view,
)


# ---------------------------------------------------------------------------
# Day-style cluster table
# ---------------------------------------------------------------------------


@dataclass
class ClusterTable:
    """Interval form of one rooted tree's cluster representation.

    leaf_order maps a label to its DFS index in the source tree; every
    cluster of that tree is the contiguous block [lo, hi] of indices stored
    in ``intervals`` (singletons included, the full label set not).
    """

    leaf_order: dict
    intervals: frozenset
    n_clusters: int


def _rooted_scan(tree: Tree, leaf_index=None):
    """One DFS over raw adjacency: preorder, parents, and per-vertex
    (lo, hi, size) over leaf indices.

    When ``leaf_index`` is None the tree numbers its own leaves in DFS
    order (so every cluster is contiguous by construction) and the mapping
    is returned; otherwise the given mapping is applied.  Detects one-child
    chains on the fly so callers can fall back to suppression.
    """
    if not tree.is_rooted:
        raise UnrootedInputError("operation requires rooted trees")
    n = tree.n_vertices
    adj = tree.adj
    labels = tree.labels
    root = tree.root
    parent = [-1] * n
    lo = [n] * n
    hi = [-1] * n
    size = [0] * n
    unary = False
    if leaf_index is None:
        # table tree: leaves numbered in DFS order so that every subtree
        # occupies a contiguous index block
        leaf_index = {}
        next_idx = 0
        order = [0] * n
        stack = [root]
        k = 0
        while stack:
            v = stack.pop()
            order[k] = v
            k += 1
            p = parent[v]
            nkids = 0
            for w in adj[v]:
                if w != p:
                    parent[w] = v
                    stack.append(w)
                    nkids += 1
            if nkids == 0:
                leaf_index[labels[v]] = next_idx
                lo[v] = hi[v] = next_idx
                size[v] = 1
                next_idx += 1
            elif nkids == 1:
                unary = True
    else:
        # query tree: any top-down order supports the bottom-up fold
        order = [root]
        append = order.append
        for v in order:
            p = parent[v]
            nkids = 0
            for w in adj[v]:
                if w != p:
                    parent[w] = v
                    append(w)
                    nkids += 1
            if nkids == 0:
                idx = leaf_index[labels[v]]
                lo[v] = hi[v] = idx
                size[v] = 1
            elif nkids == 1:
                unary = True
    for i in range(n - 1, 0, -1):
        v = order[i]
        p = parent[v]
        lov = lo[v]
        if lov < lo[p]:
            lo[p] = lov
        hiv = hi[v]
        if hiv > hi[p]:
            hi[p] = hiv
        size[p] += size[v]
    return order, parent, lo, hi, size, leaf_index, unary


def _normalize_rooted(tree: Tree) -> Tree:
    """Suppress one-child chains so vertices and clusters correspond 1:1."""
    if not tree.is_rooted:
        raise UnrootedInputError("operation requires rooted trees")
    for v in range(tree.n_vertices):
        deg = len(tree.adj[v])
        if (v == tree.root and deg == 1) or (v != tree.root and deg == 2):
            return suppress_degree_two(tree)
    return tree


def cluster_table(tree: Tree) -> ClusterTable:
    # trees are immutable, so the table is built once and reused (Day's
    # method amortizes one table over k query trees)
    cached = tree.__dict__.get("_cluster_table")
    if cached is not None:
        return cached
    if tree.n_vertices == 1:
        table = ClusterTable({tree.labels[0]: 0}, frozenset(), 0)
    elif tree.n_vertices == 2:
        lab = next(iter(tree.labels[v] for v in range(2) if v != tree.root))
        table = ClusterTable({lab: 0}, frozenset(((0, 0),)), 1)
    else:
        scan = _rooted_scan(tree)
        work = tree
        if scan[6]:
            work = suppress_degree_two(tree)
            scan = _rooted_scan(work)
        _, _, lo, hi, _, leaf_index, _ = scan
        root = work.root
        intervals = frozenset(
            (lo[v], hi[v]) for v in range(work.n_vertices) if v != root
        )
        table = ClusterTable(leaf_index, intervals, len(intervals))
    tree.__dict__["_cluster_table"] = table
    return table


def _shared_cluster_count(table: ClusterTable, tree: Tree) -> int:
    """Number of clusters of ``tree`` present in the table (singletons too).

    Single fused pass: the bottom-up fold finalizes (lo, hi, size) of each
    vertex right before it merges into its parent, so the interval lookup
    happens in the same loop.
    """
    if tree.n_vertices == 1:
        return 0
    if tree.n_vertices == 2:
        return 1 if table.intervals else 0
    for v in range(tree.n_vertices):
        deg = len(tree.adj[v])
        if (v == tree.root and deg == 1) or (v != tree.root and deg == 2):
            tree = suppress_degree_two(tree)
            break

    n = tree.n_vertices
    adj = tree.adj
    labels = tree.labels
    leaf_index = table.leaf_order
    root = tree.root
    parent = [-1] * n
    lo = [n] * n
    hi = [-1] * n
    size = [0] * n
    order = [root]
    append = order.append
    shared = 0
    for v in order:
        pv = parent[v]
        nkids = 0
        for w in adj[v]:
            if w != pv:
                parent[w] = v
                append(w)
                nkids += 1
        if nkids == 0:
            idx = leaf_index[labels[v]]
            lo[v] = hi[v] = idx
            size[v] = 1
            shared += 1  # singleton clusters are always shared
    intervals = table.intervals
    for i in range(n - 1, 0, -1):
        v = order[i]
        p = parent[v]
        s = size[v]
        lov = lo[v]
        hiv = hi[v]
        if s > 1 and s == hiv - lov + 1 and (lov, hiv) in intervals:
            shared += 1
        if lov < lo[p]:
            lo[p] = lov
        if hiv > hi[p]:
            hi[p] = hiv
        size[p] += s
    return shared


# ---------------------------------------------------------------------------
# Robinson-Foulds distance
# ---------------------------------------------------------------------------


def rf_distance(a: Tree, b: Tree) -> int:
    """|C_A \\ C_B| + |C_B \\ C_A| in time linear in the leaf count.

    Rooted trees compare cluster sets.  As a documented extension, two
    unrooted trees compare their non-trivial split sets through the same
    interval table (the table tree is rooted at a reference leaf, which
    turns splits into clusters not containing that leaf).
    """
    _require_same_labels(a, b)
    if a.is_rooted != b.is_rooted:
        raise UnrootedInputError("cannot mix rooted and unrooted trees")
    if not a.is_rooted:
        return _rf_distance_unrooted(a, b)
    b = _normalize_rooted(b)
    table = cluster_table(a)
    shared = _shared_cluster_count(table, b)
    ca = table.n_clusters
    cb = b.n_vertices - 1 if b.n_vertices > 1 else 0
    return ca + cb - 2 * shared


def _root_at_leaf(tree: Tree, label) -> Tree:
    v = tree.vertex_by_label[label]
    return Tree(tree.edge_list, tree.labels, root=v, weights=tree.weights,
                n_vertices=tree.n_vertices)


def _rf_distance_unrooted(a: Tree, b: Tree) -> int:
    a = suppress_degree_two(a)
    b = suppress_degree_two(b)
    ref = min(a.label_set)
    ar = _root_at_leaf(a, ref)
    br = _root_at_leaf(b, ref)
    # non-trivial splits of the leaf-rooted orientation are exactly the
    # clusters of size 2..n-2 (pendant splits and the ref edge drop out)
    n = len(a.label_set)
    table = cluster_table(ar)
    valid = frozenset(
        (lo, hi) for lo, hi in table.intervals if 2 <= hi - lo + 1 <= n - 2
    )
    ca = len(valid)

    _, _, lo, hi, size, _, _ = _rooted_scan(br, table.leaf_order)
    shared = 0
    cb = 0
    for v in range(br.n_vertices):
        if v == br.root:
            continue
        s = size[v]
        if 2 <= s <= n - 2:
            cb += 1
            if s == hi[v] - lo[v] + 1 and (lo[v], hi[v]) in valid:
                shared += 1
    return ca + cb - 2 * shared


def rf_distance_oracle(a: Tree, b: Tree) -> int:
    """Reference implementation: explicit cluster sets, symmetric difference.

    Quadratic in the worst case, used to pin the fast path at desk scale.
    Unrooted trees compare non-trivial split sets.
    """
    _require_same_labels(a, b)
    if a.is_rooted != b.is_rooted:
        raise UnrootedInputError("cannot mix rooted and unrooted trees")
    if a.is_rooted:
        ca = clusters(a)
        cb = clusters(b)
    else:
        ca = frozenset(
            sp for sp in splits(suppress_degree_two(a)).values() if not sp.is_trivial
        )
        cb = frozenset(
            sp for sp in splits(suppress_degree_two(b)).values() if not sp.is_trivial
        )
    return len(ca.symmetric_difference(cb))


# ---------------------------------------------------------------------------
# Strict consensus
# ---------------------------------------------------------------------------


def strict_consensus(trees) -> Tree:
    """Smallest rooted tree whose cluster set is the intersection of all
    the input trees' cluster sets."""
    trees = list(trees)
    if not trees:
        raise ValueError("need at least one tree")
    first = _normalize_rooted(trees[0])
    for t in trees[1:]:
        _require_same_labels(first, t)
        if not t.is_rooted:
            raise UnrootedInputError("strict consensus takes rooted trees")

    table = cluster_table(first)
    shared = set(table.intervals)
    for t in trees[1:]:
        t = _normalize_rooted(t)
        _, _, lo, hi, size, _, _ = _rooted_scan(t, table.leaf_order)
        mine = set()
        for v in range(t.n_vertices):
            if v == t.root:
                continue
            if size[v] == hi[v] - lo[v] + 1:
                mine.add((lo[v], hi[v]))
        shared &= mine

    by_index = sorted(table.leaf_order, key=table.leaf_order.get)
    family = [frozenset(by_index[lo:hi + 1]) for lo, hi in shared]
    return tree_from_clusters(first.label_set, family)


def shared_cluster_count(a: Tree, b: Tree) -> int:
    """|C_A ∩ C_B| via the interval table (singletons included)."""
    a = _normalize_rooted(a)
    b = _normalize_rooted(b)
    _require_same_labels(a, b)
    return _shared_cluster_count(cluster_table(a), b)


# ---------------------------------------------------------------------------
# Robinson-Foulds Length
# ---------------------------------------------------------------------------


@dataclass
class RflResult:
    """Value plus the diagnostics of the matched-edge computation."""

    value: float
    matching: dict          # edge of A -> edge of B, split-equal pairs
    unmatched_a: list       # [(edge, weight)] contributing their full weight
    unmatched_b: list
    matched_term: float
    unmatched_term: float


_AMBIGUITY_CAP = 4096


def rfl_distance(a: Tree, b: Tree, raw: bool = False) -> RflResult:
    """Weight-aware Robinson-Foulds: unmatched edge weights plus |w - w'|
    over split-matched edge pairs.

    Default mode suppresses degree-2 vertices first (reading rooted inputs
    as unrooted), which makes splits within each tree pairwise distinct and
    the matching function unique.  Raw mode keeps the trees as given; when
    several matchings exist the call raises AmbiguousMatchingError carrying
    every achievable value, reproducing the non-uniqueness the plain
    definition suffers from.
    """
    _require_same_labels(a, b)
    if not (a.is_weighted and b.is_weighted):
        raise UnweightedInputError("length distance needs edge weights")
    if not raw:
        a = unrooted_view(a)
        b = unrooted_view(b)

    sa = splits(a)
    sb = splits(b)
    groups_a: dict = {}
    for e, sp in sa.items():
        groups_a.setdefault(sp, []).append(e)
    groups_b: dict = {}
    for e, sp in sb.items():
        groups_b.setdefault(sp, []).append(e)

    unmatched_a = [(e, a.weights[e]) for e, sp in sa.items() if sp not in groups_b]
    unmatched_b = [(e, b.weights[e]) for e, sp in sb.items() if sp not in groups_a]
    unmatched_term = sum(w for _, w in unmatched_a) + sum(w for _, w in unmatched_b)

    matched_pairs = []   # (a_edge, candidate b_edges)
    for sp, edges_a in groups_a.items():
        edges_b = groups_b.get(sp)
        if not edges_b:
            continue
        for e in edges_a:
            matched_pairs.append((e, edges_b))

    ambiguous = any(len(cands) > 1 for _, cands in matched_pairs)
    if ambiguous:
        # every choice combination gives one candidate value
        sums = {0.0}
        for e, cands in matched_pairs:
            wa = a.weights[e]
            deltas = {abs(wa - b.weights[f]) for f in cands}
            sums = {s + d for s in sums for d in deltas}
            if len(sums) > _AMBIGUITY_CAP:
                raise TooLargeError("too many distinct candidate matchings")
        raise AmbiguousMatchingError(unmatched_term + s for s in sums)

    matching = {e: cands[0] for e, cands in matched_pairs}
    matched_term = sum(abs(a.weights[e] - b.weights[f]) for e, f in matching.items())
    return RflResult(
        value=unmatched_term + matched_term,
        matching=matching,
        unmatched_a=unmatched_a,
        unmatched_b=unmatched_b,
        matched_term=matched_term,
        unmatched_term=unmatched_term,
    )


# ---------------------------------------------------------------------------
# Metric-axiom checking
# ---------------------------------------------------------------------------


@dataclass
class MetricReport:
    n_trees: int
    checked_pairs: int = 0
    checked_triples: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def metric_axioms_report(sample, distance, identity=is_identical,
                         tol: float = 0.0) -> MetricReport:
    """Exhaustively test metric axioms on a sample of trees.

    Non-negativity, d = 0 iff identical (per the supplied identity), symmetry
    and the triangle inequality over every pair/triple; each violation is
    recorded as a human-readable string with its witnesses.
    """
    sample = list(sample)
    report = MetricReport(n_trees=len(sample))
    d = {}
    for i, t in enumerate(sample):
        for j, u in enumerate(sample):
            if j < i:
                continue
            val = distance(t, u)
            val = val.value if hasattr(val, "value") else val
            val = val.length if hasattr(val, "length") else val
            d[i, j] = d[j, i] = val
            report.checked_pairs += 1
            if val < -tol:
                report.violations.append(f"negative: d({i},{j}) = {val}")
            same = identity(t, u)
            if same and abs(val) > tol:
                report.violations.append(f"identity: d({i},{j}) = {val} on identical trees")
            if not same and abs(val) <= tol and i != j:
                report.violations.append(f"indiscernible: d({i},{j}) = 0 on distinct trees")
            back = distance(u, t)
            back = back.value if hasattr(back, "value") else back
            back = back.length if hasattr(back, "length") else back
            if abs(back - val) > tol:
                report.violations.append(f"asymmetric: d({i},{j})={val} d({j},{i})={back}")
    n = len(sample)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k in (i, j):
                    continue
                report.checked_triples += 1
                if d[i, j] > d[i, k] + d[k, j] + tol:
                    report.violations.append(
                        f"triangle: d({i},{j}) > d({i},{k}) + d({k},{j})"
                    )
    return report


def rf_is_metric_suite(sample, distance=None, identity=None, tol=0.0) -> MetricReport:
    """Metric-axiom report for RF (or an injected distance, for self-tests)."""
    return metric_axioms_report(
        sample,
        distance=distance or rf_distance,
        identity=identity or is_identical,
        tol=tol,
    )
