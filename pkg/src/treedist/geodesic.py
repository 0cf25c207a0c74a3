"""Geodesic distance in the space of edge-weighted trees.

Every binary topology on a label set owns a Euclidean orthant whose
coordinates are its internal edge weights; orthants are glued where trees
share a split, and the geodesic is the shortest path through the resulting
non-positively-curved complex.  Rooted trees live in the same picture after
gaining a pendant marker leaf above the root (clades become splits that
never contain the marker).

Computation follows the support-refinement scheme:

* splits present in both trees, and unique splits compatible with the whole
  other tree, move along the geodesic independently; they contribute plain
  coordinate differences, combined in quadrature,
* the remaining unique splits (each incompatible with something across the
  pair) are partitioned into an ordered support (A_1..A_k, B_1..B_k) with
    (P1)  A_i compatible with B_j for i > j,
    (P2)  ||A_1||/||B_1|| <= ... <= ||A_k||/||B_k||,
  giving internal length  sqrt( sum_i (||A_i|| + ||B_i||)^2 ),
* starting from the single-block cone support, any pair violating the
  optimality condition (P3) is split: a minimum-weight vertex cover of the
  pair's incompatibility graph, with vertex weights w(e)^2 normalized by
  the block norm squared, has weight < 1 exactly when a strictly shorter
  proper path exists, and the cover tells how to cut both blocks.

The cover weights are the squared normalized form: writing x, y for the
squared normalized cover halves, the shortcut condition
||C_1||/||D_1|| < ||C_2||/||D_2|| reduces algebraically to x + y < 1.

``geodesic_oracle`` ignores the refinement machinery entirely: it tries
every ordered-partition pair satisfying (P1) (after the same quadrature
reduction), repairs ratio order by pooling adjacent violators, and takes
the minimum.  Exponential, desk scale, and the arbiter of correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import networkx as nx

from .errors import (
    DomainError,
    LabelSetMismatchError,
    NonConvergenceError,
    RootednessError,
    TooLargeError,
    UnweightedInputError,
)
from .tree import (
    ROOT_LABEL,
    Split,
    Tree,
    _require_same_labels,
    augment_with_root_marker,
    compatible,
    edge_key,
    splits as tree_splits,
    suppress_degree_two,
    tree_from_splits,
)

_TOL = 1e-12


# ---------------------------------------------------------------------------
# Split sets and decomposition
# ---------------------------------------------------------------------------


@dataclass
class SplitSet:
    """Weighted internal splits of one tree plus its pendant edge weights."""

    entries: dict = field(default_factory=dict)       # Split -> weight
    leaf_weights: dict = field(default_factory=dict)  # label -> weight

    @property
    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))


def _weighted_split_map(tree: Tree):
    """Internal split -> weight, with pendant weights split out.

    Zero-weight internal edges denote the same point as the contracted
    topology, so their splits are dropped outright.
    """
    internal: dict = {}
    pendant: dict = {}
    for e, sp in tree_splits(tree).items():
        w = tree.weights[e]
        if sp.is_trivial:
            (leaf,) = min(sp.sides, key=len)
            pendant[leaf] = w
        elif w > 0.0:
            internal[sp] = w
    return internal, pendant


def _normalized_pair(a: Tree, b: Tree):
    """Common weighted-tree footing: marker-augmented if rooted, degree-2
    suppressed, same label universe."""
    _require_same_labels(a, b)
    if a.is_rooted != b.is_rooted:
        raise RootednessError("cannot mix rooted and unrooted trees")
    if not (a.is_weighted and b.is_weighted):
        raise UnweightedInputError("geodesic distance needs edge weights")
    rooted = a.is_rooted
    if rooted:
        a = augment_with_root_marker(a)
        b = augment_with_root_marker(b)
    a = suppress_degree_two(a)
    b = suppress_degree_two(b)
    return a, b, rooted


def decompose(a: Tree, b: Tree):
    """Partition internal splits into shared and tree-unique sets.

    Returns (common, a_unique, b_unique) where common maps each shared
    split to its weight pair and the SplitSets carry each side's unique
    internal splits plus all pendant weights.  Rooted inputs are read in
    marker-augmented form, so their "splits" are clades.
    """
    an, bn, _ = _normalized_pair(a, b)
    sa, pa = _weighted_split_map(an)
    sb, pb = _weighted_split_map(bn)
    common = {sp: (sa[sp], sb[sp]) for sp in sa.keys() & sb.keys()}
    a_unique = SplitSet({sp: w for sp, w in sa.items() if sp not in common}, pa)
    b_unique = SplitSet({sp: w for sp, w in sb.items() if sp not in common}, pb)
    return common, a_unique, b_unique


def cone_path_length(a: SplitSet, b: SplitSet) -> float:
    """Length of the two-segment path through the origin: ||A|| + ||B||.

    Operates on unique-split sets (shared splits removed first); the value
    upper-bounds the geodesic's internal part.
    """
    return a.norm + b.norm


# ---------------------------------------------------------------------------
# Problem instance: quadrature part + interacting unique splits
# ---------------------------------------------------------------------------


@dataclass
class _Instance:
    label_set: frozenset
    rooted: bool
    common: list          # (split, w_a, w_b)
    carry_a: list         # (split, w_a): unique but compatible with all of B
    carry_b: list
    pendant: list         # (label, w_a, w_b)
    include_pendant: bool
    rem_a: dict           # split -> weight, every one incompatible somewhere
    rem_b: dict
    incompat: dict        # split -> frozenset of incompatible opposite splits

    @property
    def quad(self) -> float:
        q = sum((wa - wb) ** 2 for _, wa, wb in self.common)
        q += sum(w * w for _, w in self.carry_a)
        q += sum(w * w for _, w in self.carry_b)
        if self.include_pendant:
            q += sum((wa - wb) ** 2 for _, wa, wb in self.pendant)
        return q


def _build_instance(a: Tree, b: Tree, include_pendant: bool) -> _Instance:
    an, bn, rooted = _normalized_pair(a, b)
    sa, pa = _weighted_split_map(an)
    sb, pb = _weighted_split_map(bn)

    common = [(sp, sa[sp], sb[sp]) for sp in sa.keys() & sb.keys()]
    for sp, _, _ in common:
        del sa[sp]
        del sb[sp]

    incompat_a = {
        sp: frozenset(t for t in sb if not compatible(sp, t)) for sp in sa
    }
    incompat_b = {
        sp: frozenset(t for t in sa if not compatible(sp, t)) for sp in sb
    }
    carry_a = [(sp, w) for sp, w in sa.items() if not incompat_a[sp]]
    carry_b = [(sp, w) for sp, w in sb.items() if not incompat_b[sp]]
    rem_a = {sp: w for sp, w in sa.items() if incompat_a[sp]}
    rem_b = {sp: w for sp, w in sb.items() if incompat_b[sp]}
    incompat = {sp: s for sp, s in incompat_a.items() if s}
    incompat.update((sp, s) for sp, s in incompat_b.items() if s)

    labels = sorted(set(pa) | set(pb))
    pendant = [(lab, pa.get(lab, 0.0), pb.get(lab, 0.0)) for lab in labels
               if lab != ROOT_LABEL]
    return _Instance(
        label_set=an.label_set,
        rooted=rooted,
        common=common,
        carry_a=carry_a,
        carry_b=carry_b,
        pendant=pendant,
        include_pendant=include_pendant,
        rem_a=rem_a,
        rem_b=rem_b,
        incompat=incompat,
    )


# ---------------------------------------------------------------------------
# Extension problem: minimum-weight vertex cover via max flow
# ---------------------------------------------------------------------------


def _min_weight_cover(block_a, block_b, wa, wb, incompat):
    """Minimum-weight vertex cover of the pair's incompatibility graph.

    Vertex weights are w^2 normalized by the block's squared norm.  Returns
    None when the minimum is >= 1 (no shortcut, P3 holds for this pair),
    otherwise the four non-empty pieces (C1, C2, D1, D2).
    """
    na2 = sum(wa[s] ** 2 for s in block_a)
    nb2 = sum(wb[s] ** 2 for s in block_b)
    bset = frozenset(block_b)

    g = nx.DiGraph()
    source, sink = "s", "t"
    for i, s in enumerate(block_a):
        g.add_edge(source, ("a", i), capacity=wa[s] ** 2 / na2)
    for j, t in enumerate(block_b):
        g.add_edge(("b", j), sink, capacity=wb[t] ** 2 / nb2)
    for i, s in enumerate(block_a):
        hits = incompat[s] & bset
        for j, t in enumerate(block_b):
            if t in hits:
                g.add_edge(("a", i), ("b", j))  # no capacity attr = infinite

    cut_value, (s_side, _) = nx.minimum_cut(g, source, sink)
    if cut_value >= 1.0 - _TOL:
        return None

    c1 = [s for i, s in enumerate(block_a) if ("a", i) not in s_side]
    d2 = [t for j, t in enumerate(block_b) if ("b", j) in s_side]
    c1_set, d2_set = set(c1), set(d2)

    # trim cover members whose incompatibilities are already covered by the
    # other half; keeps every block of the refined support non-empty
    changed = True
    while changed:
        changed = False
        for s in list(c1_set):
            if incompat[s] & bset <= d2_set:
                c1_set.discard(s)
                changed = True
        for t in list(d2_set):
            if incompat[t] & frozenset(block_a) <= c1_set:
                d2_set.discard(t)
                changed = True

    c1 = tuple(s for s in block_a if s in c1_set)
    c2 = tuple(s for s in block_a if s not in c1_set)
    d1 = tuple(t for t in block_b if t not in d2_set)
    d2 = tuple(t for t in block_b if t in d2_set)
    if not (c1 and c2 and d1 and d2):
        # cover degenerated to a whole block: treat as no shortcut
        return None
    return c1, c2, d1, d2


def _norm(splits, w) -> float:
    return math.sqrt(sum(w[s] ** 2 for s in splits))


def _refine_component(comp_a, comp_b, wa, wb, incompat, max_iterations):
    """Run support refinement on one connected incompatibility component.

    Returns (legs, iterations): legs are (a_block, b_block, ||A||, ||B||)
    in ratio order.
    """
    blocks = [(tuple(comp_a), tuple(comp_b))]
    iterations = 0
    i = 0
    while i < len(blocks):
        block_a, block_b = blocks[i]
        cut = None
        if len(block_a) > 1 or len(block_b) > 1:
            cut = _min_weight_cover(block_a, block_b, wa, wb, incompat)
        if cut is None:
            i += 1
            continue
        iterations += 1
        if iterations > max_iterations:
            raise NonConvergenceError(
                "support refinement exceeded its bound; numeric trouble"
            )
        c1, c2, d1, d2 = cut
        blocks[i:i + 1] = [(c1, d1), (c2, d2)]
    legs = [
        (ba, bb, _norm(ba, wa), _norm(bb, wb))
        for ba, bb in blocks
    ]
    return legs, iterations


# ---------------------------------------------------------------------------
# Geodesic distance
# ---------------------------------------------------------------------------


@dataclass
class GeodesicSupport:
    """Ordered block partitions of the interacting unique splits."""

    a_blocks: tuple
    b_blocks: tuple


@dataclass
class GeodesicResult:
    length: float
    support: GeodesicSupport
    common_edge_contribution: float
    iterations: int
    legs: list = field(repr=False, default_factory=list)
    instance: _Instance = field(repr=False, default=None)

    @property
    def internal_length(self) -> float:
        return math.sqrt(sum((na + nb) ** 2 for _, _, na, nb in self.legs))


def _components(rem_a, rem_b, incompat):
    """Connected components of the bipartite incompatibility graph."""
    seen = set()
    comps = []
    for start in list(rem_a) + list(rem_b):
        if start in seen:
            continue
        comp = {start}
        queue = [start]
        while queue:
            v = queue.pop()
            for w in incompat[v]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        comps.append((
            [s for s in rem_a if s in comp],
            [s for s in rem_b if s in comp],
        ))
    return comps


def geodesic_distance(a: Tree, b: Tree, include_pendant: bool = True) -> GeodesicResult:
    """Geodesic between two weighted trees on one label set.

    Both rooted (clade space) or both unrooted (split space); inputs are
    normalized first (degree-2 suppression, zero-weight internal edges
    contracted).  Pendant edge weights contribute coordinate differences by
    default; ``include_pendant=False`` restricts the metric to internal
    edges only.
    """
    inst = _build_instance(a, b, include_pendant)
    n_splits = len(inst.rem_a) + len(inst.rem_b)
    legs = []
    iterations = 0
    for comp_a, comp_b in _components(inst.rem_a, inst.rem_b, inst.incompat):
        comp_legs, its = _refine_component(
            comp_a, comp_b, inst.rem_a, inst.rem_b, inst.incompat,
            max_iterations=n_splits + 1,
        )
        legs.extend(comp_legs)
        iterations += its

    legs.sort(key=lambda leg: leg[2] / leg[3])

    # merge ratio ties so the support is canonical; equal-ratio legs add the
    # same length merged or split
    merged = []
    for leg in legs:
        while merged:
            pa, pb, na, nb = merged[-1]
            qa, qb, ma, mb = leg
            if abs(na * mb - ma * nb) <= _TOL * max(1.0, na * mb, ma * nb):
                leg = (pa + qa, pb + qb, math.hypot(na, ma), math.hypot(nb, mb))
                merged.pop()
            else:
                break
        merged.append(leg)
    legs = merged

    internal_sq = sum((na + nb) ** 2 for _, _, na, nb in legs)
    quad = inst.quad
    length = math.sqrt(internal_sq + quad)
    support = GeodesicSupport(
        a_blocks=tuple(frozenset(leg[0]) for leg in legs),
        b_blocks=tuple(frozenset(leg[1]) for leg in legs),
    )
    return GeodesicResult(
        length=length,
        support=support,
        common_edge_contribution=math.sqrt(quad),
        iterations=iterations,
        legs=legs,
        instance=inst,
    )


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def _ordered_partitions(items, k):
    """All ways to split ``items`` into exactly k non-empty ordered blocks."""
    n = len(items)
    if k > n:
        return
    assignment = [0] * n

    def rec(pos):
        if pos == n:
            blocks = [[] for _ in range(k)]
            for idx, bi in enumerate(assignment):
                blocks[bi].append(items[idx])
            if all(blocks):
                yield tuple(tuple(b) for b in blocks)
            return
        for bi in range(k):
            assignment[pos] = bi
            yield from rec(pos + 1)

    yield from rec(0)


def _pav_length_sq(legs):
    """Internal length^2 of a support after pooling adjacent ratio
    violators (the path-space geodesic of a merely P1-valid support)."""
    stack = []
    for na, nb in legs:
        cur_a, cur_b = na, nb
        while stack:
            pa, pb = stack[-1]
            if pa * cur_b <= cur_a * pb + _TOL:
                break
            stack.pop()
            cur_a = math.hypot(pa, cur_a)
            cur_b = math.hypot(pb, cur_b)
        stack.append((cur_a, cur_b))
    return sum((na + nb) ** 2 for na, nb in stack)


def geodesic_oracle(a: Tree, b: Tree, include_pendant: bool = True,
                    max_unique: int = 5) -> float:
    """Exhaustive minimum over all (P1)-valid ordered-partition supports.

    Exponential in the unique-split counts; refuses more than
    ``max_unique`` unique splits per side.
    """
    inst = _build_instance(a, b, include_pendant)
    p, q = len(inst.rem_a), len(inst.rem_b)
    if (p + len(inst.carry_a) > max_unique) or (q + len(inst.carry_b) > max_unique):
        raise TooLargeError(f"more than {max_unique} unique splits per side")

    quad = inst.quad
    if p == 0:
        return math.sqrt(quad)

    a_items = list(inst.rem_a)
    b_items = list(inst.rem_b)
    wa = inst.rem_a
    wb = inst.rem_b
    # compatibility masks: bit i of mask[t] set when b-split t is compatible
    # with a-split i
    amask = {s: 1 << i for i, s in enumerate(a_items)}
    compat_mask = {}
    for t in b_items:
        m = 0
        for i, s in enumerate(a_items):
            if t not in inst.incompat[s]:
                m |= 1 << i
        compat_mask[t] = m

    best_sq = None
    for k in range(1, min(p, q) + 1):
        for parts_a in _ordered_partitions(a_items, k):
            suffix = [0] * (k + 1)
            for i in range(k - 1, -1, -1):
                block_bits = 0
                for s in parts_a[i]:
                    block_bits |= amask[s]
                suffix[i] = suffix[i + 1] | block_bits
            norms_a = [_norm(blk, wa) for blk in parts_a]
            for parts_b in _ordered_partitions(b_items, k):
                ok = True
                for j in range(k):
                    need = suffix[j + 1]
                    if not need:
                        break
                    m = ~0
                    for t in parts_b[j]:
                        m &= compat_mask[t]
                    if (m & need) != need:
                        ok = False
                        break
                if not ok:
                    continue
                legs = [
                    (norms_a[i], _norm(parts_b[i], wb)) for i in range(k)
                ]
                cand = _pav_length_sq(legs)
                if best_sq is None or cand < best_sq:
                    best_sq = cand
    if best_sq is None:  # pragma: no cover - cone support always qualifies
        raise AssertionError("no P1 support found")
    return math.sqrt(best_sq + quad)


# ---------------------------------------------------------------------------
# Point along the geodesic
# ---------------------------------------------------------------------------


def interior_point(result: GeodesicResult, t: float) -> Tree:
    """Tree at normalized arc length t in [0, 1] along the geodesic.

    All coordinates are affine in t: shared and pendant weights interpolate
    linearly, a block A_i vanishes at t_i = ||A_i|| / (||A_i|| + ||B_i||)
    and B_i grows from t_i on.  Output is in normalized form (unrooted view
    or, for rooted inputs, re-rooted below the marker), so the endpoints
    reproduce the normalized inputs exactly.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    inst = result.instance
    split_w: dict = {}
    for sp, wa_, wb_ in inst.common:
        split_w[sp] = (1.0 - t) * wa_ + t * wb_
    for sp, w in inst.carry_a:
        split_w[sp] = (1.0 - t) * w
    for sp, w in inst.carry_b:
        split_w[sp] = t * w
    for block_a, block_b, na, nb in result.legs:
        scale_a = 1.0 - t * (na + nb) / na
        if t == 0.0:
            scale_a = 1.0  # endpoints reproduce input weights bit-exactly
        if scale_a > _TOL:
            for sp in block_a:
                split_w[sp] = inst.rem_a[sp] * scale_a
        scale_b = (t * (na + nb) - na) / nb
        if t == 1.0:
            scale_b = 1.0
        if scale_b > _TOL:
            for sp in block_b:
                split_w[sp] = inst.rem_b[sp] * scale_b
    split_w = {sp: w for sp, w in split_w.items() if w > 0.0}

    leaf_w = {lab: (1.0 - t) * wa_ + t * wb_ for lab, wa_, wb_ in inst.pendant}
    if inst.rooted:
        leaf_w[ROOT_LABEL] = 0.0
    tree = tree_from_splits(inst.label_set, split_w, leaf_w)
    if inst.rooted:
        tree = _deaugment(tree)
    return tree


def _deaugment(tree: Tree) -> Tree:
    """Remove the marker leaf and root the tree at its attachment vertex."""
    marker = tree.vertex_by_label[ROOT_LABEL]
    anchor = tree.adj[marker][0]

    def remap(v):
        return v if v < marker else v - 1

    edges = []
    weights = {} if tree.is_weighted else None
    for u, v in tree.edge_list:
        if marker in (u, v):
            continue
        e = (remap(u), remap(v))
        edges.append(e)
        if weights is not None:
            weights[edge_key(*e)] = tree.weights[edge_key(u, v)]
    labels = {remap(v): lab for v, lab in tree.labels.items() if v != marker}
    return Tree(edges, labels, root=remap(anchor), weights=weights,
                n_vertices=tree.n_vertices - 1)


# ---------------------------------------------------------------------------
# Support verification (used by the invariants tests)
# ---------------------------------------------------------------------------


def verify_support(result: GeodesicResult, exhaustive_limit: int = 10) -> list:
    """Re-check P1, P2, and (for small blocks) P3 on a computed support.

    Returns a list of violation strings; empty means the support passes.
    """
    problems = []
    inst = result.instance
    legs = result.legs
    w = dict(inst.rem_a)
    w.update(inst.rem_b)

    for i in range(len(legs)):
        for j in range(i):
            for s in legs[i][0]:
                for u in legs[j][1]:
                    if not compatible(s, u):
                        problems.append(f"P1: block {i} vs {j}")
    ratios = [(na, nb) for _, _, na, nb in legs]
    for (na, nb), (ma, mb) in zip(ratios, ratios[1:]):
        if na * mb > ma * nb + 1e-9 * max(1.0, na * mb):
            problems.append("P2: ratios decrease")
    for idx, (block_a, block_b, na, nb) in enumerate(legs):
        if len(block_a) + len(block_b) > exhaustive_limit:
            continue
        block_a = tuple(block_a)
        block_b = tuple(block_b)
        for r in range(1, len(block_a)):
            for c1 in combinations(block_a, r):
                c2 = tuple(s for s in block_a if s not in c1)
                for r2 in range(1, len(block_b)):
                    for d1 in combinations(block_b, r2):
                        d2 = tuple(s for s in block_b if s not in d1)
                        if any(
                            not compatible(s, u) for s in c2 for u in d1
                        ):
                            continue
                        lhs = _norm(c1, w) * _norm(d2, w)
                        rhs = _norm(c2, w) * _norm(d1, w)
                        if lhs < rhs - 1e-9:
                            problems.append(f"P3: leg {idx} admits a shortcut")
    return problems
