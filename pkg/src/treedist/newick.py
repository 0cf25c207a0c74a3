"""Newick reading and writing.

Grammar accepted (whitespace between tokens is ignored)::

    document := tree+
    tree     := subtree ";"
    subtree  := leaf | "(" subtree ("," subtree)+ ")" [label] [":" weight]
    leaf     := label [":" weight]
    label    := unquoted | "'" quoted "'"     ('' escapes a quote)
    weight   := non-negative decimal, scientific notation allowed

Internal node labels are parsed and dropped with a warning: trees here are
dendrograms, labels live on leaves.  Newick does not encode rootedness, so a
top-level vertex of degree 2 is read as a root, degree 3 or more as an
unrooted internal vertex; callers can force either reading.

The parser never recurses, so arbitrarily deep caterpillars are fine.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import (
    DuplicateLabelError,
    EmptyInputError,
    NegativeWeightError,
    NewickSyntaxError,
)
from .tree import Tree, canonical_key, edge_key

_UNQUOTED_FORBIDDEN = set("()[]{},:;'\" \t\r\n")


class NewickWarning(UserWarning):
    """Recoverable oddities in Newick input (dropped internal labels etc.)."""


@dataclass
class NewickDocument:
    """Trees parsed from one text, with the byte offset each tree started at."""

    trees: list = field(default_factory=list)
    source_positions: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __getitem__(self, i):
        return self.trees[i]


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str):
        raise NewickSyntaxError(message, self.line, self.col)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self._advance()

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _advance(self):
        if self.text[self.pos] == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        self.pos += 1

    def take(self):
        ch = self.peek()
        self._advance()
        return ch

    def read_label(self):
        """Quoted or unquoted label at the cursor; '' inside quotes escapes."""
        if self.peek() == "'":
            self._advance()
            out = []
            while True:
                if self.pos >= len(self.text):
                    self.error("unterminated quoted label")
                ch = self.take()
                if ch == "'":
                    if self.peek() == "'":
                        out.append("'")
                        self._advance()
                    else:
                        return "".join(out)
                else:
                    out.append(ch)
        out = []
        while self.pos < len(self.text) and self.text[self.pos] not in _UNQUOTED_FORBIDDEN:
            out.append(self.take())
        return "".join(out)

    def read_number(self):
        start = self.pos
        line, col = self.line, self.col
        if self.peek() in "+-":
            self._advance()
        digits = False
        while self.peek().isdigit():
            self._advance()
            digits = True
        if self.peek() == ".":
            self._advance()
            while self.peek().isdigit():
                self._advance()
                digits = True
        if self.peek() in "eE":
            self._advance()
            if self.peek() in "+-":
                self._advance()
            exp_digits = False
            while self.peek().isdigit():
                self._advance()
                exp_digits = True
            if not exp_digits:
                self.error("malformed exponent in edge weight")
        if not digits:
            self.line, self.col = line, col
            self.error("expected a number after ':'")
        return float(self.text[start:self.pos])


def parse(text: str, rooted: bool | None = None, strict: bool = True) -> NewickDocument:
    """Parse one or more semicolon-terminated trees.

    rooted=None applies the degree rule per tree; True/False forces the
    reading for every tree.  strict=False tolerates single-child groups by
    suppressing the redundant vertex (weights along the chain add up).
    """
    doc = NewickDocument()
    sc = _Scanner(text)
    while True:
        sc.skip_ws()
        if sc.pos >= len(sc.text):
            break
        start_offset = sc.pos
        tree = _parse_one(sc, rooted, strict)
        doc.source_positions[len(doc.trees)] = start_offset
        doc.trees.append(tree)
    if not doc.trees:
        raise EmptyInputError("no tree found in input")
    return doc


def parse_one(text: str, rooted: bool | None = None, strict: bool = True) -> Tree:
    """Parse exactly one tree (extra trees in the text are an error)."""
    doc = parse(text, rooted=rooted, strict=strict)
    if len(doc) != 1:
        raise NewickSyntaxError(f"expected one tree, found {len(doc)}", 1, 1)
    return doc[0]


def _parse_one(sc: _Scanner, rooted, strict) -> Tree:
    # Stack-of-children parse: every '(' opens a list, every ')' closes it
    # into a fresh internal vertex.
    n_vertices = 0
    edges: list[tuple[int, int]] = []
    weights: dict[tuple[int, int], float] = {}
    any_weight = False
    labels: dict[int, str] = {}
    label_seen: set[str] = set()
    dropped_internal_labels = 0

    def new_vertex():
        nonlocal n_vertices
        n_vertices += 1
        return n_vertices - 1

    stack: list[list[tuple[int, float | None]]] = []
    # (vertex, weight) of the finished subtree waiting for its parent
    pending: tuple[int, float | None] | None = None

    def finish_node(vertex, weight):
        nonlocal pending
        pending = (vertex, weight)

    def read_suffix():
        """Optional ':weight' after a leaf name or a closed group."""
        sc.skip_ws()
        w = None
        if sc.peek() == ":":
            sc.take()
            sc.skip_ws()
            line, col = sc.line, sc.col
            w = sc.read_number()
            if w < 0:
                raise NegativeWeightError(
                    f"negative edge weight {w} (line {line}, column {col})"
                )
        return w

    while True:
        sc.skip_ws()
        ch = sc.peek()
        if ch == "":
            sc.error("unexpected end of input (missing ';'?)")
        if ch == "(":
            sc.take()
            stack.append([])
            continue
        if ch == ")":
            if not stack:
                sc.error("unbalanced ')'")
            sc.take()
            children = stack.pop()
            if len(children) < 1:
                sc.error("empty group '()'")
            sc.skip_ws()
            inner_label = ""
            if sc.peek() not in ":,();" and sc.peek() != "":
                inner_label = sc.read_label()
            if inner_label:
                dropped_internal_labels += 1
            w = read_suffix()
            if len(children) == 1:
                if strict:
                    sc.error("single-child group (strict mode)")
                child_v, child_w = children[0]
                if child_w is not None or w is not None:
                    merged = (child_w or 0.0) + (w or 0.0)
                else:
                    merged = None
                finish_node(child_v, merged)
            else:
                v = new_vertex()
                for child_v, child_w in children:
                    edges.append((v, child_v))
                    if child_w is not None:
                        weights[edge_key(v, child_v)] = child_w
                finish_node(v, w)
        elif ch == ",":
            sc.error("unexpected ','")
        elif ch == ";":
            sc.error("unexpected ';'")
        else:
            line, col = sc.line, sc.col
            lab = sc.read_label()
            if not lab:
                sc.error(f"unexpected character {ch!r}")
            w = read_suffix()
            v = new_vertex()
            if lab in label_seen:
                raise DuplicateLabelError(
                    f"duplicate leaf label {lab!r} (line {line}, column {col})"
                )
            label_seen.add(lab)
            labels[v] = lab
            finish_node(v, w)

        # pending subtree: route it to the enclosing group or finish the tree
        sc.skip_ws()
        ch = sc.peek()
        if stack:
            stack[-1].append(pending)
            pending = None
            if ch == ",":
                sc.take()
                continue
            if ch == ")":
                continue
            if ch == "":
                sc.error("unexpected end of input inside '('")
            if ch not in "(":
                sc.error(f"expected ',' or ')', found {ch!r}")
            sc.error("unexpected '('")
        else:
            if ch != ";":
                sc.error(f"expected ';' after tree, found {ch!r}")
            sc.take()
            break

    top, top_weight = pending
    if top_weight is not None:
        warnings.warn(
            "weight above the top-level vertex has no edge; dropped",
            NewickWarning,
            stacklevel=3,
        )
    if dropped_internal_labels:
        warnings.warn(
            f"dropped {dropped_internal_labels} internal node label(s): "
            "trees are leaf-labeled",
            NewickWarning,
            stacklevel=3,
        )

    any_weight = bool(weights)
    if any_weight and len(weights) < len(edges):
        warnings.warn(
            "tree mixes weighted and unweighted edges; missing weights read as 0",
            NewickWarning,
            stacklevel=3,
        )
    final_weights = None
    if any_weight:
        final_weights = {edge_key(*e): weights.get(edge_key(*e), 0.0) for e in edges}

    if n_vertices == 1:
        return Tree([], labels, root=0 if rooted else None,
                    weights={} if any_weight else None, n_vertices=1)

    top_degree = sum(1 for a, b in edges if a == top or b == top)
    if rooted is None:
        rooted = top_degree == 2
    root = top if rooted else None
    return Tree(edges, labels, root=root, weights=final_weights,
                n_vertices=n_vertices)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _format_weight(w: float, precision) -> str:
    if precision is None:
        return repr(float(w))
    return f"{w:.{precision}f}"


def _needs_quoting(label: str) -> bool:
    return any(c in _UNQUOTED_FORBIDDEN for c in label)


def _quote(label: str) -> str:
    if _needs_quoting(label):
        return "'" + label.replace("'", "''") + "'"
    return label


def serialize(tree: Tree, precision: int | None = None) -> str:
    """Deterministic Newick text for a tree.

    Children are emitted in canonical order (by smallest leaf label in the
    subtree), so weight-identical trees serialize to the same string.
    Weights are written with ``precision`` decimals, or exactly (shortest
    round-tripping form) when precision is None; unweighted trees carry no
    ':' suffixes.  Unrooted trees are written from the internal vertex next
    to their smallest leaf, giving a top-level vertex of degree >= 3.
    """
    if tree.n_vertices == 1:
        return _quote(tree.labels[0]) + ";"
    if tree.n_vertices == 2:
        # a single-edge tree has no internal vertex to write, so the edge
        # weight goes on the first child and a 0 pads the second
        a, b = sorted(tree.labels.values())
        if tree.is_weighted:
            w = tree.weights[tree.edge_list[0]]
            parts = [
                _quote(a) + ":" + _format_weight(w, precision),
                _quote(b) + ":" + _format_weight(0.0, precision),
            ]
        else:
            parts = [_quote(a), _quote(b)]
        return "(" + ",".join(parts) + ");"

    if tree.is_rooted:
        work = tree
        start = tree.root
    else:
        anchor = tree.vertex_by_label[min(tree.label_set)]
        start = tree.adj[anchor][0]
        work = Tree(tree.edge_list, tree.labels, root=start,
                    weights=tree.weights, n_vertices=tree.n_vertices)

    # canonical child order: sort by minimum label in subtree
    min_label: dict[int, str] = {}
    for v in work.postorder():
        kids = work.children[v]
        if not kids:
            min_label[v] = work.labels.get(v, "")
        else:
            m = min(min_label[c] for c in kids)
            lab = work.labels.get(v)
            if lab is not None and lab < m:
                m = lab
            min_label[v] = m

    # iterative assembly, children before parents
    rendered: dict[int, str] = {}
    agenda = [(start, False)]
    while agenda:
        v, expanded = agenda.pop()
        kids = sorted(work.children[v], key=lambda c: min_label[c])
        if not expanded and kids:
            agenda.append((v, True))
            for c in kids:
                agenda.append((c, False))
            continue
        if not kids:
            rendered[v] = _quote(work.labels[v])
        else:
            parts = []
            for c in kids:
                s = rendered.pop(c)
                if tree.is_weighted:
                    s += ":" + _format_weight(work.weights[edge_key(v, c)], precision)
                parts.append(s)
            body = "(" + ",".join(parts) + ")"
            if v in work.labels:
                # labeled internal vertices (contract output) keep the
                # standard Newick label slot; parsers drop it again
                body += _quote(work.labels[v])
            rendered[v] = body
    return rendered[start] + ";"


def serialize_document(trees, precision: int | None = None) -> str:
    """One tree per line."""
    return "\n".join(serialize(t, precision) for t in trees) + "\n"
