"""Dependency trees, entity-head resolution, and spanning-subtree extraction.

A relation instance is reduced to the subtree spanning the two entity heads:
the union of the parent-chains from each head up to their lowest common
ancestor.  Per-node heights are computed locally within that subtree, with
its leaves at height 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .parsefile import ParsedSentenceRecord

ROOT_PARENT = -1

# Synthetic node used when sentence trees are joined under one document root
# (cross-sentence entity pairs); its labels are ordinary vocabulary items.
JOIN_SURFACE = "<doc>"
JOIN_POS = "<doc>"
JOIN_DEPLABEL = "<doc>"


class TreeStructureError(ValueError):
    """Head pointers do not form a single-rooted tree."""


@dataclass(frozen=True)
class TreeNode:
    index: int
    surface: str
    pos: str
    deplabel: str
    parent: int                  # ROOT_PARENT for the root
    children: tuple[int, ...]    # sorted by token index
    char_start: int = 0
    char_end: int = 0


class DepTree:
    """Immutable dependency tree over the tokens of one sentence."""

    def __init__(self, nodes: list[TreeNode]):
        roots = [n.index for n in nodes if n.parent == ROOT_PARENT]
        if len(roots) != 1:
            raise TreeStructureError(f"expected exactly one root, found {len(roots)}")
        self.nodes = nodes
        self.root = roots[0]
        self._depths = self._compute_depths()

    def __len__(self):
        return len(self.nodes)

    def _compute_depths(self):
        depths = [-1] * len(self.nodes)
        depths[self.root] = 0
        stack = [self.root]
        while stack:
            i = stack.pop()
            for c in self.nodes[i].children:
                depths[c] = depths[i] + 1
                stack.append(c)
        if any(d < 0 for d in depths):
            raise TreeStructureError("head pointers contain a cycle")
        return depths

    def depth(self, node: int) -> int:
        return self._depths[node]

    def parent(self, node: int) -> int:
        return self.nodes[node].parent

    def ancestors(self, node: int) -> list[int]:
        """Chain from `node` to the root, inclusive."""
        chain = [node]
        while self.nodes[chain[-1]].parent != ROOT_PARENT:
            chain.append(self.nodes[chain[-1]].parent)
        return chain


def build_tree(record: ParsedSentenceRecord) -> DepTree:
    """Build a DepTree from a parse record (1-based heads, 0 = root)."""
    n = len(record.tokens)
    children: list[list[int]] = [[] for _ in range(n)]
    parents = [ROOT_PARENT] * n
    for t in record.tokens:
        i = t.index - 1
        if t.head == 0:
            parents[i] = ROOT_PARENT
        elif 1 <= t.head <= n:
            parents[i] = t.head - 1
            children[t.head - 1].append(i)
        else:
            raise TreeStructureError(
                f"token {t.index}: head {t.head} outside 0..{n}"
            )
    nodes = [
        TreeNode(
            index=i,
            surface=t.form,
            pos=t.pos,
            deplabel=t.deplabel,
            parent=parents[i],
            children=tuple(sorted(children[i])),
            char_start=t.char_start,
            char_end=t.char_end,
        )
        for i, t in enumerate(record.tokens)
    ]
    return DepTree(nodes)


def join_trees(trees: list[DepTree]) -> DepTree:
    """Join sentence trees under one synthetic root node (appended last).

    Token indices of the k-th input tree are shifted by the total size of the
    preceding trees; the synthetic root has no character span.
    """
    if not trees:
        raise ValueError("join_trees needs at least one tree")
    nodes: list[TreeNode] = []
    offsets = []
    total = sum(len(t) for t in trees)
    off = 0
    for t in trees:
        offsets.append(off)
        for node in t.nodes:
            parent = node.parent + off if node.parent != ROOT_PARENT else total
            nodes.append(
                TreeNode(
                    index=node.index + off,
                    surface=node.surface,
                    pos=node.pos,
                    deplabel=node.deplabel,
                    parent=parent,
                    children=tuple(c + off for c in node.children),
                    char_start=node.char_start,
                    char_end=node.char_end,
                )
            )
        off += len(t)
    join_children = tuple(offsets[k] + trees[k].root for k in range(len(trees)))
    nodes.append(
        TreeNode(
            index=total,
            surface=JOIN_SURFACE,
            pos=JOIN_POS,
            deplabel=JOIN_DEPLABEL,
            parent=ROOT_PARENT,
            children=join_children,
        )
    )
    return DepTree(nodes)


def entity_head(tree: DepTree, span: range) -> int:
    """Token inside `span` whose parent lies outside it (the span's governor).

    If several span tokens have external parents (non-projective spans), the
    one closest to the tree root wins, ties broken by smallest token index.
    """
    if len(span) == 0:
        raise ValueError("entity span is empty")
    if span.start < 0 or span.stop > len(tree):
        raise ValueError(f"span {span} outside sentence of {len(tree)} tokens")
    members = set(span)
    candidates = [i for i in span if tree.parent(i) not in members]
    # span covers the whole tree -> only the root has an external (absent) parent
    return min(candidates, key=lambda i: (tree.depth(i), i))


@dataclass
class SpanningSubtree:
    """Union of the two parent-chains from the entity heads to their LCA."""

    tree: DepTree
    node_set: frozenset[int]
    root: int                    # the LCA
    heights: dict[int, int]      # subtree-local, leaves at 0
    head1: int
    head2: int
    children_in_set: dict[int, tuple[int, ...]] = field(repr=False, default=None)

    def __post_init__(self):
        if self.children_in_set is None:
            kids = {i: [] for i in self.node_set}
            for i in self.node_set:
                p = self.tree.parent(i)
                if i != self.root and p in self.node_set:
                    kids[p].append(i)
            self.children_in_set = {i: tuple(sorted(c)) for i, c in kids.items()}

    def __contains__(self, node: int) -> bool:
        return node in self.node_set

    def __len__(self):
        return len(self.node_set)

    def postorder(self) -> list[int]:
        """Children before parents; children visited in token order."""
        order = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
            else:
                stack.append((node, True))
                for c in reversed(self.children_in_set[node]):
                    stack.append((c, False))
        return order


def spanning_subtree(tree: DepTree, h1: int, h2: int) -> SpanningSubtree:
    """Extract the subtree spanning the two head nodes, rooted at their LCA."""
    chain1 = tree.ancestors(h1)
    in_chain1 = {node: pos for pos, node in enumerate(chain1)}
    node = h2
    chain2 = []
    while node not in in_chain1:
        chain2.append(node)
        node = tree.parent(node)
    lca = node
    node_set = frozenset(chain1[: in_chain1[lca] + 1]) | frozenset(chain2) | {lca}

    heights: dict[int, int] = {}
    for n in sorted(node_set, key=tree.depth, reverse=True):
        kids = [c for c in tree.nodes[n].children if c in node_set]
        heights[n] = 1 + max(heights[c] for c in kids) if kids else 0
    return SpanningSubtree(
        tree=tree,
        node_set=node_set,
        root=lca,
        heights=heights,
        head1=h1,
        head2=h2,
    )


def node_height(sub: SpanningSubtree, node: int) -> int:
    """Height of `node` within the subtree; leaves of the subtree are at 0."""
    if node not in sub.node_set:
        raise ValueError(f"node {node} is not in the spanning subtree")
    return sub.heights[node]


def to_bracket(tree: DepTree, node: int | None = None) -> str:
    """Debug dump: `(head child child ...)`, leaves as bare surface forms."""
    if node is None:
        node = tree.root
    n = tree.nodes[node]
    if not n.children:
        return n.surface
    parts = [to_bracket(tree, c) for c in n.children]
    return "(" + " ".join([n.surface] + parts) + ")"
