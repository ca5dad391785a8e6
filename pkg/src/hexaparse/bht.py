"""Binary head trees and their conversions to and from dependency trees.

A binary head tree (BHT) is a full binary tree whose leaves are the sentence
words in order and whose internal nodes record which child contains the
lexical head of the constituent. Projective dependency trees convert to a
canonical BHT and back losslessly; decoding also accepts non-canonical BHTs.
"""

from dataclasses import dataclass
from enum import Enum

from hexaparse.errors import NonProjectiveError, TreeStructureError
from hexaparse.treebank import (
    FALLBACK_LABEL,
    ROOT_LABEL,
    DepTree,
    crossing_arcs,
    is_projective,
)

HEAD_LEFT = "L"
HEAD_RIGHT = "R"


class BinarizationOrder(str, Enum):
    """Which side's dependents are attached first when binarizing a head.

    Both orders produce trees that decode to the same dependency tree; they
    differ only in the shape of the intermediate BHT.
    """

    LEFT_FIRST = "left"
    RIGHT_FIRST = "right"


@dataclass(frozen=True)
class Leaf:
    """A word: 1-based sentence position plus the label of its incoming arc."""

    index: int
    deprel: str | None = None


@dataclass(frozen=True)
class Internal:
    """A constituent whose lexical head lies in the left ("L") or right ("R") child."""

    head_side: str
    left: "BhtNode"
    right: "BhtNode"

    def __post_init__(self):
        if self.head_side not in (HEAD_LEFT, HEAD_RIGHT):
            raise TreeStructureError(f"head_side must be 'L' or 'R', got {self.head_side!r}")


BhtNode = Leaf | Internal


def leaves_in_order(bht: BhtNode) -> list[Leaf]:
    """All leaves left to right (iterative, safe for very deep trees)."""
    out: list[Leaf] = []
    stack = [bht]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return out


def check_well_formed(bht: BhtNode) -> int:
    """Validate span contiguity (leaves are 1..n in order); return n."""
    leaves = leaves_in_order(bht)
    for pos, leaf in enumerate(leaves, start=1):
        if leaf.index != pos:
            raise TreeStructureError(
                f"leaf at in-order position {pos} has word index {leaf.index}; "
                f"expected indices 1..{len(leaves)} in order"
            )
    return len(leaves)


def dep_to_bht(tree: DepTree, order: BinarizationOrder = BinarizationOrder.LEFT_FIRST) -> BhtNode:
    """Binarize a projective dependency tree into its canonical BHT.

    Working depth-first from the root word, each word's dependents are folded
    around it inside-out (nearest dependent first). Attaching a left
    dependent keeps the head in the right child ("R" node); a right dependent
    keeps it in the left child ("L" node). LEFT_FIRST folds the left
    dependents before the right ones, RIGHT_FIRST the reverse; children are
    always ordered by sentence span.
    """
    order = BinarizationOrder(order)
    if not is_projective(tree):
        pair = crossing_arcs(tree.heads)
        raise NonProjectiveError(
            f"cannot binarize a non-projective tree: arcs {pair[0]} and {pair[1]} cross",
            arcs=pair,
        )
    left_deps: list[list[int]] = [[] for _ in range(tree.n + 1)]
    right_deps: list[list[int]] = [[] for _ in range(tree.n + 1)]
    for tok in tree.tokens:
        if tok.head != 0:
            side = left_deps if tok.index < tok.head else right_deps
            side[tok.head].append(tok.index)

    # Words in head-before-dependent order; folding in reverse guarantees
    # every dependent's subtree exists before its head needs it.
    topo: list[int] = []
    stack = [tree.root]
    while stack:
        word = stack.pop()
        topo.append(word)
        stack.extend(left_deps[word])
        stack.extend(right_deps[word])

    built: dict[int, BhtNode] = {}
    passes = ("left", "right") if order is BinarizationOrder.LEFT_FIRST else ("right", "left")
    for word in reversed(topo):
        node: BhtNode = Leaf(word, tree.tokens[word - 1].deprel)
        for side in passes:
            if side == "left":
                for dep in sorted(left_deps[word], reverse=True):  # nearest first
                    node = Internal(HEAD_RIGHT, built[dep], node)
            else:
                for dep in sorted(right_deps[word]):  # nearest first
                    node = Internal(HEAD_LEFT, node, built[dep])
        built[word] = node
    return built[tree.root]


def bht_to_dep(
    bht: BhtNode,
    n: int,
    forms: list[str] | None = None,
    upos: list[str] | None = None,
    root_label: str = ROOT_LABEL,
    fallback_label: str = FALLBACK_LABEL,
) -> DepTree:
    """Read the dependency tree back out of a BHT (canonical or not).

    Post-order: an "L" node makes its right part's head a dependent of its
    left part's head and propagates the left head upward (mirror for "R");
    whatever head survives at the top attaches to the virtual root. Leaf
    deprels become the arc labels, with placeholders when absent.
    """
    n_leaves = check_well_formed(bht)
    if n_leaves != n:
        raise TreeStructureError(f"BHT has {n_leaves} leaves, expected {n}")
    order: list[BhtNode] = []
    stack = [bht]
    while stack:
        node = stack.pop()
        order.append(node)
        if isinstance(node, Internal):
            stack.append(node.left)
            stack.append(node.right)

    heads = [0] * n
    deprel_of: dict[int, str | None] = {}
    subtree_head: dict[int, int] = {}
    for node in reversed(order):  # children before parents
        if isinstance(node, Leaf):
            subtree_head[id(node)] = node.index
            deprel_of[node.index] = node.deprel
        else:
            hl = subtree_head[id(node.left)]
            hr = subtree_head[id(node.right)]
            if node.head_side == HEAD_LEFT:
                heads[hr - 1] = hl
                subtree_head[id(node)] = hl
            else:
                heads[hl - 1] = hr
                subtree_head[id(node)] = hr
    root_word = subtree_head[id(bht)]
    heads[root_word - 1] = 0

    deprels = [
        deprel_of[i] if deprel_of[i] is not None else (root_label if heads[i - 1] == 0 else fallback_label)
        for i in range(1, n + 1)
    ]
    return DepTree.from_heads(heads, deprels=deprels, forms=forms, upos=upos)


def bht_to_bracket(bht: BhtNode, forms: list[str] | None = None, labeled: bool = False) -> str:
    """Debug rendering as a bracketed string, e.g. "(L (R A B) (R C D))"."""
    parts: list[str] = []
    stack: list[BhtNode | str] = [bht]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Leaf):
            text = forms[item.index - 1] if forms else str(item.index)
            if labeled and item.deprel is not None:
                text = f"{text}/{item.deprel}"
            parts.append(text)
        else:
            stack.extend([")", item.right, " ", item.left, f"({item.head_side} "])
    return "".join(parts)
