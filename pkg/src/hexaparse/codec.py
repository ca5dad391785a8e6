"""Hexatag sequences: linearization of BHTs, the validity automaton, and text forms.

A sentence of n words maps to exactly 2n−1 tags: terminal tags ("tl"/"tr",
optionally carrying an arc label as "tl/nsubj") at odd positions and
nonterminal tags ("LL", "LR", "RL", "RR") at even positions. The first letter
of a tag names the node's direction relative to its parent; a nonterminal's
second letter names the side of its own constituent head. Valid sequences are
exactly those accepted by a depth automaton over the left-corner transition
system, which also drives the sequence-to-BHT rebuild.
"""

from dataclasses import dataclass

from hexaparse.bht import (
    HEAD_LEFT,
    HEAD_RIGHT,
    BhtNode,
    BinarizationOrder,
    Internal,
    Leaf,
    bht_to_dep,
    check_well_formed,
    dep_to_bht,
)
from hexaparse.errors import (
    DecodeError,
    InvalidTransitionError,
    TagParseError,
    TreeStructureError,
    UnknownTagError,
)
from hexaparse.treebank import FALLBACK_LABEL, ROOT_LABEL, Corpus, DepTree

TERMINAL_LEFT = "tl"
TERMINAL_RIGHT = "tr"
NONTERMINAL_KINDS = ("LL", "LR", "RL", "RR")
ALL_KINDS = (TERMINAL_LEFT, TERMINAL_RIGHT) + NONTERMINAL_KINDS

# Depth requirement and depth change per tag kind, for the validity automaton.
_MIN_DEPTH = {"tl": 0, "tr": 1, "LL": 1, "LR": 1, "RL": 2, "RR": 2}
_DEPTH_DELTA = {"tl": +1, "tr": 0, "LL": 0, "LR": 0, "RL": -1, "RR": -1}


@dataclass(frozen=True)
class Hexatag:
    """One tagging decision; labels are allowed on terminal kinds only."""

    kind: str
    label: str | None = None

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise DecodeError(f"unknown tag kind {self.kind!r}")
        if self.label is not None:
            if not self.is_terminal:
                raise DecodeError(f"nonterminal tag {self.kind} cannot carry a label")
            if self.label == "":
                raise DecodeError("tag label must be non-empty")

    @property
    def is_terminal(self) -> bool:
        return self.kind in (TERMINAL_LEFT, TERMINAL_RIGHT)


def serialize_tag(tag: Hexatag) -> str:
    if tag.label is None:
        return tag.kind
    return f"{tag.kind}/{tag.label}"


def parse_tag(token: str) -> Hexatag:
    kind, sep, label = token.partition("/")
    if kind not in ALL_KINDS:
        raise UnknownTagError(f"unknown tag {token!r}")
    if not sep:
        return Hexatag(kind)
    if kind not in (TERMINAL_LEFT, TERMINAL_RIGHT):
        raise UnknownTagError(f"nonterminal tag {kind!r} cannot carry a label")
    if label == "":
        raise UnknownTagError(f"empty label in tag {token!r}")
    return Hexatag(kind, label)


@dataclass(frozen=True)
class TagSequence:
    """2n−1 tags with terminals at odd (1-based) positions, nonterminals at even."""

    tags: tuple[Hexatag, ...]

    def __post_init__(self):
        if isinstance(self.tags, list):
            object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.tags) == 0 or len(self.tags) % 2 == 0:
            raise DecodeError(f"tag sequence length must be odd and positive, got {len(self.tags)}")
        for pos0, tag in enumerate(self.tags):
            want_terminal = pos0 % 2 == 0
            if tag.is_terminal != want_terminal:
                kind = "terminal" if want_terminal else "nonterminal"
                raise DecodeError(f"position {pos0 + 1} must hold a {kind} tag, got {tag.kind!r}")

    @property
    def n(self) -> int:
        """Sentence length implied by the 2n−1 rule."""
        return (len(self.tags) + 1) // 2

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self):
        return iter(self.tags)

    def __getitem__(self, i):
        return self.tags[i]


def serialize_tags(seq: TagSequence) -> str:
    """One sentence as a space-separated line (no trailing newline)."""
    return " ".join(serialize_tag(t) for t in seq)


def parse_tags(text: str) -> list[TagSequence]:
    """Inverse of serialize_tags over a whole file; blank lines are ignored."""
    out: list[TagSequence] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        tags: list[Hexatag] = []
        column = 1
        for token in line.split(" "):
            if token == "":
                column += 1
                continue
            try:
                tags.append(parse_tag(token))
            except UnknownTagError as exc:
                raise TagParseError(str(exc), column=column, line=lineno) from None
            column += len(token) + 1
        try:
            out.append(TagSequence(tuple(tags)))
        except DecodeError as exc:
            raise TagParseError(str(exc), column=None, line=lineno) from None
    return out


@dataclass(frozen=True)
class ValidityState:
    """Automaton state: number of stack elements after `position` tags."""

    depth: int = 0
    position: int = 0


def step_validity(state: ValidityState, tag: Hexatag, max_depth: int | None = None) -> ValidityState:
    """Advance the depth automaton by one tag or raise on an illegal move.

    Terminal "tl" pushes (+1, capped at max_depth when given); "tr" and the
    "L*" nonterminals keep depth (needing ≥ 1); "R*" nonterminals pop (−1,
    needing ≥ 2). Tag kind must match the position's parity.
    """
    pos1 = state.position + 1
    want_terminal = pos1 % 2 == 1
    if tag.is_terminal != want_terminal:
        kind = "terminal" if want_terminal else "nonterminal"
        raise InvalidTransitionError(f"expected a {kind} tag, got {tag.kind!r}", position=pos1)
    need = _MIN_DEPTH[tag.kind]
    if state.depth < need:
        raise InvalidTransitionError(
            f"tag {tag.kind!r} needs stack depth >= {need}, have {state.depth}",
            position=pos1,
            required_depth=need,
        )
    new_depth = state.depth + _DEPTH_DELTA[tag.kind]
    if max_depth is not None and new_depth > max_depth:
        raise InvalidTransitionError(
            f"tag {tag.kind!r} would exceed the stack depth cap {max_depth}",
            position=pos1,
        )
    return ValidityState(depth=new_depth, position=pos1)


def is_valid_sequence(tags, max_depth: int | None = None) -> bool:
    """True iff the automaton accepts every step and ends at depth exactly 1."""
    state = ValidityState()
    try:
        for tag in tags:
            state = step_validity(state, tag, max_depth)
    except InvalidTransitionError:
        return False
    return state.depth == 1


def bht_to_tags(bht: BhtNode, labeled: bool = False) -> TagSequence:
    """Linearize a BHT by in-order traversal.

    Each leaf yields its child direction ("tl"/"tr", plus the deprel when
    labeled); each internal node yields its child direction joined with its
    own head side. The root counts as a left child.
    """
    check_well_formed(bht)
    tags: list[Hexatag] = []
    stack: list[tuple[BhtNode, bool, bool]] = [(bht, True, False)]
    while stack:
        node, is_left, expanded = stack.pop()
        if isinstance(node, Leaf):
            kind = TERMINAL_LEFT if is_left else TERMINAL_RIGHT
            if labeled:
                if node.deprel is None:
                    raise TreeStructureError(f"leaf {node.index} has no deprel for labeled tagging")
                tags.append(Hexatag(kind, node.deprel))
            else:
                tags.append(Hexatag(kind))
        elif expanded:
            direction = HEAD_LEFT if is_left else HEAD_RIGHT
            tags.append(Hexatag(direction + node.head_side))
        else:
            stack.append((node.right, False, False))
            stack.append((node, is_left, True))
            stack.append((node.left, True, False))
    return TagSequence(tuple(tags))


class _Slot:
    """Internal node under construction; right=None marks the pending hole."""

    __slots__ = ("head_side", "left", "right")

    def __init__(self, head_side, left):
        self.head_side = head_side
        self.left = left
        self.right = None


def _freeze(node) -> BhtNode:
    """Convert the mutable build graph into frozen nodes, children first."""
    order = []
    stack = [node]
    while stack:
        cur = stack.pop()
        order.append(cur)
        if isinstance(cur, _Slot):
            stack.append(cur.left)
            stack.append(cur.right)
    frozen: dict[int, BhtNode] = {}
    for cur in reversed(order):
        if isinstance(cur, _Slot):
            frozen[id(cur)] = Internal(cur.head_side, frozen[id(cur.left)], frozen[id(cur.right)])
        else:
            frozen[id(cur)] = cur
    return frozen[id(node)]


def tags_to_bht(seq: TagSequence) -> BhtNode:
    """Rebuild the BHT a valid sequence encodes, via the left-corner stack machine.

    "tl" shifts a new leaf; "L?" wraps the completed stack top as the left
    child of a fresh node whose right child is pending; "tr" fills the
    pending slot with a leaf; "R?" pops the completed top under a fresh
    pending node and splices that node into the slot below. Exactly inverts
    bht_to_tags; depth violations raise the same way step_validity does.
    """
    # Stack of (subtree root, pending slot or None). Invariants maintained:
    # every element below the top has a pending slot, and after a terminal
    # the top is always complete.
    stack: list[tuple[object, _Slot | None]] = []
    state = ValidityState()
    word = 0
    for tag in seq:
        state = step_validity(state, tag)  # raises on depth/parity violations
        if tag.kind == TERMINAL_LEFT:
            word += 1
            stack.append((Leaf(word, tag.label), None))
        elif tag.kind == TERMINAL_RIGHT:
            word += 1
            root, hole = stack[-1]
            assert hole is not None, "terminal-right with a completed stack top"
            hole.right = Leaf(word, tag.label)
            stack[-1] = (root, None)
        elif tag.kind[0] == HEAD_LEFT:
            root, hole = stack.pop()
            assert hole is None, "left-child nonterminal over an incomplete subtree"
            node = _Slot(tag.kind[1], root)
            stack.append((node, node))
        else:
            root, hole = stack.pop()
            assert hole is None, "right-child nonterminal over an incomplete subtree"
            node = _Slot(tag.kind[1], root)
            below_root, below_hole = stack[-1]
            assert below_hole is not None, "no pending slot to splice into"
            below_hole.right = node
            stack[-1] = (below_root, node)
    if state.depth != 1:
        raise InvalidTransitionError(
            f"sequence leaves {state.depth} stack elements, expected exactly 1",
            position=len(seq),
        )
    root, hole = stack[0]
    assert hole is None, "finished sequence left a pending slot"
    return _freeze(root)


def tree_to_tags(
    tree: DepTree,
    order: BinarizationOrder = BinarizationOrder.LEFT_FIRST,
    labeled: bool = False,
) -> TagSequence:
    """Full encoding pipeline: projective dependency tree to tag sequence."""
    return bht_to_tags(dep_to_bht(tree, order), labeled=labeled)


def tags_to_tree(
    seq: TagSequence,
    forms: list[str] | None = None,
    upos: list[str] | None = None,
    root_label: str = ROOT_LABEL,
    fallback_label: str = FALLBACK_LABEL,
) -> DepTree:
    """Full decoding pipeline: tag sequence to dependency tree.

    Unlabeled sequences yield placeholder deprels (root_label for the root
    word, fallback_label elsewhere).
    """
    bht = tags_to_bht(seq)
    return bht_to_dep(
        bht, seq.n, forms=forms, upos=upos, root_label=root_label, fallback_label=fallback_label
    )


class TagVocab:
    """An id-indexed tag inventory: terminals first, the four nonterminals last.

    The text form is one serialized tag per line, line number = id. Score
    tables index their terminal columns by the terminal ids and their four
    nonterminal columns by the nonterminal order given here.
    """

    def __init__(self, tags):
        self.tags = tuple(tags)
        nonterminals = [t for t in self.tags if not t.is_terminal]
        if [t.kind for t in nonterminals] != list(NONTERMINAL_KINDS):
            raise DecodeError(
                "vocabulary must contain each nonterminal kind exactly once, in order "
                + ", ".join(NONTERMINAL_KINDS)
            )
        if any(not t.is_terminal for t in self.tags[: len(self.tags) - 4]):
            raise DecodeError("vocabulary must list all terminal tags before the nonterminals")
        self.n_terminals = len(self.tags) - 4
        self._id_of = {serialize_tag(t): i for i, t in enumerate(self.tags)}
        if len(self._id_of) != len(self.tags):
            raise DecodeError("duplicate tag in vocabulary")
        self.tl_ids = tuple(i for i, t in enumerate(self.tags) if t.kind == TERMINAL_LEFT)
        self.tr_ids = tuple(i for i, t in enumerate(self.tags) if t.kind == TERMINAL_RIGHT)
        if not self.tl_ids or not self.tr_ids:
            raise DecodeError("vocabulary needs at least one 'tl' and one 'tr' terminal")

    @classmethod
    def unlabeled(cls) -> "TagVocab":
        return cls([Hexatag(k) for k in ALL_KINDS])

    @classmethod
    def labeled(cls, labels) -> "TagVocab":
        """Terminals tl/<label> then tr/<label>, labels sorted; 2·|labels| + 4 tags."""
        pool = sorted(set(labels))
        if not pool:
            raise DecodeError("labeled vocabulary needs at least one label")
        tags = [Hexatag(TERMINAL_LEFT, lab) for lab in pool]
        tags += [Hexatag(TERMINAL_RIGHT, lab) for lab in pool]
        tags += [Hexatag(k) for k in NONTERMINAL_KINDS]
        return cls(tags)

    @classmethod
    def from_corpus(cls, corpus: Corpus, labeled: bool) -> "TagVocab":
        if not labeled:
            return cls.unlabeled()
        labels = {tok.deprel for tree in corpus for tok in tree.tokens}
        return cls.labeled(labels)

    @classmethod
    def parse(cls, text: str) -> "TagVocab":
        tags = []
        for lineno, line in enumerate(text.split("\n"), start=1):
            token = line.strip()
            if not token:
                continue
            try:
                tags.append(parse_tag(token))
            except UnknownTagError as exc:
                raise TagParseError(str(exc), column=1, line=lineno) from None
        return cls(tags)

    def dump(self) -> str:
        return "\n".join(serialize_tag(t) for t in self.tags) + "\n"

    def id_of(self, tag: Hexatag) -> int:
        key = serialize_tag(tag)
        if key not in self._id_of:
            raise UnknownTagError(f"tag {key!r} is not in the vocabulary")
        return self._id_of[key]

    def __len__(self) -> int:
        return len(self.tags)

    def __getitem__(self, i: int) -> Hexatag:
        return self.tags[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, TagVocab) and self.tags == other.tags

    @property
    def nonterminals(self) -> tuple[Hexatag, ...]:
        return self.tags[-4:]

    @property
    def nonterminal_base(self) -> int:
        """Id of the first nonterminal tag."""
        return self.n_terminals
