"""Dependency treebanks: CoNLL-U parsing/serialization and projectivity tools.

Only the ID, FORM, UPOS, HEAD and DEPREL columns are modeled; the other five
CoNLL-U columns pass through as "_". Token indices are 1-based and head 0
denotes the virtual root.
"""

from dataclasses import dataclass

from hexaparse.errors import ConlluParseError, TreeStructureError

ROOT_LABEL = "root"
FALLBACK_LABEL = "dep"

CONLLU_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    """One word line: 1-based index, surface form, POS category, head, arc label."""

    index: int
    form: str
    upos: str
    head: int
    deprel: str

    def __post_init__(self):
        if self.index < 1:
            raise TreeStructureError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise TreeStructureError(f"head must be >= 0, got {self.head}")
        if self.head == self.index:
            raise TreeStructureError(f"token {self.index} is its own head")


@dataclass(frozen=True)
class DepTree:
    """A sentence with a single-rooted, cycle-free head function."""

    tokens: tuple[Token, ...]

    def __post_init__(self):
        n = len(self.tokens)
        if n == 0:
            raise TreeStructureError("empty sentence")
        for i, tok in enumerate(self.tokens, start=1):
            if tok.index != i:
                raise TreeStructureError(
                    f"token indices must be contiguous from 1; position {i} has index {tok.index}"
                )
            if tok.head > n:
                raise TreeStructureError(f"token {i} has head {tok.head} beyond sentence length {n}")
        roots = [tok.index for tok in self.tokens if tok.head == 0]
        if len(roots) == 0:
            raise TreeStructureError("no root token (head = 0)")
        if len(roots) > 1:
            raise TreeStructureError(f"multiple root tokens: {roots}")
        # Every token must reach the root without revisiting a node.
        heads = [tok.head for tok in self.tokens]
        for start in range(1, n + 1):
            seen = set()
            node = start
            while node != 0:
                if node in seen:
                    raise TreeStructureError(f"cycle through token {node}")
                seen.add(node)
                node = heads[node - 1]

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def heads(self) -> list[int]:
        return [tok.head for tok in self.tokens]

    @property
    def deprels(self) -> list[str]:
        return [tok.deprel for tok in self.tokens]

    @property
    def forms(self) -> list[str]:
        return [tok.form for tok in self.tokens]

    @property
    def upos(self) -> list[str]:
        return [tok.upos for tok in self.tokens]

    @property
    def root(self) -> int:
        """Index of the token whose head is the virtual root."""
        for tok in self.tokens:
            if tok.head == 0:
                return tok.index
        raise AssertionError("validated tree has a root")

    @classmethod
    def from_heads(
        cls,
        heads: list[int],
        deprels: list[str] | None = None,
        forms: list[str] | None = None,
        upos: list[str] | None = None,
    ) -> "DepTree":
        """Build a tree from parallel lists, with placeholder forms/labels."""
        n = len(heads)
        if deprels is None:
            deprels = [ROOT_LABEL if h == 0 else FALLBACK_LABEL for h in heads]
        if forms is None:
            forms = [f"w{i}" for i in range(1, n + 1)]
        if upos is None:
            upos = ["_"] * n
        tokens = tuple(
            Token(i + 1, forms[i], upos[i], heads[i], deprels[i]) for i in range(n)
        )
        return cls(tokens)


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of sentences plus where they came from."""

    sentences: tuple[DepTree, ...]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


def _parse_token_line(line: str, lineno: int) -> Token | None:
    """Parse one CoNLL-U token line; None for multiword ranges and empty nodes."""
    cols = line.split("\t")
    if len(cols) != CONLLU_COLUMNS:
        raise ConlluParseError(
            f"expected {CONLLU_COLUMNS} tab-separated columns, got {len(cols)}", lineno
        )
    tok_id = cols[0]
    if "-" in tok_id or "." in tok_id:
        # Multiword-token ranges ("3-4") and empty nodes ("3.1") carry no
        # head of their own and are skipped.
        return None
    try:
        index = int(tok_id)
    except ValueError:
        raise ConlluParseError(f"malformed token ID {tok_id!r}", lineno) from None
    try:
        head = int(cols[6])
    except ValueError:
        raise ConlluParseError(f"malformed integer HEAD {cols[6]!r}", lineno) from None
    try:
        return Token(index=index, form=cols[1], upos=cols[3], head=head, deprel=cols[7])
    except TreeStructureError as exc:
        raise ConlluParseError(str(exc), lineno) from None


def parse_conllu(text: str, provenance: str = "") -> Corpus:
    """Parse CoNLL-U text into a Corpus.

    Sentences are blank-line separated; '#' lines are comments; multiword
    ranges and empty nodes are skipped. Structural problems (multiple roots,
    cycles) are reported with the 1-based sentence number.
    """
    sentences: list[DepTree] = []
    block: list[Token] = []
    block_line = 0

    def finish_block():
        nonlocal block
        if not block:
            return
        sent_no = len(sentences) + 1
        try:
            sentences.append(DepTree(tuple(block)))
        except TreeStructureError as exc:
            raise TreeStructureError(
                f"{exc.args[0]} (starting at line {block_line})", sentence=sent_no
            ) from None
        block = []

    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if stripped == "":
            finish_block()
            continue
        if stripped.startswith("#"):
            continue
        tok = _parse_token_line(line, lineno)
        if tok is None:
            continue
        if not block:
            block_line = lineno
        block.append(tok)
    finish_block()
    return Corpus(tuple(sentences), provenance=provenance)


def write_conllu(corpus: Corpus) -> str:
    """Serialize a Corpus; unknown columns are emitted as "_"."""
    blocks = []
    for tree in corpus:
        lines = [
            f"{t.index}\t{t.form}\t_\t{t.upos}\t_\t_\t{t.head}\t{t.deprel}\t_\t_"
            for t in tree.tokens
        ]
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def _subtree_spans(heads: list[int]):
    """Yield (size, lo, hi) of every token's subtree, computed bottom-up."""
    n = len(heads)
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for i, h in enumerate(heads, start=1):
        children[h].append(i)
    size = [1] * (n + 1)
    lo = list(range(n + 1))
    hi = list(range(n + 1))
    # Process nodes in reverse topological order: repeatedly fold leaves.
    order: list[int] = []
    stack = [0]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(children[node])
    for node in reversed(order):
        for child in children[node]:
            size[node] += size[child]
            lo[node] = min(lo[node], lo[child])
            hi[node] = max(hi[node], hi[child])
    return size, lo, hi


def is_projective(tree: DepTree) -> bool:
    """True iff every token between an arc's endpoints descends from its head.

    Equivalent to: every subtree covers a contiguous span of the sentence,
    which is checked here in linear time.
    """
    heads = tree.heads
    size, lo, hi = _subtree_spans(heads)
    return all(hi[i] - lo[i] + 1 == size[i] for i in range(1, len(heads) + 1))


def crossing_arcs(heads: list[int]) -> tuple[tuple[int, int], tuple[int, int]] | None:
    """First pair of crossing arcs under the drawn-above-the-sentence picture.

    The virtual root arc (0, r) participates, so an arc spanning the root
    word counts as a crossing. Independent of is_projective by construction;
    O(N^2), used for error reporting and as a test oracle.
    """
    arcs = [(min(h, i), max(h, i)) for i, h in enumerate(heads, start=1)]
    for a in range(len(arcs)):
        for b in range(a + 1, len(arcs)):
            (a1, a2), (b1, b2) = arcs[a], arcs[b]
            if a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2:
                return arcs[a], arcs[b]
    return None


def _is_single_rooted_tree(heads: list[int]) -> bool:
    n = len(heads)
    if sum(1 for h in heads if h == 0) != 1:
        return False
    if any(h < 0 or h > n or h == i for i, h in enumerate(heads, start=1)):
        return False
    for start in range(1, n + 1):
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                return False
            seen.add(node)
            node = heads[node - 1]
    return True


def enumerate_projective_trees(n: int, labels: list[str] | None = None) -> list[DepTree]:
    """All projective single-root trees over n words, in head-vector order.

    Brute force over head assignments filtered by treeness and projectivity;
    intended as a test oracle, hence the small-n bound.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"n must be in [1, 6], got {n}")
    trees: list[DepTree] = []

    def assign(pos: int, heads: list[int]):
        if pos == n:
            if _is_single_rooted_tree(heads):
                tree = DepTree.from_heads(heads, deprels=_cycle_labels(heads, labels))
                if is_projective(tree):
                    trees.append(tree)
            return
        for h in range(0, n + 1):
            if h == pos + 1:
                continue
            heads.append(h)
            assign(pos + 1, heads)
            heads.pop()

    assign(0, [])
    return trees


def _cycle_labels(heads: list[int], labels: list[str] | None) -> list[str] | None:
    if labels is None:
        return None
    pool = sorted(labels)
    return [
        ROOT_LABEL if h == 0 else pool[(i - 1) % len(pool)]
        for i, h in enumerate(heads, start=1)
    ]


def random_projective_tree(rng, n: int, labels: list[str] | None = None) -> DepTree:
    """Sample a random projective tree by recursive span construction.

    A head position is drawn inside the span, the words on each side are cut
    into contiguous blocks, and each block becomes a dependent subtree. This
    never consults the arc-crossing test, so it can serve as an independent
    source of projective inputs.
    """
    heads = [0] * n
    pool = sorted(labels) if labels else None
    deprels = [FALLBACK_LABEL] * n

    def build(lo: int, hi: int, head_parent: int):
        h = int(rng.integers(lo, hi + 1))
        heads[h - 1] = head_parent
        if pool is not None:
            deprels[h - 1] = ROOT_LABEL if head_parent == 0 else pool[int(rng.integers(0, len(pool)))]
        for a, b in (lo, h - 1), (h + 1, hi):
            start = a
            while start <= b:
                end = int(rng.integers(start, b + 1))
                build(start, end, h)
                start = end + 1

    build(1, n, 0)
    return DepTree.from_heads(heads, deprels=deprels if pool is not None else None)
