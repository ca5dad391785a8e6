"""Shared test utilities: independent oracles and synthetic data generators.

Everything in this module is deliberately written from first principles rather
than by calling back into the package under test, so that agreement between a
library result and a helper result is meaningful evidence of correctness.
"""

from __future__ import annotations

import itertools
import random

from hexaparse.treebank import DepTree

#: Dependency labels used when generating random labeled trees.
LABEL_POOL = (
    "nsubj",
    "obj",
    "iobj",
    "det",
    "amod",
    "advmod",
    "case",
    "nmod",
    "obl",
    "mark",
    "cc",
    "conj",
)


def arc_standard_random_heads(rng: random.Random, n: int) -> list[int]:
    """Sample a random projective head vector via shift-reduce transitions.

    A uniform random walk over the legal moves of an arc-standard transition
    system (shift / left-arc / right-arc).  Every walk terminates with a
    single stack element, and every tree produced this way is projective, so
    this serves as a generator that shares no code with the library's own
    projectivity machinery.
    """
    if n < 1:
        raise ValueError("need at least one word")
    heads = [0] * (n + 1)
    stack: list[int] = []
    nxt = 1
    while nxt <= n or len(stack) > 1:
        moves = []
        if nxt <= n:
            moves.append("shift")
        if len(stack) >= 2:
            moves.append("left")
            moves.append("right")
        move = moves[rng.randrange(len(moves))]
        if move == "shift":
            stack.append(nxt)
            nxt += 1
        elif move == "left":
            dep = stack.pop(-2)
            heads[dep] = stack[-1]
        else:
            dep = stack.pop()
            heads[dep] = stack[-1]
    heads[stack[0]] = 0
    return heads[1:]


def random_labeled_tree(rng: random.Random, n: int) -> DepTree:
    """Random projective tree with labels drawn from LABEL_POOL."""
    heads = arc_standard_random_heads(rng, n)
    deprels = ["root" if h == 0 else rng.choice(LABEL_POOL) for h in heads]
    return DepTree.from_heads(heads, deprels=deprels)


def is_tree_oracle(heads: list[int]) -> bool:
    """True iff the head vector forms a single-rooted tree over 1..n."""
    n = len(heads)
    if sum(1 for h in heads if h == 0) != 1:
        return False
    if any(h < 0 or h > n for h in heads):
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


def crossing_pair_oracle(heads: list[int]) -> tuple | None:
    """First pair of crossing arcs, or None.  Includes the root arc (0, r)."""
    arcs = [(min(i + 1, h), max(i + 1, h)) for i, h in enumerate(heads)]
    for a, b in itertools.combinations(arcs, 2):
        lo, hi = (a, b) if a <= b else (b, a)
        if lo[0] < hi[0] < lo[1] < hi[1]:
            return lo, hi
    return None


def is_projective_oracle(heads: list[int]) -> bool:
    return is_tree_oracle(heads) and crossing_pair_oracle(heads) is None


def enumerate_trees_oracle(n: int) -> list[tuple[int, ...]]:
    """All projective single-rooted head vectors over n words, brute force."""
    found = []
    for heads in itertools.product(range(n + 1), repeat=n):
        if is_projective_oracle(list(heads)):
            found.append(heads)
    return found


def parity_sequences(n: int):
    """Every tag-kind sequence of length 2n-1 respecting position parity."""
    alphabets = []
    for pos in range(2 * n - 1):
        alphabets.append(("tl", "tr") if pos % 2 == 0 else ("LL", "LR", "RL", "RR"))
    return itertools.product(*alphabets)


def valid_by_depth_oracle(kinds, max_depth: int | None = None) -> bool:
    """Independent fold of the depth automaton over tag kinds."""
    depth = 0
    for pos, kind in enumerate(kinds):
        if pos % 2 == 0:
            if kind == "tl":
                if max_depth is not None and depth + 1 > max_depth:
                    return False
                depth += 1
            elif kind == "tr":
                if depth < 1:
                    return False
            else:
                return False
        else:
            if kind in ("RL", "RR"):
                if depth < 2:
                    return False
                depth -= 1
            elif kind in ("LL", "LR"):
                if depth < 1:
                    return False
            else:
                return False
    return depth == 1


# ---------------------------------------------------------------------------
# Synthetic training corpus
# ---------------------------------------------------------------------------

_DETS = ("the", "a", "this", "that", "each", "some")
_ADJS = ("shiny", "dusty", "grumpy", "fuzzy", "tiny", "sleepy", "hungry", "noisy")
_NOUNS = (
    "fox", "dog", "baker", "tiger", "river", "stone", "garden", "window",
    "piano", "lantern", "sailor", "meadow", "kettle", "falcon", "ladder", "barrel",
)
_VERBS = ("sees", "finds", "chases", "paints", "guards", "follows", "carries", "watches")
_ADPS = ("in", "on", "near", "under", "behind")
_ADVS = ("quickly", "softly", "eagerly", "calmly")


def toy_grammar_sentence(rng: random.Random) -> DepTree:
    """One synthetic sentence with gold heads, labels, and coarse POS tags.

    Shape: DET [ADJ] NOUN VERB DET [ADJ] NOUN [ADP DET NOUN] [ADV] PUNCT
    Head rules are deterministic given the shape, so a tagger with local
    features can learn the mapping.
    """
    words: list[tuple[str, str]] = []  # (form, upos)

    def noun_phrase() -> int:
        words.append((rng.choice(_DETS), "DET"))
        det = len(words)
        adj = None
        if rng.random() < 0.5:
            words.append((rng.choice(_ADJS), "ADJ"))
            adj = len(words)
        words.append((rng.choice(_NOUNS), "NOUN"))
        noun = len(words)
        arcs[det] = (noun, "det")
        if adj is not None:
            arcs[adj] = (noun, "amod")
        return noun

    arcs: dict[int, tuple[int, str]] = {}
    subj = noun_phrase()
    words.append((rng.choice(_VERBS), "VERB"))
    verb = len(words)
    arcs[subj] = (verb, "nsubj")
    arcs[verb] = (0, "root")
    obj = noun_phrase()
    arcs[obj] = (verb, "obj")
    if rng.random() < 0.6:
        words.append((rng.choice(_ADPS), "ADP"))
        adp = len(words)
        pobj = noun_phrase()
        arcs[adp] = (pobj, "case")
        arcs[pobj] = (verb, "obl")
    if rng.random() < 0.4:
        words.append((rng.choice(_ADVS), "ADV"))
        arcs[len(words)] = (verb, "advmod")
    words.append((".", "PUNCT"))
    arcs[len(words)] = (verb, "punct")

    heads = [arcs[i + 1][0] for i in range(len(words))]
    deprels = [arcs[i + 1][1] for i in range(len(words))]
    return DepTree.from_heads(
        heads,
        deprels=deprels,
        forms=[w for w, _ in words],
        upos=[u for _, u in words],
    )


def toy_grammar_corpus(rng: random.Random, n_sentences: int) -> list[DepTree]:
    return [toy_grammar_sentence(rng) for _ in range(n_sentences)]


def attach_to_previous_heads(n: int) -> list[int]:
    """Baseline predictor: every word attaches to the one before it."""
    return [i for i in range(n)]
