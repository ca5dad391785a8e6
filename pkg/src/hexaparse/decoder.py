"""Highest-scoring valid tag sequence via DP over the position × stack-depth lattice.

Scores arrive as per-word rows (terminal row r scores sequence position
2r−1, nonterminal row r scores position 2r, 1-based). The DP sweeps the
sequence backwards computing, for every (position, depth) pair, the best
achievable suffix score; a forward greedy pass then reads off the argmax
sequence. Ties resolve to the smallest tag id at the earliest differing
position. With a fixed depth cap the whole search is linear in sentence
length.
"""

from dataclasses import dataclass

import numpy as np

from hexaparse.codec import Hexatag, TagSequence, TagVocab, is_valid_sequence
from hexaparse.errors import DecodeError, ShapeError

NEG_INF = float("-inf")


@dataclass(frozen=True)
class ScoreTable:
    """Log-scores for one sentence, column order fixed by the vocabulary.

    terminal_scores: (n, #terminal tags); nonterminal_scores: (n−1, 4) in
    the vocabulary's nonterminal order (LL, LR, RL, RR). Scores are raw
    log-domain values; normalization is irrelevant to the argmax.
    """

    terminal_scores: np.ndarray
    nonterminal_scores: np.ndarray
    vocab: TagVocab

    def __post_init__(self):
        t = np.asarray(self.terminal_scores, dtype=np.float64)
        nt = np.asarray(self.nonterminal_scores, dtype=np.float64)
        if nt.size == 0:
            nt = nt.reshape(0, 4)
        if t.ndim != 2 or t.shape[0] < 1:
            raise ShapeError(f"terminal_scores must be 2-D with ≥ 1 row, got shape {t.shape}")
        n = t.shape[0]
        if t.shape[1] != self.vocab.n_terminals:
            raise ShapeError(
                f"terminal_scores has {t.shape[1]} columns, vocabulary defines {self.vocab.n_terminals}"
            )
        if nt.shape != (n - 1, 4):
            raise ShapeError(
                f"nonterminal_scores must have shape ({n - 1}, 4), got {nt.shape}"
            )
        if not (np.isfinite(t).all() and np.isfinite(nt).all()):
            raise ShapeError("scores must be finite")
        object.__setattr__(self, "terminal_scores", t)
        object.__setattr__(self, "nonterminal_scores", nt)

    @property
    def n(self) -> int:
        return self.terminal_scores.shape[0]


@dataclass(frozen=True)
class DecodeResult:
    tags: TagSequence
    log_score: float
    depth_profile: tuple[int, ...]


def score_of(tags: TagSequence, scores: ScoreTable) -> float:
    """Sum of the table entries a sequence selects, accumulated left to right."""
    if len(tags) != 2 * scores.n - 1:
        raise ShapeError(
            f"sequence length {len(tags)} does not match table for n={scores.n}"
        )
    vocab = scores.vocab
    base = vocab.nonterminal_base
    total = 0.0
    for pos0, tag in enumerate(tags):
        tag_id = vocab.id_of(tag)
        if pos0 % 2 == 0:
            total += float(scores.terminal_scores[pos0 // 2, tag_id])
        else:
            total += float(scores.nonterminal_scores[(pos0 - 1) // 2, tag_id - base])
    return total


def viterbi_decode(scores: ScoreTable, max_depth: int | None = None) -> DecodeResult:
    """Exact argmax over valid sequences, subject to a stack-depth cap.

    max_depth=None (or anything ≥ n) decodes exactly; smaller caps shrink
    the lattice to n × max_depth at the cost of excluding deep derivations.
    A valid sequence exists for every cap ≥ 1, so failure is only possible
    with a nonsensical cap.
    """
    n = scores.n
    depth_cap = n if max_depth is None else min(max_depth, n)
    if depth_cap < 1:
        raise DecodeError(f"max_depth must be ≥ 1, got {max_depth}")
    vocab = scores.vocab
    t_scores = scores.terminal_scores
    nt_scores = scores.nonterminal_scores
    tl_ids = np.asarray(vocab.tl_ids)
    tr_ids = np.asarray(vocab.tr_ids)
    is_tl = np.zeros(vocab.n_terminals, dtype=bool)
    is_tl[tl_ids] = True

    length = 2 * n - 1
    best_tl = t_scores[:, tl_ids].max(axis=1)
    best_tr = t_scores[:, tr_ids].max(axis=1)
    best_keep = nt_scores[:, :2].max(axis=1) if n > 1 else None
    best_pop = nt_scores[:, 2:].max(axis=1) if n > 1 else None

    # suffix[p][d]: best score of positions p.. given d stack elements, or −inf.
    suffix = np.full((length + 1, depth_cap + 1), NEG_INF)
    suffix[length, 1] = 0.0
    for p in range(length - 1, -1, -1):
        nxt = suffix[p + 1]
        here = suffix[p]
        if p % 2 == 0:
            word = p // 2
            here[:depth_cap] = best_tl[word] + nxt[1:]
            np.maximum(here[1:], best_tr[word] + nxt[1:], out=here[1:])
        else:
            word = (p - 1) // 2
            here[1:] = best_keep[word] + nxt[1:]
            np.maximum(here[2:], best_pop[word] + nxt[1:depth_cap], out=here[2:])
    if suffix[0, 0] == NEG_INF:
        raise DecodeError(
            f"no valid sequence within stack depth {depth_cap}; increase max_depth"
        )

    tags: list[Hexatag] = []
    profile: list[int] = []
    depth = 0
    for p in range(length):
        nxt = suffix[p + 1]
        if p % 2 == 0:
            word = p // 2
            cont_push = nxt[depth + 1] if depth + 1 <= depth_cap else NEG_INF
            cont_keep = nxt[depth] if depth >= 1 else NEG_INF
            values = t_scores[word] + np.where(is_tl, cont_push, cont_keep)
            tag_id = int(np.argmax(values))
            assert values[tag_id] != NEG_INF, "forward pass left the reachable lattice"
            tags.append(vocab[tag_id])
            depth += 1 if is_tl[tag_id] else 0
        else:
            word = (p - 1) // 2
            values = np.empty(4)
            values[:2] = nt_scores[word, :2] + (nxt[depth] if depth >= 1 else NEG_INF)
            values[2:] = nt_scores[word, 2:] + (nxt[depth - 1] if depth >= 2 else NEG_INF)
            col = int(np.argmax(values))
            assert values[col] != NEG_INF, "forward pass left the reachable lattice"
            tags.append(vocab[vocab.nonterminal_base + col])
            depth -= 1 if col >= 2 else 0
        profile.append(depth)

    seq = TagSequence(tuple(tags))
    assert is_valid_sequence(seq), "reconstructed sequence failed the validity automaton"
    return DecodeResult(seq, score_of(seq, scores), tuple(profile))


def brute_force_decode(scores: ScoreTable) -> DecodeResult:
    """Enumeration oracle: try every parity-respecting sequence, keep the valid best.

    Candidates at each position are visited in ascending tag id, so keeping
    a strictly better score reproduces the tie rule (smallest id at the
    earliest differing position). Depth-impossible branches are pruned,
    which discards only invalid sequences.
    """
    n = scores.n
    if n > 6:
        raise DecodeError(f"brute-force decoding is limited to n ≤ 6, got {n}")
    vocab = scores.vocab
    base = vocab.nonterminal_base
    is_tl = np.zeros(vocab.n_terminals, dtype=bool)
    is_tl[np.asarray(vocab.tl_ids)] = True
    length = 2 * n - 1

    best: dict[str, object] = {"score": None, "tags": None, "profile": None}

    def extend(pos0: int, depth: int, total: float, chosen: list[int], profile: list[int]):
        if pos0 == length:
            if depth == 1 and (best["score"] is None or total > best["score"]):
                best["score"] = total
                best["tags"] = tuple(chosen)
                best["profile"] = tuple(profile)
            return
        remaining_pops = (length - pos0) // 2
        if depth - 1 > remaining_pops:
            return  # cannot unwind to depth 1 anymore
        if pos0 % 2 == 0:
            row = scores.terminal_scores[pos0 // 2]
            for tag_id in range(vocab.n_terminals):
                if is_tl[tag_id]:
                    new_depth = depth + 1
                elif depth >= 1:
                    new_depth = depth
                else:
                    continue
                chosen.append(tag_id)
                profile.append(new_depth)
                extend(pos0 + 1, new_depth, total + float(row[tag_id]), chosen, profile)
                chosen.pop()
                profile.pop()
        else:
            row = scores.nonterminal_scores[(pos0 - 1) // 2]
            for col in range(4):
                if col < 2:
                    if depth < 1:
                        continue
                    new_depth = depth
                else:
                    if depth < 2:
                        continue
                    new_depth = depth - 1
                chosen.append(base + col)
                profile.append(new_depth)
                extend(pos0 + 1, new_depth, total + float(row[col]), chosen, profile)
                chosen.pop()
                profile.pop()

    extend(0, 0, 0.0, [], [])
    assert best["score"] is not None, "every n ≥ 1 admits at least one valid sequence"
    seq = TagSequence(tuple(vocab[i] for i in best["tags"]))
    return DecodeResult(seq, float(best["score"]), best["profile"])
