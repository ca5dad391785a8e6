"""Attachment scores between aligned gold and predicted treebanks.

UAS counts correct heads, LAS additionally requires the exact (case
sensitive) deprel. Punctuation handling is selectable: exclude tokens whose
gold UPOS is PUNCT ("upos", the default), whose gold deprel is "punct"
("deprel"), or count everything ("none").
"""

import json
from dataclasses import dataclass

from hexaparse.errors import AlignmentError
from hexaparse.treebank import Corpus

PUNCT_POLICIES = ("upos", "deprel", "none")


@dataclass(frozen=True)
class SentenceScore:
    counted: int
    excluded: int
    correct_heads: int
    correct_labeled: int


@dataclass(frozen=True)
class EvalReport:
    uas: float
    las: float
    counted_tokens: int
    excluded_tokens: int
    per_sentence: tuple[SentenceScore, ...]

    def to_text(self) -> str:
        return (
            f"UAS: {self.uas:.1f}\n"
            f"LAS: {self.las:.1f}\n"
            f"counted tokens: {self.counted_tokens}\n"
            f"excluded tokens: {self.excluded_tokens}\n"
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "uas": round(self.uas, 1),
                "las": round(self.las, 1),
                "counted": self.counted_tokens,
                "excluded": self.excluded_tokens,
            }
        )


def attachment_scores(gold: Corpus, pred: Corpus, punct_policy: str = "upos") -> EvalReport:
    """Score pred against gold token-by-token; corpora must align exactly."""
    if punct_policy not in PUNCT_POLICIES:
        raise ValueError(f"punct_policy must be one of {PUNCT_POLICIES}, got {punct_policy!r}")
    if len(gold) != len(pred):
        raise AlignmentError(
            f"corpora have different sentence counts: gold {len(gold)}, predicted {len(pred)}"
        )
    per_sentence: list[SentenceScore] = []
    counted = excluded = heads_ok = labeled_ok = 0
    for s_idx, (g, p) in enumerate(zip(gold, pred), start=1):
        if g.n != p.n:
            raise AlignmentError(
                f"sentence has {g.n} gold tokens but {p.n} predicted", sentence=s_idx
            )
        s_h = s_lab = s_cnt = s_exc = 0
        for g_tok, p_tok in zip(g.tokens, p.tokens):
            if g_tok.form != p_tok.form:
                raise AlignmentError(
                    f"form mismatch: gold {g_tok.form!r} vs predicted {p_tok.form!r}",
                    sentence=s_idx,
                    token=g_tok.index,
                )
            if punct_policy == "upos" and g_tok.upos == "PUNCT":
                s_exc += 1
                continue
            if punct_policy == "deprel" and g_tok.deprel == "punct":
                s_exc += 1
                continue
            s_cnt += 1
            if g_tok.head == p_tok.head:
                s_h += 1
                if g_tok.deprel == p_tok.deprel:
                    s_lab += 1
        per_sentence.append(SentenceScore(s_cnt, s_exc, s_h, s_lab))
        counted += s_cnt
        excluded += s_exc
        heads_ok += s_h
        labeled_ok += s_lab
    uas = 100.0 * heads_ok / counted if counted else 100.0
    las = 100.0 * labeled_ok / counted if counted else 100.0
    return EvalReport(uas, las, counted, excluded, tuple(per_sentence))
