"""Sparse-feature linear tagger producing per-word score tables.

Stands in for a contextual encoder at desk scale: each word is a bag of
indicator features (form, lowercased form, POS, ±2 windows with boundary
sentinels, prefixes/suffixes up to 3 characters) feeding two independent
softmax heads — one over the terminal tags, one over the four nonterminal
tags. Word n's heads score sequence positions 2n−1 and 2n. Training
minimizes the summed per-position cross-entropy with mini-batch gradient
descent and optional L2.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from hexaparse.bht import BinarizationOrder
from hexaparse.codec import TagVocab, tree_to_tags
from hexaparse.decoder import ScoreTable, viterbi_decode
from hexaparse.errors import ModelFormatError, NonProjectiveError, ShapeError
from hexaparse.treebank import Corpus, DepTree, is_projective

MODEL_MAGIC = b"hexa-model/1\n"

BOUNDARY_BEFORE = "<s>"
BOUNDARY_AFTER = "</s>"


def word_features(forms: list[str], upos: list[str], i: int, use_upos: bool = True) -> list[str]:
    """Indicator features for word i (0-based) in its sentence context."""
    n = len(forms)
    w = forms[i]
    feats = [f"w={w}", f"lw={w.lower()}"]
    if use_upos:
        feats.append(f"p={upos[i]}")
    for off in (-2, -1, 1, 2):
        j = i + off
        if 0 <= j < n:
            feats.append(f"w{off:+d}={forms[j]}")
            if use_upos:
                feats.append(f"p{off:+d}={upos[j]}")
        else:
            marker = BOUNDARY_BEFORE if j < 0 else BOUNDARY_AFTER
            feats.append(f"w{off:+d}={marker}")
            if use_upos:
                feats.append(f"p{off:+d}={marker}")
    for k in (1, 2, 3):
        if len(w) >= k:
            feats.append(f"pre{k}={w[:k]}")
            feats.append(f"suf{k}={w[-k:]}")
    return feats


@dataclass
class TrainConfig:
    epochs: int = 10
    lr: float = 0.5
    l2: float = 0.0
    seed: int = 0
    shuffle: bool = True
    labeled: bool = False
    order: BinarizationOrder = BinarizationOrder.LEFT_FIRST
    batch_size: int = 16
    use_upos: bool = True
    strict: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be ≥ 1, got {self.epochs}")
        if self.lr <= 0:
            raise ValueError(f"learning rate must be > 0, got {self.lr}")
        if self.l2 < 0:
            raise ValueError(f"l2 strength must be ≥ 0, got {self.l2}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be ≥ 1, got {self.batch_size}")
        self.order = BinarizationOrder(self.order)


@dataclass
class LinearTagModel:
    """Two linear softmax heads over a shared feature dictionary."""

    vocab: TagVocab
    feature_ids: dict[str, int]
    terminal_weights: np.ndarray  # (|features|, |terminal vocab|)
    nonterminal_weights: np.ndarray  # (|features|, 4)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = len(self.feature_ids)
        if self.terminal_weights.shape != (f, self.vocab.n_terminals):
            raise ShapeError(
                f"terminal head shape {self.terminal_weights.shape} != ({f}, {self.vocab.n_terminals})"
            )
        if self.nonterminal_weights.shape != (f, 4):
            raise ShapeError(f"nonterminal head shape {self.nonterminal_weights.shape} != ({f}, 4)")

    def features_of(self, forms: list[str], upos: list[str], i: int) -> np.ndarray:
        """Known-feature ids for word i; unknown features are dropped."""
        use_upos = self.meta.get("use_upos", True)
        ids = [
            self.feature_ids[name]
            for name in word_features(forms, upos, i, use_upos)
            if name in self.feature_ids
        ]
        return np.asarray(ids, dtype=np.intp)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def score_sentence(model: LinearTagModel, forms: list[str], upos: list[str] | None = None) -> ScoreTable:
    """Log-softmax rows for one sentence; word i fills terminal row i and
    (when not last) nonterminal row i."""
    if not forms:
        raise ShapeError("cannot score an empty sentence")
    n = len(forms)
    if upos is None:
        upos = ["_"] * n
    t_logits = np.zeros((n, model.vocab.n_terminals))
    nt_logits = np.zeros((max(n - 1, 0), 4))
    for i in range(n):
        ids = model.features_of(forms, upos, i)
        if ids.size:
            t_logits[i] = model.terminal_weights[ids].sum(axis=0)
            if i < n - 1:
                nt_logits[i] = model.nonterminal_weights[ids].sum(axis=0)
    return ScoreTable(_log_softmax(t_logits), _log_softmax(nt_logits) if n > 1 else nt_logits.reshape(0, 4), model.vocab)


def position_loss_and_grad(
    weights: np.ndarray, feat_ids: np.ndarray, gold: int
) -> tuple[float, np.ndarray]:
    """Cross-entropy of one position and its gradient w.r.t. the active rows.

    loss = −log softmax(Σ_f weights[f])[gold]; the gradient for every active
    feature row is the same (softmax − onehot) vector, returned once.
    """
    logits = weights[feat_ids].sum(axis=0)
    shifted = logits - logits.max()
    log_z = np.log(np.exp(shifted).sum())
    loss = float(log_z - shifted[gold])
    grad_row = np.exp(shifted - log_z)
    grad_row[gold] -= 1.0
    return loss, grad_row


@dataclass
class _Prepared:
    feats: list[np.ndarray]  # per word
    gold_terminal: list[int]
    gold_nonterminal: list[int]  # length n−1


def _prepare(corpus: Corpus, config: TrainConfig, vocab: TagVocab):
    """Featurize and gold-tag every projective sentence; collect skipped ones."""
    feature_ids: dict[str, int] = {}
    prepared: list[_Prepared] = []
    skipped: list[int] = []
    for idx, tree in enumerate(corpus, start=1):
        if not is_projective(tree):
            if config.strict:
                raise NonProjectiveError(f"sentence {idx} is non-projective under strict training")
            skipped.append(idx)
            continue
        seq = tree_to_tags(tree, config.order, labeled=config.labeled)
        forms, upos = tree.forms, tree.upos
        feats = []
        for i in range(tree.n):
            names = word_features(forms, upos, i, config.use_upos)
            for name in names:
                feature_ids.setdefault(name, len(feature_ids))
            feats.append(np.asarray([feature_ids[nm] for nm in names], dtype=np.intp))
        gold_t = [vocab.id_of(seq[2 * i]) for i in range(tree.n)]
        gold_nt = [vocab.id_of(seq[2 * i + 1]) - vocab.nonterminal_base for i in range(tree.n - 1)]
        prepared.append(_Prepared(feats, gold_t, gold_nt))
    return prepared, feature_ids, skipped


def corpus_loss(model: LinearTagModel, prepared: list[_Prepared]) -> float:
    """Mean cross-entropy per tagging position (nats/position), data term only."""
    total = 0.0
    positions = 0
    for item in prepared:
        n = len(item.feats)
        for i in range(n):
            loss, _ = position_loss_and_grad(model.terminal_weights, item.feats[i], item.gold_terminal[i])
            total += loss
            positions += 1
            if i < n - 1:
                loss, _ = position_loss_and_grad(
                    model.nonterminal_weights, item.feats[i], item.gold_nonterminal[i]
                )
                total += loss
                positions += 1
    return total / positions if positions else 0.0


def train(
    corpus: Corpus, config: TrainConfig | None = None, log=None
) -> tuple[LinearTagModel, list[float]]:
    """Fit both heads by mini-batch gradient descent on the summed
    per-position cross-entropy; returns the model and per-epoch mean loss.

    Non-projective sentences are skipped with a note (or rejected outright
    under config.strict). Losses are evaluated on the full corpus after each
    epoch, so with shuffle off, a whole-corpus batch, and a small enough
    learning rate the sequence is non-increasing.
    """
    config = config or TrainConfig()
    vocab = TagVocab.from_corpus(corpus, labeled=config.labeled)
    prepared, feature_ids, skipped = _prepare(corpus, config, vocab)
    if not prepared:
        raise NonProjectiveError("no projective sentences to train on")
    if skipped and log:
        print(f"skipped {len(skipped)} non-projective sentence(s)", file=log)

    model = LinearTagModel(
        vocab=vocab,
        feature_ids=feature_ids,
        terminal_weights=np.zeros((len(feature_ids), vocab.n_terminals)),
        nonterminal_weights=np.zeros((len(feature_ids), 4)),
        meta={
            "epochs": config.epochs,
            "seed": config.seed,
            "labeled": config.labeled,
            "order": config.order.value,
            "use_upos": config.use_upos,
            "skipped_sentences": len(skipped),
        },
    )
    rng = np.random.default_rng(config.seed)
    losses: list[float] = []
    for epoch in range(config.epochs):
        sentence_order = rng.permutation(len(prepared)) if config.shuffle else np.arange(len(prepared))
        for start in range(0, len(sentence_order), config.batch_size):
            batch = [prepared[j] for j in sentence_order[start : start + config.batch_size]]
            grad_t = np.zeros_like(model.terminal_weights)
            grad_nt = np.zeros_like(model.nonterminal_weights)
            positions = 0
            for item in batch:
                n = len(item.feats)
                for i in range(n):
                    _, row = position_loss_and_grad(
                        model.terminal_weights, item.feats[i], item.gold_terminal[i]
                    )
                    grad_t[item.feats[i]] += row
                    positions += 1
                    if i < n - 1:
                        _, row = position_loss_and_grad(
                            model.nonterminal_weights, item.feats[i], item.gold_nonterminal[i]
                        )
                        grad_nt[item.feats[i]] += row
                        positions += 1
            if positions:
                scale = config.lr / positions
                model.terminal_weights -= scale * grad_t
                model.nonterminal_weights -= scale * grad_nt
                if config.l2 > 0:
                    model.terminal_weights -= config.lr * config.l2 * model.terminal_weights
                    model.nonterminal_weights -= config.lr * config.l2 * model.nonterminal_weights
        epoch_loss = corpus_loss(model, prepared)
        losses.append(epoch_loss)
        if log:
            print(f"epoch {epoch + 1}/{config.epochs}: loss {epoch_loss:.4f} nats/position", file=log)
    return model, losses


def predict_corpus(model: LinearTagModel, sentences: Corpus, max_depth: int | None = None) -> Corpus:
    """Parse every sentence: score, decode, rebuild the tree. Input heads are ignored."""
    from hexaparse.codec import tags_to_tree

    out: list[DepTree] = []
    for tree in sentences:
        table = score_sentence(model, tree.forms, tree.upos)
        result = viterbi_decode(table, max_depth=max_depth)
        out.append(tags_to_tree(result.tags, forms=tree.forms, upos=tree.upos))
    return Corpus(tuple(out), provenance=sentences.provenance)


def save_model(model: LinearTagModel, path: str) -> None:
    """Versioned binary: magic line, little-endian u64 header length, JSON
    header, then the two float64 weight buffers in row-major order."""
    names = [""] * len(model.feature_ids)
    for name, idx in model.feature_ids.items():
        names[idx] = name
    header = {
        "vocab": model.vocab.dump().splitlines(),
        "features": names,
        "meta": model.meta,
        "terminal_shape": list(model.terminal_weights.shape),
        "nonterminal_shape": list(model.nonterminal_weights.shape),
        "dtype": "<f8",
    }
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(model.terminal_weights, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.nonterminal_weights, dtype="<f8").tobytes())


def load_model(path: str) -> LinearTagModel:
    with open(path, "rb") as fh:
        magic = fh.read(len(MODEL_MAGIC))
        if magic != MODEL_MAGIC:
            raise ModelFormatError(
                f"not a recognized model file (expected version header {MODEL_MAGIC.decode().strip()!r})"
            )
        raw_len = fh.read(8)
        if len(raw_len) != 8:
            raise ModelFormatError("truncated model file: missing header length")
        (header_len,) = struct.unpack("<Q", raw_len)
        blob = fh.read(header_len)
        if len(blob) != header_len:
            raise ModelFormatError("truncated model file: incomplete header")
        try:
            header = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ModelFormatError(f"corrupt model header: {exc}") from None
        try:
            vocab = TagVocab.parse("\n".join(header["vocab"]))
            names = header["features"]
            t_shape = tuple(header["terminal_shape"])
            nt_shape = tuple(header["nonterminal_shape"])
            dtype = np.dtype(header["dtype"])
            meta = header["meta"]
        except (KeyError, TypeError) as exc:
            raise ModelFormatError(f"corrupt model header: missing field {exc}") from None
        t_bytes = fh.read(int(np.prod(t_shape)) * dtype.itemsize)
        nt_bytes = fh.read(int(np.prod(nt_shape)) * dtype.itemsize)
        if len(t_bytes) + len(nt_bytes) != (int(np.prod(t_shape)) + int(np.prod(nt_shape))) * dtype.itemsize:
            raise ModelFormatError("truncated model file: incomplete weight data")
    terminal = np.frombuffer(t_bytes, dtype=dtype).reshape(t_shape).astype(np.float64)
    nonterminal = np.frombuffer(nt_bytes, dtype=dtype).reshape(nt_shape).astype(np.float64)
    return LinearTagModel(
        vocab=vocab,
        feature_ids={name: i for i, name in enumerate(names)},
        terminal_weights=terminal,
        nonterminal_weights=nonterminal,
        meta=meta,
    )
