import random

import numpy as np
import pytest

from hexaparse.codec import TagVocab
from hexaparse.errors import ModelFormatError, NonProjectiveError, ShapeError
from hexaparse.evaluate import attachment_scores
from hexaparse.model import (
    LinearTagModel,
    TrainConfig,
    load_model,
    position_loss_and_grad,
    predict_corpus,
    save_model,
    score_sentence,
    train,
    word_features,
)
from hexaparse.treebank import Corpus, DepTree

from helpers import toy_grammar_corpus


def tiny_corpus() -> Corpus:
    return Corpus(
        (
            DepTree.from_heads(
                [2, 0, 2],
                deprels=["nsubj", "root", "obj"],
                forms=["birds", "eat", "seeds"],
                upos=["NOUN", "VERB", "NOUN"],
            ),
            DepTree.from_heads(
                [2, 0],
                deprels=["nsubj", "root"],
                forms=["birds", "sing"],
                upos=["NOUN", "VERB"],
            ),
        )
    )


class TestWordFeatures:
    def test_exact_inventory(self):
        feats = word_features(["The", "cat"], ["DET", "NOUN"], 0)
        assert feats == [
            "w=The",
            "lw=the",
            "p=DET",
            "w-2=<s>",
            "p-2=<s>",
            "w-1=<s>",
            "p-1=<s>",
            "w+1=cat",
            "p+1=NOUN",
            "w+2=</s>",
            "p+2=</s>",
            "pre1=T",
            "suf1=e",
            "pre2=Th",
            "suf2=he",
            "pre3=The",
            "suf3=The",
        ]

    def test_short_words_skip_long_affixes(self):
        feats = word_features(["of"], ["ADP"], 0)
        assert "pre2=of" in feats and not any(f.startswith("pre3") for f in feats)

    def test_upos_can_be_disabled(self):
        feats = word_features(["a", "b"], ["X", "Y"], 1, use_upos=False)
        pos_keys = {"p", "p-2", "p-1", "p+1", "p+2"}
        assert not any(f.split("=")[0] in pos_keys for f in feats)
        assert "w-1=a" in feats and "w+1=</s>" in feats


class TestTrainConfig:
    def test_defaults(self):
        config = TrainConfig()
        assert config.epochs == 10 and config.shuffle

    @pytest.mark.parametrize(
        "kwargs",
        [{"epochs": 0}, {"lr": 0.0}, {"lr": -1.0}, {"l2": -0.1}, {"batch_size": 0}],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)

    def test_order_coercion(self):
        from hexaparse.bht import BinarizationOrder

        assert TrainConfig(order="right").order is BinarizationOrder.RIGHT_FIRST


class TestScoring:
    def test_untrained_scores_are_uniform(self):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=1, lr=1e-9, shuffle=False))
        st = score_sentence(model, ["birds", "eat", "seeds"], ["NOUN", "VERB", "NOUN"])
        assert np.allclose(st.terminal_scores, -np.log(2), atol=1e-6)
        assert np.allclose(st.nonterminal_scores, -np.log(4), atol=1e-6)

    def test_rows_are_log_distributions(self):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=3))
        st = score_sentence(model, ["birds", "sing"], ["NOUN", "VERB"])
        assert np.allclose(np.exp(st.terminal_scores).sum(axis=1), 1.0)
        assert np.allclose(np.exp(st.nonterminal_scores).sum(axis=1), 1.0)

    def test_single_word_sentence(self):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=1))
        st = score_sentence(model, ["birds"])
        assert st.n == 1 and st.nonterminal_scores.shape == (0, 4)

    def test_empty_sentence_rejected(self):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=1))
        with pytest.raises(ShapeError):
            score_sentence(model, [])

    def test_unknown_words_fall_back_to_uniform(self):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=5, use_upos=False))
        st = score_sentence(model, ["zyzzyva"])
        # No trained feature fires except possibly affixes; scores stay finite.
        assert np.isfinite(st.terminal_scores).all()


class TestGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(8)
        n_feats, n_classes = 7, 5
        for _ in range(10):
            weights = rng.standard_normal((n_feats, n_classes))
            active = np.sort(rng.choice(n_feats, size=3, replace=False)).astype(np.intp)
            gold = int(rng.integers(n_classes))
            _, grad_row = position_loss_and_grad(weights, active, gold)
            eps = 1e-6
            for f in active:
                for c in range(n_classes):
                    bumped = weights.copy()
                    bumped[f, c] += eps
                    up, _ = position_loss_and_grad(bumped, active, gold)
                    bumped[f, c] -= 2 * eps
                    down, _ = position_loss_and_grad(bumped, active, gold)
                    numeric = (up - down) / (2 * eps)
                    rel = abs(numeric - grad_row[c]) / max(1.0, abs(numeric), abs(grad_row[c]))
                    assert rel < 1e-4

    def test_gradient_sums_to_zero(self):
        rng = np.random.default_rng(9)
        weights = rng.standard_normal((4, 6))
        _, grad_row = position_loss_and_grad(weights, np.asarray([0, 2]), 3)
        assert abs(grad_row.sum()) < 1e-12


class TestTraining:
    def test_loss_curve_length_and_decrease(self):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(1), 40)))
        model, losses = train(corpus, TrainConfig(epochs=6, lr=0.5, seed=1))
        assert len(losses) == 6
        assert losses[-1] < losses[0]

    def test_full_batch_descent_is_monotone(self):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(2), 25)))
        config = TrainConfig(epochs=8, lr=0.2, shuffle=False, batch_size=1000)
        _, losses = train(corpus, config)
        for earlier, later in zip(losses, losses[1:]):
            assert later <= earlier + 1e-12

    def test_overfits_single_sentence(self):
        corpus = Corpus((tiny_corpus().sentences[0],))
        model, losses = train(corpus, TrainConfig(epochs=60, lr=2.0, labeled=True))
        assert losses[-1] < 0.05
        (pred,) = predict_corpus(model, corpus).sentences
        assert pred.heads == [2, 0, 2]
        assert pred.deprels == ["nsubj", "root", "obj"]

    def test_l2_shrinks_weights(self):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(3), 20)))
        plain, _ = train(corpus, TrainConfig(epochs=4, seed=3))
        decayed, _ = train(corpus, TrainConfig(epochs=4, seed=3, l2=0.01))
        assert np.linalg.norm(decayed.terminal_weights) < np.linalg.norm(plain.terminal_weights)

    def test_skips_non_projective(self, capsys):
        import io

        crossing = DepTree.from_heads([2, 0, 1], forms=["a", "b", "c"])
        corpus = Corpus(tiny_corpus().sentences + (crossing,))
        log = io.StringIO()
        model, _ = train(corpus, TrainConfig(epochs=1), log=log)
        assert model.meta["skipped_sentences"] == 1
        assert "skipped 1 non-projective" in log.getvalue()

    def test_strict_rejects_non_projective(self):
        crossing = DepTree.from_heads([2, 0, 1], forms=["a", "b", "c"])
        corpus = Corpus(tiny_corpus().sentences + (crossing,))
        with pytest.raises(NonProjectiveError):
            train(corpus, TrainConfig(epochs=1, strict=True))

    def test_nothing_trainable_rejected(self):
        crossing = DepTree.from_heads([2, 0, 1], forms=["a", "b", "c"])
        with pytest.raises(NonProjectiveError):
            train(Corpus((crossing,)), TrainConfig(epochs=1))

    def test_labeled_training_builds_labeled_vocab(self):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=1, labeled=True))
        labels = {t.label for t in model.vocab.tags if t.is_terminal}
        assert labels == {"nsubj", "root", "obj"}


class TestPrediction:
    def test_outputs_align_with_inputs(self):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(4), 30)), provenance="toy")
        model, _ = train(corpus, TrainConfig(epochs=5, seed=4))
        pred = predict_corpus(model, corpus)
        assert len(pred) == len(corpus)
        assert pred.provenance == "toy"
        for g, p in zip(corpus, pred):
            assert p.forms == g.forms and p.upos == g.upos

    def test_max_depth_respected(self):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(5), 10)))
        model, _ = train(corpus, TrainConfig(epochs=2, seed=5))
        pred = predict_corpus(model, corpus, max_depth=1)
        from hexaparse.codec import tree_to_tags, is_valid_sequence

        for tree in pred:
            assert is_valid_sequence(tree_to_tags(tree), max_depth=1)


class TestSerialization:
    def test_round_trip_identical(self, tmp_path):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(6), 15)))
        model, _ = train(corpus, TrainConfig(epochs=3, labeled=True, seed=6))
        path = tmp_path / "model.bin"
        save_model(model, str(path))
        loaded = load_model(str(path))
        assert loaded.vocab == model.vocab
        assert loaded.feature_ids == model.feature_ids
        assert np.array_equal(loaded.terminal_weights, model.terminal_weights)
        assert np.array_equal(loaded.nonterminal_weights, model.nonterminal_weights)
        assert loaded.meta == model.meta

    def test_loaded_model_predicts_identically(self, tmp_path):
        corpus = Corpus(tuple(toy_grammar_corpus(random.Random(7), 15)))
        model, _ = train(corpus, TrainConfig(epochs=3, seed=7))
        path = tmp_path / "model.bin"
        save_model(model, str(path))
        loaded = load_model(str(path))
        report = attachment_scores(predict_corpus(model, corpus), predict_corpus(loaded, corpus))
        assert report.uas == 100.0 and report.las == 100.0

    def test_loaded_weights_are_writable(self, tmp_path):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=1))
        save_model(model, str(tmp_path / "m.bin"))
        loaded = load_model(str(tmp_path / "m.bin"))
        loaded.terminal_weights += 1.0  # must not raise

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bogus.bin"
        path.write_bytes(b"GIF89a nope")
        with pytest.raises(ModelFormatError, match="not a recognized"):
            load_model(str(path))

    def test_rejects_truncation(self, tmp_path):
        model, _ = train(tiny_corpus(), TrainConfig(epochs=1))
        path = tmp_path / "m.bin"
        save_model(model, str(path))
        blob = path.read_bytes()
        for cut in (len(blob) - 40, 200, 15):
            clipped = tmp_path / f"cut{cut}.bin"
            clipped.write_bytes(blob[:cut])
            with pytest.raises(ModelFormatError, match="truncated|corrupt"):
                load_model(str(clipped))

    def test_rejects_corrupt_header(self, tmp_path):
        import struct

        from hexaparse.model import MODEL_MAGIC

        path = tmp_path / "bad.bin"
        garbage = b"\xff\xfe{not json"
        path.write_bytes(MODEL_MAGIC + struct.pack("<Q", len(garbage)) + garbage)
        with pytest.raises(ModelFormatError, match="corrupt"):
            load_model(str(path))
