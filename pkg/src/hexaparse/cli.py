"""Command-line entry point: encode, decode, train, predict, eval, verify, bench, serve.

Exit codes: 0 success, 1 I/O or malformed input, 2 partial rejects (some
sentences could not be encoded), 3 internal consistency failure (verify
found a round-trip mismatch). Every subcommand is deterministic given its
inputs, seed, and config.
"""

import argparse
import json
import multiprocessing
import sys
import time
import tracemalloc
from pathlib import Path

import numpy as np

from hexaparse import __version__
from hexaparse.bht import BinarizationOrder
from hexaparse.codec import TagVocab, parse_tags, serialize_tags, tags_to_tree, tree_to_tags
from hexaparse.decoder import ScoreTable, viterbi_decode
from hexaparse.errors import HexaparseError, InvalidTransitionError, ShapeError
from hexaparse.evaluate import PUNCT_POLICIES, attachment_scores
from hexaparse.model import (
    TrainConfig,
    load_model,
    predict_corpus,
    save_model,
    score_sentence,
    train,
)
from hexaparse.treebank import (
    Corpus,
    crossing_arcs,
    is_projective,
    parse_conllu,
    write_conllu,
)

DEFAULT_MAX_DEPTH = 64

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARTIAL = 2
EXIT_MISMATCH = 3


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; this toolkit reserves 2 for
    partial rejects, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_vocab(path: str | None) -> TagVocab:
    if path is None:
        return TagVocab.unlabeled()
    return TagVocab.parse(_read_text(path))


def cmd_encode(args) -> int:
    corpus = parse_conllu(_read_text(args.input), provenance=args.input)
    order = BinarizationOrder(args.order)
    lines: list[str] = []
    rejects: list[str] = []
    for idx, tree in enumerate(corpus, start=1):
        if not is_projective(tree):
            pair = crossing_arcs(tree.heads)
            rejects.append(f"{idx}\tnon-projective: arcs {pair[0]} and {pair[1]} cross")
            continue
        lines.append(serialize_tags(tree_to_tags(tree, order, labeled=args.labeled)))
    _write_text(args.output, "".join(line + "\n" for line in lines))
    if rejects:
        rejects_path = args.rejects or args.output + ".rejects"
        _write_text(rejects_path, "".join(line + "\n" for line in rejects))
        print(
            f"warning: {len(rejects)} sentence(s) rejected as non-projective "
            f"(see {rejects_path})",
            file=sys.stderr,
        )
        return EXIT_PARTIAL
    return EXIT_OK


def _decode_score_line(obj, vocab: TagVocab, max_depth: int, lineno: int):
    if not isinstance(obj, dict):
        raise ShapeError(f"line {lineno}: expected a JSON object per line")
    for key in ("terminal_scores", "nonterminal_scores"):
        if key not in obj:
            raise ShapeError(f"line {lineno}: score object is missing {key!r}")
    try:
        table = ScoreTable(
            np.asarray(obj["terminal_scores"], dtype=np.float64),
            np.asarray(obj["nonterminal_scores"], dtype=np.float64).reshape(-1, 4)
            if obj["nonterminal_scores"]
            else np.zeros((0, 4)),
            vocab,
        )
    except (ValueError, TypeError) as exc:
        raise ShapeError(f"line {lineno}: malformed score arrays: {exc}") from None
    forms = obj.get("tokens")
    if forms is not None and len(forms) != table.n:
        raise ShapeError(
            f"line {lineno}: {len(forms)} tokens do not match {table.n} score rows"
        )
    result = viterbi_decode(table, max_depth=max_depth)
    return tags_to_tree(result.tags, forms=forms)


def cmd_decode(args) -> int:
    text = _read_text(args.input)
    stripped = text.lstrip()
    trees = []
    if stripped.startswith("{"):
        vocab = _load_vocab(args.vocab)
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                print(f"error: line {lineno}: invalid JSON: {exc}", file=sys.stderr)
                return EXIT_IO
            trees.append(_decode_score_line(obj, vocab, args.max_depth, lineno))
    else:
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            try:
                (seq,) = parse_tags(line)
                trees.append(tags_to_tree(seq))
            except InvalidTransitionError as exc:
                print(f"error: line {lineno}: {exc}", file=sys.stderr)
                return EXIT_IO
    _write_text(args.output, write_conllu(Corpus(tuple(trees))) if trees else "")
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = parse_conllu(_read_text(args.input), provenance=args.input)
    config = TrainConfig(
        epochs=args.epochs,
        lr=args.lr,
        l2=args.l2,
        seed=args.seed,
        shuffle=not args.no_shuffle,
        labeled=args.labeled,
        order=BinarizationOrder(args.order),
        batch_size=args.batch_size,
        use_upos=not args.no_upos,
        strict=args.strict,
    )
    model, _losses = train(corpus, config, log=sys.stderr)
    save_model(model, args.output)
    print(f"saved model to {args.output}", file=sys.stderr)
    return EXIT_OK


_worker = {}


def _predict_init(model_path: str, max_depth: int):
    _worker["model"] = load_model(model_path)
    _worker["max_depth"] = max_depth


def _predict_one(tree):
    table = score_sentence(_worker["model"], tree.forms, tree.upos)
    result = viterbi_decode(table, max_depth=_worker["max_depth"])
    return tags_to_tree(result.tags, forms=tree.forms, upos=tree.upos)


def cmd_predict(args) -> int:
    model = load_model(args.model)
    corpus = parse_conllu(_read_text(args.input), provenance=args.input)
    if args.export_scores:
        with open(args.export_scores, "w", encoding="utf-8") as fh:
            for tree in corpus:
                table = score_sentence(model, tree.forms, tree.upos)
                fh.write(
                    json.dumps(
                        {
                            "tokens": tree.forms,
                            "terminal_scores": table.terminal_scores.tolist(),
                            "nonterminal_scores": table.nonterminal_scores.tolist(),
                        }
                    )
                    + "\n"
                )
    if args.jobs > 1:
        with multiprocessing.Pool(
            args.jobs, initializer=_predict_init, initargs=(args.model, args.max_depth)
        ) as pool:
            trees = pool.map(_predict_one, corpus.sentences)
        pred = Corpus(tuple(trees), provenance=corpus.provenance)
    else:
        pred = predict_corpus(model, corpus, max_depth=args.max_depth)
    _write_text(args.output, write_conllu(pred))
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = parse_conllu(_read_text(args.gold), provenance=args.gold)
    pred = parse_conllu(_read_text(args.pred), provenance=args.pred)
    report = attachment_scores(gold, pred, punct_policy=args.punct)
    print(report.to_json() if args.json else report.to_text(), end="" if not args.json else "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    corpus = parse_conllu(_read_text(args.input), provenance=args.input)
    order = BinarizationOrder(args.order)
    verified = rejected = 0
    for idx, tree in enumerate(corpus, start=1):
        if not is_projective(tree):
            rejected += 1
            continue
        back = tags_to_tree(
            tree_to_tags(tree, order, labeled=True), forms=tree.forms, upos=tree.upos
        )
        if back.heads != tree.heads or back.deprels != tree.deprels:
            print(f"round-trip mismatch in sentence {idx}:", file=sys.stderr)
            sys.stderr.write(write_conllu(Corpus((tree,))))
            print(f"verified {verified}, rejected {rejected}, mismatched 1", file=sys.stderr)
            return EXIT_MISMATCH
        verified += 1
    print(f"verified {verified} sentence(s); rejected {rejected} non-projective")
    if rejected:
        print(f"warning: {rejected} non-projective sentence(s) skipped", file=sys.stderr)
    return EXIT_OK


def _bench_one_length(length: int, batch: int, runs: int, max_depth: int, rng) -> dict:
    vocab = TagVocab.unlabeled()
    tables = [
        ScoreTable(
            rng.standard_normal((length, 2)),
            rng.standard_normal((max(length - 1, 0), 4)),
            vocab,
        )
        for _ in range(batch)
    ]

    def sweep():
        for table in tables:
            result = viterbi_decode(table, max_depth=max_depth)
            tags_to_tree(result.tags)

    run_seconds = []
    for _ in range(runs):
        start = time.perf_counter()
        sweep()
        run_seconds.append(time.perf_counter() - start)
    tracemalloc.start()
    sweep()
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    total = sum(run_seconds)
    per_sentence_ms = 1000.0 * total / (batch * runs)
    return {
        "length": length,
        "sentences": batch,
        "runs_sec": [round(s, 6) for s in run_seconds],
        "sent_per_sec": round(batch * runs / total, 2),
        "ms_per_sentence": round(per_sentence_ms, 6),
        "peak_bytes": peak,
    }


def cmd_bench(args) -> int:
    lengths = [int(x) for x in args.lengths.split(",") if x.strip()]
    rng = np.random.default_rng(args.seed)
    rows = [
        _bench_one_length(length, args.batch, args.runs, args.max_depth, rng)
        for length in lengths
    ]
    payload = {
        "max_depth": args.max_depth,
        "seed": args.seed,
        "sentences_per_length": args.batch,
        "runs": args.runs,
        "lengths": rows,
    }
    blob = json.dumps(payload, indent=2) + "\n"
    header = f"{'length':>8} {'sent/s':>12} {'ms/sent':>12} {'peak MiB':>10}"
    print(header, file=sys.stderr)
    for row in rows:
        print(
            f"{row['length']:>8} {row['sent_per_sec']:>12.2f} "
            f"{row['ms_per_sentence']:>12.4f} {row['peak_bytes'] / 2**20:>10.2f}",
            file=sys.stderr,
        )
    _write_text(args.output, blob)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from hexaparse.service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _convert_config_value(raw: str):
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw.strip()


def _apply_config_file(subparser: argparse.ArgumentParser, path: str) -> None:
    """Defaults from a flat key=value file; explicit flags still win."""
    known = {action.dest for action in subparser._actions}
    overrides = {}
    for lineno, line in enumerate(_read_text(path).split("\n"), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise HexaparseError(f"{path}:{lineno}: expected key=value, got {body!r}")
        key, _, value = body.partition("=")
        dest = key.strip().replace("-", "_")
        if dest not in known:
            raise HexaparseError(f"{path}:{lineno}: unknown config key {key.strip()!r}")
        overrides[dest] = _convert_config_value(value)
    subparser.set_defaults(**overrides)


def build_parser():
    parser = _Parser(prog="hexaparse", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file supplying flag defaults")

    p = sub.add_parser("encode", parents=[common], help="CoNLL-U to tag lines")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--order", choices=["left", "right"], default="left")
    p.add_argument("--labeled", action="store_true")
    p.add_argument("--rejects", help="sidecar path for non-projective sentences")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common], help="tag lines or score JSONL to CoNLL-U")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--vocab", help="tag vocabulary file for score input (default: unlabeled)")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("train", parents=[common], help="fit the linear tagger")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--order", choices=["left", "right"], default="left")
    p.add_argument("--labeled", action="store_true")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--no-upos", action="store_true", help="ablate POS features")
    p.add_argument("--strict", action="store_true", help="fail on non-projective input")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="parse with a trained model")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("--export-scores", help="also write the score tables as JSONL")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", parents=[common], help="attachment scores gold vs predicted")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--punct", choices=list(PUNCT_POLICIES), default="upos")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="round-trip check a treebank")
    p.add_argument("input")
    p.add_argument("--order", choices=["left", "right"], default="left")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="decoding throughput on synthetic scores")
    p.add_argument("--lengths", default="32,64,128,256")
    p.add_argument("--batch", type=int, default=1000, help="sentences per length")
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", parents=[common], help="HTTP service for the core operations")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser, sub


def main(argv=None) -> int:
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            _apply_config_file(sub.choices[args.command], args.config)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        except HexaparseError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HexaparseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
