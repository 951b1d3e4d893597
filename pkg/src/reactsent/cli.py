"""Command-line entry point: ``reactsent <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, PipelineConfig, load_config, override, parse_ratio
from .corpus import CorpusError, write_corpus
from .embeddings import EmbeddingError

COMMANDS = ("stats", "preprocess", "annotate", "split", "train", "evaluate", "gradcheck", "run", "synth")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="root seed (overrides the config)")
    p.add_argument("-v", "--verbose", action="store_true")


def _corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", help="raw corpus file")
    p.add_argument("--format", dest="corpus_format", choices=("csv", "jsonl"))
    p.add_argument("--delimiter")
    p.add_argument("--filter-annotatable", action="store_true", default=None,
                   help="drop posts without any love/wow/sad/angry reaction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reactsent",
                                     description="Reaction-annotated sentiment pipeline for Sinhala posts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="reaction totals and shares")
    _common(p)
    _corpus_args(p)
    p.add_argument("--json", action="store_true", help="print a JSON record instead of a table")

    p = sub.add_parser("preprocess", help="normalise messages to token lists")
    _common(p)
    _corpus_args(p)
    p.add_argument("--stopwords")
    p.add_argument("--out", required=True)

    p = sub.add_parser("annotate", help="derive labels from reaction counts")
    _common(p)
    p.add_argument("--input", required=True, help="output of preprocess")
    p.add_argument("--out", required=True)
    p.add_argument("--histogram", help="also write the label histogram here")
    p.add_argument("--zero-policy", choices=("drop", "positive"))

    p = sub.add_parser("split", help="seeded train/val/test holdout")
    _common(p)
    p.add_argument("--input", required=True, help="output of annotate")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dev-test", help="dev:test ratio, e.g. 8:2")
    p.add_argument("--train-val", help="train:val ratio, e.g. 9:1")

    p = sub.add_parser("train", help="fit baselines and recurrent models")
    _common(p)
    p.add_argument("--splits", required=True, help="directory with train.jsonl and val.jsonl")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--models", nargs="+", help="e.g. core star rnn bilstm3")
    p.add_argument("--embeddings", help="pretrained vectors (word2vec text format)")
    p.add_argument("--embedding-dim", type=int)
    p.add_argument("--fine-tune", action="store_true", default=None)
    p.add_argument("--hidden", type=int)
    p.add_argument("--readout", choices=("last", "mean"))
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--patience", type=int)
    p.add_argument("--max-len", type=int)

    p = sub.add_parser("evaluate", help="score trained models on the test split")
    _common(p)
    p.add_argument("--models-dir", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--averaging", choices=("weighted", "macro"))

    p = sub.add_parser("gradcheck", help="finite-difference check of every cell/direction/depth")
    _common(p)
    p.add_argument("--seeds", type=int, default=3, help="random instances per configuration")
    p.add_argument("--hidden", type=int, default=3)
    p.add_argument("--fd-precision", choices=("double", "extended"), default="extended")
    p.add_argument("--tolerance", type=float, default=1e-4)

    p = sub.add_parser("run", help="stats through evaluate in one go")
    _common(p)
    _corpus_args(p)
    p.add_argument("--stopwords")
    p.add_argument("--out-dir")
    p.add_argument("--zero-policy", choices=("drop", "positive"))
    p.add_argument("--averaging", choices=("weighted", "macro"))
    p.add_argument("--models", nargs="+")

    p = sub.add_parser("synth", help="write a synthetic corpus with a planted lexicon")
    p.add_argument("--out", required=True)
    p.add_argument("--n-posts", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", dest="corpus_format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None))
    get = lambda name: getattr(args, name, None)  # noqa: E731
    changes = {
        "seed": get("seed"),
        "corpus": get("corpus"),
        "corpus_format": get("corpus_format"),
        "delimiter": get("delimiter"),
        "filter_annotatable": get("filter_annotatable"),
        "stopwords": get("stopwords"),
        "zero_policy": get("zero_policy"),
        "averaging": get("averaging"),
        "embeddings": get("embeddings"),
        "embedding_dim": get("embedding_dim"),
        "fine_tune_embeddings": get("fine_tune"),
        "output_dir": get("out_dir") if args.command == "run" else None,
        "models": tuple(args.models) if get("models") else None,
        "dev_test_ratio": parse_ratio(args.dev_test) if get("dev_test") else None,
        "train_val_ratio": parse_ratio(args.train_val) if get("train_val") else None,
        "model.readout": get("readout"),
        "train.epochs": get("epochs"),
        "train.batch_size": get("batch_size"),
        "train.learning_rate": get("lr"),
        "train.patience": get("patience"),
        "train.max_len": get("max_len"),
    }
    if args.command != "gradcheck":
        changes["model.hidden"] = get("hidden")
    return override(cfg, **changes).validate()


def _gradcheck(args, cfg: PipelineConfig) -> int:
    from itertools import product

    from .neural.cells import CELLS
    from .neural.gradcheck import gradient_check, random_instance
    from .neural.model import ModelSpec

    worst, failed = 0.0, 0
    for cell, bidir, layers in product(CELLS, (False, True), (1, 2, 3)):
        spec = ModelSpec(cell, bidir, layers, hidden=args.hidden)
        errs = []
        for k in range(args.seeds):
            model, x, mask, y = random_instance(spec, seed=cfg.seed + k)
            errs.append(gradient_check(model, x, mask, y, fd_precision=args.fd_precision).max_rel_error)
        bad = sum(e > args.tolerance for e in errs)
        failed += bad
        worst = max(worst, max(errs))
        print(f"{spec.name:<20} max rel error {max(errs):.2e}  {'FAIL' if bad else 'ok'}")
    print(f"worst {worst:.2e}; {failed} instance(s) above {args.tolerance:g}")
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            from .synthetic import generate

            data = generate(n_posts=args.n_posts, seed=args.seed)
            write_corpus(data.corpus, args.out, format=args.corpus_format)
            print(f"wrote {len(data.corpus)} posts to {args.out}")
            return 0
        cfg = resolve_config(args)
        if args.command == "stats":
            original, filtered = pipeline.run_stats(cfg)
            if args.json:
                print(json.dumps({**cfg.provenance("stats"), "original": original.to_record(),
                                  "after_filter": filtered.to_record() if filtered else None},
                                 sort_keys=True))
            else:
                print(original.table())
                if filtered is not None:
                    print("\nafter filtering:\n" + filtered.table())
        elif args.command == "preprocess":
            n = pipeline.run_preprocess(cfg, Path(args.out))
            print(f"wrote {n} cleaned posts to {args.out}")
        elif args.command == "annotate":
            hist = pipeline.run_annotate(cfg, Path(args.input), Path(args.out),
                                         Path(args.histogram) if args.histogram else None)
            print(json.dumps(hist))
        elif args.command == "split":
            print(json.dumps(pipeline.run_split(cfg, Path(args.input), Path(args.out_dir))))
        elif args.command == "train":
            entries = pipeline.run_train(cfg, Path(args.splits), Path(args.out_dir))
            print("trained: " + ", ".join(e["name"] for e in entries))
        elif args.command == "evaluate":
            comparison = pipeline.run_evaluate(cfg, Path(args.models_dir), Path(args.test), Path(args.out_dir))
            print(comparison.table())
        elif args.command == "gradcheck":
            return _gradcheck(args, cfg)
        elif args.command == "run":
            if cfg.corpus is None:
                raise ConfigError("run needs a corpus (--corpus or in the config)")
            print(pipeline.run_pipeline(cfg).table())
    except (ConfigError, CorpusError, EmbeddingError, ValueError, OSError) as exc:
        print(f"reactsent {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
