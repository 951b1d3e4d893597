"""End-to-end stages: stats, preprocess, annotate, split, train, evaluate.

Every file written here carries the root seed and the config digest, either as
a leading ``{"_meta": ...}`` record (JSON-lines files) or as top-level keys.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict
from pathlib import Path
from types import SimpleNamespace

from . import baselines
from .annotate import LabeledPost, ReactionCounts, SentimentLabel, annotate_posts
from .config import BASELINE_MODELS, PipelineConfig
from .corpus import (REACTIONS, CorpusStats, SplitSpec, compute_reaction_stats, filter_annotatable,
                     load_corpus, split_holdout, split_manifest)
from .embeddings import Vocabulary, build_vocab, load_pretrained, random_embeddings
from .evaluation import AVERAGINGS, ConfusionMatrix, compare, confusion, metrics
from .neural.model import ModelSpec, load_model, save_model
from .neural.train import TrainConfig, labels_from_proba, predict_proba, train
from .normalize import NormalizerConfig, load_stopwords, normalize

logger = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")


def write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def write_jsonl(path: Path, records, meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps({"_meta": meta}, ensure_ascii=False, sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_jsonl(path: Path) -> tuple[dict, list[dict]]:
    meta, records = {}, []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if "_meta" in rec:
                meta = rec["_meta"]
            else:
                records.append(rec)
    return meta, records


def read_labeled(path: Path) -> list[LabeledPost]:
    return [LabeledPost.from_record(r) for r in read_jsonl(path)[1]]


# stages ---------------------------------------------------------------

def load_input_corpus(cfg: PipelineConfig):
    corpus = load_corpus(cfg.corpus, cfg.corpus_format, cfg.delimiter)
    if cfg.filter_annotatable:
        corpus, report = filter_annotatable(corpus)
        logger.info("filtered corpus: %s", report)
    return corpus


def run_stats(cfg: PipelineConfig) -> tuple[CorpusStats, CorpusStats | None]:
    corpus = load_corpus(cfg.corpus, cfg.corpus_format, cfg.delimiter)
    original = compute_reaction_stats(corpus)
    filtered = None
    if cfg.filter_annotatable:
        kept, _ = filter_annotatable(corpus)
        filtered = compute_reaction_stats(kept) if len(kept) else None
    return original, filtered


def normalizer_config(cfg: PipelineConfig) -> NormalizerConfig:
    stopwords = load_stopwords(cfg.stopwords) if cfg.stopwords else frozenset()
    return NormalizerConfig(stopwords=stopwords, **asdict(cfg.normalizer))


def run_preprocess(cfg: PipelineConfig, out_path: Path) -> int:
    corpus = load_input_corpus(cfg)
    ncfg = normalizer_config(cfg)
    records = []
    for post in corpus:
        rec = {"post_id": post.post_id, "tokens": " ".join(normalize(post.message, ncfg))}
        rec.update(post.counts())
        records.append(rec)
    write_jsonl(out_path, records, cfg.provenance("cleaned"))
    return len(records)


def run_annotate(cfg: PipelineConfig, cleaned_path: Path, out_path: Path,
                 hist_path: Path | None = None) -> dict:
    _, records = read_jsonl(cleaned_path)
    items = (
        (r["post_id"], r["tokens"].split(), ReactionCounts(**{n: int(r[n]) for n in REACTIONS}))
        for r in records
    )
    labeled, hist = annotate_posts(items, cfg.zero_policy)
    meta = cfg.provenance("labeled")
    meta["zero_policy"] = cfg.zero_policy
    write_jsonl(out_path, [p.to_record() for p in labeled], meta)
    histogram = {k: hist[k] for k in (SentimentLabel.POSITIVE.value, SentimentLabel.NEGATIVE.value)}
    if hist_path is not None:
        write_json(hist_path, {**cfg.provenance("histogram"), "histogram": histogram,
                               "input": len(records), "labeled": len(labeled)})
    return histogram


def split_spec(cfg: PipelineConfig) -> SplitSpec:
    return SplitSpec(cfg.dev_test_ratio, cfg.train_val_ratio, cfg.derive_seed("split"))


def run_split(cfg: PipelineConfig, labeled_path: Path, out_dir: Path) -> dict:
    _, records = read_jsonl(labeled_path)
    spec = split_spec(cfg)
    parts = split_holdout(records, spec)
    for name, part in zip(SPLITS, parts):
        write_jsonl(out_dir / f"{name}.jsonl", part, cfg.provenance(f"split:{name}"))

    ids = ([SimpleNamespace(post_id=r["post_id"]) for r in part] for part in parts)
    manifest = split_manifest(*ids, spec, **cfg.provenance("split_manifest"))
    write_json(out_dir / "split_manifest.json", manifest)
    return manifest["sizes"]


def train_config(cfg: PipelineConfig) -> TrainConfig:
    return TrainConfig(seed=cfg.derive_seed("train"), fine_tune_embeddings=cfg.fine_tune_embeddings,
                       **asdict(cfg.train))


def run_train(cfg: PipelineConfig, split_dir: Path, model_dir: Path) -> list[dict]:
    train_posts = read_labeled(split_dir / "train.jsonl")
    val_posts = read_labeled(split_dir / "val.jsonl")
    model_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    neural = [m for m in cfg.models if m not in BASELINE_MODELS]
    vocab = matrix = None
    if neural:
        vocab = build_vocab([p.tokens for p in train_posts], cfg.min_count)
        if cfg.embeddings:
            matrix = load_pretrained(cfg.embeddings, vocab, cfg.embedding_dim,
                                     seed=cfg.derive_seed("embeddings"), trainable=cfg.fine_tune_embeddings)
        else:
            matrix = random_embeddings(vocab, cfg.embedding_dim, seed=cfg.derive_seed("embeddings"),
                                       trainable=cfg.fine_tune_embeddings)
    tcfg = train_config(cfg)
    for name in cfg.models:
        if name == "core":
            path = model_dir / "core.jsonl"
            baselines.fit_core(train_posts).save(path)
            entries.append({"name": "Core Reaction Set", "kind": "core", "file": path.name})
        elif name == "star":
            path = model_dir / "star.jsonl"
            baselines.fit_star(train_posts).save(path)
            entries.append({"name": "Star Rating", "kind": "star", "file": path.name})
        elif name == "majority":
            label = baselines.majority_label(train_posts)
            entries.append({"name": "Majority class", "kind": "majority", "label": label.value})
        else:
            spec = ModelSpec.from_name(name, **asdict(cfg.model))
            logger.info("training %s", spec.name)
            trained = train(spec, train_posts, val_posts, vocab, matrix, tcfg)
            path = model_dir / f"{spec.slug}.npz"
            meta = {**cfg.provenance("model"), "max_len": tcfg.max_len,
                    "vocab_digest": vocab.digest(), "best_epoch": trained.best_epoch}
            save_model(path, trained.model, vocab.tokens, meta)
            write_json(model_dir / f"{spec.slug}.history.json", {
                **cfg.provenance("history"), "model": spec.name, "initial_loss": trained.initial_loss,
                "best_epoch": trained.best_epoch, "history": trained.history,
            })
            entries.append({"name": spec.name, "kind": "neural", "file": path.name})
    write_json(model_dir / "models.json", {**cfg.provenance("models"), "models": entries})
    return entries


def predict_entry(entry: dict, model_dir: Path, posts: list[LabeledPost]) -> list[SentimentLabel]:
    kind = entry["kind"]
    if kind == "core":
        table = baselines.TokenReactionTable.load(model_dir / entry["file"])
        return [baselines.predict_core(p.tokens, table)[1] for p in posts]
    if kind == "star":
        model = baselines.StarModel.load(model_dir / entry["file"])
        return [baselines.predict_star(p.tokens, model)[1] for p in posts]
    if kind == "majority":
        return [SentimentLabel(entry["label"])] * len(posts)
    model, header = load_model(model_dir / entry["file"])
    vocab = Vocabulary(header["vocab"])
    return labels_from_proba(predict_proba(model, vocab, posts, header["max_len"]))


def run_evaluate(cfg: PipelineConfig, model_dir: Path, test_path: Path, out_dir: Path):
    test_posts = read_labeled(test_path)
    gold = [p.label for p in test_posts]
    listing = json.loads((model_dir / "models.json").read_text(encoding="utf-8"))
    reports = []
    for entry in listing["models"]:
        cm = confusion(predict_entry(entry, model_dir, test_posts), gold)
        report = metrics(cm, cfg.averaging, name=entry["name"], seed=cfg.seed)
        reports.append(report)
    comparison = compare(reports)
    other = [a for a in AVERAGINGS if a != cfg.averaging][0]
    records = []
    for report in comparison.rows:
        rec = report.to_record()
        alt = metrics(ConfusionMatrix(**report.confusion), other)
        rec["alternate"] = {"averaging": other, "accuracy": alt.accuracy, "recall": alt.recall,
                            "precision": alt.precision, "f1": alt.f1}
        rec["config_digest"] = cfg.digest()
        records.append(rec)
    meta = {**cfg.provenance("metrics"), "averaging": cfg.averaging}
    write_jsonl(out_dir / "metrics.jsonl", records, meta)
    header = f"# seed={cfg.seed} config_digest={cfg.digest()} averaging={cfg.averaging} n_test={len(gold)}\n"
    (out_dir / "comparison.txt").write_text(header + comparison.table() + "\n", encoding="utf-8")
    return comparison


def run_pipeline(cfg: PipelineConfig, out_dir: Path | None = None):
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    original, filtered = run_stats(cfg)
    write_json(out / "stats.json", {**cfg.provenance("stats"), "original": original.to_record(),
                                    "after_filter": filtered.to_record() if filtered else None})
    run_preprocess(cfg, out / "cleaned.jsonl")
    run_annotate(cfg, out / "cleaned.jsonl", out / "labeled.jsonl", out / "histogram.json")
    run_split(cfg, out / "labeled.jsonl", out / "splits")
    run_train(cfg, out / "splits", out / "models")
    return run_evaluate(cfg, out / "models", out / "splits" / "test.jsonl", out)
