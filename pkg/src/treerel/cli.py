"""Command-line interface: train, eval, and ablate subcommands."""

from __future__ import annotations

import argparse
import os
import sys

from .ablation import (
    DataBundle,
    format_ablation_csv,
    load_grid,
    run_ablation,
)
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .corpus import (
    load_abstract_file,
    load_relation_file,
    split_validation,
    write_split_manifest,
)
from .embed import ConcatEmbedder, load_table
from .evaluate import evaluate_model, make_embedder
from .features import FeatureConfig
from .metrics import format_confusion_csv
from .parsefile import read_parse_file
from .pipeline import encode_instances, extract_instances, vocab_from_instances
from .train import TrainConfig, fit


def _emb_spec(value: str):
    if ":" in value:
        name, path = value.split(":", 1)
    else:
        name, path = os.path.splitext(os.path.basename(value))[0], value
    return name, path


def _load_tables(args):
    if not args.emb:
        raise SystemExit("at least one --emb name:path is required")
    limit = args.emb_limit if args.emb_limit else None
    return [load_table(path, name=name, limit=limit) for name, path in args.emb]


def _load_corpus(args):
    docs = load_abstract_file(args.data)
    load_relation_file(args.relations, docs)
    parses = read_parse_file(args.parses)
    return docs, parses


def _add_data_args(p):
    p.add_argument("--data", required=True, help="abstract file (XML-like markup)")
    p.add_argument("--relations", required=True, help="relation file, LABEL(id1,id2[,REVERSE]) lines")
    p.add_argument("--parses", required=True, help="dependency parse file")
    p.add_argument("--emb", action="append", type=_emb_spec, metavar="NAME:PATH",
                   help="embedding table; repeat to concatenate in order")
    p.add_argument("--emb-limit", type=int, default=0,
                   help="read at most N rows per table (0 = all)")


def cmd_train(args):
    docs, parses = _load_corpus(args)
    tables = _load_tables(args)
    split = split_validation(docs, args.val_count, args.seed)
    if args.split_manifest:
        write_split_manifest(split, args.split_manifest)
    embedder = ConcatEmbedder(
        tables=tables, seed=args.seed, case_fallback=not args.no_case_fallback
    )
    train_ex, train_skipped = extract_instances(
        split.train, parses, args.include_cross_sentence
    )
    val_ex, val_skipped = extract_instances(
        split.validation, parses, args.include_cross_sentence
    )
    if train_skipped or val_skipped:
        print(
            f"skipped {len(train_skipped)} train / {len(val_skipped)} validation "
            "instances (see --include-cross-sentence)",
            file=sys.stderr,
        )
    features = FeatureConfig.from_names(args.features)
    vocab = vocab_from_instances(train_ex)
    train_set = encode_instances(train_ex, vocab, features, embedder)
    val_set = encode_instances(val_ex, vocab, features, embedder)
    config = TrainConfig(
        batch_size=args.batch,
        dropout=args.dropout,
        hidden_size=args.hidden,
        optimizer=args.optimizer,
        learning_rate=args.lr,
        max_epochs=args.epochs,
        patience=args.patience,
        seed=args.seed,
        features=features,
        class_weights=args.class_weights,
    )
    params, log = fit(train_set, val_set, config)
    best = next(e for e in log.entries if e.selected)
    ckpt = Checkpoint(
        params=params,
        feature_config=features,
        vocab=vocab,
        emb_sources=[(t.name, t.dim) for t in tables],
        emb_seed=args.seed,
        case_fallback=not args.no_case_fallback,
        seed=args.seed,
        extra={
            "include_cross_sentence": args.include_cross_sentence,
            "selected_epoch": best.epoch,
        },
    )
    save_checkpoint(ckpt, args.out)
    if args.log:
        log.write(args.log)
    print(
        f"trained {len(train_set)} instances, validated {len(val_set)}; "
        f"best epoch {best.epoch} (val macro-F1 {best.val_macro_f1:.4f}) -> {args.out}"
    )
    return 0


def cmd_eval(args):
    ckpt = load_checkpoint(args.model)
    docs, parses = _load_corpus(args)
    tables = _load_tables(args)
    embedder = make_embedder(ckpt, tables)
    report = evaluate_model(ckpt, docs, parses, embedder, skip_missing=args.skip_missing)
    with open(args.report, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    if args.confusion:
        with open(args.confusion, "w", encoding="utf-8") as fh:
            fh.write(format_confusion_csv(report.matrix))
    print(
        f"evaluated {report.n_instances} instances "
        f"({report.n_skipped} skipped, policy {report.skip_policy}); "
        f"macro-F1 {report.macro_f1:.4f} -> {args.report}"
    )
    return 0


def cmd_ablate(args):
    grid = load_grid(args.grid)
    data = grid["data"]
    docs = load_abstract_file(data["abstracts"])
    load_relation_file(data["relations"], docs)
    test_docs = load_abstract_file(data["test_abstracts"])
    load_relation_file(data["test_relations"], test_docs)
    parses = read_parse_file(data["parses"])
    tr = grid.get("train", {})
    seed = int(tr.get("seed", 0))
    base = TrainConfig(
        batch_size=int(tr.get("batch", 16)),
        dropout=float(tr.get("dropout", 0.2)),
        hidden_size=int(tr.get("hidden", 200)),
        optimizer=tr.get("optimizer", "adam"),
        learning_rate=float(tr.get("lr", 1e-3)),
        max_epochs=int(tr.get("epochs", 50)),
        patience=int(tr.get("patience", 8)),
        seed=seed,
    )
    tables = [
        load_table(e["path"], name=e["name"], limit=e.get("limit") or None)
        for e in grid.get("embeddings", [])
    ]
    split = split_validation(docs, int(data.get("validation_count", 50)), seed)
    bundle = DataBundle(
        train_docs=split.train,
        val_docs=split.validation,
        test_docs=test_docs,
        parses=parses,
        tables=tables,
        emb_seed=seed,
        include_cross_sentence=bool(data.get("include_cross_sentence", False)),
    )
    rows = run_ablation(base, grid["features"], grid["sources"], bundle)
    table = format_ablation_csv(rows)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(table)
    failures = [r for r in rows if r.error]
    print(f"{len(rows)} configurations -> {args.out} ({len(failures)} failed)")
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="treerel",
        description="Relation classification over dependency subtrees "
        "with a child-sum tree LSTM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a classifier and write a checkpoint")
    _add_data_args(p)
    p.add_argument("--features", default="none",
                   help="comma list of dep,pos,entlen,height (or 'none')")
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--dropout", type=float, default=0.2)
    p.add_argument("--hidden", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--patience", type=int, default=8)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--val-count", type=int, default=50,
                   help="documents held out for validation")
    p.add_argument("--include-cross-sentence", action="store_true",
                   help="join sentence trees under a synthetic root instead of skipping")
    p.add_argument("--class-weights", action="store_true",
                   help="weight the loss by inverse label frequency")
    p.add_argument("--no-case-fallback", action="store_true",
                   help="disable lowercase fallback in embedding lookups")
    p.add_argument("--split-manifest", help="write the train/validation split here")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--log", help="JSONL training log output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint and write a report")
    p.add_argument("--model", required=True, help="checkpoint path")
    _add_data_args(p)
    p.add_argument("--report", required=True, help="JSON report output path")
    p.add_argument("--confusion", help="confusion matrix CSV output path")
    p.add_argument("--skip-missing", action="store_true",
                   help="drop unpreparable instances instead of counting them as errors")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run a feature/embedding ablation grid")
    p.add_argument("--grid", required=True, help="grid description (TOML)")
    p.add_argument("--out", required=True, help="CSV table output path")
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
