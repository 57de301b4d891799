"""Ablation runner: train+select+evaluate across feature and embedding grids.

Every grid cell runs a full cycle with the shared base configuration and
seed, so rows differ only in the ablated axis.  Failures are recorded in
their row and the remaining rows still run.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

from .checkpoint import Checkpoint
from .corpus import LABEL_ABBREV, LABELS, AnnotatedDocument
from .embed import ConcatEmbedder, EmbeddingTable
from .evaluate import evaluate_model
from .features import FeatureConfig
from .metrics import EvalReport
from .pipeline import encode_instances, extract_instances, vocab_from_instances
from .train import TrainConfig, fit

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


@dataclass
class DataBundle:
    """Shared inputs for every ablation row."""

    train_docs: list[AnnotatedDocument]
    val_docs: list[AnnotatedDocument]
    test_docs: list[AnnotatedDocument]
    parses: dict
    tables: list[EmbeddingTable]
    emb_seed: int = 0
    case_fallback: bool = True
    include_cross_sentence: bool = False

    def tables_for(self, source_spec: str) -> list[EmbeddingTable]:
        names = [n.strip() for n in source_spec.split("+") if n.strip()]
        by_name = {t.name: t for t in self.tables}
        missing = [n for n in names if n not in by_name]
        if missing:
            raise ValueError(f"unknown embedding source(s): {', '.join(missing)}")
        return [by_name[n] for n in names]


@dataclass
class AblationRow:
    features: str
    sources: str
    report: EvalReport | None = None
    error: str | None = None


def run_cycle(
    config: TrainConfig, source_spec: str, bundle: DataBundle
) -> tuple[Checkpoint, EvalReport]:
    """One full train+select+evaluate cycle for a single configuration."""
    tables = bundle.tables_for(source_spec)
    embedder = ConcatEmbedder(
        tables=tables, seed=bundle.emb_seed, case_fallback=bundle.case_fallback
    )
    train_ex, _ = extract_instances(
        bundle.train_docs, bundle.parses, bundle.include_cross_sentence
    )
    val_ex, _ = extract_instances(
        bundle.val_docs, bundle.parses, bundle.include_cross_sentence
    )
    vocab = vocab_from_instances(train_ex)
    train_set = encode_instances(train_ex, vocab, config.features, embedder)
    val_set = encode_instances(val_ex, vocab, config.features, embedder)
    params, _ = fit(train_set, val_set, config)
    ckpt = Checkpoint(
        params=params,
        feature_config=config.features,
        vocab=vocab,
        emb_sources=[(t.name, t.dim) for t in tables],
        emb_seed=bundle.emb_seed,
        case_fallback=bundle.case_fallback,
        seed=config.seed,
        extra={"include_cross_sentence": bundle.include_cross_sentence},
    )
    report = evaluate_model(ckpt, bundle.test_docs, bundle.parses, embedder)
    return ckpt, report


def run_ablation(
    base_config: TrainConfig,
    feature_specs: list[str],
    source_specs: list[str],
    bundle: DataBundle,
) -> list[AblationRow]:
    rows = []
    for source_spec in source_specs:
        for feature_spec in feature_specs:
            row = AblationRow(features=feature_spec, sources=source_spec)
            try:
                config = replace(
                    base_config, features=FeatureConfig.from_names(feature_spec)
                )
                _, row.report = run_cycle(config, source_spec, bundle)
            except Exception as err:  # keep the grid running
                row.error = f"{type(err).__name__}: {err}"
            rows.append(row)
    return rows


def format_ablation_csv(rows: list[AblationRow]) -> str:
    """One row per configuration: overall P/R/F1 then per-label F1."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["features", "embeddings", "P", "R", "F1"] + [f"F1_{a}" for a in LABEL_ABBREV]
    )
    for row in rows:
        if row.report is None:
            writer.writerow(
                [row.features, row.sources] + [f"FAILED: {row.error}"] + [""] * 8
            )
            continue
        rep = row.report
        writer.writerow(
            [row.features, row.sources]
            + [f"{100 * v:.1f}" for v in (rep.macro_precision, rep.macro_recall, rep.macro_f1)]
            + [f"{100 * rep.f1[lab]:.1f}" for lab in LABELS]
        )
    return buf.getvalue()


def load_grid(path) -> dict:
    """Read an ablation grid description (TOML)."""
    with open(path, "rb") as fh:
        return tomllib.load(fh)
