"""End-to-end evaluation of a trained checkpoint on annotated documents."""

from __future__ import annotations

from .checkpoint import Checkpoint
from .corpus import AnnotatedDocument
from .embed import ConcatEmbedder, EmbeddingTable
from .metrics import EvalReport, score
from .pipeline import encode_instances, extract_instances
from .train import predict_labels


def make_embedder(ckpt: Checkpoint, tables: list[EmbeddingTable]) -> ConcatEmbedder:
    """Build the lookup the checkpoint was trained with; reject mismatches."""
    spec = [(t.name, t.dim) for t in tables]
    if spec != list(ckpt.emb_sources):
        raise ValueError(
            f"embedding sources {spec} do not match checkpoint sources "
            f"{list(ckpt.emb_sources)}"
        )
    return ConcatEmbedder(
        tables=tables, seed=ckpt.emb_seed, case_fallback=ckpt.case_fallback
    )


def evaluate_model(
    ckpt: Checkpoint,
    docs: list[AnnotatedDocument],
    parses,
    embedder: ConcatEmbedder,
    skip_missing: bool = False,
) -> EvalReport:
    """Score the checkpoint on every relation in `docs`.

    Instances that cannot be prepared (no parse, unalignable entity,
    cross-sentence pair under the trained policy) count as wrong predictions
    unless `skip_missing` drops them from the metrics; either way the report
    carries their count and the policy applied.
    """
    include_cross = bool(ckpt.extra.get("include_cross_sentence", False))
    extracted, skipped = extract_instances(
        docs, parses, include_cross_sentence=include_cross
    )
    encoded = encode_instances(extracted, ckpt.vocab, ckpt.feature_config, embedder)
    if encoded:
        width = next(iter(encoded[0].inputs.values())).shape[0]
        if width != ckpt.params.input_size:
            raise ValueError(
                f"encoded input width {width} does not match checkpoint input "
                f"size {ckpt.params.input_size}"
            )
    gold = [inst.label for inst in encoded]
    predicted = predict_labels(ckpt.params, encoded)
    if skip_missing:
        report = score(gold, predicted)
        report.n_skipped = len(skipped)
        report.skip_policy = "skip-missing"
    else:
        report = score(gold, predicted, skipped_gold=[s.label for s in skipped])
    return report
