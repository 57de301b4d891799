"""From annotated documents and parses to model-ready relation instances.

Entity character spans are aligned to parse tokens by character-range
overlap; each relation then reduces to the subtree spanning the two entity
heads.  Pairs whose heads fall in different sentences are skipped by
default, or (on request) connected under a synthetic root joining the two
sentence trees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tree as treemod
from .corpus import AnnotatedDocument, LABEL_INDEX, RelationInstance
from .embed import ConcatEmbedder
from .features import FeatureConfig, FeatureVocab, build_vocab, encode_subtree
from .parsefile import ParsedSentenceRecord
from .tree import DepTree, SpanningSubtree, build_tree, entity_head, spanning_subtree

SKIP_UNPARSED = "no-parse"
SKIP_UNALIGNED = "unaligned-entity"
SKIP_CROSS_SENTENCE = "cross-sentence"


@dataclass
class ExtractedInstance:
    """Structural form of one relation: subtree plus entity metadata."""

    doc_id: str
    arg1: str
    arg2: str
    label: str
    sub: SpanningSubtree
    ent_lens: tuple[int, int]


@dataclass
class SkippedInstance:
    doc_id: str
    arg1: str
    arg2: str
    label: str
    reason: str


@dataclass
class EncodedInstance:
    """One classification unit: encoded node inputs plus the gold label."""

    doc_id: str
    arg1: str
    arg2: str
    label: str
    sub: SpanningSubtree
    inputs: dict[int, np.ndarray]

    @property
    def label_index(self) -> int:
        return LABEL_INDEX[self.label]


def align_entity(records: list[ParsedSentenceRecord], start: int, end: int):
    """Locate the sentence and token range overlapping [start, end).

    Returns (sentence position in `records`, 0-based token range) or None
    when no token overlaps the span.
    """
    for pos, rec in enumerate(records):
        hits = [
            t.index - 1
            for t in rec.tokens
            if t.char_start < end and t.char_end > start
        ]
        if hits:
            return pos, range(min(hits), max(hits) + 1)
    return None


def extract_instances(
    docs: list[AnnotatedDocument],
    parses: dict[str, list[ParsedSentenceRecord]],
    include_cross_sentence: bool = False,
):
    """Reduce every relation to its spanning subtree.

    Returns (extracted, skipped); instances are skipped when their document
    has no parse, an entity aligns to no token, or the pair crosses a
    sentence boundary while `include_cross_sentence` is off.
    """
    extracted: list[ExtractedInstance] = []
    skipped: list[SkippedInstance] = []
    tree_cache: dict[tuple[str, int], DepTree] = {}

    def sentence_tree(doc_id, pos, rec):
        key = (doc_id, pos)
        if key not in tree_cache:
            tree_cache[key] = build_tree(rec)
        return tree_cache[key]

    for doc in docs:
        records = parses.get(doc.id)
        for rel in doc.relations:
            if not records:
                skipped.append(_skip(rel, SKIP_UNPARSED))
                continue
            e1 = doc.entity(rel.arg1)
            e2 = doc.entity(rel.arg2)
            hit1 = align_entity(records, e1.start, e1.end)
            hit2 = align_entity(records, e2.start, e2.end)
            if hit1 is None or hit2 is None:
                skipped.append(_skip(rel, SKIP_UNALIGNED))
                continue
            (pos1, span1), (pos2, span2) = hit1, hit2
            e1.sentence, e1.tokens = pos1, span1
            e2.sentence, e2.tokens = pos2, span2
            if pos1 == pos2:
                t = sentence_tree(doc.id, pos1, records[pos1])
                h1 = entity_head(t, span1)
                h2 = entity_head(t, span2)
            elif include_cross_sentence:
                first, second = sorted((pos1, pos2))
                t = treemod.join_trees(
                    [sentence_tree(doc.id, p, records[p]) for p in (first, second)]
                )
                off1 = 0 if pos1 == first else len(records[first].tokens)
                off2 = 0 if pos2 == first else len(records[first].tokens)
                h1 = entity_head(t, range(span1.start + off1, span1.stop + off1))
                h2 = entity_head(t, range(span2.start + off2, span2.stop + off2))
            else:
                skipped.append(_skip(rel, SKIP_CROSS_SENTENCE))
                continue
            sub = spanning_subtree(t, h1, h2)
            extracted.append(
                ExtractedInstance(
                    doc_id=doc.id,
                    arg1=rel.arg1,
                    arg2=rel.arg2,
                    label=rel.label,
                    sub=sub,
                    ent_lens=(len(span1), len(span2)),
                )
            )
    return extracted, skipped


def _skip(rel: RelationInstance, reason: str) -> SkippedInstance:
    return SkippedInstance(
        doc_id=rel.doc_id, arg1=rel.arg1, arg2=rel.arg2, label=rel.label, reason=reason
    )


def vocab_from_instances(instances: list[ExtractedInstance]) -> FeatureVocab:
    return build_vocab(inst.sub for inst in instances)


def encode_instances(
    instances: list[ExtractedInstance],
    vocab: FeatureVocab,
    config: FeatureConfig,
    emb: ConcatEmbedder,
) -> list[EncodedInstance]:
    encoded = []
    for inst in instances:
        node_inputs = encode_subtree(inst.sub, vocab, config, emb, inst.ent_lens)
        encoded.append(
            EncodedInstance(
                doc_id=inst.doc_id,
                arg1=inst.arg1,
                arg2=inst.arg2,
                label=inst.label,
                sub=inst.sub,
                inputs={node: ni.vector for node, ni in node_inputs.items()},
            )
        )
    return encoded
