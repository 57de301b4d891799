"""Instance extraction: alignment, cross-sentence policy, and skip reasons."""

from treerel.corpus import AnnotatedDocument, EntitySpan, RelationInstance
from treerel.parsefile import ParsedSentenceRecord, TokenRow
from treerel.pipeline import (
    SKIP_CROSS_SENTENCE,
    SKIP_UNALIGNED,
    SKIP_UNPARSED,
    align_entity,
    extract_instances,
)


class TestExtractFixture:
    def test_counts_and_skip_reasons(self, fixture_corpus):
        docs, _, parses = fixture_corpus
        extracted, skipped = extract_instances(docs, parses)
        assert len(extracted) == 6
        assert [s.reason for s in skipped] == [SKIP_CROSS_SENTENCE]
        assert {e.label for e in extracted} == {
            "USAGE", "MODEL-FEATURE", "PART_WHOLE", "COMPARE", "RESULT", "TOPIC",
        }

    def test_cross_sentence_included_on_request(self, fixture_corpus):
        docs, _, parses = fixture_corpus
        extracted, skipped = extract_instances(docs, parses, include_cross_sentence=True)
        assert len(extracted) == 7
        assert skipped == []
        joined = next(
            e for e in extracted if e.doc_id == "F05" and e.label == "COMPARE"
        )
        root = joined.sub.tree.nodes[joined.sub.root]
        assert root.surface == "<doc>"

    def test_entity_alignment_fills_token_ranges(self, fixture_corpus):
        docs, _, parses = fixture_corpus
        extract_instances(docs, parses, include_cross_sentence=True)
        for doc in docs:
            for e in doc.entities:
                assert e.tokens is not None and len(e.tokens) >= 1
                assert e.sentence is not None

    def test_entity_lengths(self, fixture_corpus):
        docs, _, parses = fixture_corpus
        extracted, _ = extract_instances(docs, parses)
        by_doc = {e.doc_id: e for e in extracted}
        assert by_doc["F01"].ent_lens == (2, 2)   # Oral communication / additional indices
        assert by_doc["F02"].ent_lens == (1, 2)   # intelligibility / MT output
        assert by_doc["F03"].ent_lens == (2, 3)

    def test_head_markers_inside_subtree(self, fixture_corpus):
        docs, _, parses = fixture_corpus
        extracted, _ = extract_instances(docs, parses)
        for inst in extracted:
            assert inst.sub.head1 in inst.sub.node_set
            assert inst.sub.head2 in inst.sub.node_set


def one_doc_corpus(entity_end=4):
    doc = AnnotatedDocument(
        id="X", title="", abstract="word another",
        entities=[
            EntitySpan(id="X.1", start=0, end=entity_end),
            EntitySpan(id="X.2", start=5, end=12),
        ],
    )
    doc.relations.append(
        RelationInstance(doc_id="X", arg1="X.1", arg2="X.2", label="USAGE")
    )
    record = ParsedSentenceRecord(
        doc_id="X", sent_index=0,
        tokens=[
            TokenRow(1, "word", "NOUN", 2, "nsubj", 0, 4),
            TokenRow(2, "another", "NOUN", 0, "root", 5, 12),
        ],
    )
    return [doc], {"X": [record]}


class TestSkipPaths:
    def test_missing_parse(self):
        docs, _ = one_doc_corpus()
        extracted, skipped = extract_instances(docs, {})
        assert extracted == []
        assert [s.reason for s in skipped] == [SKIP_UNPARSED]

    def test_normal_alignment(self):
        docs, parses = one_doc_corpus()
        extracted, skipped = extract_instances(docs, parses)
        assert len(extracted) == 1 and not skipped

    def test_unalignable_entity(self):
        docs, parses = one_doc_corpus()
        # tokens end at offset 12; an entity beyond that cannot align
        docs[0].entities[1] = EntitySpan(id="X.2", start=30, end=35)
        docs[0].abstract = "word another" + " " * 18 + "ghost"
        extracted, skipped = extract_instances(docs, parses)
        assert extracted == []
        assert [s.reason for s in skipped] == [SKIP_UNALIGNED]


class TestAlignEntity:
    def test_partial_overlap_counts(self):
        _, parses = one_doc_corpus()
        records = parses["X"]
        hit = align_entity(records, 2, 7)   # straddles both tokens
        assert hit is not None
        pos, span = hit
        assert pos == 0
        assert list(span) == [0, 1]

    def test_no_overlap(self):
        _, parses = one_doc_corpus()
        assert align_entity(parses["X"], 100, 120) is None
