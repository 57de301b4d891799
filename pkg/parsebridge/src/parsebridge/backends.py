"""Parser backends: spaCy when available, the built-in engine otherwise."""

from __future__ import annotations

import importlib.util

from . import engine
from .abstracts import RawDocument
from .records import Row, SentenceRecord


def builtin_parse_document(doc: RawDocument) -> list[SentenceRecord]:
    tokens = engine.tokenize(doc.text)
    records = []
    for s_i, sent in enumerate(engine.split_sentences(tokens)):
        tags = engine.tag(sent)
        heads, labels = engine.parse(tags)
        rows = [
            Row(
                index=i + 1, form=tok.form, pos=tags[i], head=heads[i],
                deplabel=labels[i], char_start=tok.start, char_end=tok.end,
            )
            for i, tok in enumerate(sent)
        ]
        records.append(SentenceRecord(doc_id=doc.id, sent_index=s_i, rows=rows))
    return records


_SPACY_NLP = None


def _load_spacy():
    global _SPACY_NLP
    if _SPACY_NLP is None:
        import spacy

        try:
            _SPACY_NLP = spacy.load("en_core_web_sm", exclude=["ner", "lemmatizer"])
        except OSError:
            _SPACY_NLP = spacy.blank("en")
            _SPACY_NLP.add_pipe("sentencizer")
            raise RuntimeError(
                "spaCy is installed but en_core_web_sm is not; "
                "install the model or use --backend builtin"
            )
    return _SPACY_NLP


def spacy_available() -> bool:
    if importlib.util.find_spec("spacy") is None:
        return False
    try:
        _load_spacy()
        return True
    except Exception:
        return False


def spacy_parse_document(doc: RawDocument) -> list[SentenceRecord]:
    nlp = _load_spacy()
    parsed = nlp(doc.text)
    records = []
    for s_i, sent in enumerate(parsed.sents):
        sent_tokens = list(sent)
        local = {tok.i: k + 1 for k, tok in enumerate(sent_tokens)}
        rows = []
        for k, tok in enumerate(sent_tokens):
            head = 0 if tok.head is tok else local.get(tok.head.i, 0)
            rows.append(
                Row(
                    index=k + 1, form=tok.text, pos=tok.pos_, head=head,
                    deplabel=tok.dep_, char_start=tok.idx,
                    char_end=tok.idx + len(tok.text),
                )
            )
        records.append(SentenceRecord(doc_id=doc.id, sent_index=s_i, rows=rows))
    return records


def select_backend(name: str = "auto"):
    """Resolve a backend name to (label, per-document parse function)."""
    if name == "builtin":
        return "builtin", builtin_parse_document
    if name == "spacy":
        _load_spacy()
        return "spacy", spacy_parse_document
    if name == "auto":
        if spacy_available():
            return "spacy", spacy_parse_document
        return "builtin", builtin_parse_document
    raise ValueError(f"unknown backend {name!r}")
