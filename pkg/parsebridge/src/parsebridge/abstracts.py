"""Minimal reader for the annotated-abstract markup.

Only what preprocessing needs: the document id, the abstract text with
entity tags stripped, and the entity character spans (kept so downstream
alignment can be checked).  Offsets refer to the de-tagged text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_DOC_RE = re.compile(r"<doc\s+id=\"([^\"]*)\"\s*>(.*?)</doc>", re.DOTALL)
_TITLE_RE = re.compile(r"<title>(.*?)</title>", re.DOTALL)
_ABSTRACT_RE = re.compile(r"<abstract>(.*?)</abstract>", re.DOTALL)
_ENTITY_RE = re.compile(r"<entity\s+id=\"([^\"]*)\"\s*>(.*?)</entity>", re.DOTALL)


def _unescape(text: str) -> str:
    return text.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")


@dataclass
class RawDocument:
    id: str
    title: str
    text: str                                   # de-tagged abstract text
    entities: list[tuple[str, int, int]] = field(default_factory=list)


def read_abstracts(path) -> list[RawDocument]:
    with open(path, encoding="utf-8") as fh:
        blob = fh.read()
    docs = []
    for m in _DOC_RE.finditer(blob):
        doc_id, body = m.group(1), m.group(2)
        title_m = _TITLE_RE.search(body)
        title = _unescape(title_m.group(1)) if title_m else ""
        abstract_m = _ABSTRACT_RE.search(body)
        if abstract_m is None:
            raise ValueError(f"doc {doc_id}: no <abstract> element")
        pieces = []
        entities = []
        cursor = 0
        length = 0
        raw = abstract_m.group(1)
        for em in _ENTITY_RE.finditer(raw):
            before = _unescape(raw[cursor:em.start()])
            surface = _unescape(em.group(2))
            pieces.append(before)
            length += len(before)
            entities.append((em.group(1), length, length + len(surface)))
            pieces.append(surface)
            length += len(surface)
            cursor = em.end()
        pieces.append(_unescape(raw[cursor:]))
        docs.append(
            RawDocument(
                id=doc_id, title=title, text="".join(pieces), entities=entities
            )
        )
    return docs
