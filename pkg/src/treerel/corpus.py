"""Annotated-abstract corpus: markup parsing, relation files, and splits.

Abstract files are XML-like: ``<doc id="...">`` elements holding a
``<title>`` and an ``<abstract>`` whose text carries inline
``<entity id="...">surface</entity>`` tags.  Entity character offsets are
recorded against the de-tagged abstract text so downstream tokenization
never sees markup.  Relation files hold one ``LABEL(id1,id2[,REVERSE])``
line per relation instance.
"""

from __future__ import annotations

import io
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

# Canonical label order used everywhere (reports, confusion matrices, CLI).
LABELS = ("USAGE", "MODEL-FEATURE", "PART_WHOLE", "COMPARE", "RESULT", "TOPIC")
LABEL_ABBREV = ("U", "M-F", "P-W", "C", "R", "T")
LABEL_INDEX = {lab: i for i, lab in enumerate(LABELS)}


class MarkupError(ValueError):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class CorpusValidationError(ValueError):
    pass


class RelationFileError(ValueError):
    pass


@dataclass
class EntitySpan:
    id: str
    start: int               # character offsets into de-tagged abstract text,
    end: int                 # half-open
    surface: str = ""
    tokens: range | None = None   # sentence-local token range, set by alignment
    sentence: int | None = None   # index of the owning parse record

    def __post_init__(self):
        if self.start >= self.end:
            raise CorpusValidationError(
                f"entity {self.id}: empty character span [{self.start},{self.end})"
            )


@dataclass
class RelationInstance:
    doc_id: str
    arg1: str
    arg2: str
    label: str
    reverse: bool = False

    def __post_init__(self):
        if self.label not in LABEL_INDEX:
            raise CorpusValidationError(f"unknown relation label {self.label!r}")
        if self.arg1 == self.arg2:
            raise CorpusValidationError(
                f"relation {self.label}({self.arg1},{self.arg2}): identical arguments"
            )


@dataclass
class AnnotatedDocument:
    id: str
    title: str
    abstract: str
    entities: list[EntitySpan] = field(default_factory=list)
    relations: list[RelationInstance] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entities:
            if e.id in seen:
                raise CorpusValidationError(f"doc {self.id}: duplicate entity id {e.id}")
            seen.add(e.id)
            if e.end > len(self.abstract):
                raise CorpusValidationError(
                    f"doc {self.id}: entity {e.id} offsets exceed abstract length"
                )

    def entity(self, entity_id: str) -> EntitySpan:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(f"doc {self.id}: no entity {entity_id}")


@dataclass
class DatasetSplit:
    train: list[AnnotatedDocument]
    validation: list[AnnotatedDocument]
    seed: int


def _unescape(text: str) -> str:
    for esc, ch in (("&lt;", "<"), ("&gt;", ">"), ("&amp;", "&")):
        text = text.replace(esc, ch)
    return text


def _escape(text: str) -> str:
    text = text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return text


class _Scanner:
    """Minimal markup scanner tracking line/column for error reports."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        line = self.text.count("\n", 0, self.pos) + 1
        col = self.pos - (self.text.rfind("\n", 0, self.pos) + 1) + 1
        raise MarkupError(message, line, col)

    def eof(self):
        return self.pos >= len(self.text)

    def skip_ws(self):
        while not self.eof() and self.text[self.pos].isspace():
            self.pos += 1

    def peek_tag(self):
        """Name of the tag starting at pos, or None if not at a tag."""
        m = re.match(r"</?([a-zA-Z][\w-]*)", self.text[self.pos:])
        return m.group(1) if m else None

    def consume_open(self, name):
        """Consume `<name ...>` and return its attribute dict."""
        m = re.match(rf"<{name}((?:\s+[\w-]+=\"[^\"<>]*\")*)\s*>", self.text[self.pos:])
        if not m:
            self.error(f"expected <{name} ...> tag")
        attrs = dict(re.findall(r"([\w-]+)=\"([^\"]*)\"", m.group(1)))
        self.pos += m.end()
        return attrs

    def consume_close(self, name):
        m = re.match(rf"</{name}\s*>", self.text[self.pos:])
        if not m:
            self.error(f"expected </{name}> tag")
        self.pos += m.end()

    def at_open(self, name):
        return re.match(rf"<{name}[\s>]", self.text[self.pos:]) is not None

    def at_close(self, name):
        return self.text.startswith(f"</{name}", self.pos)

    def text_until_lt(self):
        nxt = self.text.find("<", self.pos)
        if nxt == -1:
            nxt = len(self.text)
        chunk = self.text[self.pos:nxt]
        self.pos = nxt
        return chunk


def _parse_abstract_body(sc: _Scanner):
    """Parse mixed text/entity content up to </abstract>."""
    pieces = []
    length = 0
    entities = []
    while True:
        chunk = _unescape(sc.text_until_lt())
        pieces.append(chunk)
        length += len(chunk)
        if sc.eof():
            sc.error("unterminated <abstract> element")
        if sc.at_close("abstract"):
            sc.consume_close("abstract")
            return "".join(pieces), entities
        if sc.at_open("entity"):
            attrs = sc.consume_open("entity")
            if "id" not in attrs:
                sc.error("<entity> without id attribute")
            surface = _unescape(sc.text_until_lt())
            if sc.at_open("entity"):
                sc.error("nested <entity> tags")
            if not sc.at_close("entity"):
                sc.error("expected </entity> tag")
            sc.consume_close("entity")
            entities.append(
                EntitySpan(
                    id=attrs["id"],
                    start=length,
                    end=length + len(surface),
                    surface=surface,
                )
            )
            pieces.append(surface)
            length += len(surface)
        else:
            sc.error("unexpected tag inside <abstract>")


def parse_abstract_file(source) -> list[AnnotatedDocument]:
    """Parse an abstract file (stream or string) into documents.

    Entity offsets refer to the abstract text with markup stripped.
    """
    text = source.read() if hasattr(source, "read") else source
    sc = _Scanner(text)
    docs = []
    while True:
        sc.skip_ws()
        if sc.eof():
            break
        if not sc.at_open("doc"):
            sc.error("expected <doc ...> element")
        attrs = sc.consume_open("doc")
        if "id" not in attrs:
            sc.error("<doc> without id attribute")
        sc.skip_ws()
        title = ""
        if sc.at_open("title"):
            sc.consume_open("title")
            title = _unescape(sc.text_until_lt())
            if not sc.at_close("title"):
                sc.error("expected </title> tag")
            sc.consume_close("title")
            sc.skip_ws()
        if not sc.at_open("abstract"):
            sc.error("expected <abstract> element")
        sc.consume_open("abstract")
        abstract, entities = _parse_abstract_body(sc)
        sc.skip_ws()
        if not sc.at_close("doc"):
            sc.error("expected </doc> tag")
        sc.consume_close("doc")
        docs.append(
            AnnotatedDocument(
                id=attrs["id"], title=title, abstract=abstract, entities=entities
            )
        )
    return docs


def load_abstract_file(path) -> list[AnnotatedDocument]:
    with open(path, encoding="utf-8") as fh:
        return parse_abstract_file(fh)


def document_to_markup(doc: AnnotatedDocument) -> str:
    """Serialize one document; inverse of parsing (offsets round-trip)."""
    ents = sorted(doc.entities, key=lambda e: e.start)
    for a, b in zip(ents, ents[1:]):
        if b.start < a.end:
            raise CorpusValidationError(
                f"doc {doc.id}: overlapping entities {a.id} and {b.id}"
            )
    parts = [f'<doc id="{doc.id}">\n', "<title>", _escape(doc.title), "</title>\n"]
    parts.append("<abstract>")
    cursor = 0
    for e in ents:
        parts.append(_escape(doc.abstract[cursor:e.start]))
        parts.append(f'<entity id="{e.id}">')
        parts.append(_escape(doc.abstract[e.start:e.end]))
        parts.append("</entity>")
        cursor = e.end
    parts.append(_escape(doc.abstract[cursor:]))
    parts.append("</abstract>\n</doc>\n")
    return "".join(parts)


def documents_to_markup(docs) -> str:
    return "".join(document_to_markup(d) for d in docs)


_RELATION_RE = re.compile(
    r"^\s*([A-Za-z][\w-]*)\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*"
    r"(?:,\s*(REVERSE)\s*)?\)\s*$",
    re.IGNORECASE,
)


def parse_relation_file(source, docs) -> list[RelationInstance]:
    """Parse relation lines and attach each instance to its owning document."""
    stream = io.StringIO(source) if isinstance(source, str) else source
    owner: dict[str, AnnotatedDocument] = {}
    for d in docs:
        for e in d.entities:
            if e.id in owner:
                raise CorpusValidationError(
                    f"entity id {e.id} appears in documents {owner[e.id].id} and {d.id}"
                )
            owner[e.id] = d
    instances = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        m = _RELATION_RE.match(line)
        if not m:
            raise RelationFileError(f"line {lineno}: cannot parse {line.strip()!r}")
        label = m.group(1).upper()
        if label not in LABEL_INDEX:
            raise RelationFileError(
                f"line {lineno}: unknown relation label {m.group(1)!r}"
            )
        arg1, arg2 = m.group(2), m.group(3)
        for arg in (arg1, arg2):
            if arg not in owner:
                raise RelationFileError(
                    f"line {lineno}: entity id {arg!r} not found in any document"
                )
        if owner[arg1] is not owner[arg2]:
            raise RelationFileError(
                f"line {lineno}: entities {arg1} and {arg2} come from different documents"
            )
        doc = owner[arg1]
        inst = RelationInstance(
            doc_id=doc.id,
            arg1=arg1,
            arg2=arg2,
            label=label,
            reverse=m.group(4) is not None,
        )
        doc.relations.append(inst)
        instances.append(inst)
    return instances


def load_relation_file(path, docs) -> list[RelationInstance]:
    with open(path, encoding="utf-8") as fh:
        return parse_relation_file(fh, docs)


def format_relation_file(instances) -> str:
    lines = []
    for r in instances:
        tail = ",REVERSE" if r.reverse else ""
        lines.append(f"{r.label}({r.arg1},{r.arg2}{tail})")
    return "\n".join(lines) + ("\n" if lines else "")


def label_histogram(instances) -> Counter:
    return Counter(r.label for r in instances)


def split_validation(docs, n: int, seed: int) -> DatasetSplit:
    """Deterministically hold out `n` documents for validation."""
    if n > len(docs):
        raise ValueError(f"cannot hold out {n} of {len(docs)} documents")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(docs))
    val_idx = set(int(i) for i in perm[:n])
    validation = [d for i, d in enumerate(docs) if i in val_idx]
    train = [d for i, d in enumerate(docs) if i not in val_idx]
    return DatasetSplit(train=train, validation=validation, seed=seed)


def write_split_manifest(split: DatasetSplit, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# seed: {split.seed}\n")
        fh.write("# split: train\n")
        for d in split.train:
            fh.write(d.id + "\n")
        fh.write("# split: validation\n")
        for d in split.validation:
            fh.write(d.id + "\n")


def read_split_manifest(path):
    """Return (train_ids, validation_ids, seed)."""
    seed = None
    current = None
    ids = {"train": [], "validation": []}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# seed:"):
                seed = int(line.split(":", 1)[1])
            elif line.startswith("# split:"):
                current = line.split(":", 1)[1].strip()
            elif not line.startswith("#"):
                ids[current].append(line)
    return ids["train"], ids["validation"], seed
