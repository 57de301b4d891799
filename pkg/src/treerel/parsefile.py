"""Reader/writer for sentence-segmented dependency parse files.

The format is CoNLL-like: one token per line with tab-separated columns
``index, form, pos, head, deplabel, char_start, char_end``, a blank line
between sentences, and ``#doc <id>`` / ``#sent <k>`` comment lines marking
document and sentence boundaries.  Token indices are 1-based and head 0
denotes the sentence root.  Character offsets refer to the owning document's
abstract text with markup stripped, so entity character spans can be aligned
without re-tokenizing.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field


class ParseFileError(ValueError):
    """Malformed parse file; message carries the offending line number."""


@dataclass(frozen=True)
class TokenRow:
    index: int          # 1-based position within the sentence
    form: str
    pos: str
    head: int           # 0 = sentence root, otherwise 1-based token index
    deplabel: str
    char_start: int
    char_end: int


@dataclass
class ParsedSentenceRecord:
    doc_id: str
    sent_index: int
    tokens: list[TokenRow] = field(default_factory=list)

    def __len__(self):
        return len(self.tokens)

    @property
    def char_span(self):
        return (self.tokens[0].char_start, self.tokens[-1].char_end)


def _open_text(source):
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_records(source) -> list[ParsedSentenceRecord]:
    """Parse records from a text stream or string. Sentences keep file order."""
    stream = _open_text(source)
    records: list[ParsedSentenceRecord] = []
    doc_id = None
    sent_index = None
    rows: list[TokenRow] = []

    def flush(lineno):
        nonlocal rows, sent_index
        if not rows:
            return
        if doc_id is None:
            raise ParseFileError(f"line {lineno}: token rows before any #doc header")
        idx = sent_index if sent_index is not None else 0
        records.append(ParsedSentenceRecord(doc_id, idx, rows))
        rows = []
        sent_index = None

    lineno = 0
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#doc"):
            flush(lineno)
            doc_id = line[len("#doc"):].strip()
            if not doc_id:
                raise ParseFileError(f"line {lineno}: #doc with empty id")
            continue
        if line.startswith("#sent"):
            flush(lineno)
            try:
                sent_index = int(line[len("#sent"):].strip())
            except ValueError:
                raise ParseFileError(f"line {lineno}: bad #sent index") from None
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 7:
            raise ParseFileError(f"line {lineno}: expected 7 columns, got {len(cols)}")
        try:
            row = TokenRow(
                index=int(cols[0]),
                form=cols[1],
                pos=cols[2],
                head=int(cols[3]),
                deplabel=cols[4],
                char_start=int(cols[5]),
                char_end=int(cols[6]),
            )
        except ValueError:
            raise ParseFileError(f"line {lineno}: non-integer numeric column") from None
        if row.index != len(rows) + 1:
            raise ParseFileError(
                f"line {lineno}: token index {row.index} out of sequence"
            )
        rows.append(row)
    flush(lineno + 1)
    return records


def read_parse_file(path) -> dict[str, list[ParsedSentenceRecord]]:
    """Read a parse file and group records by document id, keeping order."""
    with open(path, encoding="utf-8") as fh:
        records = parse_records(fh)
    by_doc: dict[str, list[ParsedSentenceRecord]] = {}
    for rec in records:
        by_doc.setdefault(rec.doc_id, []).append(rec)
    return by_doc


def format_records(records) -> str:
    """Serialize records to the tab-separated text format."""
    out = []
    last_doc = None
    for rec in records:
        if rec.doc_id != last_doc:
            out.append(f"#doc {rec.doc_id}")
            last_doc = rec.doc_id
        out.append(f"#sent {rec.sent_index}")
        for t in rec.tokens:
            out.append(
                "\t".join(
                    (
                        str(t.index),
                        t.form,
                        t.pos,
                        str(t.head),
                        t.deplabel,
                        str(t.char_start),
                        str(t.char_end),
                    )
                )
            )
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def write_parse_file(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_records(records))
