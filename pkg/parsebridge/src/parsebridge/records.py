"""Parse-file records: the output format and its structural validator.

One record per sentence; rows are tab-separated
``index form pos head deplabel char_start char_end`` with 1-based token
indices, head 0 marking the sentence root, and character offsets into the
owning document's de-tagged abstract text.  Records are separated by blank
lines, preceded by ``#doc <id>`` and ``#sent <k>`` comment lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Row:
    index: int
    form: str
    pos: str
    head: int
    deplabel: str
    char_start: int
    char_end: int


@dataclass
class SentenceRecord:
    doc_id: str
    sent_index: int
    rows: list[Row] = field(default_factory=list)


def format_records(records) -> str:
    out = []
    last_doc = None
    for rec in records:
        if rec.doc_id != last_doc:
            out.append(f"#doc {rec.doc_id}")
            last_doc = rec.doc_id
        out.append(f"#sent {rec.sent_index}")
        for r in rec.rows:
            out.append(
                f"{r.index}\t{r.form}\t{r.pos}\t{r.head}\t{r.deplabel}"
                f"\t{r.char_start}\t{r.char_end}"
            )
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


def read_records(path) -> list[SentenceRecord]:
    records = []
    doc_id = None
    sent_index = 0
    rows: list[Row] = []

    def flush():
        nonlocal rows
        if rows:
            records.append(SentenceRecord(doc_id or "?", sent_index, rows))
            rows = []

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                flush()
            elif line.startswith("#doc"):
                flush()
                doc_id = line[4:].strip()
            elif line.startswith("#sent"):
                flush()
                sent_index = int(line[5:].strip())
            elif not line.startswith("#"):
                cols = line.split("\t")
                rows.append(
                    Row(
                        index=int(cols[0]), form=cols[1], pos=cols[2],
                        head=int(cols[3]), deplabel=cols[4],
                        char_start=int(cols[5]), char_end=int(cols[6]),
                    )
                )
    flush()
    return records


@dataclass
class ValidationReport:
    n_records: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_records(records) -> ValidationReport:
    """Check every record's structural invariants.

    Each sentence must have exactly one root row (head 0), heads within
    0..n, an acyclic head chain reaching the root from every token, and
    strictly monotone non-overlapping character spans.
    """
    violations = []
    for rec in records:
        where = f"doc {rec.doc_id} sent {rec.sent_index}"
        n = len(rec.rows)
        roots = [r.index for r in rec.rows if r.head == 0]
        if len(roots) != 1:
            violations.append(f"{where}: multiple roots ({len(roots)} head-0 rows)"
                              if len(roots) > 1 else f"{where}: no root row")
        for r in rec.rows:
            if not 0 <= r.head <= n:
                violations.append(f"{where}: token {r.index} head {r.head} outside 0..{n}")
        heads = {r.index: r.head for r in rec.rows}
        for r in rec.rows:
            seen = set()
            node = r.index
            while node != 0:
                if node in seen:
                    violations.append(
                        f"{where}: cycle in head chain starting at token {r.index}"
                    )
                    break
                seen.add(node)
                node = heads.get(node, 0)
        prev_end = None
        for r in rec.rows:
            if r.char_start >= r.char_end:
                violations.append(f"{where}: token {r.index} has empty span")
            if prev_end is not None and r.char_start < prev_end:
                violations.append(
                    f"{where}: token {r.index} span overlaps the previous token"
                )
            prev_end = r.char_end
    return ValidationReport(n_records=len(records), violations=violations)


def validate_parse_file(path) -> ValidationReport:
    return validate_records(read_records(path))
