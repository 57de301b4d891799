"""Dependency-parse preprocessor for annotated abstract files.

Reads the abstract markup, segments and parses each document with an
off-the-shelf parser (spaCy) or a built-in deterministic fallback, and emits
sentence records in a tab-separated format whose character offsets align
with the de-tagged abstract text.
"""

from .abstracts import RawDocument, read_abstracts
from .backends import builtin_parse_document, select_backend
from .cli import parse_documents
from .records import (
    Row,
    SentenceRecord,
    ValidationReport,
    format_records,
    read_records,
    validate_parse_file,
    validate_records,
)

__version__ = "0.1.0"
