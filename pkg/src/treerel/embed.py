"""Pretrained word-vector tables and their concatenation.

Multiple sources are concatenated per word; a word missing from a source
gets that source's segment filled with a tiny zero-mean Gaussian sample
(variance 1e-8).  Fill vectors are derived from a keyed hash of
(seed, source, word), so they are identical across runs and independent of
lookup order.  Tables are frozen inputs; nothing here is trained.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

UNKNOWN_KEY = "<unk>"
FILL_SIGMA = 1e-4   # standard deviation; variance 1e-8


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class EmbeddingTable:
    name: str
    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, word):
        return word in self.vectors

    def __len__(self):
        return len(self.vectors)


def load_table(path, name: str | None = None, limit: int | None = None) -> EmbeddingTable:
    """Load a text-format vector table: `word v1 ... vd` lines.

    An optional leading `count dim` header fixes the dimension; otherwise it
    is inferred from the first data row.  Duplicate words keep their first
    occurrence; `limit` truncates after that many data rows.
    """
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    declared = int(parts[1])
                except ValueError:
                    declared = None
                if declared is not None and parts[0].isdigit():
                    dim = declared
                    continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise EmbeddingFormatError(f"line {lineno}: row has no values")
            if len(values) != dim:
                raise EmbeddingFormatError(
                    f"line {lineno}: expected {dim} values, got {len(values)}"
                )
            if word in vectors:
                continue
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise EmbeddingFormatError(
                    f"line {lineno}: non-numeric vector component"
                ) from None
            vectors[word] = vec
            if limit is not None and len(vectors) >= limit:
                break
    if not vectors:
        raise EmbeddingFormatError("embedding file holds no vectors")
    table_name = name if name is not None else str(path)
    return EmbeddingTable(name=table_name, dim=dim, vectors=vectors)


def lowercase_fallback(word: str, case_fallback: bool = True) -> list[str]:
    """Lookup key sequence: exact form, lowercase form, then the unknown key."""
    keys = [word]
    if case_fallback and word.lower() != word:
        keys.append(word.lower())
    keys.append(UNKNOWN_KEY)
    return keys


def _fill_rng(seed: int, source: str, word: str) -> np.random.Generator:
    digest = hashlib.blake2b(
        f"{seed}\x00{source}\x00{word}".encode("utf-8"), digest_size=8
    ).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


@dataclass
class ConcatEmbedder:
    """Serves per-word vectors concatenated from the configured sources."""

    tables: list[EmbeddingTable]
    seed: int = 0
    case_fallback: bool = True
    _fill_cache: dict[tuple[str, str], np.ndarray] = field(
        default_factory=dict, repr=False
    )

    def __post_init__(self):
        if not self.tables:
            raise ValueError("ConcatEmbedder needs at least one table")

    @property
    def total_dim(self) -> int:
        return sum(t.dim for t in self.tables)

    @property
    def source_spec(self) -> list[tuple[str, int]]:
        return [(t.name, t.dim) for t in self.tables]

    def _fill(self, table: EmbeddingTable, word: str) -> np.ndarray:
        key = (table.name, word)
        cached = self._fill_cache.get(key)
        if cached is None:
            rng = _fill_rng(self.seed, table.name, word)
            cached = rng.normal(0.0, FILL_SIGMA, table.dim)
            self._fill_cache[key] = cached
        return cached

    def segment(self, table: EmbeddingTable, word: str) -> np.ndarray:
        for key in lowercase_fallback(word, self.case_fallback):
            vec = table.vectors.get(key)
            if vec is not None:
                return vec
        return self._fill(table, word)

    def lookup(self, word: str) -> np.ndarray:
        """Concatenated vector of length total_dim; OOV segments are filled."""
        return np.concatenate([self.segment(t, word) for t in self.tables])
