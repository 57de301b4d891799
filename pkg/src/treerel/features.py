"""Per-node input vectors: embedding plus optional syntactic features.

Each subtree node's input is the word embedding, optionally extended with a
one-hot dependency label, a one-hot POS tag, two entity-length slots, and a
height scalar.  The dependency/POS vocabularies are closed over the training
data with a reserved unknown slot at index 0; unseen labels at test time map
there.  Entity-length slots are nonzero only on the entity-head nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embed import ConcatEmbedder
from .tree import SpanningSubtree

UNKNOWN_SLOT = 0
UNKNOWN_LABEL = "<unk>"


class VocabFrozenError(RuntimeError):
    pass


@dataclass
class FeatureVocab:
    """Dense index maps for dependency labels and POS tags."""

    dep_index: dict[str, int] = field(
        default_factory=lambda: {UNKNOWN_LABEL: UNKNOWN_SLOT}
    )
    pos_index: dict[str, int] = field(
        default_factory=lambda: {UNKNOWN_LABEL: UNKNOWN_SLOT}
    )
    frozen: bool = False

    @property
    def n_dep(self) -> int:
        return len(self.dep_index)

    @property
    def n_pos(self) -> int:
        return len(self.pos_index)

    def observe(self, deplabel: str, pos: str):
        """Assign indices in first-seen order; rejected once frozen."""
        if self.frozen:
            raise VocabFrozenError("feature vocabulary is frozen")
        if deplabel not in self.dep_index:
            self.dep_index[deplabel] = len(self.dep_index)
        if pos not in self.pos_index:
            self.pos_index[pos] = len(self.pos_index)

    def freeze(self):
        if self.frozen:
            raise VocabFrozenError("feature vocabulary already frozen")
        self.frozen = True

    def dep(self, label: str) -> int:
        return self.dep_index.get(label, UNKNOWN_SLOT)

    def pos(self, tag: str) -> int:
        return self.pos_index.get(tag, UNKNOWN_SLOT)


def build_vocab(subtrees) -> FeatureVocab:
    """Build a frozen vocabulary from the training subtrees' node labels."""
    vocab = FeatureVocab()
    for sub in subtrees:
        for node in sorted(sub.node_set):
            n = sub.tree.nodes[node]
            vocab.observe(n.deplabel, n.pos)
    vocab.freeze()
    return vocab


@dataclass(frozen=True)
class FeatureConfig:
    use_dep: bool = False
    use_pos: bool = False
    use_entlen: bool = False
    use_height: bool = False

    def input_width(self, emb_dim: int, vocab: FeatureVocab) -> int:
        return (
            emb_dim
            + (vocab.n_dep if self.use_dep else 0)
            + (vocab.n_pos if self.use_pos else 0)
            + (2 if self.use_entlen else 0)
            + (1 if self.use_height else 0)
        )

    def names(self) -> str:
        parts = [
            name
            for flag, name in (
                (self.use_dep, "dep"),
                (self.use_pos, "pos"),
                (self.use_entlen, "entlen"),
                (self.use_height, "height"),
            )
            if flag
        ]
        return ",".join(parts) if parts else "none"

    @classmethod
    def from_names(cls, spec: str) -> "FeatureConfig":
        spec = spec.strip().lower()
        if spec in ("", "none"):
            return cls()
        known = {"dep", "pos", "entlen", "height"}
        parts = [p.strip() for p in spec.split(",") if p.strip()]
        bad = [p for p in parts if p not in known]
        if bad:
            raise ValueError(f"unknown feature name(s): {', '.join(bad)}")
        return cls(
            use_dep="dep" in parts,
            use_pos="pos" in parts,
            use_entlen="entlen" in parts,
            use_height="height" in parts,
        )

    def as_dict(self) -> dict:
        return {
            "use_dep": self.use_dep,
            "use_pos": self.use_pos,
            "use_entlen": self.use_entlen,
            "use_height": self.use_height,
        }


@dataclass
class NodeInput:
    vector: np.ndarray
    node: int
    is_entity_head: bool


def encode_node(
    node: int,
    sub: SpanningSubtree,
    vocab: FeatureVocab,
    config: FeatureConfig,
    emb: ConcatEmbedder,
    ent_lens: tuple[int, int] = (0, 0),
) -> NodeInput:
    """Encode one subtree node under the feature mask.

    Entity-length slots carry (|e1|, 0) on the first entity's head, (0, |e2|)
    on the second's, both values when the heads coincide, and (0, 0) on every
    other node.
    """
    if not vocab.frozen:
        raise VocabFrozenError("encode_node requires a frozen vocabulary")
    info = sub.tree.nodes[node]
    parts = [emb.lookup(info.surface)]
    if config.use_dep:
        one_hot = np.zeros(vocab.n_dep)
        one_hot[vocab.dep(info.deplabel)] = 1.0
        parts.append(one_hot)
    if config.use_pos:
        one_hot = np.zeros(vocab.n_pos)
        one_hot[vocab.pos(info.pos)] = 1.0
        parts.append(one_hot)
    is_head = node == sub.head1 or node == sub.head2
    if config.use_entlen:
        slots = np.zeros(2)
        if node == sub.head1:
            slots[0] = float(ent_lens[0])
        if node == sub.head2:
            slots[1] = float(ent_lens[1])
        parts.append(slots)
    if config.use_height:
        parts.append(np.array([float(sub.heights[node])]))
    vector = np.concatenate(parts)
    expected = config.input_width(emb.total_dim, vocab)
    if vector.shape[0] != expected:
        raise AssertionError(
            f"encoded width {vector.shape[0]} != configured width {expected}"
        )
    return NodeInput(vector=vector, node=node, is_entity_head=is_head)


def encode_subtree(
    sub: SpanningSubtree,
    vocab: FeatureVocab,
    config: FeatureConfig,
    emb: ConcatEmbedder,
    ent_lens: tuple[int, int] = (0, 0),
) -> dict[int, NodeInput]:
    return {
        node: encode_node(node, sub, vocab, config, emb, ent_lens)
        for node in sorted(sub.node_set)
    }
