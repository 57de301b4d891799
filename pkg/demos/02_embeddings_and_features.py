"""Concatenated word embeddings and the per-node feature layout.

Two vector tables of different dimensions are concatenated per word; a word
missing from one source gets that segment filled with a tiny deterministic
Gaussian sample.  Node input vectors then append one-hot dependency/POS
blocks, two entity-length slots, and the subtree-local height.
"""

import numpy as np

from treerel.embed import ConcatEmbedder, EmbeddingTable
from treerel.features import FeatureConfig, build_vocab, encode_node
from treerel.parsefile import parse_records
from treerel.tree import build_tree, spanning_subtree

rng = np.random.default_rng(0)

# Two sources, dimensions 6 and 3 (stand-ins for the 300d and 100d tables).
general = EmbeddingTable(
    name="general", dim=6,
    vectors={w: rng.normal(size=6) for w in ("communication", "offer", "oral")},
)
domain = EmbeddingTable(
    name="domain", dim=3,
    vectors={w: rng.normal(size=3) for w in ("communication", "indices")},
)
emb = ConcatEmbedder(tables=[general, domain], seed=42)
print("total dimension:", emb.total_dim)

vec = emb.lookup("communication")          # present in both sources
print("communication ->", np.round(vec, 3))

vec = emb.lookup("offer")                  # missing from the domain source
print("offer tail (filled) ->", vec[6:], "max |fill| =", np.max(np.abs(vec[6:])))

vec = emb.lookup("Oral")                   # falls back to lowercase "oral"
print("Oral uses lowercase vector:", np.allclose(vec[:6], general.vectors["oral"]))

# Same word, same fill, every time: fills are keyed by (seed, source, word).
assert np.array_equal(emb.lookup("never-seen"), emb.lookup("never-seen"))

# Node features on the worked three-node subtree.
PARSE = """\
#doc D1
#sent 0
1\tOral\tADJ\t2\tamod\t0\t4
2\tcommunication\tNOUN\t4\tnsubj\t5\t18
3\tmay\tAUX\t4\taux\t19\t22
4\toffer\tVERB\t0\troot\t23\t28
5\tadditional\tADJ\t6\tamod\t29\t39
6\tindices\tNOUN\t4\tdobj\t40\t47
7\t.\tPUNCT\t4\tpunct\t48\t49
"""
tree = build_tree(parse_records(PARSE)[0])
sub = spanning_subtree(tree, 1, 5)
vocab = build_vocab([sub])
print("\ndependency vocabulary:", vocab.dep_index)
print("POS vocabulary:", vocab.pos_index)

config = FeatureConfig(use_dep=True, use_pos=True, use_entlen=True, use_height=True)
print("input width:", config.input_width(emb.total_dim, vocab))
for node in sorted(sub.node_set):
    ni = encode_node(node, sub, vocab, config, emb, ent_lens=(2, 2))
    tail = ni.vector[emb.total_dim:]
    print(f"  {tree.nodes[node].surface:>14s}  head={ni.is_entity_head!s:>5s}  "
          f"dep+pos+entlen+height tail = {np.round(tail, 1)}")

# Ablation: with every feature off the encoding is exactly the embedding.
bare = encode_node(sub.root, sub, vocab, FeatureConfig(), emb)
assert np.array_equal(bare.vector, emb.lookup("offer"))
print("\nfeatures off -> raw embedding, width", bare.vector.shape[0])
