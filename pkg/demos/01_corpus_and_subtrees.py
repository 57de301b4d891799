"""Walk through corpus parsing and subtree extraction on a tiny example.

Shows how an annotated abstract is parsed into entities with character
offsets, how the dependency parse aligns to those offsets, and how a
relation instance reduces to the subtree spanning the two entity heads.
"""

from treerel.corpus import parse_abstract_file, parse_relation_file
from treerel.parsefile import parse_records
from treerel.pipeline import extract_instances
from treerel.tree import build_tree, entity_head, spanning_subtree, to_bracket

# One document in the abstract markup: entity tags carry ids, and offsets
# are recorded against the text with the tags stripped.
MARKUP = """\
<doc id="D1">
<title>Indices in speech</title>
<abstract><entity id="D1.1">Oral communication</entity> may offer \
<entity id="D1.2">additional indices</entity> .</abstract>
</doc>
"""

docs = parse_abstract_file(MARKUP)
doc = docs[0]
print("document:", doc.id, "-", doc.title)
print("abstract:", repr(doc.abstract))
for e in doc.entities:
    print(f"  entity {e.id}: chars [{e.start},{e.end}) = {doc.abstract[e.start:e.end]!r}")

# Relations come from a separate file of LABEL(id1,id2) lines.
relations = parse_relation_file("USAGE(D1.1,D1.2)", docs)
print("relation:", relations[0])

# The dependency parse uses tab-separated rows with character offsets that
# refer to the same de-tagged text.
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

records = parse_records(PARSE)
tree = build_tree(records[0])
print("\nsentence tree:", to_bracket(tree))

# Each entity's head is the token whose parent lies outside the span.
h1 = entity_head(tree, range(0, 2))   # Oral communication
h2 = entity_head(tree, range(4, 6))   # additional indices
print("entity heads:", tree.nodes[h1].surface, "/", tree.nodes[h2].surface)

# The classification unit is the union of both paths up to the LCA.
sub = spanning_subtree(tree, h1, h2)
print("spanning subtree:", sorted(tree.nodes[i].surface for i in sub.node_set))
print("subtree root:", tree.nodes[sub.root].surface)
print("heights:", {tree.nodes[i].surface: h for i, h in sorted(sub.heights.items())})

# The pipeline runs the same steps for every relation in a corpus.
extracted, skipped = extract_instances(docs, {"D1": records})
inst = extracted[0]
print("\npipeline instance:", inst.label, inst.arg1, "->", inst.arg2,
      "| entity token lengths:", inst.ent_lens)
