"""Shared test utilities: random trees, a separable toy corpus, and the
independently written sequential-LSTM oracle used by the equivalence checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from treerel.corpus import AnnotatedDocument, EntitySpan, LABELS, RelationInstance
from treerel.embed import ConcatEmbedder, EmbeddingTable
from treerel.features import FeatureConfig
from treerel.parsefile import ParsedSentenceRecord, TokenRow
from treerel.pipeline import encode_instances, extract_instances, vocab_from_instances
from treerel.tree import build_tree

POS_POOL = ("NOUN", "VERB", "ADJ", "ADV", "DET", "ADP", "PUNCT")
DEP_POOL = ("nsubj", "dobj", "amod", "det", "prep", "pobj", "advmod", "punct")


def make_record(forms, pos, heads, deps, doc_id="D", sent=0):
    """Build a record with offsets from joining forms with single spaces."""
    rows = []
    offset = 0
    for i, form in enumerate(forms):
        if i:
            offset += 1
        rows.append(
            TokenRow(
                index=i + 1,
                form=form,
                pos=pos[i],
                head=heads[i],
                deplabel=deps[i],
                char_start=offset,
                char_end=offset + len(form),
            )
        )
        offset += len(form)
    return ParsedSentenceRecord(doc_id=doc_id, sent_index=sent, tokens=rows)


def random_record(rng, n, doc_id="D", sent=0):
    """Random single-rooted tree: token i attaches to a random earlier token."""
    heads = [0]
    for i in range(1, n):
        heads.append(int(rng.integers(0, i)) + 1)
    forms = [f"w{i}" for i in range(n)]
    pos = [POS_POOL[int(rng.integers(len(POS_POOL)))] for _ in range(n)]
    deps = ["root"] + [DEP_POOL[int(rng.integers(len(DEP_POOL)))] for _ in range(n - 1)]
    # root stays at position 0; shuffle the rest by relabeling token positions
    perm = np.concatenate([[0], 1 + rng.permutation(n - 1)]) if n > 1 else np.array([0])
    inv = np.argsort(perm)
    new_heads = [0] * n
    new_forms = [""] * n
    new_pos = [""] * n
    new_deps = [""] * n
    for old in range(n):
        new = int(inv[old])
        h = heads[old]
        new_heads[new] = 0 if h == 0 else int(inv[h - 1]) + 1
        new_forms[new] = forms[old]
        new_pos[new] = pos[old]
        new_deps[new] = deps[old]
    return make_record(new_forms, new_pos, new_heads, new_deps, doc_id, sent)


def random_tree(rng, n):
    return build_tree(random_record(rng, n))


def chain_record(n, doc_id="D"):
    """Each token headed by the previous one; token 1 is the root."""
    heads = [0] + list(range(1, n))
    forms = [f"c{i}" for i in range(n)]
    pos = ["NOUN"] * n
    deps = ["root"] + ["dep"] * (n - 1)
    return make_record(forms, pos, heads, deps, doc_id)


def brute_force_spanning_set(tree, h1, h2):
    """Oracle: intersect full ancestor chains to find the LCA, join both paths."""

    def chain(node):
        out = [node]
        while tree.nodes[out[-1]].parent != -1:
            out.append(tree.nodes[out[-1]].parent)
        return out

    a1, a2 = chain(h1), chain(h2)
    common = [n for n in a1 if n in set(a2)]
    lca = common[0]
    path1 = a1[: a1.index(lca) + 1]
    path2 = a2[: a2.index(lca) + 1]
    return set(path1) | set(path2), lca


def recursive_height_oracle(tree, node_set, node):
    """Independent recursive height computation over the restricted node set."""
    kids = [c for c in tree.nodes[node].children if c in node_set]
    if not kids:
        return 0
    return 1 + max(recursive_height_oracle(tree, node_set, c) for c in kids)


def full_subtree(tree, h1=None, h2=None):
    """Wrap a whole tree as a SpanningSubtree (any shape, any arity)."""
    from treerel.tree import SpanningSubtree

    node_set = frozenset(range(len(tree.nodes)))
    heights = {}
    for n in sorted(node_set, key=tree.depth, reverse=True):
        kids = tree.nodes[n].children
        heights[n] = 1 + max(heights[c] for c in kids) if kids else 0
    root = tree.root
    return SpanningSubtree(
        tree=tree,
        node_set=node_set,
        root=root,
        heights=heights,
        head1=root if h1 is None else h1,
        head2=root if h2 is None else h2,
    )


def random_model_instance(rng, max_nodes=6, max_hidden=8, max_input=10, shape=None):
    """Random (params, subtree, inputs, gold) for gradient checking.

    `shape` forces a tree shape: "star" (root with all others as children,
    arity >= 3 for max_nodes >= 4), "chain", or None for a random tree.
    """
    from treerel.model import init_params

    n = int(rng.integers(2, max_nodes + 1))
    if shape == "star":
        heads = [0] + [1] * (n - 1)
        record = make_record(
            [f"s{i}" for i in range(n)], ["X"] * n, heads,
            ["root"] + ["dep"] * (n - 1),
        )
    elif shape == "chain":
        record = chain_record(n)
    else:
        record = random_record(rng, n)
    tree = build_tree(record)
    sub = full_subtree(tree)
    hidden = int(rng.integers(2, max_hidden + 1))
    input_size = int(rng.integers(2, max_input + 1))
    params = init_params(input_size, hidden, seed=int(rng.integers(1 << 30)))
    inputs = {i: rng.normal(size=input_size) for i in range(n)}
    gold = int(rng.integers(0, params.n_labels))
    return params, sub, inputs, gold


def finite_difference_max_rel_error(params, sub, inputs, gold, eps=1e-5):
    """Max relative error between analytic gradients and central differences."""
    from treerel.model import loss_and_backward, predict, tree_forward

    def loss_at():
        root_state, _ = tree_forward(params, sub, inputs, train=False)
        return -float(np.log(predict(params, root_state.h)[gold]))

    _, tape = tree_forward(params, sub, inputs, dropout=0.0, train=True)
    _, grads = loss_and_backward(params, tape, gold)
    worst = 0.0
    for name, arr in params.tensors():
        analytic = getattr(grads, name)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            up = loss_at()
            arr[idx] = orig - eps
            down = loss_at()
            arr[idx] = orig
            fd = (up - down) / (2.0 * eps)
            a = analytic[idx]
            rel = abs(a - fd) / max(abs(a), abs(fd), 1e-6)
            worst = max(worst, rel)
    return worst


def sequential_lstm_states(params, xs):
    """Standard sequential LSTM, written from the textbook equations.

    Returns the list of (h, c) running over xs with zero initial state.
    """

    def sig(z):
        return 1.0 / (1.0 + np.exp(-z))

    h = np.zeros(params.hidden_size)
    c = np.zeros(params.hidden_size)
    out = []
    for x in xs:
        i = sig(params.W_i @ x + params.U_i @ h + params.b_i)
        f = sig(params.W_f @ x + params.U_f @ h + params.b_f)
        o = sig(params.W_o @ x + params.U_o @ h + params.b_o)
        u = np.tanh(params.W_u @ x + params.U_u @ h + params.b_u)
        c = i * u + f * c
        h = o * np.tanh(c)
        out.append((h, c))
    return out


VERBS = {
    "USAGE": ("uses", "employs"),
    "MODEL-FEATURE": ("exhibits", "displays"),
    "PART_WHOLE": ("contains", "comprises"),
    "COMPARE": ("rivals", "matches"),
    "RESULT": ("improves", "boosts"),
    "TOPIC": ("concerns", "discusses"),
}

TOY_EMB_DIM = 12


@dataclass
class ToyData:
    train_docs: list
    val_docs: list
    parses: dict
    table: EmbeddingTable


def _toy_sentence(k, label, subj, obj, two_token_subject):
    verb = VERBS[label][k % 2]
    if two_token_subject:
        forms = ["The", "fast", subj, verb, "the", obj, "."]
        pos = ["DET", "ADJ", "NOUN", "VERB", "DET", "NOUN", "PUNCT"]
        heads = [3, 3, 4, 0, 6, 4, 4]
        deps = ["det", "amod", "nsubj", "root", "det", "dobj", "punct"]
        subj_toks = (2, 3)   # 1-based inclusive
    else:
        forms = ["The", subj, verb, "the", obj, "."]
        pos = ["DET", "NOUN", "VERB", "DET", "NOUN", "PUNCT"]
        heads = [2, 3, 0, 5, 3, 3]
        deps = ["det", "nsubj", "root", "det", "dobj", "punct"]
        subj_toks = (2, 2)
    obj_tok = len(forms) - 1  # 1-based index of obj
    return forms, pos, heads, deps, subj_toks, (obj_tok, obj_tok)


def _build_toy_doc(doc_id, k, label, subj, obj):
    forms, pos, heads, deps, subj_toks, obj_toks = _toy_sentence(
        k, label, subj, obj, two_token_subject=k % 2 == 1
    )
    record = make_record(forms, pos, heads, deps, doc_id=doc_id)
    text = " ".join(forms)
    spans = {}
    for eid_suffix, (a, b) in (("1", subj_toks), ("2", obj_toks)):
        start = record.tokens[a - 1].char_start
        end = record.tokens[b - 1].char_end
        spans[eid_suffix] = EntitySpan(
            id=f"{doc_id}.{eid_suffix}", start=start, end=end,
            surface=text[start:end],
        )
    doc = AnnotatedDocument(
        id=doc_id, title="", abstract=text,
        entities=[spans["1"], spans["2"]],
    )
    doc.relations.append(
        RelationInstance(
            doc_id=doc_id, arg1=f"{doc_id}.1", arg2=f"{doc_id}.2", label=label
        )
    )
    return doc, record


def toy_corpus(n_train=20, n_val=12, seed=7) -> ToyData:
    """Separable toy corpus: the root verb's embedding determines the label.

    Validation documents repeat the training patterns with unseen nouns, so
    a model that keys on the verb generalizes perfectly.
    """
    rng = np.random.default_rng(seed)
    vectors = {}

    def noun_vector():
        return rng.normal(0.0, 0.3, TOY_EMB_DIM)

    for idx, label in enumerate(LABELS):
        for verb in VERBS[label]:
            vec = rng.normal(0.0, 0.05, TOY_EMB_DIM)
            vec[idx] += 2.5
            vectors[verb] = vec
    for word in ("The", "the", "fast", "."):
        vectors[word] = noun_vector()

    train_docs, val_docs = [], []
    parses = {}
    for split, count, prefix, docs in (
        ("train", n_train, "T", train_docs),
        ("val", n_val, "V", val_docs),
    ):
        for k in range(count):
            label = LABELS[k % len(LABELS)]
            doc_id = f"{prefix}{k:03d}"
            subj = f"{prefix.lower()}gadget{k}"
            obj = f"{prefix.lower()}widget{k}"
            vectors[subj] = noun_vector()
            vectors[obj] = noun_vector()
            doc, record = _build_toy_doc(doc_id, k, label, subj, obj)
            docs.append(doc)
            parses[doc_id] = [record]
    table = EmbeddingTable(name="toy", dim=TOY_EMB_DIM, vectors=vectors)
    return ToyData(train_docs=train_docs, val_docs=val_docs, parses=parses, table=table)


def encode_toy(data: ToyData, features=FeatureConfig(), emb_seed=0):
    """Extract, build the vocab on train, and encode both splits."""
    embedder = ConcatEmbedder(tables=[data.table], seed=emb_seed)
    train_ex, _ = extract_instances(data.train_docs, data.parses)
    val_ex, _ = extract_instances(data.val_docs, data.parses)
    vocab = vocab_from_instances(train_ex)
    train_set = encode_instances(train_ex, vocab, features, embedder)
    val_set = encode_instances(val_ex, vocab, features, embedder)
    return train_set, val_set, vocab, embedder


def write_vec_file(path, table: EmbeddingTable, header=False):
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"{len(table.vectors)} {table.dim}\n")
        for word, vec in table.vectors.items():
            fh.write(word + " " + " ".join(f"{v:.8f}" for v in vec) + "\n")


def write_toy_files(dirpath, data: ToyData, docs=None):
    """Write the toy corpus in the on-disk formats; returns the path map."""
    from treerel.corpus import documents_to_markup, format_relation_file
    from treerel.parsefile import format_records

    dirpath.mkdir(parents=True, exist_ok=True)
    all_docs = data.train_docs + data.val_docs if docs is None else docs
    paths = {
        "abstracts": dirpath / "abstracts.xml",
        "relations": dirpath / "relations.txt",
        "parses": dirpath / "parses.conllx",
        "vectors": dirpath / "toy.vec",
    }
    paths["abstracts"].write_text(documents_to_markup(all_docs), encoding="utf-8")
    paths["relations"].write_text(
        format_relation_file([r for d in all_docs for r in d.relations]),
        encoding="utf-8",
    )
    records = [rec for d in all_docs for rec in data.parses[d.id]]
    paths["parses"].write_text(format_records(records), encoding="utf-8")
    write_vec_file(paths["vectors"], data.table)
    return paths
