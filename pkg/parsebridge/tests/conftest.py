import pytest

NOUNS = [
    "parser", "translation quality", "language model", "beam search",
    "tree structure", "feature set", "training corpus", "evaluation metric",
    "statistical model", "neural network", "word alignment", "tagging scheme",
    "segmentation", "classification accuracy", "annotation process",
    "speech recognition", "grammar formalism", "lexical resource",
    "machine translation", "information extraction",
]
SUBJECT_ADJS = ["statistical", "formal", "novel", "robust", "general"]
VERBS = ["improves", "uses", "contains", "covers", "outperforms", "describes"]
TAILS = [
    "in several experiments",
    "for scientific abstracts",
    "across languages",
    "with high accuracy",
    "during training",
]


def build_fixture_markup(n_docs=20):
    """Markup for n docs; entity offsets come from tag insertion, so the
    de-tagged text and entity surfaces line up by construction."""
    docs = []
    for k in range(n_docs):
        subj = NOUNS[k % len(NOUNS)]
        obj = NOUNS[(k + 7) % len(NOUNS)]
        adj = SUBJECT_ADJS[k % len(SUBJECT_ADJS)]
        verb = VERBS[k % len(VERBS)]
        tail = TAILS[k % len(TAILS)]
        did = f"P{k:03d}"
        sents = [
            f'The {adj} <entity id="{did}.1">{subj}</entity> {verb} the '
            f'<entity id="{did}.2">{obj}</entity> {tail} .',
            f'We evaluate the <entity id="{did}.3">{NOUNS[(k + 3) % len(NOUNS)]}'
            f"</entity> on annotated data .",
        ]
        if k % 3 == 0:
            sents.append("Results improve .")
        if k % 5 == 0:
            sents.append("Conclusions")
        body = " ".join(sents)
        docs.append(
            f'<doc id="{did}">\n<title>Fixture {k}</title>\n'
            f"<abstract>{body}</abstract>\n</doc>\n"
        )
    return "".join(docs)


@pytest.fixture(scope="session")
def fixture_abstracts(tmp_path_factory):
    path = tmp_path_factory.mktemp("fixture") / "abstracts.xml"
    path.write_text(build_fixture_markup(20), encoding="utf-8")
    return path
