import pathlib

import pytest

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture()
def fixture_corpus():
    """Documents, relations, and parses from the static fixture files."""
    from treerel.corpus import load_abstract_file, load_relation_file
    from treerel.parsefile import read_parse_file

    docs = load_abstract_file(DATA_DIR / "abstracts.xml")
    relations = load_relation_file(DATA_DIR / "relations.txt", docs)
    parses = read_parse_file(DATA_DIR / "parses.conllx")
    return docs, relations, parses
