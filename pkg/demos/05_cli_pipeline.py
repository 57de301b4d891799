"""Drive the command-line interface end to end on generated files.

Writes a small corpus in the on-disk formats (abstract markup, relation
lines, parse file, text vectors), then runs `treerel train`, `treerel eval`,
and `treerel ablate` the way a shell user would.
"""

import json
import pathlib
import subprocess
import sys
import tempfile

sys.path.insert(0, str(pathlib.Path(__file__).parent))
demo04 = __import__("04_training_loop")  # reuse the corpus builder above

workdir = pathlib.Path(tempfile.mkdtemp(prefix="treerel-demo-"))
print("working in", workdir)

from treerel.corpus import documents_to_markup, format_relation_file
from treerel.parsefile import format_records

all_docs = demo04.train_docs + demo04.val_docs
(workdir / "abstracts.xml").write_text(documents_to_markup(all_docs))
(workdir / "relations.txt").write_text(
    format_relation_file([r for d in all_docs for r in d.relations])
)
records = [rec for d in all_docs for rec in demo04.parses[d.id]]
(workdir / "parses.conllx").write_text(format_records(records))
with open(workdir / "demo.vec", "w") as fh:
    for word, vec in demo04.table.vectors.items():
        fh.write(word + " " + " ".join(f"{v:.8f}" for v in vec) + "\n")


def run(*args):
    print("\n$", " ".join(args))
    proc = subprocess.run(args, capture_output=True, text=True)
    print(proc.stdout.strip())
    if proc.returncode != 0:
        print(proc.stderr.strip())
        raise SystemExit(proc.returncode)


run(
    "treerel", "train",
    "--data", str(workdir / "abstracts.xml"),
    "--relations", str(workdir / "relations.txt"),
    "--parses", str(workdir / "parses.conllx"),
    "--emb", f"demo:{workdir / 'demo.vec'}",
    "--features", "dep,pos,entlen",
    "--batch", "16", "--dropout", "0.2", "--hidden", "24",
    "--seed", "3", "--lr", "0.01", "--epochs", "30", "--patience", "8",
    "--val-count", "6",
    "--out", str(workdir / "model.ckpt"),
    "--log", str(workdir / "train.jsonl"),
    "--split-manifest", str(workdir / "split.txt"),
)

run(
    "treerel", "eval",
    "--model", str(workdir / "model.ckpt"),
    "--data", str(workdir / "abstracts.xml"),
    "--relations", str(workdir / "relations.txt"),
    "--parses", str(workdir / "parses.conllx"),
    "--emb", f"demo:{workdir / 'demo.vec'}",
    "--report", str(workdir / "report.json"),
    "--confusion", str(workdir / "confusion.csv"),
)

report = json.loads((workdir / "report.json").read_text())
print("\nreport macro block:", report["macro"])
print("confusion csv:")
print((workdir / "confusion.csv").read_text())

# A two-row feature ablation over the same data.
grid = f"""
features = ["none", "dep,pos,entlen"]
sources = ["demo"]

[data]
abstracts = "{workdir / 'abstracts.xml'}"
relations = "{workdir / 'relations.txt'}"
test_abstracts = "{workdir / 'abstracts.xml'}"
test_relations = "{workdir / 'relations.txt'}"
parses = "{workdir / 'parses.conllx'}"
validation_count = 6

[train]
seed = 3
batch = 16
hidden = 24
lr = 0.01
epochs = 15
patience = 15

[[embeddings]]
name = "demo"
path = "{workdir / 'demo.vec'}"
"""
(workdir / "grid.toml").write_text(grid)
run("treerel", "ablate", "--grid", str(workdir / "grid.toml"),
    "--out", str(workdir / "ablation.csv"))
print((workdir / "ablation.csv").read_text())
