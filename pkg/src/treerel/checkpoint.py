"""Self-describing model checkpoint files.

Layout: a magic line, one JSON header line (sorted keys, no whitespace), and
the raw little-endian float64 tensor bytes concatenated in the header's
manifest order.  Serialization is fully deterministic, so identical models
produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureConfig, FeatureVocab
from .model import TENSOR_NAMES, TreeLstmParams

MAGIC = b"#treerel-checkpoint v1\n"


class CheckpointError(ValueError):
    pass


@dataclass
class Checkpoint:
    """Everything needed to rebuild the trained classifier for inference."""

    params: TreeLstmParams
    feature_config: FeatureConfig
    vocab: FeatureVocab
    emb_sources: list[tuple[str, int]]   # (source name, dimension), in order
    emb_seed: int
    case_fallback: bool
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def total_emb_dim(self) -> int:
        return sum(dim for _, dim in self.emb_sources)


def save_checkpoint(ckpt: Checkpoint, path):
    params = ckpt.params
    params.check_shapes()
    manifest = [
        {"name": name, "shape": list(arr.shape)} for name, arr in params.tensors()
    ]
    header = {
        "version": 1,
        "input_size": params.input_size,
        "hidden_size": params.hidden_size,
        "n_labels": params.n_labels,
        "feature_config": ckpt.feature_config.as_dict(),
        "dep_vocab": ckpt.vocab.dep_index,
        "pos_vocab": ckpt.vocab.pos_index,
        "emb_sources": [[name, dim] for name, dim in ckpt.emb_sources],
        "emb_seed": ckpt.emb_seed,
        "case_fallback": ckpt.case_fallback,
        "seed": ckpt.seed,
        "extra": ckpt.extra,
        "tensors": manifest,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"))
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(blob.encode("utf-8"))
        fh.write(b"\n")
        for _, arr in params.tensors():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        magic = fh.readline()
        if magic != MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint file")
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("version") != 1:
            raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")
        tensors = {}
        for entry in header["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 8)
            if len(raw) != count * 8:
                raise CheckpointError(f"truncated tensor data for {entry['name']}")
            tensors[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
        trailing = fh.read(1)
        if trailing:
            raise CheckpointError("trailing bytes after tensor data")
    missing = [name for name in TENSOR_NAMES if name not in tensors]
    if missing:
        raise CheckpointError(f"checkpoint missing tensors: {missing}")
    params = TreeLstmParams(
        input_size=header["input_size"],
        hidden_size=header["hidden_size"],
        n_labels=header["n_labels"],
        **{name: tensors[name] for name in TENSOR_NAMES},
    )
    params.check_shapes()
    fc = header["feature_config"]
    vocab = FeatureVocab(
        dep_index={k: int(v) for k, v in header["dep_vocab"].items()},
        pos_index={k: int(v) for k, v in header["pos_vocab"].items()},
    )
    vocab.freeze()
    return Checkpoint(
        params=params,
        feature_config=FeatureConfig(**fc),
        vocab=vocab,
        emb_sources=[(name, int(dim)) for name, dim in header["emb_sources"]],
        emb_seed=int(header["emb_seed"]),
        case_fallback=bool(header["case_fallback"]),
        seed=int(header["seed"]),
        extra=header.get("extra", {}),
    )
