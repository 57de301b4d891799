"""Per-label and macro precision/recall/F1 plus the confusion matrix.

Labels are scored in the fixed canonical order.  Degenerate ratios follow
the 0/0 -> 0 convention, and macro averages run over all six labels even
when one is absent from the data (an exclusion flag drops labels with no
gold and no predicted instances, for comparison against scorers that skip
them).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import LABELS, LABEL_INDEX


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def confusion(gold, predicted) -> np.ndarray:
    """6x6 count matrix; rows are true labels, columns predicted labels."""
    if len(gold) != len(predicted):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    matrix = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    for g, p in zip(gold, predicted):
        if g not in LABEL_INDEX:
            raise ValueError(f"unknown gold label {g!r}")
        if p not in LABEL_INDEX:
            raise ValueError(f"unknown predicted label {p!r}")
        matrix[LABEL_INDEX[g], LABEL_INDEX[p]] += 1
    return matrix


@dataclass
class EvalReport:
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    matrix: np.ndarray
    n_instances: int
    n_skipped: int = 0
    skip_policy: str = "count-as-error"
    labels: tuple[str, ...] = LABELS

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "per_label": {
                lab: {
                    "precision": self.precision[lab],
                    "recall": self.recall[lab],
                    "f1": self.f1[lab],
                }
                for lab in self.labels
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "confusion": self.matrix.tolist(),
            "n_instances": self.n_instances,
            "n_skipped": self.n_skipped,
            "skip_policy": self.skip_policy,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        labels = tuple(data["labels"])
        per = data["per_label"]
        return cls(
            precision={lab: per[lab]["precision"] for lab in labels},
            recall={lab: per[lab]["recall"] for lab in labels},
            f1={lab: per[lab]["f1"] for lab in labels},
            macro_precision=data["macro"]["precision"],
            macro_recall=data["macro"]["recall"],
            macro_f1=data["macro"]["f1"],
            matrix=np.array(data["confusion"], dtype=np.int64),
            n_instances=data["n_instances"],
            n_skipped=data.get("n_skipped", 0),
            skip_policy=data.get("skip_policy", "count-as-error"),
            labels=labels,
        )

    @classmethod
    def from_json(cls, blob: str) -> "EvalReport":
        return cls.from_dict(json.loads(blob))


def score(
    gold,
    predicted,
    skipped_gold=(),
    exclude_absent: bool = False,
) -> EvalReport:
    """Score aligned gold/predicted label sequences.

    `skipped_gold` lists the gold labels of instances that produced no
    prediction; they count as misses (false negatives) for their label.
    With `exclude_absent`, labels having no gold and no predicted instances
    are dropped from the macro averages instead of contributing zeros.
    """
    matrix = confusion(gold, predicted)
    tp = np.diag(matrix).astype(np.float64)
    fp = matrix.sum(axis=0) - np.diag(matrix)
    fn = matrix.sum(axis=1) - np.diag(matrix)
    extra_fn = np.zeros(len(LABELS))
    for g in skipped_gold:
        if g not in LABEL_INDEX:
            raise ValueError(f"unknown skipped gold label {g!r}")
        extra_fn[LABEL_INDEX[g]] += 1
    fn = fn + extra_fn

    precision, recall, f1 = {}, {}, {}
    for idx, lab in enumerate(LABELS):
        p = _ratio(tp[idx], tp[idx] + fp[idx])
        r = _ratio(tp[idx], tp[idx] + fn[idx])
        precision[lab] = p
        recall[lab] = r
        f1[lab] = _ratio(2.0 * p * r, p + r)

    if exclude_absent:
        present = [
            lab
            for idx, lab in enumerate(LABELS)
            if matrix[idx].sum() + matrix[:, idx].sum() + extra_fn[idx] > 0
        ]
    else:
        present = list(LABELS)
    if not present:
        macro_p = macro_r = macro_f = 0.0
    else:
        macro_p = float(np.mean([precision[lab] for lab in present]))
        macro_r = float(np.mean([recall[lab] for lab in present]))
        macro_f = float(np.mean([f1[lab] for lab in present]))

    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f,
        matrix=matrix,
        n_instances=len(gold) + len(tuple(skipped_gold)),
        n_skipped=len(tuple(skipped_gold)),
    )


def score_matrix(matrix: np.ndarray) -> EvalReport:
    """Score directly from a confusion matrix (counts as gold/pred pairs)."""
    gold, pred = [], []
    for gi, row in enumerate(matrix):
        for pi, count in enumerate(row):
            gold.extend([LABELS[gi]] * int(count))
            pred.extend([LABELS[pi]] * int(count))
    return score(gold, pred)


def format_confusion_csv(matrix: np.ndarray) -> str:
    """Header row of predicted labels, one row per true label."""
    from .corpus import LABEL_ABBREV

    lines = ["label," + ",".join(LABEL_ABBREV)]
    for idx, abbrev in enumerate(LABEL_ABBREV):
        lines.append(abbrev + "," + ",".join(str(int(v)) for v in matrix[idx]))
    return "\n".join(lines) + "\n"
