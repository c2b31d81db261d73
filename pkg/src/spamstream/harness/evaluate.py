"""Precision / recall / F1 with spam as the positive class."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping

from ..corpus import HAM, SPAM
from ..errors import SchemaError, UndefinedMetricsError


@dataclass(frozen=True)
class EvaluationReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    precision_undefined: bool = False
    recall_undefined: bool = False

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n"] = self.n
        return d


def metrics_from_counts(tp: int, fp: int, fn: int, tn: int = 0) -> EvaluationReport:
    """Undefined ratios (zero denominators) are reported as 0 with a flag set."""
    if min(tp, fp, fn, tn) < 0:
        raise ValueError("confusion counts must be non-negative")
    if tp + fp + fn + tn == 0:
        raise UndefinedMetricsError("no gold-labeled predictions to evaluate")
    p_undef = tp + fp == 0
    r_undef = tp + fn == 0
    p = 0.0 if p_undef else tp / (tp + fp)
    r = 0.0 if r_undef else tp / (tp + fn)
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return EvaluationReport(tp, fp, fn, tn, p, r, f1, p_undef, r_undef)


def evaluate(predictions: Mapping[str, str], gold: Mapping[str, str]) -> EvaluationReport:
    """Score predictions on the tweet ids that carry a gold label."""
    tp = fp = fn = tn = 0
    for tid, g in gold.items():
        if tid not in predictions:
            continue
        p = predictions[tid]
        for name, v in (("prediction", p), ("gold", g)):
            if v not in (SPAM, HAM):
                raise ValueError(f"{name} label for {tid} must be spam or ham, got {v!r}")
        if p == SPAM:
            tp += g == SPAM
            fp += g == HAM
        else:
            fn += g == SPAM
            tn += g == HAM
    return metrics_from_counts(tp, fp, fn, tn)


def labels_from_file(path: str | Path, field: str) -> dict[str, str]:
    """tweet_id -> label from a JSONL file, skipping records without ``field``."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if field in obj and obj[field] is not None:
                if "tweet_id" not in obj:
                    raise SchemaError("tweet_id", line_no=i)
                out[str(obj["tweet_id"])] = obj[field]
    return out


def evaluate_files(pred_path: str | Path, gold_path: str | Path) -> EvaluationReport:
    preds = labels_from_file(pred_path, "label")
    gold = labels_from_file(gold_path, "gold_label")
    return evaluate(preds, gold)


def gold_of(tweets: Iterable) -> dict[str, str]:
    return {t.tweet_id: t.gold_label for t in tweets if t.gold_label is not None}


__all__ = ["EvaluationReport", "evaluate", "evaluate_files", "gold_of", "labels_from_file",
           "metrics_from_counts"]
