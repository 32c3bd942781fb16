"""Classification metrics: confusion counts, P/R/F1, macro-F1, AUROC.

Conventions used everywhere (calibration, runtime, reports): a post is
predicted positive iff p >= tau, and degenerate denominators yield 0
(precision when tp+fp = 0, recall when tp+fn = 0, f1 when p+r = 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from feedguard.errors import DataError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    macro_f1: float
    auroc: float
    tau: float
    confusion: ConfusionMatrix

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy, "precision": self.precision,
            "recall": self.recall, "f1": self.f1, "macro_f1": self.macro_f1,
            "auroc": self.auroc, "tau": self.tau,
            "confusion": {"tp": self.confusion.tp, "fp": self.confusion.fp,
                          "tn": self.confusion.tn, "fn": self.confusion.fn},
        }


def _check_inputs(probs, labels):
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.shape != labels.shape or probs.ndim != 1:
        raise DataError(f"probs/labels shape mismatch: {probs.shape} vs {labels.shape}")
    if probs.size < 1:
        raise DataError("need at least one example")
    if not np.isin(labels, (0, 1)).all():
        raise DataError("labels must be 0 or 1")
    return probs, labels.astype(np.int64)


def confusion(probs, labels, tau: float) -> ConfusionMatrix:
    """Counts with the boundary rule p == tau -> predicted positive."""
    probs, labels = _check_inputs(probs, labels)
    pred = probs >= tau
    pos = labels == 1
    return ConfusionMatrix(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    return (cm.tp + cm.tn) / cm.total


def precision(cm: ConfusionMatrix) -> float:
    return cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0


def recall(cm: ConfusionMatrix) -> float:
    return cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0


def f1(cm: ConfusionMatrix) -> float:
    p, r = precision(cm), recall(cm)
    return 2.0 * p * r / (p + r) if p + r else 0.0


def macro_f1(probs, labels, tau: float) -> float:
    """Unweighted mean of class-1 F1 and class-0 F1 (positive class swapped).

    The class-0 side counts a prediction as positive iff p < tau, mirroring
    the boundary rule.
    """
    cm1 = confusion(probs, labels, tau)
    cm0 = ConfusionMatrix(tp=cm1.tn, fp=cm1.fn, tn=cm1.tp, fn=cm1.fp)
    return 0.5 * (f1(cm1) + f1(cm0))


def auroc(probs, labels) -> float:
    """Mann-Whitney statistic with midrank tie handling, O(n log n).

    Equals (#(pos, neg) pairs with p_pos > p_neg + 0.5 * ties) / (n1 * n0).
    """
    probs, labels = _check_inputs(probs, labels)
    n1 = int(labels.sum())
    n0 = labels.size - n1
    if n1 == 0 or n0 == 0:
        raise DataError("AUROC needs both classes present")
    order = np.argsort(probs, kind="stable")
    sorted_probs = probs[order]
    ranks = np.empty(probs.size, dtype=np.float64)
    i = 0
    while i < probs.size:
        j = i
        while j + 1 < probs.size and sorted_probs[j + 1] == sorted_probs[i]:
            j += 1
        # 1-based midrank for the tie group [i, j]
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum_pos = ranks[labels == 1].sum()
    u = rank_sum_pos - n1 * (n1 + 1) / 2.0
    return u / (n1 * n0)


def full_report(probs, labels, tau: float) -> MetricsReport:
    cm = confusion(probs, labels, tau)
    return MetricsReport(
        accuracy=accuracy(cm), precision=precision(cm), recall=recall(cm),
        f1=f1(cm), macro_f1=macro_f1(probs, labels, tau),
        auroc=auroc(probs, labels), tau=tau, confusion=cm,
    )
