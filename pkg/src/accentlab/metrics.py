"""Classification and detection metrics.

accuracy / macro-F1 / confusion matrix for the classifiers; EER and minDCF
for verification-style score sets. Detection metrics normalize score
orientation (higher-is-target vs lower-is-target) so both are invariant
under any strictly monotonic transformation of the scores.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import LabelError, MetricError


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # (N, N) ints, rows = true class, cols = predicted
    class_names: tuple

    def normalized(self) -> np.ndarray:
        """Row-stochastic counts; all-zero rows stay zero."""
        c = self.counts.astype(np.float64)
        sums = c.sum(axis=1, keepdims=True)
        return np.divide(c, sums, out=np.zeros_like(c), where=sums > 0)

    def to_csv(self, path, normalized: bool = False) -> None:
        data = self.normalized() if normalized else self.counts
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["true\\pred", *self.class_names])
            for name, row in zip(self.class_names, data):
                if normalized:
                    writer.writerow([name, *(f"{v:.6f}" for v in row)])
                else:
                    writer.writerow([name, *(int(v) for v in row)])


def classification_report(true, pred, n_classes: int, class_names=None):
    """Return (ConfusionMatrix, accuracy, macro F1)."""
    true = np.asarray(true, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if true.shape != pred.shape or true.ndim != 1 or true.size < 1:
        raise LabelError(f"need equal-length 1-D label lists, got {true.shape} vs {pred.shape}")
    for arr, which in ((true, "true"), (pred, "pred")):
        if arr.min() < 0 or arr.max() >= n_classes:
            raise LabelError(f"{which} labels outside [0, {n_classes})")
    if class_names is None:
        class_names = tuple(str(i) for i in range(n_classes))

    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (true, pred), 1)
    accuracy = float(np.trace(counts)) / float(true.size)

    f1s = []
    for k in range(n_classes):
        tp = counts[k, k]
        col = counts[:, k].sum()
        row = counts[k, :].sum()
        precision = tp / col if col > 0 else 0.0
        recall = tp / row if row > 0 else 0.0
        f1s.append(2.0 * precision * recall / (precision + recall)
                   if precision + recall > 0 else 0.0)
    macro_f1 = float(np.mean(f1s))
    return ConfusionMatrix(counts, tuple(class_names)), accuracy, macro_f1


def _check_score_set(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise MetricError("scores and labels must be equal-length 1-D arrays")
    if not np.isin(labels, (0, 1)).all():
        raise MetricError("labels must be binary (1 = target trial)")
    if labels.min() == labels.max():
        raise MetricError("need at least one target and one non-target trial")
    return scores, labels


def _operating_points(scores, labels):
    """FAR/FRR at each candidate threshold (accept iff score >= threshold).

    Thresholds are the sorted unique scores plus one value beyond the max
    (the reject-all point). FAR is non-increasing, FRR non-decreasing.
    """
    thresholds = np.unique(scores)
    thresholds = np.append(thresholds, thresholds[-1] + 1.0)
    target = scores[labels == 1]
    nontarget = scores[labels == 0]
    far = (nontarget[None, :] >= thresholds[:, None]).sum(axis=1) / nontarget.size
    frr = (target[None, :] < thresholds[:, None]).sum(axis=1) / target.size
    return far, frr


def _eer_from_points(far, frr) -> float:
    d = far - frr  # non-increasing, starts at 1, ends at -1
    i = int(np.argmax(d <= 0))
    if d[i] == 0:
        return float(far[i])
    t = d[i - 1] / (d[i - 1] - d[i])
    return float(frr[i - 1] + t * (frr[i] - frr[i - 1]))


def eer(scores, labels) -> float:
    """Equal error rate with linear interpolation at the FAR/FRR crossing.

    If the scores point the wrong way (EER above 0.5) they are negated, so
    the result always lies in [0, 0.5].
    """
    scores, labels = _check_score_set(scores, labels)
    rate = _eer_from_points(*_operating_points(scores, labels))
    if rate > 0.5:
        rate = _eer_from_points(*_operating_points(-scores, labels))
    return rate


def min_dcf(scores, labels, p_target: float) -> float:
    """Minimum normalized detection cost, C_miss = C_fa = 1.

    Minimizes P_miss*p_target + P_fa*(1-p_target) over all thresholds and
    both score orientations, normalized by min(p_target, 1-p_target).
    """
    if not 0.0 < p_target < 1.0:
        raise MetricError(f"p_target {p_target} outside (0, 1)")
    scores, labels = _check_score_set(scores, labels)
    best = None
    for oriented in (scores, -scores):
        far, frr = _operating_points(oriented, labels)
        dcf = frr * p_target + far * (1.0 - p_target)
        lowest = float(dcf.min())
        if best is None or lowest < best:
            best = lowest
    return best / min(p_target, 1.0 - p_target)
