"""Confusion rates, subgroup disparity and the weighted composite loss.

Degenerate-denominator convention (kept deliberately so bootstrap
resamples with one-class slices stay finite): FNR is 0 when a dataset
has no positives, FPR is 0 when it has no negatives, and a group's TPR
is undefined (the group is excluded from the disparity) when the group
has no positives.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import EthicalWeights, ScoredDataset


@dataclass(frozen=True)
class ConfusionRates:
    tp: int
    fp: int
    fn: int
    tn: int
    fnr: float
    fpr: float
    recall: float
    intervention_rate: float


@dataclass(frozen=True)
class DisparityReport:
    """Max absolute pairwise TPR gap over groups that have positives."""

    per_group_tpr: dict
    delta: float
    groups_excluded: tuple


def _rates_from_counts(tp: int, fp: int, fn: int, tn: int) -> ConfusionRates:
    positives = tp + fn
    negatives = fp + tn
    fnr = fn / positives if positives else 0.0
    fpr = fp / negatives if negatives else 0.0
    return ConfusionRates(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        fnr=fnr,
        fpr=fpr,
        recall=1.0 - fnr,
        intervention_rate=(tp + fp) / (tp + fp + fn + tn),
    )


def confusion_from_mask(dataset: ScoredDataset, flagged: np.ndarray) -> ConfusionRates:
    """Confusion rates for an explicit selection mask (randomized policies)."""
    flagged = np.asarray(flagged, dtype=bool)
    if flagged.shape != dataset.labels.shape:
        raise ValueError("mask length must match dataset length")
    positive = dataset.labels == 1
    tp = int(np.count_nonzero(flagged & positive))
    fp = int(np.count_nonzero(flagged & ~positive))
    fn = int(np.count_nonzero(~flagged & positive))
    tn = int(np.count_nonzero(~flagged & ~positive))
    return _rates_from_counts(tp, fp, fn, tn)


def confusion(dataset: ScoredDataset, tau: float) -> ConfusionRates:
    """Confusion rates induced by the inclusive rule score >= tau."""
    _check_tau(tau)
    return confusion_from_mask(dataset, dataset.scores >= tau)


def disparity_from_mask(dataset: ScoredDataset, flagged: np.ndarray) -> DisparityReport:
    """Per-group TPR and max pairwise gap for an explicit selection mask."""
    flagged = np.asarray(flagged, dtype=bool)
    positive = dataset.labels == 1
    per_group = {}
    excluded = []
    for name in dataset.group_names():
        in_group = dataset.groups.astype(str) == name
        group_positives = in_group & positive
        n_pos = int(np.count_nonzero(group_positives))
        if n_pos == 0:
            excluded.append(name)
            continue
        per_group[name] = float(
            np.count_nonzero(flagged & group_positives) / n_pos
        )
    if len(per_group) >= 2:
        tprs = list(per_group.values())
        delta = max(tprs) - min(tprs)
    else:
        delta = 0.0
    return DisparityReport(
        per_group_tpr=per_group, delta=delta, groups_excluded=tuple(excluded)
    )


def disparity(dataset: ScoredDataset, tau: float) -> DisparityReport:
    """Subgroup TPR disparity at threshold tau."""
    _check_tau(tau)
    return disparity_from_mask(dataset, dataset.scores >= tau)


def ethical_loss(
    dataset: ScoredDataset, tau: float, weights: EthicalWeights
) -> float:
    """alpha * FNR(tau) + beta * FPR(tau) + gamma * disparity(tau)."""
    rates = confusion(dataset, tau)
    delta = disparity(dataset, tau).delta
    return weights.alpha * rates.fnr + weights.beta * rates.fpr + weights.gamma * delta


def _check_tau(tau: float) -> None:
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"tau must be in [0,1], got {tau}")
