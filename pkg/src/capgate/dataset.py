"""Shared domain types: scored populations, weights, capacities and threshold grids.

Everything here is immutable after construction (arrays are marked
read-only), so instances can be shared freely across threads and
processes.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_GRID_STEP = 0.001


class PolicyId(str, Enum):
    """Closed enumeration of the threshold/selection policies shipped here."""

    PROPOSED_FRAMEWORK = "proposed_framework"
    PERFORMANCE_OPTIMAL = "performance_optimal"
    RISK_AVERSE = "risk_averse"
    INCLUSION_ORIENTED = "inclusion_oriented"
    FAIRNESS_AWARE = "fairness_aware"
    DEMOGRAPHIC_PARITY = "demographic_parity"
    EQUALIZED_ODDS = "equalized_odds"
    RANDOM_ALLOCATION = "random_allocation"
    UNCONSTRAINED = "unconstrained"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScoredDataset:
    """Aligned arrays of risk score, binary outcome label and group id.

    scores are predicted risk probabilities in [0, 1]; labels are 0/1
    outcomes; groups are opaque strings (no ordering assumed). All three
    arrays share one length N >= 1.
    """

    scores: np.ndarray
    labels: np.ndarray
    groups: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        groups = np.asarray(self.groups, dtype=object)
        if scores.ndim != 1 or labels.ndim != 1 or groups.ndim != 1:
            raise ValueError("scores, labels and groups must be 1-d arrays")
        if len(scores) == 0:
            raise ValueError("empty dataset")
        if not (len(scores) == len(labels) == len(groups)):
            raise ValueError(
                f"length mismatch: {len(scores)} scores, "
                f"{len(labels)} labels, {len(groups)} groups"
            )
        if np.any(~np.isfinite(scores)) or scores.min() < 0.0 or scores.max() > 1.0:
            raise ValueError("scores must lie in [0, 1]")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "scores", _readonly(scores))
        object.__setattr__(self, "labels", _readonly(labels.astype(np.int64)))
        object.__setattr__(self, "groups", _readonly(groups))

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def n(self) -> int:
        return len(self.scores)

    @property
    def base_rate(self) -> float:
        """Fraction of positive labels."""
        return float(self.labels.mean())

    def group_names(self) -> list[str]:
        """Distinct group ids, sorted for stable iteration."""
        return sorted({str(g) for g in self.groups})

    def group_sizes(self) -> dict[str, int]:
        names, counts = np.unique(self.groups.astype(str), return_counts=True)
        return {str(n): int(c) for n, c in zip(names, counts)}

    def subset(self, indices: np.ndarray) -> "ScoredDataset":
        """Row subset (also used for bootstrap resamples, so repeats are fine)."""
        return ScoredDataset(
            self.scores[indices], self.labels[indices], self.groups[indices]
        )


@dataclass(frozen=True)
class EthicalWeights:
    """Priority vector: alpha weighs FNR (safety), beta weighs FPR
    (efficiency), gamma weighs subgroup TPR disparity (equity)."""

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite nonnegative real, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class Capacity:
    """Maximum allowable intervention fraction, in (0, 1]."""

    c: float

    def __post_init__(self):
        c = float(self.c)
        if not (0.0 < c <= 1.0):
            raise ValueError(f"capacity must be in (0,1], got {c}")
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class ThresholdGrid:
    """Strictly increasing candidate thresholds covering [0, 1] inclusive."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("grid needs at least the endpoints 0 and 1")
        if np.any(np.diff(values) <= 0):
            raise ValueError("grid values must be strictly increasing")
        if values[0] != 0.0 or values[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        object.__setattr__(self, "values", _readonly(values))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ThresholdDecision:
    """Full output of the deployment rule.

    tau_star = max(tau_free, tau_capacity); the constraint is active
    exactly when the capacity threshold exceeds the free optimum.
    critical_capacity is the calibration-set fraction of scores at or
    above tau_free: for capacities at or above it the free optimum is
    deployed unchanged. residual_infeasible is set when even tau = 1
    exceeds capacity (a point mass of scores at exactly 1.0).
    """

    tau_free: float
    tau_capacity: float
    tau_star: float
    constraint_active: bool
    critical_capacity: float
    loss_at_tau_star: float
    residual_infeasible: bool = False

    def __post_init__(self):
        if self.tau_star != max(self.tau_free, self.tau_capacity):
            raise ValueError("tau_star must equal max(tau_free, tau_capacity)")
        if self.constraint_active != (self.tau_capacity > self.tau_free):
            raise ValueError("constraint_active must mirror tau_capacity > tau_free")


def decision_rule(score, tau):
    """Binary decision: 1 iff score >= tau (inclusive comparison).

    Works elementwise on arrays; scalars come back as Python ints.
    """
    flagged = np.asarray(score) >= tau
    if flagged.ndim == 0:
        return int(flagged)
    return flagged.astype(np.int64)


def default_grid(dataset: ScoredDataset, step: float = DEFAULT_GRID_STEP) -> ThresholdGrid:
    """Candidate grid: arithmetic ladder of `step` plus every unique score.

    Including the unique scores makes exhaustive search exact: any loss
    that only changes at score values attains its global minimum on this
    grid. Ladder points are rounded to 12 decimals so decimal scores
    coincide with them bit-exactly.
    """
    if not (0.0 < step <= 1.0):
        raise ValueError(f"step must be in (0,1], got {step}")
    ladder = np.round(np.arange(0.0, 1.0, step), 12)
    values = np.unique(np.concatenate([ladder, [0.0, 1.0], dataset.scores]))
    return ThresholdGrid(values)
