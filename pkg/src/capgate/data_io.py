"""Data ingress: CSV round-trip, stratified splitting and synthetic cohorts.

CSV rows are validated eagerly with row numbers in error messages (row 1
is the first data row). The synthetic generator draws per-group Beta
scores and Bernoulli(score) labels, so generated scores are calibrated
by construction.
"""

import csv
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import ScoredDataset

REQUIRED_COLUMNS = ("score", "label", "group")
DEFAULT_SPLIT_FRACTIONS = (0.5, 0.2, 0.3)


def load_csv(path) -> ScoredDataset:
    """Read a score,label,group CSV into a dataset.

    Extra columns are ignored with a warning. Raises ValueError with a
    "schema error", "range error" or "label error" prefix; row numbers
    count data rows from 1.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise ValueError("schema error: file is empty")
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"schema error: missing column(s) {', '.join(missing)}")
        extra = [c for c in header if c not in REQUIRED_COLUMNS]
        if extra:
            warnings.warn(f"ignoring extra column(s): {', '.join(extra)}")
        scores, labels, groups = [], [], []
        for row_number, row in enumerate(reader, start=1):
            raw_score = row["score"]
            try:
                score = float(raw_score)
            except (TypeError, ValueError):
                raise ValueError(
                    f"range error: row {row_number}: score {raw_score!r} is not a number"
                ) from None
            if not np.isfinite(score) or not 0.0 <= score <= 1.0:
                raise ValueError(
                    f"range error: row {row_number}: score {raw_score} outside [0, 1]"
                )
            raw_label = row["label"]
            if raw_label not in ("0", "1"):
                raise ValueError(
                    f"label error: row {row_number}: label {raw_label!r} is not 0 or 1"
                )
            scores.append(score)
            labels.append(int(raw_label))
            groups.append(row["group"])
    if not scores:
        raise ValueError("schema error: no data rows")
    return ScoredDataset(np.array(scores), np.array(labels), np.array(groups, dtype=object))


def save_csv(dataset: ScoredDataset, path) -> None:
    """Write score,label,group rows; scores use shortest exact repr."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REQUIRED_COLUMNS)
        for score, label, group in zip(dataset.scores, dataset.labels, dataset.groups):
            writer.writerow([repr(float(score)), int(label), group])


@dataclass(frozen=True)
class SplitDataset:
    """Train/validation/test slices plus the parameters that produced them."""

    train: Optional[ScoredDataset]
    validation: ScoredDataset
    test: ScoredDataset
    fractions: tuple = DEFAULT_SPLIT_FRACTIONS
    seed: int = 42


def stratified_split(
    dataset: ScoredDataset,
    fractions=DEFAULT_SPLIT_FRACTIONS,
    seed: int = 42,
) -> SplitDataset:
    """Split preserving joint (label, group) composition in every slice.

    Within each stratum rows are shuffled, then apportioned by largest
    remainder so slice sizes are exact up to integer rounding. Strata
    with a single row go to train with a warning.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3:
        raise ValueError("fractions must have three entries")
    if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("fractions must be non-negative and sum to 1")
    rng = np.random.default_rng(seed)
    strata = {}
    for i in range(len(dataset)):
        key = (int(dataset.labels[i]), str(dataset.groups[i]))
        strata.setdefault(key, []).append(i)
    slices = ([], [], [])
    for key in sorted(strata):
        idx = np.array(strata[key])
        if len(idx) == 1:
            warnings.warn(f"stratum {key} has a single row; assigning it to train")
            slices[0].extend(idx)
            continue
        idx = rng.permutation(idx)
        counts = _largest_remainder(len(idx), fractions)
        bounds = np.cumsum(counts)
        slices[0].extend(idx[: bounds[0]])
        slices[1].extend(idx[bounds[0] : bounds[1]])
        slices[2].extend(idx[bounds[1] :])
    parts = []
    for part in slices:
        if not part:
            raise ValueError("a split slice is empty; need more rows or larger fractions")
        parts.append(dataset.subset(np.sort(np.array(part))))
    return SplitDataset(parts[0], parts[1], parts[2], fractions, seed)


def _largest_remainder(n: int, fractions) -> np.ndarray:
    exact = np.array(fractions) * n
    base = np.floor(exact).astype(int)
    shortfall = n - base.sum()
    # ties broken by slice position, so allocation is deterministic
    order = np.argsort(-(exact - base), kind="stable")
    base[order[:shortfall]] += 1
    return base


@dataclass(frozen=True)
class GroupSpec:
    """Beta(shape_a, shape_b) score distribution for one group."""

    name: str
    size: int
    shape_a: float
    shape_b: float

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("group size must be >= 1")
        if self.shape_a <= 0 or self.shape_b <= 0:
            raise ValueError("Beta shapes must be positive")


@dataclass(frozen=True)
class SyntheticSpec:
    groups: tuple
    seed: int = 42

    def __post_init__(self):
        groups = tuple(self.groups)
        object.__setattr__(self, "groups", groups)
        if not groups:
            raise ValueError("need at least one group")
        names = [g.name for g in groups]
        if len(set(names)) != len(names):
            raise ValueError("group names must be distinct")


def generate_synthetic(spec: SyntheticSpec) -> ScoredDataset:
    """Sample scores ~ Beta per group and labels ~ Bernoulli(score)."""
    rng = np.random.default_rng(spec.seed)
    scores, labels, groups = [], [], []
    for g in spec.groups:
        s = rng.beta(g.shape_a, g.shape_b, g.size)
        y = (rng.random(g.size) < s).astype(int)
        scores.append(s)
        labels.append(y)
        groups.append(np.full(g.size, g.name, dtype=object))
    return ScoredDataset(
        np.concatenate(scores), np.concatenate(labels), np.concatenate(groups)
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_nll(weights, bias, features, labels) -> float:
    """Mean negative log-likelihood; the objective the demo scorer descends."""
    z = features @ weights + bias
    # log(1 + exp(z)) - y*z, computed stably
    return float(np.mean(np.logaddexp(0.0, z) - labels * z))


def logistic_gradient(weights, bias, features, labels):
    residual = _sigmoid(features @ weights + bias) - labels
    return features.T @ residual / len(labels), float(residual.mean())


def demo_logistic_scorer(
    features,
    labels,
    learning_rate: float = 0.1,
    iterations: int = 1000,
) -> np.ndarray:
    """Fit a from-scratch logistic model and return probability scores.

    Full-batch gradient descent from zero weights on standardized
    features; deterministic, no randomness involved. Zero iterations
    leave the model at its 0.5-everywhere initialization. Intended for
    demos and tests, not as a production scorer.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if features.ndim != 2:
        raise ValueError("features must be 2-d")
    if len(features) != len(labels):
        raise ValueError("features and labels must have equal length")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    std = features.std(axis=0)
    std[std == 0] = 1.0
    x = (features - features.mean(axis=0)) / std
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(iterations):
        grad_w, grad_b = logistic_gradient(w, b, x, labels)
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
    return _sigmoid(x @ w + b)
