"""Scikit-learn style front door for the capacity-gated threshold search."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .dataset import (
    Capacity,
    DEFAULT_GRID_STEP,
    EthicalWeights,
    ScoredDataset,
    decision_rule,
    default_grid,
)
from .optimizer import deploy


def as_score_vector(X) -> np.ndarray:
    """Accept a 1-d score array or a single-column matrix."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError("expected 1-d scores or a single-column 2-d array")
    return arr


class CapacityGatedClassifier(BaseEstimator, ClassifierMixin):
    """Turn calibrated risk scores into budget-feasible binary decisions.

    `fit` treats X as risk scores in [0, 1] and calibrates a deployment
    threshold that minimizes alpha*FNR + beta*FPR + gamma*disparity,
    then raises it just enough to keep the flagged fraction within
    `capacity`. `predict` flags every score at or above the calibrated
    threshold. Pass `groups` to fit for the disparity term; without it
    the population is treated as one group and gamma has no effect.
    """

    def __init__(
        self,
        alpha: float = 1.0,
        beta: float = 1.0,
        gamma: float = 1.0,
        capacity: float = 1.0,
        grid_step: float = DEFAULT_GRID_STEP,
    ):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.capacity = capacity
        self.grid_step = grid_step

    def fit(self, X, y, groups=None):
        scores = as_score_vector(X)
        labels = np.asarray(y)
        if groups is None:
            groups = np.full(len(scores), "all", dtype=object)
        dataset = ScoredDataset(scores, labels, np.asarray(groups, dtype=object))
        weights = EthicalWeights(self.alpha, self.beta, self.gamma)
        grid = default_grid(dataset, self.grid_step)
        decision = deploy(dataset, grid, weights, Capacity(self.capacity))
        self.decision_ = decision
        self.tau_ = decision.tau_star
        self.tau_free_ = decision.tau_free
        self.tau_capacity_ = decision.tau_capacity
        self.constraint_active_ = decision.constraint_active
        self.critical_capacity_ = decision.critical_capacity
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "tau_")
        return decision_rule(as_score_vector(X), self.tau_)

    def transform(self, X) -> np.ndarray:
        """Alias for predict, for use at the end of transformer chains."""
        return self.predict(X).reshape(-1, 1)
