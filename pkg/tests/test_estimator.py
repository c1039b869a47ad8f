"""Estimator wrapper: sklearn conventions around the threshold search."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from capgate import Capacity, CapacityGatedClassifier, EthicalWeights, default_grid, deploy


@pytest.fixture
def fitted(cohort):
    clf = CapacityGatedClassifier(alpha=2, beta=1, gamma=1, capacity=0.25)
    clf.fit(cohort.scores, cohort.labels, groups=cohort.groups)
    return clf, cohort


class TestSklearnConventions:
    def test_get_params_round_trip(self):
        clf = CapacityGatedClassifier(alpha=3, capacity=0.1)
        params = clf.get_params()
        assert params["alpha"] == 3
        assert params["capacity"] == 0.1
        rebuilt = CapacityGatedClassifier(**params)
        assert rebuilt.get_params() == params

    def test_set_params(self):
        clf = CapacityGatedClassifier()
        clf.set_params(gamma=2.5)
        assert clf.gamma == 2.5

    def test_clone_preserves_params(self):
        clf = CapacityGatedClassifier(alpha=2, beta=0.5, capacity=0.3)
        copy = clone(clf)
        assert copy.get_params() == clf.get_params()

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            CapacityGatedClassifier().predict(np.array([0.5]))


class TestFitPredict:
    def test_fit_exposes_decision(self, fitted):
        clf, cohort = fitted
        reference = deploy(
            cohort, default_grid(cohort), EthicalWeights(2, 1, 1), Capacity(0.25)
        )
        assert clf.tau_ == reference.tau_star
        assert clf.tau_free_ == reference.tau_free
        assert clf.tau_capacity_ == reference.tau_capacity
        assert clf.constraint_active_ == reference.constraint_active
        assert clf.critical_capacity_ == reference.critical_capacity

    def test_predict_is_threshold_rule(self, fitted):
        clf, cohort = fitted
        out = clf.predict(cohort.scores)
        assert np.array_equal(out, (cohort.scores >= clf.tau_).astype(int))

    def test_predictions_respect_budget_in_sample(self, fitted):
        clf, cohort = fitted
        assert clf.predict(cohort.scores).mean() <= 0.25 + 1e-12

    def test_accepts_column_matrix(self, fitted):
        clf, cohort = fitted
        column = cohort.scores.reshape(-1, 1)
        assert np.array_equal(clf.predict(column), clf.predict(cohort.scores))

    def test_rejects_wide_matrix(self, fitted):
        clf, _ = fitted
        with pytest.raises(ValueError):
            clf.predict(np.zeros((4, 3)))

    def test_fit_without_groups(self, cohort):
        clf = CapacityGatedClassifier(gamma=5.0, capacity=0.5)
        clf.fit(cohort.scores, cohort.labels)
        # one implicit group: the disparity term is identically zero, so
        # a huge gamma changes nothing relative to gamma=0
        plain = CapacityGatedClassifier(gamma=0.0, capacity=0.5)
        plain.fit(cohort.scores, cohort.labels)
        assert clf.tau_ == plain.tau_

    def test_transform_returns_column(self, fitted):
        clf, cohort = fitted
        out = clf.transform(cohort.scores[:10])
        assert out.shape == (10, 1)

    def test_score_is_accuracy(self, fitted):
        clf, cohort = fitted
        acc = clf.score(cohort.scores, cohort.labels)
        manual = np.mean(clf.predict(cohort.scores) == cohort.labels)
        assert acc == pytest.approx(manual)
