"""Baseline and comparator policies, plus the shared evaluation interface."""

import numpy as np
import pytest

from capgate import (
    Capacity,
    EthicalWeights,
    PolicyId,
    PolicySpec,
    ScoredDataset,
    default_grid,
    deploy,
    evaluate_policy,
)
from capgate.policies import (
    demographic_parity,
    equalized_odds_randomized,
    fairness_aware,
    inclusion_oriented,
    performance_optimal,
    random_allocation,
    risk_averse,
    unconstrained,
)

from conftest import random_instance


def make(scores, labels, groups):
    return ScoredDataset(
        np.asarray(scores, dtype=float),
        np.asarray(labels),
        np.asarray(groups, dtype=object),
    )


class TestPerformanceOptimal:
    def test_perfect_separation(self, four_point):
        tau = performance_optimal(four_point, default_grid(four_point, 1.0))
        assert tau == 0.6  # unique F1 = 1 at the separating cut

    def test_single_class_rejected(self):
        ds = make([0.2, 0.8], [1, 1], ["A", "B"])
        with pytest.raises(ValueError, match="single class"):
            performance_optimal(ds, default_grid(ds))

    def test_matches_exhaustive_f1_scan(self):
        rng = np.random.default_rng(21)
        for _ in range(15):
            ds = random_instance(rng, n_min=20, n_max=100)
            if ds.labels.min() == ds.labels.max():
                continue
            grid = default_grid(ds, 1.0)
            tau = performance_optimal(ds, grid)
            best_f1, best_tau = -1.0, None
            for t in grid.values:
                flagged = ds.scores >= t
                tp = int(np.sum(flagged & (ds.labels == 1)))
                fp = int(np.sum(flagged & (ds.labels == 0)))
                fn = int(np.sum(~flagged & (ds.labels == 1)))
                f1 = 2 * tp / (2 * tp + fp + fn)
                if f1 >= best_f1:  # ties move to the larger tau
                    best_f1, best_tau = f1, float(t)
            assert tau == best_tau

    def test_balanced_accuracy_metric(self, four_point):
        tau = performance_optimal(
            four_point, default_grid(four_point, 1.0), metric="balanced_accuracy"
        )
        assert tau == 0.6


class TestRiskAverse:
    def test_zero_tolerance_keeps_all_positives(self, four_point):
        tau = risk_averse(four_point, default_grid(four_point, 1.0), 0.0)
        assert tau == 0.6  # largest cut still catching both positives

    def test_allows_half_misses(self, four_point):
        tau = risk_averse(four_point, default_grid(four_point, 1.0), 0.5)
        assert tau == 0.9

    def test_no_positives_gives_one(self):
        ds = make([0.2, 0.4], [0, 0], ["A", "B"])
        assert risk_averse(ds, default_grid(ds, 1.0), 0.0) == 1.0

    def test_epsilon_validation(self, four_point):
        with pytest.raises(ValueError):
            risk_averse(four_point, default_grid(four_point), -0.1)


class TestInclusionOriented:
    def test_equals_capacity_threshold(self, four_point):
        from capgate import capacity_threshold

        grid = default_grid(four_point)
        for c in (0.2, 0.5, 0.8, 1.0):
            assert inclusion_oriented(four_point, grid, Capacity(c)) == (
                capacity_threshold(four_point, grid, Capacity(c))
            )


class TestFairnessAware:
    def test_minimizes_disparity_below_base(self):
        # A's positives: 0.8, 0.9; B's positive: 0.3. Disparity is 1 for
        # taus in (0.3, 0.8], 0 at tau <= 0.3.
        ds = make([0.8, 0.9, 0.3, 0.1], [1, 1, 1, 0], ["A", "A", "B", "B"])
        grid = default_grid(ds, 1.0)
        tau = fairness_aware(ds, grid, tau_base=0.8)
        assert tau == 0.3

    def test_requires_grid_point_base(self, four_point):
        with pytest.raises(ValueError, match="grid"):
            fairness_aware(four_point, default_grid(four_point, 1.0), 0.55)

    def test_never_above_base(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            ds = random_instance(rng, n_min=20, n_max=80)
            grid = default_grid(ds)
            base = float(grid.values[int(rng.integers(0, len(grid.values)))])
            assert fairness_aware(ds, grid, base) <= base


class TestDemographicParity:
    def test_symmetric_groups_go_to_one(self):
        # identical score multisets in both groups: gap 0 everywhere,
        # so the largest-tie rule lands on tau=1
        ds = make(
            [0.2, 0.6, 0.2, 0.6], [0, 1, 0, 1], ["A", "A", "B", "B"]
        )
        tau = demographic_parity(ds, default_grid(ds, 1.0), Capacity(1.0))
        assert tau == 1.0

    def test_requires_two_groups(self):
        ds = make([0.2, 0.8], [0, 1], ["A", "A"])
        with pytest.raises(ValueError, match="group"):
            demographic_parity(ds, default_grid(ds), Capacity(0.5))

    def test_matches_exhaustive_scan(self):
        # mass at score 1.0 makes the trivial tau=1 cut unequal, so the
        # scan has to find the interior equal-rate point
        ds = make(
            [1.0, 1.0, 0.5, 0.1, 1.0, 0.6, 0.4, 0.2],
            [1, 1, 1, 0, 1, 1, 0, 0],
            ["A", "A", "A", "A", "B", "B", "B", "B"],
        )
        grid = default_grid(ds, 1.0)
        tau = demographic_parity(ds, grid, Capacity(0.5))
        best = None
        for t in grid.values:
            overall = float(np.mean(ds.scores >= t))
            if overall > 0.5:
                continue
            rates = [
                float(np.mean(ds.scores[ds.groups == g] >= t))
                for g in ds.group_names()
            ]
            gap = max(rates) - min(rates)
            if best is None or gap < best[0] - 1e-15 or (
                abs(gap - best[0]) <= 1e-15 and t > best[1]
            ):
                best = (gap, float(t))
        assert tau == best[1]
        assert tau == 0.6  # frozen from the scan above


class TestRandomizedComparators:
    def test_exact_count_and_determinism(self, cohort):
        mask = random_allocation(cohort, Capacity(0.25), seed=9)
        assert mask.sum() == int(np.floor(0.25 * len(cohort)))
        again = random_allocation(cohort, Capacity(0.25), seed=9)
        assert np.array_equal(mask, again)
        other = random_allocation(cohort, Capacity(0.25), seed=10)
        assert not np.array_equal(mask, other)

    def test_equalized_odds_per_group_counts(self, cohort):
        mask = equalized_odds_randomized(cohort, Capacity(0.25), seed=9)
        for g, size in cohort.group_sizes().items():
            got = int(mask[cohort.groups == g].sum())
            assert got == int(np.floor(0.25 * size))

    def test_equalized_odds_selection_rates_nearly_equal(self, cohort):
        mask = equalized_odds_randomized(cohort, Capacity(0.3), seed=1)
        rates = [
            mask[cohort.groups == g].mean() for g in cohort.group_names()
        ]
        # floor rounding is the only source of inequality
        assert max(rates) - min(rates) <= 1.0 / min(cohort.group_sizes().values())


class TestUnconstrained:
    def test_equals_free_optimum(self, cohort):
        grid = default_grid(cohort)
        w = EthicalWeights(2, 1, 1)
        d = deploy(cohort, grid, w, Capacity(1.0))
        assert unconstrained(cohort, grid, w) == d.tau_free


class TestEvaluatePolicy:
    def test_dispatch_covers_every_policy(self, cohort):
        grid = default_grid(cohort)
        w = EthicalWeights(2, 1, 1)
        cap = Capacity(0.25)
        d = deploy(cohort, grid, w, cap)
        for pid in PolicyId:
            params = None
            if pid in (PolicyId.EQUALIZED_ODDS, PolicyId.RANDOM_ALLOCATION):
                params = {"seed": 5}
            elif pid == PolicyId.FAIRNESS_AWARE:
                params = {"tau_base": d.tau_star}
            out = evaluate_policy(PolicySpec(pid, params), cohort, grid, w, cap)
            assert out.policy == pid
            assert 0.0 <= out.intervention_rate <= 1.0
            assert out.loss >= 0.0

    def test_proposed_framework_is_feasible_and_budgeted(self, cohort):
        out = evaluate_policy(
            PolicySpec(PolicyId.PROPOSED_FRAMEWORK),
            cohort,
            default_grid(cohort),
            EthicalWeights(2, 1, 1),
            Capacity(0.25),
        )
        assert out.feasible is True
        assert out.intervention_rate <= 0.25 + 1e-12

    def test_separate_calibration_slice(self, cohort):
        from capgate import stratified_split

        parts = stratified_split(cohort, seed=42)
        grid = default_grid(parts.validation)
        out = evaluate_policy(
            PolicySpec(PolicyId.PROPOSED_FRAMEWORK),
            parts.test,
            grid,
            EthicalWeights(2, 1, 1),
            Capacity(0.25),
            calibration=parts.validation,
        )
        d = deploy(parts.validation, grid, EthicalWeights(2, 1, 1), Capacity(0.25))
        assert out.tau == d.tau_star

    def test_missing_seed_rejected(self, cohort):
        with pytest.raises(ValueError, match="seed"):
            evaluate_policy(
                PolicySpec(PolicyId.RANDOM_ALLOCATION),
                cohort,
                default_grid(cohort),
                EthicalWeights(1, 1, 1),
                Capacity(0.25),
            )

    def test_randomized_outcomes_reproducible(self, cohort):
        spec = PolicySpec(PolicyId.EQUALIZED_ODDS, {"seed": 77})
        args = (cohort, default_grid(cohort), EthicalWeights(1, 1, 1), Capacity(0.25))
        first = evaluate_policy(spec, *args)
        second = evaluate_policy(spec, *args)
        assert first.confusion == second.confusion
        assert first.loss == second.loss
