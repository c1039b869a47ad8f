"""CSV ingestion, stratified splitting, synthetic cohorts, demo scorer."""

import numpy as np
import pytest

from capgate import (
    GroupSpec,
    SyntheticSpec,
    demo_logistic_scorer,
    generate_synthetic,
    load_csv,
    save_csv,
    stratified_split,
)
from capgate.data_io import logistic_gradient, logistic_nll


class TestCsvRoundTrip:
    def test_exact_round_trip(self, tmp_path, cohort):
        path = tmp_path / "cohort.csv"
        save_csv(cohort, path)
        back = load_csv(path)
        assert np.array_equal(cohort.scores, back.scores)
        assert np.array_equal(cohort.labels, back.labels)
        assert list(cohort.groups) == list(back.groups)

    def test_missing_column_is_schema_error(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("score,label\n0.5,1\n")
        with pytest.raises(ValueError, match="schema error"):
            load_csv(p)

    def test_empty_file_is_schema_error(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="schema error"):
            load_csv(p)

    def test_header_only_is_schema_error(self, tmp_path):
        p = tmp_path / "hdr.csv"
        p.write_text("score,label,group\n")
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(p)

    def test_score_out_of_range_reports_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("score,label,group\n1.3,1,A\n")
        with pytest.raises(ValueError, match="range error: row 1"):
            load_csv(p)

    def test_non_numeric_score_reports_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("score,label,group\n0.2,0,A\n0.4,1,B\noops,1,A\n")
        with pytest.raises(ValueError, match="range error: row 3"):
            load_csv(p)

    def test_bad_label_reports_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("score,label,group\n0.5,2,A\n")
        with pytest.raises(ValueError, match="label error: row 1"):
            load_csv(p)

    def test_extra_columns_warn_but_load(self, tmp_path):
        p = tmp_path / "extra.csv"
        p.write_text("score,label,group,note\n0.5,1,A,x\n0.2,0,B,y\n")
        with pytest.warns(UserWarning, match="extra column"):
            ds = load_csv(p)
        assert len(ds) == 2


class TestStratifiedSplit:
    def test_fractions_respected(self, cohort):
        parts = stratified_split(cohort, seed=42)
        n = len(cohort)
        assert len(parts.train) + len(parts.validation) + len(parts.test) == n
        assert len(parts.train) == pytest.approx(0.5 * n, abs=len(cohort) * 0.02)
        assert len(parts.validation) == pytest.approx(0.2 * n, abs=len(cohort) * 0.02)
        assert len(parts.test) == pytest.approx(0.3 * n, abs=len(cohort) * 0.02)

    def test_joint_composition_preserved(self, cohort):
        parts = stratified_split(cohort, seed=42)
        for slice_ in (parts.train, parts.validation, parts.test):
            for g in cohort.group_names():
                whole = np.mean(
                    (cohort.groups == g) & (cohort.labels == 1)
                )
                part = np.mean((slice_.groups == g) & (slice_.labels == 1))
                assert part == pytest.approx(whole, abs=0.05)

    def test_deterministic_per_seed(self, cohort):
        a = stratified_split(cohort, seed=42)
        b = stratified_split(cohort, seed=42)
        assert np.array_equal(a.train.scores, b.train.scores)
        c = stratified_split(cohort, seed=43)
        assert not np.array_equal(a.train.scores, c.train.scores)

    def test_disjoint_and_exhaustive(self, cohort):
        parts = stratified_split(cohort, seed=42)
        combined = np.sort(
            np.concatenate(
                [parts.train.scores, parts.validation.scores, parts.test.scores]
            )
        )
        assert np.array_equal(combined, np.sort(cohort.scores))

    def test_single_row_stratum_goes_to_train(self):
        from capgate import ScoredDataset

        scores = np.concatenate([np.linspace(0.1, 0.9, 30), [0.95]])
        labels = np.concatenate([np.tile([0, 1], 15), [1]])
        groups = np.array(["A"] * 30 + ["Z"], dtype=object)
        ds = ScoredDataset(scores, labels, groups)
        with pytest.warns(UserWarning, match="single row"):
            parts = stratified_split(ds, seed=1)
        assert "Z" in parts.train.groups
        assert "Z" not in parts.validation.groups
        assert "Z" not in parts.test.groups

    def test_bad_fractions_rejected(self, cohort):
        with pytest.raises(ValueError):
            stratified_split(cohort, fractions=(0.5, 0.2), seed=1)
        with pytest.raises(ValueError):
            stratified_split(cohort, fractions=(0.5, 0.4, 0.4), seed=1)


class TestSyntheticGeneration:
    def test_sizes_and_groups(self):
        ds = generate_synthetic(
            SyntheticSpec(
                groups=(GroupSpec("A", 300, 2, 5), GroupSpec("B", 200, 2, 2)),
                seed=3,
            )
        )
        assert ds.group_sizes() == {"A": 300, "B": 200}

    def test_deterministic_per_seed(self):
        spec = SyntheticSpec(groups=(GroupSpec("A", 100, 2, 2),), seed=11)
        a = generate_synthetic(spec)
        b = generate_synthetic(spec)
        assert np.array_equal(a.scores, b.scores)
        assert np.array_equal(a.labels, b.labels)

    def test_scores_calibrated(self):
        # P(y=1 | score in bin) should track the bin's mean score
        ds = generate_synthetic(
            SyntheticSpec(groups=(GroupSpec("A", 60000, 2, 3),), seed=5)
        )
        bins = np.linspace(0, 1, 11)
        which = np.digitize(ds.scores, bins) - 1
        for b in range(10):
            members = which == b
            if members.sum() < 1000:
                continue
            assert ds.labels[members].mean() == pytest.approx(
                ds.scores[members].mean(), abs=0.02
            )

    def test_validation(self):
        with pytest.raises(ValueError):
            GroupSpec("A", 0, 2, 2)
        with pytest.raises(ValueError):
            GroupSpec("A", 10, -1, 2)
        with pytest.raises(ValueError):
            SyntheticSpec(groups=())
        with pytest.raises(ValueError):
            SyntheticSpec(groups=(GroupSpec("A", 5, 1, 1), GroupSpec("A", 5, 1, 1)))


class TestDemoScorer:
    @pytest.fixture
    def toy(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(80, 3))
        logits = x @ np.array([1.0, -2.0, 0.5])
        y = (rng.random(80) < 1 / (1 + np.exp(-logits))).astype(float)
        return x, y

    def test_gradient_matches_finite_differences(self, toy):
        x, y = toy
        x_std = (x - x.mean(axis=0)) / x.std(axis=0)
        rng = np.random.default_rng(1)
        w = rng.normal(size=3) * 0.3
        b = 0.2
        grad_w, grad_b = logistic_gradient(w, b, x_std, y)
        eps = 1e-6
        for j in range(3):
            bump = np.zeros(3)
            bump[j] = eps
            numeric = (
                logistic_nll(w + bump, b, x_std, y) - logistic_nll(w - bump, b, x_std, y)
            ) / (2 * eps)
            assert grad_w[j] == pytest.approx(numeric, abs=1e-7)
        numeric_b = (
            logistic_nll(w, b + eps, x_std, y) - logistic_nll(w, b - eps, x_std, y)
        ) / (2 * eps)
        assert grad_b == pytest.approx(numeric_b, abs=1e-7)

    def test_zero_iterations_give_half(self, toy):
        x, y = toy
        scores = demo_logistic_scorer(x, y, iterations=0)
        assert np.all(scores == 0.5)

    def test_training_reduces_loss_and_is_deterministic(self, toy):
        x, y = toy
        scores = demo_logistic_scorer(x, y, iterations=400)
        assert np.array_equal(scores, demo_logistic_scorer(x, y, iterations=400))
        assert np.all((scores > 0) & (scores < 1))
        # trained scores should separate the classes better than chance
        assert scores[y == 1].mean() > scores[y == 0].mean() + 0.1

    def test_input_validation(self, toy):
        x, y = toy
        with pytest.raises(ValueError):
            demo_logistic_scorer(x[:, 0], y)
        with pytest.raises(ValueError):
            demo_logistic_scorer(x, y[:-1])
        with pytest.raises(ValueError):
            demo_logistic_scorer(x, y, iterations=-1)
