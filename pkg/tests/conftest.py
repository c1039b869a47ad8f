"""Shared helpers: random calibrated instances and a slow reference oracle.

The oracle deliberately counts with plain Python loops so it shares no
code path with the vectorized implementation under test.
"""

import numpy as np
import pytest

from capgate import GroupSpec, ScoredDataset, SyntheticSpec, generate_synthetic


def random_instance(rng, n_min: int = 30, n_max: int = 300) -> ScoredDataset:
    """Two-group cohort with Beta scores and labels ~ Bernoulli(score)."""
    half_lo = max(2, n_min // 2)
    half_hi = max(half_lo + 1, n_max // 2)
    spec = SyntheticSpec(
        groups=(
            GroupSpec("A", int(rng.integers(half_lo, half_hi)),
                      float(rng.uniform(0.5, 5.0)), float(rng.uniform(0.5, 5.0))),
            GroupSpec("B", int(rng.integers(half_lo, half_hi)),
                      float(rng.uniform(0.5, 5.0)), float(rng.uniform(0.5, 5.0))),
        ),
        seed=int(rng.integers(0, 2**31)),
    )
    return generate_synthetic(spec)


def slow_loss(dataset: ScoredDataset, tau: float, alpha: float, beta: float, gamma: float) -> float:
    """Reference ethical loss computed row by row in pure Python."""
    scores = dataset.scores.tolist()
    labels = dataset.labels.tolist()
    groups = [str(g) for g in dataset.groups]
    fn = sum(1 for s, y in zip(scores, labels) if y == 1 and s < tau)
    pos = sum(labels)
    fp = sum(1 for s, y in zip(scores, labels) if y == 0 and s >= tau)
    neg = len(labels) - pos
    fnr = fn / pos if pos else 0.0
    fpr = fp / neg if neg else 0.0
    tprs = []
    for g in sorted(set(groups)):
        g_pos = [s for s, y, gg in zip(scores, labels, groups) if gg == g and y == 1]
        if g_pos:
            tprs.append(sum(1 for s in g_pos if s >= tau) / len(g_pos))
    delta = max(tprs) - min(tprs) if len(tprs) >= 2 else 0.0
    return alpha * fnr + beta * fpr + gamma * delta


def scan_oracle_min(dataset: ScoredDataset, taus, alpha: float, beta: float, gamma: float):
    """Exhaustive minimum of the reference loss over the candidate taus."""
    best_tau, best_loss = None, None
    for t in taus:
        loss = slow_loss(dataset, float(t), alpha, beta, gamma)
        if best_loss is None or loss < best_loss - 1e-15:
            best_tau, best_loss = float(t), loss
    return best_tau, best_loss


@pytest.fixture
def four_point() -> ScoredDataset:
    """Scores 0.1/0.4 negative, 0.6/0.9 positive; two groups."""
    return ScoredDataset(
        np.array([0.1, 0.4, 0.6, 0.9]),
        np.array([0, 0, 1, 1]),
        np.array(["A", "A", "B", "B"], dtype=object),
    )


@pytest.fixture
def cohort() -> ScoredDataset:
    """Thousand-row calibrated cohort with a realized base rate near 0.35."""
    return generate_synthetic(
        SyntheticSpec(
            groups=(GroupSpec("A", 600, 2.0, 5.0), GroupSpec("B", 400, 2.0, 2.0)),
            seed=7,
        )
    )
