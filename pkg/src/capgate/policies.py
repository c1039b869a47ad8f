"""Baseline threshold heuristics and comparator strategies.

Threshold policies (performance-optimal, risk-averse, inclusion-oriented,
fairness-aware, demographic-parity, unconstrained and the proposed
capacity-gated rule) return a single global cutoff. The equalized-odds
and random-allocation comparators are randomized selection masks, not
thresholds: they are reference comparators for evaluation, not
deployable decision rules, and they are the one place where selection is
allowed to depend on group membership.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import Capacity, EthicalWeights, PolicyId, ScoredDataset, ThresholdGrid
from .metrics import (
    ConfusionRates,
    DisparityReport,
    confusion_from_mask,
    disparity_from_mask,
)
from .optimizer import capacity_threshold, deploy, loss_curve, optimize_free

FEASIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class PolicySpec:
    """A policy id plus its policy-specific parameters.

    Required params by id: risk_averse -> epsilon (optional, default 0);
    performance_optimal -> metric (optional, "f1" or "balanced_accuracy");
    fairness_aware -> tau_base (optional, defaults to the F1 optimum);
    equalized_odds / random_allocation -> seed.
    """

    id: PolicyId
    params: dict = None

    def __post_init__(self):
        object.__setattr__(self, "id", PolicyId(self.id))
        object.__setattr__(self, "params", dict(self.params or {}))


@dataclass(frozen=True)
class PolicyOutcome:
    """One policy evaluated on one dataset under one weight/capacity setting."""

    policy: PolicyId
    tau: object  # threshold, or the string "randomized" for mask policies
    confusion: ConfusionRates
    disparity: DisparityReport
    intervention_rate: float
    feasible: bool
    loss: float


def performance_optimal(
    dataset: ScoredDataset, grid: ThresholdGrid, metric: str = "f1"
) -> float:
    """Grid threshold maximizing F1 (or balanced accuracy); ties -> largest tau."""
    positive = dataset.labels == 1
    n_pos = int(positive.sum())
    n_neg = len(dataset) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("undefined F1 optimum: dataset has a single class")
    taus = grid.values
    pos_scores = np.sort(dataset.scores[positive])
    neg_scores = np.sort(dataset.scores[~positive])
    tp = n_pos - np.searchsorted(pos_scores, taus, side="left")
    fp = n_neg - np.searchsorted(neg_scores, taus, side="left")
    fn = n_pos - tp
    if metric == "f1":
        scores = 2 * tp / (2 * tp + fp + fn)  # denominator >= n_pos >= 1
    elif metric == "balanced_accuracy":
        scores = (tp / n_pos + (n_neg - fp) / n_neg) / 2.0
    else:
        raise ValueError(f"unknown metric {metric!r}")
    best = scores.max()
    # ties -> largest tau (fewest interventions)
    idx = np.flatnonzero(scores == best)[-1]
    return float(taus[idx])


def risk_averse(
    dataset: ScoredDataset, grid: ThresholdGrid, epsilon: float = 0.0
) -> float:
    """Largest grid threshold keeping FNR at or below epsilon.

    Always exists: FNR(0) = 0. With no positives FNR is 0 everywhere and
    the answer is 1.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    positive = dataset.labels == 1
    n_pos = int(positive.sum())
    if n_pos == 0:
        return float(grid.values[-1])
    pos_scores = np.sort(dataset.scores[positive])
    fnrs = np.searchsorted(pos_scores, grid.values, side="left") / n_pos
    ok = np.flatnonzero(fnrs <= epsilon)  # FNR non-decreasing: a prefix
    return float(grid.values[ok[-1]])


def inclusion_oriented(
    dataset: ScoredDataset, grid: ThresholdGrid, capacity: Capacity
) -> float:
    """Pure capacity enforcement: exactly the capacity threshold."""
    return capacity_threshold(dataset, grid, capacity)


def fairness_aware(
    dataset: ScoredDataset, grid: ThresholdGrid, tau_base: float
) -> float:
    """Among thresholds <= tau_base, minimize disparity; ties -> largest tau."""
    taus = grid.values
    if tau_base not in taus:
        raise ValueError(f"tau_base={tau_base} must be a grid point")
    curve = loss_curve(dataset, grid, EthicalWeights(0.0, 0.0, 1.0))
    allowed = taus <= tau_base
    deltas = curve.deltas[allowed]
    best = deltas.min()
    idx = np.flatnonzero(deltas == best)[-1]
    return float(taus[allowed][idx])


def demographic_parity(
    dataset: ScoredDataset, grid: ThresholdGrid, capacity: Capacity
) -> float:
    """Budget-feasible threshold minimizing the max pairwise group
    selection-rate gap; ties -> largest tau.

    Reference comparator: the gap uses selection rates (flagged fraction
    per group), not TPRs.
    """
    names = dataset.group_names()
    if len(names) < 2:
        raise ValueError("demographic parity needs at least two groups")
    taus = grid.values
    groups = dataset.groups.astype(str)
    rates = []
    for name in names:
        group_scores = np.sort(dataset.scores[groups == name])
        rates.append(
            (len(group_scores) - np.searchsorted(group_scores, taus, side="left"))
            / len(group_scores)
        )
    stacked = np.vstack(rates)
    gaps = stacked.max(axis=0) - stacked.min(axis=0)
    overall = (len(dataset) - np.searchsorted(np.sort(dataset.scores), taus)) / len(
        dataset
    )
    feasible = overall <= capacity.c
    if not feasible.any():
        return float(taus[-1])  # degenerate mass at 1.0; most restrictive point
    feasible_gaps = gaps[feasible]
    best = feasible_gaps.min()
    idx = np.flatnonzero(feasible_gaps == best)[-1]
    return float(taus[feasible][idx])


def random_allocation(
    dataset: ScoredDataset, capacity: Capacity, seed: int
) -> np.ndarray:
    """Select exactly floor(C*N) instances uniformly, ignoring scores."""
    rng = np.random.default_rng(seed)
    n_select = int(np.floor(capacity.c * len(dataset)))
    mask = np.zeros(len(dataset), dtype=bool)
    mask[rng.choice(len(dataset), size=n_select, replace=False)] = True
    return mask


def equalized_odds_randomized(
    dataset: ScoredDataset, capacity: Capacity, seed: int
) -> np.ndarray:
    """Group-stratified random selection: floor(C*N_g) per group.

    Expected TPR is ~C in every group, so the expected TPR gap is 0. Not
    a single global threshold; labeled comparator only.
    """
    rng = np.random.default_rng(seed)
    mask = np.zeros(len(dataset), dtype=bool)
    groups = dataset.groups.astype(str)
    for name in dataset.group_names():
        members = np.flatnonzero(groups == name)
        n_select = int(np.floor(capacity.c * len(members)))
        mask[rng.choice(members, size=n_select, replace=False)] = True
    return mask


def unconstrained(
    dataset: ScoredDataset, grid: ThresholdGrid, weights: EthicalWeights
) -> float:
    """The free optimum, deployed with no regard for intervention volume."""
    tau_free, _ = optimize_free(loss_curve(dataset, grid, weights))
    return tau_free


def evaluate_policy(
    spec: PolicySpec,
    dataset: ScoredDataset,
    grid: ThresholdGrid,
    weights: EthicalWeights,
    capacity: Capacity,
    calibration: ScoredDataset = None,
) -> PolicyOutcome:
    """Resolve a policy to a threshold or mask and score it on `dataset`.

    Thresholds are calibrated on `calibration` when given (validation
    slice), otherwise on the evaluation dataset itself. Mask policies
    always draw on the evaluation dataset.
    """
    cal = calibration if calibration is not None else dataset
    params = spec.params
    tau: object
    if spec.id is PolicyId.PROPOSED_FRAMEWORK:
        tau = deploy(cal, grid, weights, capacity).tau_star
    elif spec.id is PolicyId.PERFORMANCE_OPTIMAL:
        tau = performance_optimal(cal, grid, params.get("metric", "f1"))
    elif spec.id is PolicyId.RISK_AVERSE:
        tau = risk_averse(cal, grid, params.get("epsilon", 0.0))
    elif spec.id is PolicyId.INCLUSION_ORIENTED:
        tau = inclusion_oriented(cal, grid, capacity)
    elif spec.id is PolicyId.FAIRNESS_AWARE:
        tau_base = params.get("tau_base")
        if tau_base is None:
            tau_base = performance_optimal(cal, grid)
        tau = fairness_aware(cal, grid, tau_base)
    elif spec.id is PolicyId.DEMOGRAPHIC_PARITY:
        tau = demographic_parity(cal, grid, capacity)
    elif spec.id is PolicyId.UNCONSTRAINED:
        tau = unconstrained(cal, grid, weights)
    elif spec.id is PolicyId.EQUALIZED_ODDS:
        mask = equalized_odds_randomized(dataset, capacity, _require_seed(spec))
        return _mask_outcome(spec.id, dataset, mask, weights, capacity)
    elif spec.id is PolicyId.RANDOM_ALLOCATION:
        mask = random_allocation(dataset, capacity, _require_seed(spec))
        return _mask_outcome(spec.id, dataset, mask, weights, capacity)
    else:  # pragma: no cover - PolicyId is a closed enum
        raise ValueError(f"unknown policy id {spec.id!r}")
    return _mask_outcome(spec.id, dataset, dataset.scores >= tau, weights, capacity, tau)


def _require_seed(spec: PolicySpec) -> int:
    if "seed" not in spec.params:
        raise ValueError(f"policy {spec.id.value} requires a 'seed' param")
    return int(spec.params["seed"])


def _mask_outcome(
    policy: PolicyId,
    dataset: ScoredDataset,
    mask: np.ndarray,
    weights: EthicalWeights,
    capacity: Capacity,
    tau: object = "randomized",
) -> PolicyOutcome:
    rates = confusion_from_mask(dataset, mask)
    report = disparity_from_mask(dataset, mask)
    loss = (
        weights.alpha * rates.fnr
        + weights.beta * rates.fpr
        + weights.gamma * report.delta
    )
    return PolicyOutcome(
        policy=policy,
        tau=tau,
        confusion=rates,
        disparity=report,
        intervention_rate=rates.intervention_rate,
        feasible=rates.intervention_rate <= capacity.c + FEASIBILITY_SLACK,
        loss=loss,
    )
