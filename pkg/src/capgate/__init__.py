"""Capacity-gated threshold policies over calibrated risk scores.

Given per-instance risk scores, binary outcomes and group labels, the
package searches a threshold grid for the decision rule minimizing a
weighted ethical loss (missed cases, false alarms, cross-group recall
disparity), then raises the threshold just enough to respect a hard
budget on the fraction of instances flagged for intervention.
"""

from .data_io import (
    GroupSpec,
    SplitDataset,
    SyntheticSpec,
    demo_logistic_scorer,
    generate_synthetic,
    load_csv,
    save_csv,
    stratified_split,
)
from .dataset import (
    Capacity,
    DEFAULT_GRID_STEP,
    EthicalWeights,
    PolicyId,
    ScoredDataset,
    ThresholdDecision,
    ThresholdGrid,
    decision_rule,
    default_grid,
)
from .estimator import CapacityGatedClassifier
from .evaluation import (
    BootstrapSummary,
    SweepCase,
    SweepRecord,
    activation_rate,
    bootstrap,
    capacity_ablation,
    factorial_sweep,
    record_to_dict,
    sweep_columns,
    write_sweep_csv,
)
from .metrics import (
    ConfusionRates,
    DisparityReport,
    confusion,
    disparity,
    ethical_loss,
)
from .optimizer import (
    LossCurve,
    capacity_threshold,
    deploy,
    intervention_rate_at,
    loss_curve,
    optimize_free,
)
from .policies import PolicyOutcome, PolicySpec, evaluate_policy

__version__ = "0.1.0"

__all__ = [
    "BootstrapSummary",
    "Capacity",
    "CapacityGatedClassifier",
    "ConfusionRates",
    "DEFAULT_GRID_STEP",
    "DisparityReport",
    "EthicalWeights",
    "GroupSpec",
    "LossCurve",
    "PolicyId",
    "PolicyOutcome",
    "PolicySpec",
    "ScoredDataset",
    "SplitDataset",
    "SweepCase",
    "SweepRecord",
    "SyntheticSpec",
    "ThresholdDecision",
    "ThresholdGrid",
    "activation_rate",
    "bootstrap",
    "capacity_ablation",
    "capacity_threshold",
    "confusion",
    "decision_rule",
    "default_grid",
    "demo_logistic_scorer",
    "deploy",
    "disparity",
    "ethical_loss",
    "evaluate_policy",
    "factorial_sweep",
    "generate_synthetic",
    "intervention_rate_at",
    "load_csv",
    "loss_curve",
    "optimize_free",
    "record_to_dict",
    "save_csv",
    "stratified_split",
    "sweep_columns",
    "write_sweep_csv",
]
