"""Experiment engine: bootstrap uncertainty, factorial weight sweeps and
the capacity ablation.

Protocol per cell: calibrate tau_free and tau(C) on the validation
slice, apply tau* blindly to the held-out test slice, then bootstrap the
test metrics at that fixed threshold (thresholds are never re-optimized
inside a resample). Per-cell RNG seeds are derived from the master seed
and the cell's position in the canonical factorial enumeration, so any
execution order reproduces the same records.
"""

import csv
import io
import itertools
from dataclasses import dataclass

import numpy as np

from .dataset import (
    Capacity,
    DEFAULT_GRID_STEP,
    EthicalWeights,
    ScoredDataset,
    default_grid,
)
from .metrics import confusion, disparity
from .optimizer import deploy

DEFAULT_ALPHAS = (1.0, 2.0, 3.0)
DEFAULT_BETAS = (0.5, 1.0, 1.5)
DEFAULT_GAMMAS = (0.5, 1.0, 1.5, 2.0)
DEFAULT_CAPACITY = 0.25
ABLATION_CAPACITIES = (0.10, 0.15, 0.20, 0.25, 0.30, 0.40)
DEFAULT_N_BOOT = 1000

BOOTSTRAP_METRICS = ("recall", "efficiency", "fpr", "disparity", "intervention_rate")
_CI_METRICS = ("recall", "fpr", "disparity", "intervention_rate")


@dataclass(frozen=True)
class BootstrapSummary:
    metric: str
    mean: float
    std: float
    ci_low: float
    ci_high: float
    n_resamples: int


@dataclass(frozen=True)
class SweepRecord:
    """One factorial cell: thresholds from calibration, metrics from test."""

    dataset: str
    scorer: str
    alpha: float
    beta: float
    gamma: float
    capacity: float
    tau_free: float
    tau_capacity: float
    tau_star: float
    constraint_active: bool
    recall: float
    fpr: float
    disparity: float
    intervention_rate: float
    loss: float
    bootstrap: dict = None  # metric name -> BootstrapSummary, or None


@dataclass(frozen=True)
class SweepCase:
    """A pre-scored dataset/scorer pair with its three slices."""

    dataset_id: str
    scorer_id: str
    split: "SplitDataset"  # noqa: F821 - see data_io


def bootstrap(dataset: ScoredDataset, tau: float, n: int, seed) -> dict:
    """Resample rows with replacement n times; summarize metrics at fixed tau.

    Returns a map metric -> BootstrapSummary for recall, efficiency
    (1 - FPR), fpr, disparity and intervention rate, with percentile
    2.5/97.5 bounds. `seed` is anything `np.random.default_rng` accepts;
    results are deterministic per seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    n_rows = len(dataset)

    # category per row: (group, label, flagged); resample metrics only
    # depend on category counts, so each replicate is one bincount
    flagged = dataset.scores >= tau
    names = dataset.group_names()
    group_idx = np.searchsorted(np.array(names), dataset.groups.astype(str))
    cat = group_idx * 4 + dataset.labels * 2 + flagged
    n_cat = 4 * len(names)

    values = {m: np.empty(n) for m in BOOTSTRAP_METRICS}
    for i in range(n):
        counts = np.bincount(cat[rng.integers(0, n_rows, n_rows)], minlength=n_cat)
        by_group = counts.reshape(len(names), 4)  # columns: tn, fp, fn, tp
        fp = by_group[:, 1].sum()
        fn = by_group[:, 2].sum()
        tp = by_group[:, 3].sum()
        tn = by_group[:, 0].sum()
        fnr = fn / (tp + fn) if tp + fn else 0.0
        fpr = fp / (fp + tn) if fp + tn else 0.0
        pos_per_group = by_group[:, 2] + by_group[:, 3]
        with_pos = pos_per_group > 0
        if with_pos.sum() >= 2:
            tprs = by_group[with_pos, 3] / pos_per_group[with_pos]
            delta = tprs.max() - tprs.min()
        else:
            delta = 0.0
        values["recall"][i] = 1.0 - fnr
        values["efficiency"][i] = 1.0 - fpr
        values["fpr"][i] = fpr
        values["disparity"][i] = delta
        values["intervention_rate"][i] = (tp + fp) / n_rows

    out = {}
    for metric, v in values.items():
        lo, hi = np.percentile(v, [2.5, 97.5])
        out[metric] = BootstrapSummary(
            metric=metric,
            mean=float(v.mean()),
            std=float(v.std()),
            ci_low=float(lo),
            ci_high=float(hi),
            n_resamples=n,
        )
    return out


def _cell_seed(master_seed: int, case_index: int, cell_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(case_index, cell_index))


def _as_cases(cases) -> list[SweepCase]:
    from .data_io import SplitDataset

    if isinstance(cases, SplitDataset):
        return [SweepCase("dataset", "scores", cases)]
    if isinstance(cases, SweepCase):
        return [cases]
    return list(cases)


def run_sweep(
    cases,
    alphas=DEFAULT_ALPHAS,
    betas=DEFAULT_BETAS,
    gammas=DEFAULT_GAMMAS,
    capacities=(DEFAULT_CAPACITY,),
    n_boot: int = DEFAULT_N_BOOT,
    seed: int = 42,
    grid_step: float = DEFAULT_GRID_STEP,
) -> list:
    """Factorial engine shared by `factorial_sweep` and `capacity_ablation`."""
    for grid_name, grid_vals in (("alphas", alphas), ("betas", betas), ("gammas", gammas)):
        if len(tuple(grid_vals)) == 0:
            raise ValueError(f"{grid_name} grid must be non-empty")
    records = []
    for case_index, case in enumerate(_as_cases(cases)):
        split = case.split
        if split.validation is None or split.test is None:
            raise ValueError("sweep needs validation and test slices")
        grid = default_grid(split.validation, grid_step)
        cells = itertools.product(alphas, betas, gammas, capacities)
        for cell_index, (alpha, beta, gamma, cap) in enumerate(cells):
            weights = EthicalWeights(alpha, beta, gamma)
            decision = deploy(split.validation, grid, weights, Capacity(cap))
            rates = confusion(split.test, decision.tau_star)
            delta = disparity(split.test, decision.tau_star).delta
            loss = (
                weights.alpha * rates.fnr
                + weights.beta * rates.fpr
                + weights.gamma * delta
            )
            summaries = None
            if n_boot > 0:
                rng_seed = _cell_seed(seed, case_index, cell_index)
                summaries = bootstrap(
                    split.test, decision.tau_star, n_boot, rng_seed
                )
            records.append(
                SweepRecord(
                    dataset=case.dataset_id,
                    scorer=case.scorer_id,
                    alpha=alpha,
                    beta=beta,
                    gamma=gamma,
                    capacity=cap,
                    tau_free=decision.tau_free,
                    tau_capacity=decision.tau_capacity,
                    tau_star=decision.tau_star,
                    constraint_active=decision.constraint_active,
                    recall=rates.recall,
                    fpr=rates.fpr,
                    disparity=delta,
                    intervention_rate=rates.intervention_rate,
                    loss=loss,
                    bootstrap=summaries,
                )
            )
    return records


def factorial_sweep(
    cases,
    alphas=DEFAULT_ALPHAS,
    betas=DEFAULT_BETAS,
    gammas=DEFAULT_GAMMAS,
    capacity: float = DEFAULT_CAPACITY,
    n_boot: int = DEFAULT_N_BOOT,
    seed: int = 42,
    grid_step: float = DEFAULT_GRID_STEP,
) -> list:
    """Full factorial weight sweep at one capacity (36 cells by default)."""
    return run_sweep(
        cases, alphas, betas, gammas, (capacity,), n_boot, seed, grid_step
    )


def capacity_ablation(
    cases,
    alphas=DEFAULT_ALPHAS,
    betas=DEFAULT_BETAS,
    gammas=DEFAULT_GAMMAS,
    capacities=ABLATION_CAPACITIES,
    n_boot: int = DEFAULT_N_BOOT,
    seed: int = 42,
    grid_step: float = DEFAULT_GRID_STEP,
) -> list:
    """The weight sweep repeated across a ladder of capacity levels."""
    for c in capacities:
        Capacity(c)  # validate early
    return run_sweep(cases, alphas, betas, gammas, capacities, n_boot, seed, grid_step)


def activation_rate(records) -> float:
    """Fraction of sweep records where the capacity constraint was binding."""
    records = list(records)
    if not records:
        raise ValueError("empty record list")
    return sum(r.constraint_active for r in records) / len(records)


def sweep_columns() -> list:
    cols = [
        "dataset", "scorer", "alpha", "beta", "gamma", "capacity",
        "tau_free", "tau_capacity", "tau_star", "constraint_active",
        "recall", "fpr", "disparity", "intervention_rate", "loss",
    ]
    for m in _CI_METRICS:
        cols += [f"{m}_ci_low", f"{m}_ci_high", f"{m}_boot_mean", f"{m}_boot_std"]
    return cols


def record_to_dict(record: SweepRecord) -> dict:
    """Flat mapping with the CSV column names (shared with the JSON API)."""
    row = {
        "dataset": str(record.dataset),
        "scorer": str(record.scorer),
        "alpha": float(record.alpha),
        "beta": float(record.beta),
        "gamma": float(record.gamma),
        "capacity": float(record.capacity),
        "tau_free": float(record.tau_free),
        "tau_capacity": float(record.tau_capacity),
        "tau_star": float(record.tau_star),
        "constraint_active": bool(record.constraint_active),
        "recall": float(record.recall),
        "fpr": float(record.fpr),
        "disparity": float(record.disparity),
        "intervention_rate": float(record.intervention_rate),
        "loss": float(record.loss),
    }
    for m in _CI_METRICS:
        summary = record.bootstrap.get(m) if record.bootstrap else None
        row[f"{m}_ci_low"] = float(summary.ci_low) if summary else None
        row[f"{m}_ci_high"] = float(summary.ci_high) if summary else None
        row[f"{m}_boot_mean"] = float(summary.mean) if summary else None
        row[f"{m}_boot_std"] = float(summary.std) if summary else None
    return row


def write_sweep_csv(records, path_or_file) -> None:
    """One row per factorial cell; empty cells for absent bootstrap fields."""
    if hasattr(path_or_file, "write"):
        _write_csv(records, path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            _write_csv(records, fh)


def _write_csv(records, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=sweep_columns())
    writer.writeheader()
    for record in records:
        row = record_to_dict(record)
        row["constraint_active"] = "true" if row["constraint_active"] else "false"
        writer.writerow(
            {k: ("" if v is None else v) for k, v in row.items()}
        )


def sweep_csv_text(records) -> str:
    buf = io.StringIO()
    _write_csv(records, buf)
    return buf.getvalue()
