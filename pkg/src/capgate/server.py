"""JSON API over the threshold engine, for UIs and remote callers.

Datasets are registered once (optionally split on arrival) and cached
with their threshold grid; every evaluate call calibrates on the
validation slice and reports metrics on the test slice. Responses carry
plain Python floats only, so identical requests serialize to identical
bytes.
"""

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .data_io import GroupSpec, SplitDataset, SyntheticSpec, generate_synthetic, stratified_split
from .dataset import (
    Capacity,
    DEFAULT_GRID_STEP,
    EthicalWeights,
    PolicyId,
    ScoredDataset,
    ThresholdGrid,
    default_grid,
)
from .evaluation import activation_rate, record_to_dict, run_sweep, SweepCase
from .metrics import confusion, disparity
from .optimizer import deploy, loss_curve
from .policies import PolicySpec, evaluate_policy

MAX_SWEEP_CELLS = 500
MAX_CURVE_POINTS = 512


@dataclass
class RegistryEntry:
    dataset_id: str
    split: SplitDataset
    grid: ThresholdGrid
    grid_step: float
    n: int
    base_rate: float
    groups: list

    def summary(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "n": self.n,
            "base_rate": self.base_rate,
            "groups": self.groups,
            "n_validation": len(self.split.validation),
            "n_test": len(self.split.test),
        }


class DatasetRegistry:
    """Named datasets with precomputed grids; registration is serialized."""

    def __init__(self):
        self._entries: dict = {}
        self._lock = threading.Lock()

    def register(
        self,
        dataset_id: str,
        dataset: ScoredDataset,
        split: bool = True,
        seed: int = 42,
        grid_step: float = DEFAULT_GRID_STEP,
    ) -> RegistryEntry:
        if dataset_id in self._entries:
            raise ValueError(f"dataset {dataset_id!r} is already registered")
        if split:
            parts = stratified_split(dataset, seed=seed)
        else:
            # tiny or demo data: calibrate and evaluate on the same rows
            parts = SplitDataset(None, dataset, dataset, (0.0, 1.0, 0.0), seed)
        return self.register_split(dataset_id, parts, dataset, grid_step)

    def register_split(
        self,
        dataset_id: str,
        parts: SplitDataset,
        full: Optional[ScoredDataset] = None,
        grid_step: float = DEFAULT_GRID_STEP,
    ) -> RegistryEntry:
        if full is None:
            full = parts.validation
        entry = RegistryEntry(
            dataset_id=dataset_id,
            split=parts,
            grid=default_grid(parts.validation, grid_step),
            grid_step=grid_step,
            n=len(full),
            base_rate=float(full.base_rate),
            groups=full.group_names(),
        )
        with self._lock:
            if dataset_id in self._entries:
                raise ValueError(f"dataset {dataset_id!r} is already registered")
            self._entries[dataset_id] = entry
        return entry

    def get(self, dataset_id: str) -> Optional[RegistryEntry]:
        return self._entries.get(dataset_id)

    def summaries(self) -> list:
        return [self._entries[k].summary() for k in sorted(self._entries)]


def make_demo_registry(seed: int = 42) -> DatasetRegistry:
    """Two ready-made datasets: a synthetic cohort and a four-row toy."""
    registry = DatasetRegistry()
    cohort = generate_synthetic(
        SyntheticSpec(
            groups=(GroupSpec("A", 600, 2.0, 5.0), GroupSpec("B", 400, 2.0, 2.0)),
            seed=seed,
        )
    )
    registry.register("demo", cohort, split=True, seed=seed)
    toy = ScoredDataset(
        np.array([0.1, 0.4, 0.6, 0.9]),
        np.array([0, 0, 1, 1]),
        np.array(["A", "A", "B", "B"], dtype=object),
    )
    # scores-only grid keeps the toy thresholds human-readable
    registry.register("fourpoint", toy, split=False, grid_step=1.0)
    return registry


class EvaluateRequest(BaseModel):
    dataset_id: str
    alpha: float = Field(default=1.0, ge=0)
    beta: float = Field(default=1.0, ge=0)
    gamma: float = Field(default=1.0, ge=0)
    capacity: float = Field(default=1.0, gt=0, le=1)
    include_baselines: bool = False
    include_curve: bool = False


class RegisterRequest(BaseModel):
    dataset_id: str = Field(min_length=1)
    scores: list
    labels: list
    groups: list
    split: bool = True
    seed: int = 42
    grid_step: float = Field(default=DEFAULT_GRID_STEP, gt=0, le=1)


class SweepRequest(BaseModel):
    dataset_id: str
    alphas: list = Field(default=[1.0, 2.0, 3.0])
    betas: list = Field(default=[0.5, 1.0, 1.5])
    gammas: list = Field(default=[0.5, 1.0, 1.5, 2.0])
    capacities: list = Field(default=[0.25])
    n_boot: int = Field(default=0, ge=0)
    seed: int = 42


def _downsample_curve(curve, limit: int = MAX_CURVE_POINTS) -> dict:
    n = len(curve)
    if n <= limit:
        idx = np.arange(n)
    else:
        idx = np.unique(np.round(np.linspace(0, n - 1, limit)).astype(int))
    return {
        "taus": [float(v) for v in curve.taus[idx]],
        "losses": [float(v) for v in curve.losses[idx]],
        "fnrs": [float(v) for v in curve.fnrs[idx]],
        "fprs": [float(v) for v in curve.fprs[idx]],
        "deltas": [float(v) for v in curve.deltas[idx]],
        "intervention_rates": [float(v) for v in curve.intervention_rates[idx]],
    }


def _outcome_dict(policy_name, tau, rates, report, loss, feasible) -> dict:
    return {
        "policy": policy_name,
        "tau": tau if isinstance(tau, str) else float(tau),
        "recall": float(rates.recall),
        "fpr": float(rates.fpr),
        "disparity": float(report.delta),
        "intervention_rate": float(rates.intervention_rate),
        "loss": float(loss),
        "feasible": bool(feasible),
    }


def _baseline_entries(entry, weights, capacity, tau_star, master_seed) -> list:
    specs = [
        PolicySpec(PolicyId.PROPOSED_FRAMEWORK),
        PolicySpec(PolicyId.PERFORMANCE_OPTIMAL),
        PolicySpec(PolicyId.RISK_AVERSE),
        PolicySpec(PolicyId.INCLUSION_ORIENTED),
        PolicySpec(PolicyId.FAIRNESS_AWARE, {"tau_base": tau_star}),
        PolicySpec(PolicyId.DEMOGRAPHIC_PARITY),
        PolicySpec(PolicyId.EQUALIZED_ODDS, {"seed": master_seed}),
        PolicySpec(PolicyId.RANDOM_ALLOCATION, {"seed": master_seed}),
        PolicySpec(PolicyId.UNCONSTRAINED),
    ]
    out = []
    for spec in specs:
        try:
            res = evaluate_policy(
                spec,
                entry.split.test,
                entry.grid,
                weights,
                capacity,
                calibration=entry.split.validation,
            )
        except ValueError as exc:
            out.append({"policy": spec.id.value, "error": str(exc)})
            continue
        out.append(
            _outcome_dict(
                spec.id.value, res.tau, res.confusion, res.disparity, res.loss, res.feasible
            )
        )
    return out


def create_app(
    registry: Optional[DatasetRegistry] = None,
    master_seed: int = 42,
    cors_origins=("*",),
) -> FastAPI:
    registry = registry if registry is not None else DatasetRegistry()
    app = FastAPI(title="capgate", docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get("/health", response_class=PlainTextResponse)
    async def health() -> str:
        return "ok"

    @app.get("/api/datasets")
    async def list_datasets() -> JSONResponse:
        return JSONResponse(registry.summaries())

    @app.post("/api/datasets")
    async def add_dataset(req: RegisterRequest) -> JSONResponse:
        try:
            dataset = ScoredDataset(
                np.asarray(req.scores, dtype=float),
                np.asarray(req.labels),
                np.asarray([str(g) for g in req.groups], dtype=object),
            )
            entry = registry.register(
                req.dataset_id, dataset, split=req.split, seed=req.seed,
                grid_step=req.grid_step,
            )
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return JSONResponse(entry.summary())

    @app.post("/api/evaluate")
    async def evaluate(req: EvaluateRequest) -> JSONResponse:
        entry = registry.get(req.dataset_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown dataset {req.dataset_id!r}")
        weights = EthicalWeights(req.alpha, req.beta, req.gamma)
        capacity = Capacity(req.capacity)
        decision = deploy(entry.split.validation, entry.grid, weights, capacity)
        rates = confusion(entry.split.test, decision.tau_star)
        report = disparity(entry.split.test, decision.tau_star)
        loss = (
            weights.alpha * rates.fnr
            + weights.beta * rates.fpr
            + weights.gamma * report.delta
        )
        body = {
            "dataset_id": req.dataset_id,
            "params": {
                "alpha": float(req.alpha),
                "beta": float(req.beta),
                "gamma": float(req.gamma),
                "capacity": float(req.capacity),
            },
            "decision": {
                "tau_free": float(decision.tau_free),
                "tau_capacity": float(decision.tau_capacity),
                "tau_star": float(decision.tau_star),
                "constraint_active": bool(decision.constraint_active),
                "critical_capacity": float(decision.critical_capacity),
                "loss_at_tau_star": float(decision.loss_at_tau_star),
                "residual_infeasible": bool(decision.residual_infeasible),
            },
            "metrics": {
                "recall": float(rates.recall),
                "fpr": float(rates.fpr),
                "disparity": float(report.delta),
                "intervention_rate": float(rates.intervention_rate),
                "loss": float(loss),
                "feasible": bool(
                    rates.intervention_rate <= capacity.c + 1e-12
                ),
            },
            "per_group_tpr": {k: float(v) for k, v in report.per_group_tpr.items()},
            "groups_excluded": list(report.groups_excluded),
            "baselines": None,
            "curve": None,
        }
        if req.include_baselines:
            body["baselines"] = _baseline_entries(
                entry, weights, capacity, decision.tau_star, master_seed
            )
        if req.include_curve:
            body["curve"] = _downsample_curve(
                loss_curve(entry.split.validation, entry.grid, weights)
            )
        return JSONResponse(body)

    @app.post("/api/sweep")
    async def sweep(req: SweepRequest) -> JSONResponse:
        entry = registry.get(req.dataset_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown dataset {req.dataset_id!r}")
        n_cells = (
            len(req.alphas) * len(req.betas) * len(req.gammas) * len(req.capacities)
        )
        if n_cells == 0:
            raise HTTPException(status_code=400, detail="empty parameter grid")
        if n_cells > MAX_SWEEP_CELLS:
            raise HTTPException(
                status_code=422,
                detail=f"{n_cells} cells exceeds the budget of {MAX_SWEEP_CELLS}",
            )
        try:
            records = run_sweep(
                SweepCase(req.dataset_id, "scores", entry.split),
                alphas=tuple(float(a) for a in req.alphas),
                betas=tuple(float(b) for b in req.betas),
                gammas=tuple(float(g) for g in req.gammas),
                capacities=tuple(float(c) for c in req.capacities),
                n_boot=req.n_boot,
                seed=req.seed,
                grid_step=entry.grid_step,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        rows = []
        for record in records:
            row = record_to_dict(record)
            rows.append(
                {k: (bool(v) if k == "constraint_active" else v) for k, v in row.items()}
            )
        return JSONResponse(
            {"records": rows, "activation_rate": float(activation_rate(records))}
        )

    return app
