"""Command-line entry points.

Exit codes: 0 on success, 1 on unexpected runtime failure, 2 on usage or
validation errors. The master seed defaults to 42, can be overridden by
the CAPGATE_SEED environment variable, and an explicit --seed flag beats
both.
"""

import argparse
import json
import os
import sys

from .data_io import (
    GroupSpec,
    SyntheticSpec,
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
    default_grid,
)
from .evaluation import (
    ABLATION_CAPACITIES,
    DEFAULT_N_BOOT,
    DEFAULT_CAPACITY,
    SweepCase,
    activation_rate,
    capacity_ablation,
    factorial_sweep,
    record_to_dict,
    write_sweep_csv,
)
from .metrics import confusion, disparity
from .optimizer import deploy
from .policies import PolicySpec, evaluate_policy


def _resolve_seed(flag_value) -> int:
    if flag_value is not None:
        return int(flag_value)
    env = os.environ.get("CAPGATE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"CAPGATE_SEED must be an integer, got {env!r}") from None
    return 42


def _float_list(text: str) -> list:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _group_spec(text: str) -> GroupSpec:
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"expected NAME:SIZE:SHAPE_A:SHAPE_B, got {text!r}"
        )
    try:
        return GroupSpec(parts[0], int(parts[1]), float(parts[2]), float(parts[3]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_weight_args(parser) -> None:
    parser.add_argument("--alpha", type=float, default=1.0, help="miss-cost weight")
    parser.add_argument("--beta", type=float, default=1.0, help="false-alarm weight")
    parser.add_argument("--gamma", type=float, default=1.0, help="disparity weight")


def _add_common_args(parser, capacity_default: float = 1.0) -> None:
    parser.add_argument("--data", required=True, help="score,label,group CSV")
    _add_weight_args(parser)
    parser.add_argument(
        "--capacity", type=float, default=capacity_default,
        help="maximum flagged fraction, in (0, 1]",
    )
    parser.add_argument(
        "--grid-step", type=float, default=DEFAULT_GRID_STEP,
        help="threshold ladder spacing (1.0 keeps only observed scores)",
    )
    parser.add_argument(
        "--split", action="store_true",
        help="stratified 50/20/30 split: calibrate on validation, report on test",
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output", help="write machine-readable results here")


def _load_slices(args, seed):
    dataset = load_csv(args.data)
    if args.split:
        parts = stratified_split(dataset, seed=seed)
        return parts.validation, parts.test
    return dataset, dataset


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _print_table(rows, out=None) -> None:
    for key, value in rows:
        print(f"{key:<20}{_fmt(value)}", file=out or sys.stdout)


def cmd_deploy(args) -> int:
    seed = _resolve_seed(args.seed)
    calibration, evaluation = _load_slices(args, seed)
    weights = EthicalWeights(args.alpha, args.beta, args.gamma)
    capacity = Capacity(args.capacity)
    grid = default_grid(calibration, args.grid_step)
    decision = deploy(calibration, grid, weights, capacity)
    rates = confusion(evaluation, decision.tau_star)
    report = disparity(evaluation, decision.tau_star)
    loss = (
        weights.alpha * rates.fnr + weights.beta * rates.fpr + weights.gamma * report.delta
    )
    feasible = rates.intervention_rate <= capacity.c + 1e-12
    rows = [
        ("tau_free", decision.tau_free),
        ("tau_capacity", decision.tau_capacity),
        ("tau_star", decision.tau_star),
        ("constraint_active", decision.constraint_active),
        ("critical_capacity", decision.critical_capacity),
        ("residual_infeasible", decision.residual_infeasible),
        ("recall", rates.recall),
        ("fpr", rates.fpr),
        ("disparity", report.delta),
        ("intervention_rate", rates.intervention_rate),
        ("loss", loss),
        ("feasible", feasible),
    ]
    _print_table(rows)
    if args.output:
        payload = {key: value for key, value in rows}
        with open(args.output, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_baselines(args) -> int:
    seed = _resolve_seed(args.seed)
    calibration, evaluation = _load_slices(args, seed)
    weights = EthicalWeights(args.alpha, args.beta, args.gamma)
    capacity = Capacity(args.capacity)
    grid = default_grid(calibration, args.grid_step)
    decision = deploy(calibration, grid, weights, capacity)
    specs = [
        PolicySpec(PolicyId.PROPOSED_FRAMEWORK),
        PolicySpec(PolicyId.PERFORMANCE_OPTIMAL),
        PolicySpec(PolicyId.RISK_AVERSE),
        PolicySpec(PolicyId.INCLUSION_ORIENTED),
        PolicySpec(PolicyId.FAIRNESS_AWARE, {"tau_base": decision.tau_star}),
        PolicySpec(PolicyId.DEMOGRAPHIC_PARITY),
        PolicySpec(PolicyId.EQUALIZED_ODDS, {"seed": seed}),
        PolicySpec(PolicyId.RANDOM_ALLOCATION, {"seed": seed}),
        PolicySpec(PolicyId.UNCONSTRAINED),
    ]
    header = (
        f"{'policy':<22}{'tau':>12}{'recall':>10}{'fpr':>10}"
        f"{'disparity':>11}{'rate':>10}{'loss':>10}  feasible"
    )
    print(header)
    results = []
    for spec in specs:
        try:
            res = evaluate_policy(
                spec, evaluation, grid, weights, capacity, calibration=calibration
            )
        except ValueError as exc:
            print(f"{spec.id.value:<22}  skipped: {exc}")
            results.append({"policy": spec.id.value, "error": str(exc)})
            continue
        tau_text = res.tau if isinstance(res.tau, str) else f"{res.tau:.6f}"
        print(
            f"{spec.id.value:<22}{tau_text:>12}{res.confusion.recall:>10.4f}"
            f"{res.confusion.fpr:>10.4f}{res.disparity.delta:>11.4f}"
            f"{res.intervention_rate:>10.4f}{res.loss:>10.4f}  {_fmt(res.feasible)}"
        )
        results.append(
            {
                "policy": spec.id.value,
                "tau": res.tau if isinstance(res.tau, str) else float(res.tau),
                "recall": float(res.confusion.recall),
                "fpr": float(res.confusion.fpr),
                "disparity": float(res.disparity.delta),
                "intervention_rate": float(res.intervention_rate),
                "loss": float(res.loss),
                "feasible": bool(res.feasible),
            }
        )
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(results, fh, indent=2)
            fh.write("\n")
    return 0


def _sweep_common(parser) -> None:
    parser.add_argument("--data", required=True, help="score,label,group CSV")
    parser.add_argument("--dataset-id", default="dataset")
    parser.add_argument("--scorer-id", default="scores")
    parser.add_argument("--alphas", type=_float_list, default=[1.0, 2.0, 3.0])
    parser.add_argument("--betas", type=_float_list, default=[0.5, 1.0, 1.5])
    parser.add_argument("--gammas", type=_float_list, default=[0.5, 1.0, 1.5, 2.0])
    parser.add_argument("--n-boot", type=int, default=DEFAULT_N_BOOT)
    parser.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output", help="destination file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _emit_records(records, args) -> None:
    if args.format == "json":
        payload = {
            "records": [record_to_dict(r) for r in records],
            "activation_rate": activation_rate(records),
        }
        text = json.dumps(payload, indent=2) + "\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        if args.output:
            write_sweep_csv(records, args.output)
        else:
            write_sweep_csv(records, sys.stdout)
    n_active = sum(r.constraint_active for r in records)
    print(
        f"{len(records)} cells, constraint active in {n_active} "
        f"({100.0 * activation_rate(records):.1f}%)",
        file=sys.stderr,
    )


def _sweep_case(args, seed) -> SweepCase:
    dataset = load_csv(args.data)
    parts = stratified_split(dataset, seed=seed)
    return SweepCase(args.dataset_id, args.scorer_id, parts)


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    case = _sweep_case(args, seed)
    records = factorial_sweep(
        case,
        alphas=args.alphas,
        betas=args.betas,
        gammas=args.gammas,
        capacity=args.capacity,
        n_boot=args.n_boot,
        seed=seed,
        grid_step=args.grid_step,
    )
    _emit_records(records, args)
    return 0


def cmd_ablate(args) -> int:
    seed = _resolve_seed(args.seed)
    case = _sweep_case(args, seed)
    records = capacity_ablation(
        case,
        alphas=args.alphas,
        betas=args.betas,
        gammas=args.gammas,
        capacities=args.capacities,
        n_boot=args.n_boot,
        seed=seed,
        grid_step=args.grid_step,
    )
    _emit_records(records, args)
    return 0


def cmd_synth(args) -> int:
    seed = _resolve_seed(args.seed)
    spec = SyntheticSpec(groups=tuple(args.group), seed=seed)
    dataset = generate_synthetic(spec)
    save_csv(dataset, args.output)
    print(
        f"wrote {len(dataset)} rows to {args.output} "
        f"(base rate {dataset.base_rate:.4f})"
    )
    return 0


def cmd_split(args) -> int:
    seed = _resolve_seed(args.seed)
    dataset = load_csv(args.data)
    parts = stratified_split(dataset, fractions=args.fractions, seed=seed)
    for name, slice_ in (
        ("train", parts.train),
        ("validation", parts.validation),
        ("test", parts.test),
    ):
        path = f"{args.out_prefix}_{name}.csv"
        save_csv(slice_, path)
        print(f"wrote {len(slice_)} rows to {path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import DatasetRegistry, create_app, make_demo_registry

    seed = _resolve_seed(args.seed)
    if args.demo:
        registry = make_demo_registry(seed)
    else:
        registry = DatasetRegistry()
    for item in args.data or []:
        if "=" not in item:
            raise ValueError(f"--data expects NAME=PATH, got {item!r}")
        name, path = item.split("=", 1)
        registry.register(name, load_csv(path), split=True, seed=seed)
    app = create_app(registry, master_seed=seed, cors_origins=args.cors_origin)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capgate",
        description="Capacity-feasible threshold policies over risk scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deploy", help="calibrate and report the deployment threshold")
    _add_common_args(p)
    p.set_defaults(func=cmd_deploy)

    p = sub.add_parser("baselines", help="compare the framework with reference policies")
    _add_common_args(p)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("sweep", help="factorial weight sweep at a fixed capacity")
    _sweep_common(p)
    p.add_argument("--capacity", type=float, default=DEFAULT_CAPACITY)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate", help="weight sweep across a ladder of capacities")
    _sweep_common(p)
    p.add_argument("--capacities", type=_float_list, default=list(ABLATION_CAPACITIES))
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("synth", help="generate a calibrated synthetic cohort")
    p.add_argument(
        "--group", type=_group_spec, action="append", required=True,
        metavar="NAME:SIZE:SHAPE_A:SHAPE_B",
        help="one group of the cohort; repeat for several groups",
    )
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="stratified train/validation/test split")
    p.add_argument("--data", required=True)
    p.add_argument("--fractions", type=_float_list, default=[0.5, 0.2, 0.3])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("serve", help="run the JSON API server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data", action="append", metavar="NAME=PATH")
    p.add_argument("--demo", action="store_true", help="preload demo datasets")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cors-origin", action="append", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "cors_origin", None) is None and args.command == "serve":
        args.cors_origin = ["*"]
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 1
    except Exception as exc:  # unexpected failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
