"""Command-line entry point: run one policy, a policy pair, or a W sweep."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .model import WeightsConfig
from .simulator import SimConfig, WorkloadConfig, run, POLICIES
from .metrics import emit_report, compare_reports

WEIGHT_KEYS = {
    "gamma_t", "gamma_p", "gamma_n", "gamma_m",
    "conversion_rate_r", "max_rounds_w", "tau_s",
}
WORKLOAD_KEYS = {
    "task_arrival_rate", "source_arrival_rate", "cycles_range", "value_range",
    "deadline_range", "idle_range", "rate_range", "device_count",
}
TOP_KEYS = {"steps", "step_seconds", "rng_seed", "policy", "weights", "workload"}


class ConfigError(Exception):
    pass


def _check_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def load_scenario(path: Path) -> dict:
    """Load and structurally validate a scenario JSON file."""
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    _check_keys(raw, TOP_KEYS, str(path))
    _check_keys(raw.get("weights", {}), WEIGHT_KEYS, f"{path}:weights")
    _check_keys(raw.get("workload", {}), WORKLOAD_KEYS, f"{path}:workload")
    return raw


def build_config(scenario: dict, overrides: dict) -> SimConfig:
    """Merge file values with flag overrides (flags win) into a SimConfig."""
    weights = dict(scenario.get("weights", {}))
    workload = dict(scenario.get("workload", {}))
    top = {k: v for k, v in scenario.items() if k not in ("weights", "workload")}
    for key, value in overrides.items():
        if value is None:
            continue
        if key in WEIGHT_KEYS:
            weights[key] = value
        elif key in WORKLOAD_KEYS:
            workload[key] = value
        else:
            top[key] = value
    for section in (workload,):
        for key in ("cycles_range", "value_range", "deadline_range", "idle_range", "rate_range"):
            if key in section:
                section[key] = tuple(section[key])
    try:
        return SimConfig(
            weights=WeightsConfig(**weights),
            workload=WorkloadConfig(**workload),
            **top,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(config: SimConfig) -> dict:
    d = dataclasses.asdict(config)
    for key in ("cycles_range", "value_range", "deadline_range", "idle_range", "rate_range"):
        d["workload"][key] = list(d["workload"][key])
    return d


def _add_override_flags(p: argparse.ArgumentParser, with_policy: bool = True):
    p.add_argument("--config", type=Path, help="scenario JSON file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, dest="rng_seed")
    p.add_argument("--steps", type=int)
    p.add_argument("--step-seconds", type=float, dest="step_seconds")
    if with_policy:
        p.add_argument("--policy", choices=POLICIES)
    p.add_argument("--gamma-t", type=float, dest="gamma_t")
    p.add_argument("--gamma-p", type=float, dest="gamma_p")
    p.add_argument("--gamma-n", type=float, dest="gamma_n")
    p.add_argument("--gamma-m", type=float, dest="gamma_m")
    p.add_argument("--conversion-rate", type=float, dest="conversion_rate_r")
    p.add_argument("--max-rounds-w", type=int, dest="max_rounds_w")
    p.add_argument("--tau", type=float, dest="tau_s")
    p.add_argument("--task-rate", type=float, dest="task_arrival_rate")
    p.add_argument("--source-rate", type=float, dest="source_arrival_rate")
    p.add_argument("--device-count", type=int, dest="device_count")
    for flag, dest in (
        ("--cycles-range", "cycles_range"),
        ("--value-range", "value_range"),
        ("--deadline-range", "deadline_range"),
        ("--idle-range", "idle_range"),
        ("--rate-range", "rate_range"),
    ):
        p.add_argument(flag, type=_parse_range, dest=dest, metavar="LO,HI")


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_w_values(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad W list {text!r}: {exc}")
    if not values:
        raise argparse.ArgumentTypeError("W list is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crlsim",
        description="Simulate priority-based leasing of idle local compute versus cloud offloading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single policy and write its report")
    _add_override_flags(p_run)

    p_cmp = sub.add_parser("compare", help="run both policies on one seed and summarize deltas")
    _add_override_flags(p_cmp, with_policy=False)

    p_sweep = sub.add_parser("sweep-w", help="run the leasing policy across several retry limits")
    _add_override_flags(p_sweep, with_policy=False)
    p_sweep.add_argument("--w-values", type=_parse_w_values, default=[1, 2, 3, 5], metavar="W1,W2,...")
    return parser


OVERRIDE_DESTS = (
    ["rng_seed", "steps", "step_seconds", "policy"]
    + sorted(WEIGHT_KEYS)
    + sorted(WORKLOAD_KEYS)
)


def _gather_overrides(args) -> dict:
    return {k: getattr(args, k) for k in OVERRIDE_DESTS if getattr(args, k, None) is not None}


def _prepare(args) -> tuple[SimConfig, str]:
    scenario: dict = {}
    name = "default"
    if args.config is not None:
        if not args.config.exists():
            raise ConfigError(f"config file not found: {args.config}")
        scenario = load_scenario(args.config)
        name = args.config.stem
    return build_config(scenario, _gather_overrides(args)), name


def _write_effective_config(config: SimConfig, out_dir: Path):
    (out_dir / "effective_config.json").write_text(
        json.dumps(config_to_dict(config), indent=2) + "\n"
    )


def _report_path(out_dir: Path, name: str, policy: str, seed: int, fmt: str) -> Path:
    return out_dir / f"{name}_{policy}_seed{seed}.{fmt}"


def _run_and_write(config: SimConfig, name: str, out_dir: Path, fmt: str):
    report = run(config)
    path = _report_path(out_dir, name, config.policy, config.rng_seed, fmt)
    emit_report(report, fmt, path)
    return report, path


def cmd_run(args) -> int:
    config, name = _prepare(args)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_effective_config(config, args.out)
    report, path = _run_and_write(config, name, args.out, args.format)
    final = report.samples[-1]
    print(f"policy={config.policy} steps={config.steps} seed={config.rng_seed}")
    print(f"  matched={report.matched_tasks} migrated={report.migrated_tasks} pending={report.pending_tasks}")
    print(f"  final idle_capacity={final.idle_capacity:.1f} migrated_value_cum={final.migrated_value_cum:.1f}")
    print(f"  report: {path}")
    return 0


def cmd_compare(args) -> int:
    config, name = _prepare(args)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_effective_config(config, args.out)
    reports = {}
    for policy in POLICIES:
        cfg = dataclasses.replace(config, policy=policy)
        reports[policy], _ = _run_and_write(cfg, name, args.out, args.format)
    summary = compare_reports(reports["crl"], reports["cloud"])
    summary_path = args.out / f"{name}_compare_seed{config.rng_seed}.json"
    summary_path.write_text(
        json.dumps(
            {
                "mean_idle_capacity_crl": summary.mean_idle_capacity_a,
                "mean_idle_capacity_cloud": summary.mean_idle_capacity_b,
                "mean_migrated_value_cum_crl": summary.mean_migrated_value_cum_a,
                "mean_migrated_value_cum_cloud": summary.mean_migrated_value_cum_b,
                "frac_steps_idle_crl_le_cloud": summary.frac_idle_capacity_a_le_b,
                "frac_steps_migrated_crl_le_cloud": summary.frac_migrated_a_le_b,
            },
            indent=2,
        )
        + "\n"
    )
    print(f"compare seed={config.rng_seed} steps={config.steps}")
    print(f"  mean idle capacity: crl={summary.mean_idle_capacity_a:.1f} cloud={summary.mean_idle_capacity_b:.1f}")
    print(
        "  final migrated value: "
        f"crl={reports['crl'].samples[-1].migrated_value_cum:.1f} "
        f"cloud={reports['cloud'].samples[-1].migrated_value_cum:.1f}"
    )
    print(f"  summary: {summary_path}")
    return 0


def cmd_sweep_w(args) -> int:
    config, name = _prepare(args)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_effective_config(config, args.out)
    print(f"W sweep seed={config.rng_seed} steps={config.steps} values={args.w_values}")
    for w in args.w_values:
        cfg = dataclasses.replace(
            config,
            policy="crl",
            weights=dataclasses.replace(config.weights, max_rounds_w=w),
        )
        report, path = _run_and_write(cfg, f"{name}_w{w}", args.out, args.format)
        print(
            f"  W={w}: migrated_value_cum={report.samples[-1].migrated_value_cum:.1f} "
            f"migrated_tasks={report.migrated_tasks} ({path.name})"
        )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "compare": cmd_compare, "sweep-w": cmd_sweep_w}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
