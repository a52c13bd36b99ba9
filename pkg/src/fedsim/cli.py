"""Command-line entry point.

    fedsim run --config exp.json [--metrics out.csv] [--overlap-report hist.csv]
    fedsim partition-report --config exp.json [--out parts.json]
    fedsim overlap-report --config exp.json --out hist.csv
    fedsim sweep --config exp.json --param alpha --values 0.01 0.1 0.3
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ExperimentConfig, load_config
from .data import partition_summary
from .errors import FedSimError
from .orchestrator import fmt, init_state, run_experiment

ALPHA_SWEEP = (0.01, 0.03, 0.1, 0.3, 1.0)


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if getattr(args, "metrics", None):
        overrides["metrics_csv"] = args.metrics
    if getattr(args, "overlap_report", None):
        overrides["overlap_csv"] = args.overlap_report
    if getattr(args, "model_out", None):
        overrides["model_out"] = args.model_out
    return cfg.replace(**overrides) if overrides else cfg


def cmd_run(args) -> int:
    cfg = _config(args)
    reports = run_experiment(cfg)
    last = reports[-1]
    print(
        f"{cfg.algorithm}: {len(reports)} rounds, test_acc={fmt(last.test_acc)}, "
        f"cum_actual={fmt(last.cum_actual)}s"
    )
    return 0


def cmd_partition_report(args) -> int:
    cfg = _config(args)
    state = init_state(cfg)
    summary = partition_summary(state.train.labels, state.partition, state.spec.n_classes)
    text = json.dumps(summary, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_overlap_report(args) -> int:
    cfg = _config(args).replace(overlap_csv=args.out)
    run_experiment(cfg)
    return 0


def _suffixed(path: str | None, param: str, value: float) -> str | None:
    if path is None:
        return None
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{param}{value:g}{p.suffix}"))


def cmd_sweep(args) -> int:
    cfg = _config(args)
    values = args.values
    if not values:
        if args.param != "alpha":
            print("--values is required for a gamma sweep", file=sys.stderr)
            return 2
        values = list(ALPHA_SWEEP)
    print("param,value,final_acc,best_acc,cum_actual")
    for v in values:
        run_cfg = cfg.replace(
            **{args.param: v},
            metrics_csv=_suffixed(cfg.metrics_csv, args.param, v),
            overlap_csv=_suffixed(cfg.overlap_csv, args.param, v),
            model_out=None,
        )
        reports = run_experiment(run_cfg)
        best = max(r.test_acc for r in reports)
        print(f"{args.param},{fmt(v)},{fmt(reports[-1].test_acc)},{fmt(best)},{fmt(reports[-1].cum_actual)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedsim", description="Compressed federated learning simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log every round")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="flat JSON experiment config")
        return p

    p = with_config(sub.add_parser("run", help="run one experiment"))
    p.add_argument("--metrics", help="metrics CSV path (overrides metrics_csv)")
    p.add_argument("--overlap-report", help="also write the per-round overlap histogram CSV")
    p.add_argument("--model-out", help="save the final global model (.npy)")
    p.set_defaults(func=cmd_run)

    p = with_config(sub.add_parser("partition-report", help="per-client class counts as JSON"))
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_partition_report)

    p = with_config(sub.add_parser("overlap-report", help="per-round overlap histogram CSV"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_overlap_report)

    p = with_config(sub.add_parser("sweep", help="repeat a run over alpha or gamma values"))
    p.add_argument("--param", choices=("alpha", "gamma"), required=True)
    p.add_argument("--values", type=float, nargs="*")
    p.add_argument("--metrics", help="metrics CSV path; each run gets a _<param><value> suffix")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (FedSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
