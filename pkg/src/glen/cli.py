"""Command line front-end.

Subcommands:
  simulate   draw a synthetic dataset and write it to disk
  fit        run the estimator on a CSV matrix of observations
  evaluate   score an estimated Laplacian against a ground truth
  benchmark  run the full synthetic suite and export records + summary
  baseline   CGL fit on the log-transformed covariance of count data

All subcommands exit 0 on success and nonzero with an `error:` line on
stderr otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import (
    ExperimentConfig,
    cgl_baseline,
    config_from_json,
    export_report,
    ingest_csv_matrix,
    run_suite,
)
from .estimator import GlenConfig, run_glen, save_state
from .graphs import save_matrix_csv
from .metrics import evaluate
from .simulate import SyntheticDatasetSpec, generate_dataset, graph_spec_from_json, save_dataset


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _cmd_simulate(args) -> int:
    cfg = _load_json(args.config)
    spec = SyntheticDatasetSpec(
        graph_spec=graph_spec_from_json(cfg["graph_spec"]),
        family=args.family or cfg.get("family", "poisson"),
        n_signals=cfg.get("n_signals", 2000),
        offset=cfg.get("offset", "two-level"),
        seed=args.seed if args.seed is not None else cfg.get("seed", 0),
    )
    gi = cfg.get("graph_index", 0)
    ds = generate_dataset(spec, gi)
    save_dataset(ds, args.out, spec, gi)
    print(f"wrote dataset ({ds.n_nodes} nodes, {ds.n_signals} signals) to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    X = ingest_csv_matrix(args.data)
    overrides = _load_json(args.config) if args.config else {}
    overrides.setdefault("family", args.family or "poisson")
    if args.method == "glen-vi":
        overrides["variant"] = "vi"
    elif args.method == "glen-tv":
        overrides.setdefault("gamma", 0.5)
    cfg = GlenConfig(**overrides)
    state = run_glen(X, cfg)
    save_state(state, cfg, args.out)
    print(f"fit finished in {state.iterations} outer iterations "
          f"(converged={state.converged}); wrote {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    L_hat = ingest_csv_matrix(args.estimate)
    L0 = ingest_csv_matrix(args.truth)
    report = evaluate(L_hat, L0)
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_benchmark(args) -> int:
    if args.config:
        cfg = config_from_json(_load_json(args.config))
    else:
        cfg = ExperimentConfig()
    if args.seed is not None:
        cfg = ExperimentConfig(**{**cfg.__dict__, "seed": args.seed})
    records = run_suite(cfg, n_workers=args.threads)
    export_report(records, args.out)
    n_fail = sum(not r.converged for r in records)
    print(f"{len(records)} runs ({n_fail} failed); report in {args.out}")
    return 0


def _cmd_baseline(args) -> int:
    X = ingest_csv_matrix(args.data)
    L = cgl_baseline(X, args.alpha)
    out = Path(args.out)
    if out.suffix == ".csv":
        out.parent.mkdir(parents=True, exist_ok=True)
        save_matrix_csv(out, L)
    else:
        out.mkdir(parents=True, exist_ok=True)
        save_matrix_csv(out / "L.csv", L)
    print(f"wrote baseline Laplacian to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="glen",
                                description="Graph Laplacian estimation from "
                                            "exponential-family signals")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="generate a synthetic dataset")
    ps.add_argument("--config", required=True, help="JSON dataset spec")
    ps.add_argument("--out", required=True)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--family", default=None)
    ps.set_defaults(func=_cmd_simulate)

    pf = sub.add_parser("fit", help="fit the estimator to observations")
    pf.add_argument("data", help="CSV matrix, nodes x signals")
    pf.add_argument("--config", default=None, help="JSON estimator config")
    pf.add_argument("--out", required=True)
    pf.add_argument("--family", default=None)
    pf.add_argument("--method", default="glen",
                    choices=["glen", "glen-vi", "glen-tv"])
    pf.set_defaults(func=_cmd_fit)

    pe = sub.add_parser("evaluate", help="score an estimate against truth")
    pe.add_argument("estimate", help="CSV Laplacian estimate")
    pe.add_argument("truth", help="CSV ground-truth Laplacian")
    pe.add_argument("--out", default=None)
    pe.set_defaults(func=_cmd_evaluate)

    pb = sub.add_parser("benchmark", help="run the synthetic benchmark suite")
    pb.add_argument("--config", default=None, help="JSON experiment config")
    pb.add_argument("--out", required=True)
    pb.add_argument("--seed", type=int, default=None)
    pb.add_argument("--threads", type=int, default=1)
    pb.set_defaults(func=_cmd_benchmark)

    pc = sub.add_parser("baseline", help="CGL on log-transformed covariance")
    pc.add_argument("data", help="CSV count matrix, nodes x signals")
    pc.add_argument("--alpha", type=float, default=0.05)
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=_cmd_baseline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
