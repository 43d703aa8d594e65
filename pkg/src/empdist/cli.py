"""Command line front end.

Subcommands: sweep, concentration, verify-theory, decompose,
chain-diagnose.  Every run is reproducible from its seed; the seed comes
from --seed, then the EMPDIST_SEED environment variable, then a fixed
default.  Exit code 0 means all checks passed, 2 means a check failed,
1 means the run itself errored.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import harness
from .harness import (
    DEFAULT_SEED,
    SWEEP_EXPERIMENTS,
    default_config,
    emit_outputs,
    run_chain_diagnostics,
    run_concentration,
    run_decompose,
    run_sweep,
    verify_theory_table,
)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("EMPDIST_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"EMPDIST_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def _parse_n_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"bad n grid {text!r}; expected comma-separated integers") from exc


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="empdist",
        description="empirical-measure convergence bounds: sweeps, tail checks, diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run an n-grid sweep of one estimator")
    sweep.add_argument("experiment", choices=SWEEP_EXPERIMENTS)
    sweep.add_argument("--config", help="JSON file with config fields (flags override it)")
    sweep.add_argument("--n", help="comma-separated n grid, e.g. 256,1024,4096")
    sweep.add_argument("--replicates", type=int)
    sweep.add_argument("-d", "--dimension", type=int, dest="d")
    sweep.add_argument("--q", type=float)
    sweep.add_argument("--s", type=float)
    sweep.add_argument("--depth-policy", choices=("paper_rule", "fixed"))
    sweep.add_argument("--fixed-depth", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--out-csv")
    sweep.add_argument("--out-json")
    sweep.add_argument("--out-plot")
    sweep.add_argument("--no-plot", action="store_true")

    conc = sub.add_parser("concentration", help="replicate ensemble with a tail-bound check")
    conc.add_argument("kind", nargs="?", choices=("iid", "markov"), default="iid")
    conc.add_argument("--n", type=int)
    conc.add_argument("--replicates", type=int)
    conc.add_argument("--t", type=float)
    conc.add_argument("--seed", type=int)
    conc.add_argument("--jobs", type=int, default=1)
    conc.add_argument("--out-json")
    conc.add_argument("--out-plot")
    conc.add_argument("--no-plot", action="store_true")

    verify = sub.add_parser("verify-theory", help="check frozen anchor values of the rate formulas")
    verify.add_argument("--out-json")

    deco = sub.add_parser("decompose", help="multiscale decomposition audit on random functions")
    deco.add_argument("--q", type=float, default=1.0)
    deco.add_argument("-d", "--dimension", type=int, dest="d", default=1)
    deco.add_argument("--depth", type=int, default=6)
    deco.add_argument("--count", type=int, default=20)
    deco.add_argument("--seed", type=int)
    deco.add_argument("--out-json")

    diag = sub.add_parser("chain-diagnose", help="coupling contraction and autocovariance probes")
    diag.add_argument("--kernel", choices=("inverse_doubling", "four_corners"), default="inverse_doubling")
    diag.add_argument("--pairs", type=int, default=64)
    diag.add_argument("--lag", type=int, default=8)
    diag.add_argument("--n", type=int, default=4096)
    diag.add_argument("--seed", type=int)
    diag.add_argument("--out-json")

    return parser


def _cmd_sweep(args) -> int:
    overrides: dict = {}
    if args.config:
        file_cfg = _load_config_file(args.config)
        file_cfg.pop("experiment", None)
        overrides.update(file_cfg)
    if args.n is not None:
        overrides["n_grid"] = _parse_n_grid(args.n)
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.d is not None:
        overrides["d"] = args.d
    if args.q is not None:
        overrides["q"] = args.q
    if args.s is not None:
        overrides["s"] = args.s
    if args.depth_policy is not None:
        overrides["depth_policy"] = args.depth_policy
    if args.fixed_depth is not None:
        overrides["fixed_depth"] = args.fixed_depth
    overrides["base_seed"] = _resolve_seed(args.seed)
    config = default_config(args.experiment, **overrides)

    result = run_sweep(config, jobs=args.jobs)

    out_csv = args.out_csv or f"empdist_{args.experiment}.csv"
    out_json = args.out_json or os.path.splitext(out_csv)[0] + ".json"
    payload = emit_outputs(result, out_csv=out_csv, out_json=out_json)

    for row in result.rows:
        print(
            f"n={row.n:>8d}  J={'-' if row.J is None else row.J:>3}  "
            f"mean={row.mean:.6g} +- {2 * row.stderr:.2g}  theory={row.theory_value:.6g}"
        )
    slope = payload["slope_fit"]
    print(f"slope {slope['slope']:.4f}  intercept {slope['intercept']:.4f}  r2 {slope['r_squared']:.4f}")
    print(f"min_C {payload['min_C']:.6g}")
    print(f"wrote {out_csv}")
    print(f"wrote {out_json}")

    if not args.no_plot:
        from .plots import default_plot_path, render_sweep_plot

        out_plot = args.out_plot or default_plot_path(out_csv)
        render_sweep_plot(result, out_plot)
        print(f"wrote {out_plot}")

    ok = True
    for name, check in payload["acceptance"].items():
        status = "PASS" if check["passed"] else "FAIL"
        ok = ok and check["passed"]
        print(f"[{status}] {name}")
    return 0 if ok else 2


def _cmd_concentration(args) -> int:
    result = run_concentration(
        args.kind,
        n=args.n,
        replicates=args.replicates,
        t=args.t,
        base_seed=_resolve_seed(args.seed),
        jobs=args.jobs,
    )
    payload = harness.concentration_payload(result)
    out_json = args.out_json or f"empdist_concentration_{args.kind}.json"
    harness._write_text(out_json, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(
        f"{result.kind}: n={result.n} R={result.replicates}  "
        f"exceed {result.check.exceed_count}/{result.replicates} "
        f"(freq {result.check.empirical_frequency:.4g})"
    )
    print(f"bound {result.bound:.4g}  binomial slack {result.check.binomial_slack:.4g}")
    print(f"wrote {out_json}")
    if not args.no_plot:
        from .plots import render_concentration_plot

        out_plot = args.out_plot or os.path.splitext(out_json)[0] + ".png"
        render_concentration_plot(result, out_plot)
        print(f"wrote {out_plot}")
    status = "PASS" if result.check.passed else "FAIL"
    print(f"[{status}] empirical tail within bound plus binomial slack")
    return 0 if result.check.passed else 2


def _cmd_verify_theory(args) -> int:
    checks = verify_theory_table()
    width = max(len(c["name"]) for c in checks)
    ok = True
    for check in checks:
        status = "PASS" if check["passed"] else "FAIL"
        ok = ok and check["passed"]
        print(f"[{status}] {check['name']:<{width}}  {check['value']:.12g}  ({check['target']})")
    if args.out_json:
        harness._write_text(args.out_json, json.dumps(checks, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out_json}")
    return 0 if ok else 2


def _cmd_decompose(args) -> int:
    report = run_decompose(
        q=args.q,
        d=args.d,
        depth=args.depth,
        count=args.count,
        base_seed=_resolve_seed(args.seed),
    )
    total_violations = sum(r["violations"] for r in report["functions"])
    worst = max(r["worst_coefficient_ratio"] for r in report["functions"])
    print(
        f"decomposed {report['count']} functions (q={report['q']}, d={report['d']}, "
        f"depth={report['depth']}): {total_violations} violations, "
        f"worst coefficient ratio {worst:.4f}"
    )
    if args.out_json:
        harness._write_text(args.out_json, json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out_json}")
    status = "PASS" if report["passed"] else "FAIL"
    print(f"[{status}] coefficient sizes and remainder within budget")
    return 0 if report["passed"] else 2


def _cmd_chain_diagnose(args) -> int:
    report = run_chain_diagnostics(
        kernel_name=args.kernel,
        pairs=args.pairs,
        lag=args.lag,
        n=args.n,
        base_seed=_resolve_seed(args.seed),
    )
    for row in report["contraction"]:
        status = "PASS" if row["passed"] else "FAIL"
        print(
            f"[{status}] t={row['t']:<3d} observed {row['observed_ratio']:.6g} "
            f"<= claimed {row['claimed']:.6g}"
        )
    ac = report["autocovariance"]
    print(f"autocovariance at lag {ac['lag']} (n={ac['n']}): {ac['value']:.4g}")
    if args.out_json:
        harness._write_text(args.out_json, json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.out_json}")
    return 0 if report["passed"] else 2


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "concentration": _cmd_concentration,
        "verify-theory": _cmd_verify_theory,
        "decompose": _cmd_decompose,
        "chain-diagnose": _cmd_chain_diagnose,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
