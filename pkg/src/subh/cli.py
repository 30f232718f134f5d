"""Command-line front end: exact, estimate, bench, ptp, gx.

Results go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 invalid input, 2 internal invariant violation. With a fixed --seed
(default 20220607) the result stream is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness
from .errors import InvalidParameter, PromiseViolated, SubhError
from .estimator import EstimatorParams, estimate_h_index
from .exact import exact_h_index
from .gx import verify_construction
from .oracle import ArrayOracle, GenSpec, generate_array, load_array
from .ptp import (
    PtpParams,
    load_instance,
    ptp_via_hindex,
    sample_ptp,
    save_instance,
)
from .rng import DEFAULT_SEED, RngHandle


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise InvalidParameter(message)


def _parse_genspec(text: str) -> GenSpec:
    """Parse --gen 'n=100000,h=500[,high=...,low=uniform|zeros]'."""
    fields: dict[str, str] = {}
    for part in text.split(","):
        if "=" not in part:
            raise InvalidParameter(f"--gen entries must be key=value, got {part!r}")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()
    if "n" not in fields or "h" not in fields:
        raise InvalidParameter("--gen needs at least n= and h=")
    unknown = set(fields) - {"n", "h", "high", "low"}
    if unknown:
        raise InvalidParameter(f"--gen got unknown keys {sorted(unknown)}")
    return GenSpec(
        n=int(fields["n"]),
        h=int(fields["h"]),
        high_value=int(fields["high"]) if "high" in fields else None,
        low_profile=fields.get("low", "uniform"),
    )


def _load_values(args, rng: RngHandle) -> np.ndarray:
    if args.array:
        return load_array(args.array)
    if args.gen:
        return generate_array(_parse_genspec(args.gen), rng)
    raise InvalidParameter("provide --array <path> or --gen n=...,h=...")


def _cmd_exact(args) -> int:
    values = _load_values(args, RngHandle(args.seed, 0))
    print(exact_h_index(values))
    return 0


def _cmd_estimate(args) -> int:
    base = RngHandle(args.seed, 0)
    values = _load_values(args, base.child(0))
    params = EstimatorParams(eps=args.eps, delta=args.delta)
    h_true = exact_h_index(values)
    oracle = ArrayOracle(values)
    lines = []
    failures = 0
    queries = []
    for t in range(args.trials):
        before = oracle.query_count
        est = estimate_h_index(oracle, params, base.child(1 + t))
        used = oracle.query_count - before
        queries.append(used)
        if abs(est.h_tilde - h_true) > args.eps * h_true:
            failures += 1
        lines.append((est.h_tilde, used, int(est.exact_fallback), est.T_final))
        print(f"{est.h_tilde},{used},{int(est.exact_fallback)},{est.T_final}")
    print(
        f"# summary trials={args.trials} h_exact={h_true} failures={failures} "
        f"median_queries={sorted(queries)[(len(queries) - 1) // 2]}"
    )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("trial_id,h_tilde,queries,exact_fallback,T_final\n")
            for t, row in enumerate(lines):
                fh.write(f"{t},{row[0]},{row[1]},{row[2]},{row[3]}\n")
    return 0


def _cmd_bench(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "suite" in data and data["suite"] != args.suite:
        raise InvalidParameter(
            f"--suite {args.suite} conflicts with config suite {data['suite']!r}"
        )
    data["suite"] = args.suite
    config = harness.SuiteConfig.from_dict(data)
    result = harness.run_suite(config, RngHandle(args.seed, 0), jobs=args.jobs)
    harness.write_csv(result, args.out)
    for stats in result.cells:
        print(
            f"cell {stats.params} trials={stats.trials} "
            f"failure_rate={stats.failure_rate:.4f} "
            f"upper_bound={stats.failure_rate_upper_bound:.4f} "
            f"queries_p50={stats.queries_p50} p90={stats.queries_p90} max={stats.queries_max}"
        )
    scaling = data.get("scaling")
    if scaling:
        checks = harness.scaling_check(
            result.cells, scaling["axis"], window=scaling.get("window")
        )
        for c in checks:
            print(
                f"scaling {c.axis} {c.value_from}->{c.value_to} "
                f"measured={c.measured_ratio:.3f} expected={c.expected_ratio:.3f} "
                f"window=[{c.window[0]:.3f},{c.window[1]:.3f}] "
                f"{'PASS' if c.passed else 'FAIL'}"
            )
        if not all(c.passed for c in checks):
            return 2
    return 0


def _cmd_ptp(args) -> int:
    if args.action == "gen":
        params = PtpParams(m=args.m, k=args.k, gamma=args.gamma, delta=args.delta)
        instance = sample_ptp(params, args.theta, RngHandle(args.seed, 0))
        save_instance(instance, params, args.out)
        print(f"wrote m={args.m} k={args.k} gamma={args.gamma!r} label={instance.label}")
        return 0
    instance, m, k, gamma = load_instance(args.infile)
    params = PtpParams(m=m, k=k, gamma=gamma, delta=args.delta)
    outcome = ptp_via_hindex(
        instance, params, estimate_h_index, RngHandle(args.seed, 0),
        enforce_budget=not args.no_budget,
    )
    print(
        f"{outcome.answer} queries={outcome.queries} budget={outcome.budget} "
        f"exhausted={int(outcome.exhausted)}"
    )
    correct = (outcome.answer == "Yes") == (instance.label == 1)
    print(f"label={instance.label} correct={int(correct)}", file=sys.stderr)
    return 0


def _cmd_gx(args) -> int:
    root = int(args.m**0.5)
    if args.m < 4 or args.m % 4 or root * root != args.m:
        raise InvalidParameter(f"m={args.m} must be a perfect square divisible by 4")
    bits = args.m // 4
    base = RngHandle(args.seed, 0)
    x = base.child(0).generator.integers(0, 2, size=bits, dtype=np.uint8)
    checks, queries = verify_construction(x, base.child(1), args.edge_samples)
    for check in checks:
        status = "PASS" if check.ok else "FAIL"
        detail = f" ({check.detail})" if check.detail else ""
        print(f"{status} {check.name}{detail}")
    print(f"# queries={queries}")
    return 0 if all(c.ok for c in checks) else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="subh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, gen=True):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help=f"master seed (default {DEFAULT_SEED}; fixed, not time-based)")
        if gen:
            p.add_argument("--array", help="array file: one non-negative integer per line")
            p.add_argument("--gen", help="synthesize: n=<len>,h=<h-index>[,high=,low=]")

    p = sub.add_parser("exact", help="exact h-index of an array")
    add_common(p)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("estimate", help="randomized (1±eps) h-index estimate")
    add_common(p)
    p.add_argument("--eps", type=float, required=True, help="relative accuracy in (0,1)")
    p.add_argument("--delta", type=float, required=True, help="failure probability in (0,1)")
    p.add_argument("--trials", type=int, default=1, help="independent runs (default 1)")
    p.add_argument("--csv", help="also write trial rows to this CSV file")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("bench", help="run an experiment suite from a JSON config")
    p.add_argument("--suite", required=True, choices=harness.SUITES)
    p.add_argument("--config", required=True, help="JSON: {trials, grid[, engine, scaling]}")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("ptp", help="bit-string hardness instances")
    psub = p.add_subparsers(dest="action", required=True)
    pg = psub.add_parser("gen", help="sample an instance and write it to a file")
    pg.add_argument("--m", type=int, required=True)
    pg.add_argument("--k", type=int, required=True)
    pg.add_argument("--gamma", type=float, required=True)
    pg.add_argument("--delta", type=float, default=0.05)
    pg.add_argument("--theta", type=int, choices=(0, 1), default=None,
                    help="pin the label (default: uniform)")
    pg.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pg.add_argument("--out", required=True)
    ps = psub.add_parser("solve", help="run the h-index reduction on an instance file")
    ps.add_argument("--in", dest="infile", required=True)
    ps.add_argument("--delta", type=float, required=True)
    ps.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ps.add_argument("--no-budget", action="store_true",
                    help="lift the query budget (diagnostic runs only)")
    p.set_defaults(func=_cmd_ptp)

    p = sub.add_parser("gx", help="graph-oracle construction checks")
    gsub = p.add_subparsers(dest="action", required=True)
    gv = gsub.add_parser("verify", help="run the invariant battery at a given size")
    gv.add_argument("--m", type=int, required=True,
                    help="edge count; a perfect square divisible by 4")
    gv.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gv.add_argument("--edge-samples", type=int, default=0,
                    help="also chi-square edge sampling with this many draws")
    p.set_defaults(func=_cmd_gx)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (InvalidParameter, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PromiseViolated as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except SubhError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
