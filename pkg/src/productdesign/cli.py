"""Command-line front end: load markets, run solvers, emit JSON reports.

Exit codes: 0 on success, 2 on input/validation problems, 3 when an
instance-size guard trips.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .approx import max_ppu, solve_approx_detailed
from .errors import GuardExceededError, MarketFormatError
from .market import (
    Market,
    brute_force_optimum,
    element_uniqueness_instance,
    evaluate,
    market_to_csv,
    market_to_json,
    parse_customers_csv,
    parse_customers_json,
    prune_dominated,
    random_pareto_market,
)
from .simplices import arrangement_stats, depth_controlled_family
from .sweep import solve_exact_1d_with_stats

SCHEMA_VERSION = 1
ALGORITHMS = ("exact1d", "approx", "bruteforce")


@dataclass(frozen=True)
class RunConfig:
    """One solve invocation, as parsed from the command line."""

    input: str
    algorithm: str
    epsilon: float | None = None
    depth_mode: str = "exact"
    seed: int = 0
    prune: bool = False
    output: str | None = None


def load_market(path: str, prune: bool = False) -> tuple[Market, int]:
    """Read a market file; returns (market, number of pruned customers)."""
    p = Path(path)
    if not p.exists():
        raise MarketFormatError(f"no such file: {path}")
    text = p.read_text()
    suffix = p.suffix.lower()
    if suffix == ".json" or (suffix != ".csv" and text.lstrip().startswith("{")):
        customers = parse_customers_json(text)
    else:
        customers = parse_customers_csv(text)
    if prune:
        market = prune_dominated(customers)
        dropped = len(customers) - len(market)
        if dropped:
            print(
                f"warning: pruned {dropped} dominated customer(s)", file=sys.stderr
            )
        return market, dropped
    return Market(customers), 0


def _result_section(report) -> dict:
    if report.product is None:
        return {"status": "no_profitable_product", "profit": 0.0}
    return {
        "status": "ok",
        "product": {
            "price": report.product.price,
            "qualities": list(report.product.qualities),
        },
        "ppu": report.ppu,
        "buyers": report.buyers,
        "profit": report.profit,
    }


def run(config: RunConfig) -> dict:
    """Execute one solve and build the report dict (result re-verified)."""
    market, pruned = load_market(config.input, config.prune)
    if config.algorithm == "approx":
        if config.epsilon is None:
            raise ValueError("--epsilon is required for the approx algorithm")
        if not 0.0 < config.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {config.epsilon}")
    elif config.epsilon is not None:
        raise ValueError(f"--epsilon only applies to approx, not {config.algorithm}")

    start = time.perf_counter()
    diagnostics: dict
    if config.algorithm == "exact1d":
        report, stats = solve_exact_1d_with_stats(market)
        diagnostics = {
            "events": stats.events,
            "candidates_appended": stats.appended,
            "certificate_pushes": stats.certificate_pushes,
            "certificate_pops": stats.certificate_pops,
            "deletions": stats.deletions,
            "peak_list_length": stats.peak_list_length,
        }
    elif config.algorithm == "approx":
        report, levels = solve_approx_detailed(
            market, config.epsilon, config.depth_mode, config.seed
        )
        diagnostics = {
            "depth_mode": config.depth_mode,
            "levels": [
                {
                    "index": lv.index,
                    "constant": lv.constant,
                    "simplices": lv.simplex_count,
                    "depth": lv.depth,
                    "profit": lv.profit,
                }
                for lv in levels
            ],
        }
    else:
        report = brute_force_optimum(market)
        diagnostics = {"grid": "customer-coordinate product grid"}
    elapsed_ms = (time.perf_counter() - start) * 1000.0

    # Never emit an unverified result.
    if report.product is not None:
        check = evaluate(market, report.product)
        if check.profit != report.profit or check.buyers != report.buyers:
            raise AssertionError("solver result failed re-evaluation")
    elif max_ppu(market) > 0 and config.algorithm != "approx":
        raise AssertionError("no-profit result despite a positive customer margin")

    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "input": config.input,
            "algorithm": config.algorithm,
            "epsilon": config.epsilon,
            "depth_mode": config.depth_mode if config.algorithm == "approx" else None,
            "seed": config.seed,
            "prune": config.prune,
        },
        "market": {
            "n": len(market),
            "dim": market.dim,
            "max_ppu": max_ppu(market),
            "pruned_customers": pruned,
        },
        "result": _result_section(report),
        "diagnostics": diagnostics,
        "timing_ms": round(elapsed_ms, 3),
    }


def _emit(payload: dict, output: str | None):
    text = json.dumps(payload, sort_keys=True, indent=2)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _cmd_solve(args) -> int:
    config = RunConfig(
        input=args.input,
        algorithm=args.algorithm,
        epsilon=args.epsilon,
        depth_mode=args.depth_mode,
        seed=args.seed,
        prune=args.prune,
        output=args.output,
    )
    _emit(run(config), config.output)
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "random":
        market = random_pareto_market(
            args.n, args.d, seed=args.seed, value_range=(args.low, args.high)
        )
    else:
        if args.values:
            values = [int(v) for v in args.values.split(",")]
        else:
            rng = np.random.default_rng(args.seed)
            values = [int(v) for v in rng.integers(args.low, args.high + 1, args.n)]
        market = element_uniqueness_instance(values)
    text = market_to_json(market) if args.format == "json" else market_to_csv(market)
    if args.output:
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return 0


def _cmd_bench(args) -> int:
    if args.target == "sweep":
        sizes = [int(s) for s in args.sizes.split(",")]
        rows = []
        for n in sizes:
            market = random_pareto_market(n, 1, seed=args.seed)
            start = time.perf_counter()
            report, stats = solve_exact_1d_with_stats(market)
            ms = (time.perf_counter() - start) * 1000.0
            rows.append(
                {
                    "n": n,
                    "ms": round(ms, 3),
                    "profit": report.profit,
                    "certificate_pushes": stats.certificate_pushes,
                }
            )
        ratios = [
            round(rows[i]["ms"] / rows[i - 1]["ms"], 3) if rows[i - 1]["ms"] else None
            for i in range(1, len(rows))
        ]
        _emit({"bench": "sweep", "runs": rows, "time_ratios": ratios}, args.output)
        return 0
    sizes = [int(s) for s in args.sizes.split(",")]
    depths = [int(k) for k in args.depths.split(",")]
    rows = []
    for n in sizes:
        for k in depths:
            family = depth_controlled_family(n, k, seed=args.seed)
            start = time.perf_counter()
            stats = arrangement_stats(family)
            ms = (time.perf_counter() - start) * 1000.0
            rows.append(
                {
                    "n": n,
                    "k": k,
                    "ms": round(ms, 3),
                    "vertex_count": stats.vertex_count,
                    "max_depth": stats.max_depth,
                    "pairwise_intersections": stats.pairwise_intersections,
                    "vertices_per_nk": round(stats.vertex_count / (n * k), 4),
                }
            )
    _emit({"bench": "arrangement", "runs": rows}, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="productdesign",
        description="Design a profit-maximizing product for a saturated market.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a solver on a market file")
    solve.add_argument("--input", required=True, help="market file (CSV or JSON)")
    solve.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    solve.add_argument("--epsilon", type=float, default=None)
    solve.add_argument(
        "--depth-mode", choices=("exact", "monte_carlo"), default="exact"
    )
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument(
        "--prune", action="store_true", help="drop dominated customers with a warning"
    )
    solve.add_argument("--output", default=None, help="write the report here")
    solve.set_defaults(func=_cmd_solve)

    gen = sub.add_parser("gen", help="generate a market file")
    gen.add_argument("--kind", required=True, choices=("random", "element-uniqueness"))
    gen.add_argument("--n", type=int, default=100)
    gen.add_argument("--d", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--low", type=int, default=0)
    gen.add_argument("--high", type=int, default=100)
    gen.add_argument("--values", default=None, help="comma-separated integers")
    gen.add_argument("--format", choices=("csv", "json"), default="csv")
    gen.add_argument("--output", default=None)
    gen.set_defaults(func=_cmd_gen)

    bench = sub.add_parser("bench", help="performance and complexity harnesses")
    bench_sub = bench.add_subparsers(dest="target", required=True)
    bsweep = bench_sub.add_parser("sweep", help="sweep-solver scaling measurement")
    bsweep.add_argument("--sizes", default="250000,500000,1000000")
    bsweep.add_argument("--seed", type=int, default=0)
    bsweep.add_argument("--output", default=None)
    bsweep.set_defaults(func=_cmd_bench)
    barr = bench_sub.add_parser(
        "arrangement", help="arrangement vertex-count ratio logging"
    )
    barr.add_argument("--sizes", default="100,400,1600")
    barr.add_argument("--depths", default="2,4,8")
    barr.add_argument("--seed", type=int, default=0)
    barr.add_argument("--output", default=None)
    barr.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GuardExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
