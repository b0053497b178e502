"""Command line entry point: ``annealsched <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from ..dynamics import EvolutionConfig
from ..problems import (
    GenerationError,
    ProblemError,
    count_solutions,
    format_dimacs,
    format_graph,
    generate_hard_sat,
    sample_cubic_graph,
)
from .config import METHODS, OUTPUT_ENV_VAR, ConfigError, OptimizerSettings, load_config
from .runner import (
    format_results_csv,
    read_instance,
    read_results_csv,
    run_experiment,
    run_task,
    write_outputs,
)

USAGE_ERROR = 2


def _default_out(sub: str) -> str:
    return str(Path(os.environ.get(OUTPUT_ENV_VAR, "results")) / sub)


def cmd_gen_sat(args) -> int:
    out = Path(args.out or _default_out("instances"))
    out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed, args.seed + args.count):
        inst = generate_hard_sat(args.n, seed, ratio=args.ratio)
        assert count_solutions(inst) == 1
        path = out / f"sat3_n{args.n}_s{seed}.cnf"
        path.write_text(format_dimacs(inst, [f"unique-solution 3-SAT, n={args.n}, seed={seed}"]))
        print(path)
    return 0


def cmd_gen_graph(args) -> int:
    out = Path(args.out or _default_out("graphs"))
    out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed, args.seed + args.count):
        g = sample_cubic_graph(args.n, seed)
        path = out / f"cubic_n{args.n}_s{seed}.graph"
        path.write_text(format_graph(g, [f"connected 3-regular graph, seed={seed}"]))
        print(path)
    return 0


def cmd_solve(args) -> int:
    inst = read_instance(args.problem, args.kind)
    settings = OptimizerSettings(
        mcts_budget=args.budget, num_starts=args.num_starts, bfgs_max_fev=args.max_fev,
    )
    evolution = EvolutionConfig(dt=args.dt, driver_sign=args.driver_sign)
    row = run_task(inst, args.method, args.M, args.T, args.seed, settings, evolution)
    sys.stdout.write(format_results_csv([row]))
    return 0 if not row.failed else 1


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.out:
        cfg = replace(cfg, output=args.out)
    rows = run_experiment(cfg, threads=args.threads)
    outdir = write_outputs(cfg, rows)
    print(outdir / "results.csv")
    print(outdir / "summary.csv")
    return 0 if not any(r.failed for r in rows) else 1


def cmd_plot(args) -> int:
    from .plotting import plot_results

    rows = read_results_csv(args.results)
    out = args.out or str(Path(args.results).parent)
    for path in plot_results(rows, out):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annealsched",
        description="Annealing-schedule optimization benchmarks for 3-SAT and Max-Cut.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="worker processes for sweeps (default: config value)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-sat", help="generate unique-solution 3-SAT instances (DIMACS)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratio", type=int, default=3, help="clauses per variable")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_sat)

    p = sub.add_parser("gen-graph", help="sample connected 3-regular graphs (edge lists)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("solve", help="optimize one schedule, print a one-row CSV")
    p.add_argument("--problem", required=True, help=".cnf file or graph edge list")
    p.add_argument("--kind", choices=("sat3", "maxcut"),
                   help="problem kind (default: from file extension)")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--M", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--driver-sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--budget", type=int, default=5000, help="MCTS iteration budget")
    p.add_argument("--num-starts", type=int, default=10)
    p.add_argument("--max-fev", type=int, default=10_000, help="BFGS evaluations per start")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run an experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="render fidelity and N_fev plots from results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    try:
        return args.func(args)
    except (ConfigError, ProblemError, ValueError, FileNotFoundError) as exc:
        print(f"annealsched: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except GenerationError as exc:
        print(f"annealsched: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
