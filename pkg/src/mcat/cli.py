"""`mcat` command line: synthetic benchmarks, rating-file runs, diagnostics.

Exit codes: 0 success, 2 configuration error, 3 solver error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, McatError, ParseError
from .experiment import ExperimentConfig, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _add_solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--solver", action="append", choices=["rgd", "catalyst"],
                        help="solver to run; repeat the flag to run several (default: catalyst)")
    parser.add_argument("--iters", type=int, default=100, help="iteration budget (outer iterations for catalyst)")
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out", required=True, help="output stem; writes <out>_<solver>.csv and .json")
    parser.add_argument("--kappa0", type=float, default=0.1)
    parser.add_argument("--kappa-cvx", type=float, default=None, dest="kappa_cvx")
    parser.add_argument("--budget-t", type=int, default=5, dest="budget_t")
    parser.add_argument("--budget-s", type=int, default=10, dest="budget_s")
    parser.add_argument("--eps", type=float, default=1e-6)
    parser.add_argument("--init-step", type=float, default=None, dest="initial_step",
                        help="line-search starting step (default: 1.0, or 2/L-hat for completion)")
    parser.add_argument("--bit-reproducible", action="store_true", dest="bit_reproducible")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_frechet = sub.add_parser("frechet", help="sphere mean estimation benchmarks")
    p_frechet.add_argument("--kind", choices=["intrinsic", "extrinsic"], required=True)
    p_frechet.add_argument("--n", type=int, default=1000, help="number of data points")
    p_frechet.add_argument("--dim", type=int, default=19, help="sphere dimension d (points live in R^{d+1})")
    p_frechet.add_argument("--ball", type=float, default=0.0,
                           help="concentrate data in a geodesic ball of this radius (0 = spread globally)")
    _add_solver_options(p_frechet)

    p_complete = sub.add_parser("complete", help="low-rank matrix completion benchmarks")
    p_complete.add_argument("--rows", type=int, default=200)
    p_complete.add_argument("--cols", type=int, default=300)
    p_complete.add_argument("--rank", type=int, default=5)
    p_complete.add_argument("--density", type=float, default=0.15)
    p_complete.add_argument("--lambda", type=float, default=0.01, dest="lam")
    p_complete.add_argument("--noise", type=float, default=0.1)
    p_complete.add_argument("--input", default=None, dest="input_path",
                            help="ingest `item<TAB>user<TAB>rating` triples instead of generating data")
    _add_solver_options(p_complete)

    p_diag = sub.add_parser("diag", help="estimate regularity constants for a manifold region")
    p_diag.add_argument("--manifold", choices=["sphere", "grassmann"], required=True)
    p_diag.add_argument("--dim", type=int, required=True,
                        help="sphere dimension, or ambient dimension for grassmann")
    p_diag.add_argument("--rank", type=int, default=2, dest="grassmann_rank",
                        help="subspace rank for grassmann")
    p_diag.add_argument("--radius", type=float, default=0.5)
    p_diag.add_argument("--samples", type=int, default=200)
    p_diag.add_argument("--seed", type=int, required=True)
    p_diag.add_argument("--out", default=None, help="optional report file (key=value lines)")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    solvers = tuple(args.solver) if getattr(args, "solver", None) else ("catalyst",)
    if args.command == "frechet":
        return ExperimentConfig(
            task=f"frechet-{args.kind}",
            seed=args.seed,
            out=args.out,
            solvers=solvers,
            iters=args.iters,
            bit_reproducible=args.bit_reproducible,
            n=args.n,
            dim=args.dim,
            ball_radius=args.ball,
            kappa0=args.kappa0,
            kappa_cvx=args.kappa_cvx,
            budget_t=args.budget_t,
            budget_s=args.budget_s,
            eps=args.eps,
            initial_step=args.initial_step,
        )
    if args.command == "complete":
        return ExperimentConfig(
            task="completion",
            seed=args.seed,
            out=args.out,
            solvers=solvers,
            iters=args.iters,
            bit_reproducible=args.bit_reproducible,
            rows=args.rows,
            cols=args.cols,
            rank=args.rank,
            density=args.density,
            lam=args.lam,
            noise=args.noise,
            input_path=args.input_path,
            kappa0=args.kappa0,
            kappa_cvx=args.kappa_cvx,
            budget_t=args.budget_t,
            budget_s=args.budget_s,
            eps=args.eps,
            initial_step=args.initial_step,
        )
    return ExperimentConfig(
        task="diag",
        seed=args.seed,
        out=args.out,
        manifold=args.manifold,
        dim=args.dim,
        grassmann_rank=args.grassmann_rank,
        radius=args.radius,
        samples=args.samples,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        result = run_experiment(cfg)
    except (ConfigError, ParseError) as exc:
        print(f"mcat: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (McatError, IndexError, OSError) as exc:
        print(f"mcat: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if result.diag_report is not None:
        for key, value in result.diag_report.items():
            print(f"{key}={value}")
    else:
        for run in result.runs.values():
            summary = run.summary
            print(
                f"{run.solver}: wrote {run.csv_path} "
                f"(final f = {summary['final_f']:.6g}, grad norm = {summary['final_grad_norm']:.3g})"
            )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
