"""Experiment runner behind the benchmark CLI.

One invocation builds the task data once, runs each requested solver on it,
and writes one CSV trace plus one JSON sidecar per solver.  The sidecar
echoes the fully resolved configuration (re-running from it reproduces the
CSV) together with a final summary; solver failures are recorded there too
before the error is re-raised.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import diagnostics
from .catalyst import CatalystConfig, OuterTrace, accelerated_minimize
from .completion import CompletionObjective
from .data import (
    as_rng,
    generate_lowrank_data,
    generate_sphere_ball_data,
    generate_sphere_data,
    ingest_ratings,
)
from .errors import ConfigError, McatError
from .manifolds.grassmann import Grassmann, canonicalize
from .manifolds.sphere import Sphere
from .objectives import (
    FrechetExtrinsic,
    FrechetIntrinsic,
    closed_form_extrinsic_mean,
    estimate_smoothness,
)
from .solver import LineSearchConfig, rgd_run
from .trace import TraceRow, write_trace_csv

TASKS = ("frechet-intrinsic", "frechet-extrinsic", "completion", "diag")
SOLVERS = ("rgd", "catalyst")


class ExperimentError(McatError):
    """A solver failed inside a run; details are in the JSON sidecar."""

    exit_code = 3


@dataclass
class ExperimentConfig:
    task: str
    seed: int
    out: str | None = None
    solvers: tuple[str, ...] = ("catalyst",)
    iters: int = 100
    bit_reproducible: bool = False

    # sphere tasks
    n: int = 1000
    dim: int = 19
    ball_radius: float = 0.0  # 0 means globally spread data

    # completion task
    rows: int = 200
    cols: int = 300
    rank: int = 5
    density: float = 0.15
    lam: float = 0.01
    noise: float = 0.1
    input_path: str | None = None

    # outer loop
    kappa0: float = 0.1
    kappa_cvx: float | None = None
    budget_t: int = 5
    budget_s: int = 10
    eps: float = 1e-6
    max_doublings: int = 40

    # line search; initial_step None resolves to min(1, 2/L_hat) for the
    # completion task (its smoothness dwarfs the unit default) and 1.0 elsewhere
    initial_step: float | None = None
    shrink: float = 0.95
    sufficient_decrease: float = 1e-4
    min_step: float = 1e-12
    decrease_floor: float = 1e-5 * 0.95

    # diag task
    manifold: str = "sphere"
    radius: float = 0.5
    samples: int = 200
    grassmann_rank: int = 2

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.seed is None:
            raise ConfigError("seed is required")
        if self.task != "diag":
            if not self.solvers:
                raise ConfigError("at least one solver is required")
            for s in self.solvers:
                if s not in SOLVERS:
                    raise ConfigError(f"unknown solver {s!r}")
            if self.out is None:
                raise ConfigError("out path is required")
            if self.iters < 0:
                raise ConfigError("iters must be >= 0")
        if self.task.startswith("frechet"):
            if self.n < 1 or self.dim < 1:
                raise ConfigError("n and dim must be positive")
            if self.ball_radius < 0 or self.ball_radius >= math.pi:
                raise ConfigError("ball radius must lie in [0, pi)")
        if self.task == "completion" and self.input_path is None:
            if not 0 < self.density <= 1:
                raise ConfigError("density must lie in (0, 1]")
            if self.rank < 1 or self.rank > min(self.rows, self.cols):
                raise ConfigError("rank must satisfy 1 <= r <= min(rows, cols)")
        if self.task == "diag" and self.manifold not in ("sphere", "grassmann"):
            raise ConfigError(f"unknown manifold {self.manifold!r}")
        self.line_search_config().validate()

    def line_search_config(self, resolved_initial_step: float | None = None) -> LineSearchConfig:
        step = self.initial_step if self.initial_step is not None else resolved_initial_step
        return LineSearchConfig(
            initial_step=1.0 if step is None else step,
            shrink=self.shrink,
            sufficient_decrease=self.sufficient_decrease,
            min_step=self.min_step,
            decrease_floor=self.decrease_floor,
        )

    def catalyst_config(self, kappa_cvx: float, line_search: LineSearchConfig) -> CatalystConfig:
        return CatalystConfig(
            kappa0=self.kappa0,
            kappa_cvx=kappa_cvx,
            budget_t=self.budget_t,
            budget_s=self.budget_s,
            eps=self.eps,
            max_outer=max(1, self.iters),
            max_doublings=self.max_doublings,
            line_search=line_search,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["solvers"] = list(self.solvers)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {k: v for k, v in d.items() if k in known}
        if "solvers" in kwargs:
            kwargs["solvers"] = tuple(kwargs["solvers"])
        return cls(**kwargs)


@dataclass
class SolverRun:
    solver: str
    csv_path: Path
    json_path: Path
    summary: dict
    rows: list[TraceRow]
    final_point: np.ndarray
    outer_trace: OuterTrace | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: dict[str, SolverRun] = field(default_factory=dict)
    diag_report: dict | None = None


def _max_workers(n_jobs: int) -> int:
    cap = os.environ.get("MCAT_THREADS")
    if cap is not None:
        try:
            cap_val = max(1, int(cap))
        except ValueError as exc:
            raise ConfigError(f"MCAT_THREADS must be an integer, got {cap!r}") from exc
    else:
        cap_val = os.cpu_count() or 1
    return max(1, min(n_jobs, cap_val))


def _build_task(cfg: ExperimentConfig):
    """Construct (manifold, objective-factory, theta0, aux_fn, kappa_cvx, auto_step)."""
    if cfg.task in ("frechet-intrinsic", "frechet-extrinsic"):
        sphere = Sphere(cfg.dim)
        data_rng = as_rng([cfg.seed, 0])
        init_rng = as_rng([cfg.seed, 1])
        if cfg.ball_radius > 0:
            center = sphere.random_point(data_rng)
            data = generate_sphere_ball_data(cfg.n, cfg.dim, cfg.ball_radius, data_rng, center=center)
        else:
            data = generate_sphere_data(cfg.n, cfg.dim, data_rng)
        theta0 = sphere.random_point(init_rng)

        if cfg.task == "frechet-extrinsic":
            mean = closed_form_extrinsic_mean(data)

            def objective_factory():
                return FrechetExtrinsic(data, sphere)

            def aux(point, _obj):
                diff = point - mean
                return float(diff @ diff)

        else:
            def objective_factory():
                return FrechetIntrinsic(data, sphere)

            aux = None

        probe = objective_factory()
        kappa_cvx = cfg.kappa_cvx
        if kappa_cvx is None:
            kappa_cvx = probe.smoothness_L
        if kappa_cvx is None:
            kappa_cvx = estimate_smoothness(probe, sphere, theta0, radius=0.3, pairs=32, rng=as_rng([cfg.seed, 2]))
        if kappa_cvx is None or kappa_cvx <= 0:
            kappa_cvx = 1.0
        return sphere, objective_factory, theta0, aux, float(kappa_cvx), None

    if cfg.task == "completion":
        if cfg.input_path is not None:
            problem = ingest_ratings(cfg.input_path, lam=cfg.lam, rank=cfg.rank)
            held_out = None
        else:
            problem, held_out = generate_lowrank_data(
                cfg.rows, cfg.cols, cfg.rank, cfg.density, cfg.noise, cfg.lam, as_rng([cfg.seed, 0])
            )
        m, n = problem.shape
        grassmann = Grassmann(m, problem.rank)
        u, _, _ = np.linalg.svd(problem.values, full_matrices=False)
        theta0 = canonicalize(u[:, : problem.rank])

        def objective_factory():
            return CompletionObjective(problem)

        if held_out is not None and len(held_out) > 0:
            def aux(point, obj):
                pred = obj.predict(point, held_out.rows, held_out.cols)
                return float(np.sqrt(np.mean((pred - held_out.values) ** 2)))
        else:
            aux = None

        probe = objective_factory()
        smoothness = estimate_smoothness(probe, grassmann, theta0, radius=0.3, pairs=16, rng=as_rng([cfg.seed, 2]))
        kappa_cvx = cfg.kappa_cvx
        if kappa_cvx is None:
            kappa_cvx = smoothness
        if kappa_cvx is None or kappa_cvx <= 0:
            kappa_cvx = 1.0
        auto_step = min(1.0, 2.0 / smoothness) if smoothness and smoothness > 0 else 1.0
        return grassmann, objective_factory, theta0, aux, float(kappa_cvx), auto_step

    raise ConfigError(f"task {cfg.task!r} does not produce traces")


def _run_solver(cfg: ExperimentConfig, solver: str, manifold, objective_factory, theta0, aux, kappa_cvx, ls_cfg):
    obj = objective_factory()
    rows: list[TraceRow] = []
    outer_trace = None

    if solver == "rgd":
        def on_iterate(it, point, f_val, gn):
            rows.append(
                TraceRow(
                    iter=it,
                    f_value=f_val,
                    grad_norm=gn,
                    kappa=0.0,
                    branch="n/a",
                    elapsed_ns=0,
                    aux=None if aux is None else aux(point, obj),
                )
            )

        final, solver_trace = rgd_run(
            obj, manifold, theta0, iters=cfg.iters, cfg=ls_cfg, eps=cfg.eps, callback=on_iterate
        )
        for row, rec in zip(rows, solver_trace.records):
            row.elapsed_ns = rec.elapsed_ns
        if rows and rows[-1].grad_norm < cfg.eps:
            stop_reason = "stationarity"
        elif len(rows) >= cfg.iters + 1:
            stop_reason = "budget"
        else:
            stop_reason = "stall"
    elif solver == "catalyst":
        def on_outer(record, point):
            rows.append(
                TraceRow(
                    iter=record.iter,
                    f_value=record.f_value,
                    grad_norm=record.grad_norm,
                    kappa=record.kappa,
                    branch=record.branch,
                    elapsed_ns=record.elapsed_ns,
                    aux=None if aux is None else aux(point, obj),
                )
            )

        final, outer_trace = accelerated_minimize(
            obj, manifold, theta0, cfg.catalyst_config(kappa_cvx, ls_cfg), callback=on_outer
        )
        stop_reason = outer_trace.stop_reason
    else:
        raise ConfigError(f"unknown solver {solver!r}")

    summary = {
        "solver": solver,
        "iterations": rows[-1].iter if rows else 0,
        "final_f": rows[-1].f_value if rows else None,
        "final_grad_norm": rows[-1].grad_norm if rows else None,
        "final_aux": rows[-1].aux if rows else None,
        "stop_reason": stop_reason,
        "events": list(outer_trace.events) if outer_trace is not None else [],
    }
    return rows, summary, final, outer_trace


def _sidecar(path: Path, resolved_config: dict, solver: str, summary: dict | None, error: dict | None) -> None:
    payload = {"config": resolved_config, "solver": solver, "summary": summary, "error": error}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    if cfg.task == "diag":
        return ExperimentResult(config=cfg, diag_report=run_diagnostics(cfg))

    manifold, objective_factory, theta0, aux, kappa_cvx, auto_step = _build_task(cfg)
    ls_cfg = cfg.line_search_config(auto_step)
    resolved = cfg.to_dict()
    resolved["kappa_cvx"] = kappa_cvx
    resolved["initial_step"] = ls_cfg.initial_step

    out_stem = Path(cfg.out)
    out_stem.parent.mkdir(parents=True, exist_ok=True)

    result = ExperimentResult(config=cfg)
    errors: list[tuple[str, Exception]] = []

    def execute(solver: str):
        csv_path = out_stem.parent / f"{out_stem.name}_{solver}.csv"
        json_path = out_stem.parent / f"{out_stem.name}_{solver}.json"
        try:
            rows, summary, final, outer_trace = _run_solver(
                cfg, solver, manifold, objective_factory, theta0, aux, kappa_cvx, ls_cfg
            )
        except Exception as exc:  # recorded, then surfaced with exit code 3
            _sidecar(json_path, resolved, solver, None, {"type": type(exc).__name__, "message": str(exc)})
            raise
        write_trace_csv(csv_path, rows)
        _sidecar(json_path, resolved, solver, summary, None)
        return SolverRun(
            solver=solver,
            csv_path=csv_path,
            json_path=json_path,
            summary=summary,
            rows=rows,
            final_point=final,
            outer_trace=outer_trace,
        )

    workers = _max_workers(len(cfg.solvers))
    if workers > 1 and len(cfg.solvers) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {solver: pool.submit(execute, solver) for solver in cfg.solvers}
            for solver, fut in futures.items():
                try:
                    result.runs[solver] = fut.result()
                except Exception as exc:
                    errors.append((solver, exc))
    else:
        for solver in cfg.solvers:
            try:
                result.runs[solver] = execute(solver)
            except Exception as exc:
                errors.append((solver, exc))

    if errors:
        solver, exc = errors[0]
        raise ExperimentError(f"solver {solver!r} failed: {exc}") from exc
    return result


def run_diagnostics(cfg: ExperimentConfig) -> dict:
    """Estimate the regularity constants for the configured manifold and
    return them as a flat report dict."""
    if cfg.manifold == "sphere":
        manifold = Sphere(cfg.dim)
    else:
        manifold = Grassmann(cfg.dim, cfg.grassmann_rank)
    rng = as_rng([cfg.seed, 0])
    center = manifold.random_point(rng)
    k1, k2 = diagnostics.estimate_bilipschitz(manifold, center, cfg.radius, cfg.samples, as_rng([cfg.seed, 1]))
    r1 = diagnostics.estimate_strong_retraction_convexity(
        manifold, center, cfg.radius, cfg.samples, as_rng([cfg.seed, 2])
    )
    k_grad = diagnostics.estimate_grad_dist_bound(manifold, center, cfg.radius, cfg.samples, as_rng([cfg.seed, 3]))
    report = {
        "manifold": manifold.name,
        "radius": cfg.radius,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "k1": k1,
        "k2": k2,
        "r1": r1,
        "grad_dist_bound": k_grad,
    }
    if cfg.out is not None:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("".join(f"{k}={v}\n" for k, v in report.items()), encoding="utf-8")
    return report
