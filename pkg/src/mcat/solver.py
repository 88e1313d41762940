"""Inner solver: Riemannian gradient descent with Armijo backtracking.

The line search accepts the largest step ``t`` on the grid
``initial_step * shrink^n`` whose measured decrease beats
``sufficient_decrease * t * ||g||^2``.  A stall (returning the input point
with step 0) is declared when the grid is exhausted above ``min_step``, or
early when several consecutive failing trials achieve only a nonnegative
decrease below ``decrease_floor`` - the regime where the function is flat
along the descent direction and further shrinking is pointless.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, NoDescentError
from .manifolds.base import Manifold
from .objectives import Objective, _IdentityCache

# Consecutive sub-floor failing trials before the early stall fires.
_FLOOR_STREAK = 3
# After acceptance, keep shrinking only while the decrease improves by this
# factor per grid step (guards against reflection across the ray minimizer
# without turning the search into an exact one).
_REFINE_RATIO = 1.4


@dataclass
class LineSearchConfig:
    initial_step: float = 1.0
    shrink: float = 0.95
    sufficient_decrease: float = 1e-4
    min_step: float = 1e-12
    decrease_floor: float = 1e-5 * 0.95

    def validate(self) -> None:
        # initial_step below min_step is permitted: it forces an immediate stall
        if not 0.0 < self.shrink < 1.0:
            raise ConfigError("shrink must lie in (0, 1)")
        if self.initial_step <= 0 or self.min_step <= 0:
            raise ConfigError("steps must be positive")
        if self.sufficient_decrease <= 0:
            raise ConfigError("sufficient_decrease must be positive")


@dataclass
class StepRecord:
    iter: int
    f_value: float
    grad_norm: float
    step_size: float
    elapsed_ns: int


@dataclass
class SolverTrace:
    records: list[StepRecord] = field(default_factory=list)

    def append(self, record: StepRecord) -> None:
        if self.records and record.iter <= self.records[-1].iter:
            raise ValueError("trace iterations must strictly increase")
        self.records.append(record)

    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])

    def grad_norms(self) -> np.ndarray:
        return np.array([r.grad_norm for r in self.records])

    def __len__(self) -> int:
        return len(self.records)


def armijo_step(
    obj: Objective,
    manifold: Manifold,
    point: np.ndarray,
    grad: np.ndarray,
    cfg: LineSearchConfig | None = None,
    on_domain_error: str = "retry",
) -> tuple[np.ndarray, float]:
    """One backtracking step along ``-grad``.

    Returns ``(next_point, accepted_step)``; a stall is signaled by
    ``(point, 0.0)``.  ``on_domain_error`` is either "retry" (one shrunken
    retry, then the error propagates) or "reject" (domain errors count as
    failed trials), the latter used when minimizing prox surrogates whose
    distance term is only locally defined.
    """
    cfg = cfg or LineSearchConfig()
    cfg.validate()
    gn2 = manifold.inner(point, grad, grad)
    if gn2 <= 0.0:
        raise NoDescentError("line search requires a nonzero gradient")

    t = cfg.initial_step
    retried = False
    floor_streak = 0
    best: tuple[float, float, np.ndarray] | None = None  # (decrease, step, candidate)
    while t > cfg.min_step:
        try:
            candidate = manifold.retract(point, -t * grad)
            dec = obj.decrease(point, candidate)
        except DomainError:
            if best is not None:
                break
            if on_domain_error == "reject":
                t *= cfg.shrink
                continue
            if not retried:
                retried = True
                t *= cfg.shrink
                continue
            raise
        if best is None:
            # Backtracking phase: find the largest step passing the test.
            if dec >= cfg.sufficient_decrease * t * gn2:
                best = (dec, t, candidate)
            elif 0.0 <= dec < cfg.decrease_floor:
                # Repeated failing trials with vanishing decrease: the
                # function is flat along this direction, stop shrinking.
                floor_streak += 1
                if floor_streak >= _FLOOR_STREAK:
                    return point, 0.0
            else:
                floor_streak = 0
        else:
            # Refinement phase: stopping at the first accepted step can park
            # the iterate at a reflection across the ray minimizer (tiny
            # decrease, no contraction); walk further down the grid while the
            # decrease still improves geometrically.
            if dec > _REFINE_RATIO * best[0]:
                best = (dec, t, candidate)
            else:
                break
        t *= cfg.shrink
    if best is None:
        return point, 0.0
    return best[2], best[1]


def rgd_run(
    obj: Objective,
    manifold: Manifold,
    point: np.ndarray,
    iters: int,
    cfg: LineSearchConfig | None = None,
    eps: float = 0.0,
    stop_when=None,
    on_domain_error: str = "retry",
    callback=None,
) -> tuple[np.ndarray, SolverTrace]:
    """Gradient descent with Armijo steps.

    Stops after ``iters`` steps, when the gradient norm drops below ``eps``,
    when ``stop_when(point, grad, grad_norm)`` fires, or on a line-search
    stall.  The trace holds one record per evaluated iterate; recorded
    f-values chain through the measured decreases so they are nonincreasing
    by construction.
    """
    if iters < 0:
        raise ConfigError("iters must be >= 0")
    cfg = cfg or LineSearchConfig()
    start = time.perf_counter_ns()
    trace = SolverTrace()
    f_rec = obj.value(point)
    it = 0
    while True:
        g = obj.gradient(point)
        gn = manifold.norm(point, g)
        trace.append(StepRecord(it, f_rec, gn, 0.0, time.perf_counter_ns() - start))
        if callback is not None:
            callback(it, point, f_rec, gn)
        if it >= iters or gn < eps or gn == 0.0:
            break
        if stop_when is not None and stop_when(point, g, gn):
            break
        nxt, step = armijo_step(obj, manifold, point, g, cfg, on_domain_error=on_domain_error)
        if step == 0.0:
            break
        f_rec = f_rec - obj.decrease(point, nxt)
        trace.records[-1].step_size = step
        point = nxt
        it += 1
    return point, trace


class ProxSurrogate(Objective):
    """f(.) + (kappa/2) * distance(., center)^2 for a fixed prox-center."""

    def __init__(self, obj: Objective, manifold: Manifold, kappa: float, center: np.ndarray):
        if kappa <= 0:
            raise ConfigError("kappa must be positive")
        self.obj = obj
        self.manifold = manifold
        self.kappa = kappa
        self.center = center
        self._cache = _IdentityCache()
        if obj.smoothness_L is not None:
            self.smoothness_L = obj.smoothness_L + kappa

    def _dist_sq(self, point: np.ndarray) -> float:
        cached = self._cache.get(point)
        if cached is None:
            d = self.manifold.distance(point, self.center)
            cached = d * d
            self._cache.put(point, cached)
        return cached

    def value(self, point):
        return self.obj.value(point) + 0.5 * self.kappa * self._dist_sq(point)

    def decrease(self, point, other):
        prox = self._dist_sq(point) - self._dist_sq(other)
        return self.obj.decrease(point, other) + 0.5 * self.kappa * prox

    def gradient(self, point):
        return self.obj.gradient(point) + 0.5 * self.kappa * self.manifold.grad_dist_sq(point, self.center)


def solve_prox_subproblem(
    obj: Objective,
    manifold: Manifold,
    kappa: float,
    center: np.ndarray,
    iters: int,
    cfg: LineSearchConfig | None = None,
    stop_when=None,
) -> np.ndarray:
    """Approximately minimize the prox surrogate around ``center``.

    Runs at most ``iters`` descent steps warm-started at the prox-center
    itself (the right start for smooth objectives); candidates that leave
    the inverse-retraction domain count as rejected line-search trials.
    """
    if iters < 1:
        raise ConfigError("subproblem needs at least one iteration")
    surrogate = ProxSurrogate(obj, manifold, kappa, center)
    point, _ = rgd_run(
        surrogate,
        manifold,
        center,
        iters=iters,
        cfg=cfg,
        eps=1e-15,
        stop_when=stop_when,
        on_domain_error="reject",
    )
    return point
