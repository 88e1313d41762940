"""Adaptive proximal-point smoothing with an accelerated outer loop.

The adaptive step repeatedly minimizes the prox surrogate
``f + (kappa/2) d(., anchor)^2`` for a fixed small budget and accepts the
result only if it passes two conditions: the surrogate value did not
increase (descent) and the surrogate gradient is dominated by
``kappa * d(result, anchor)`` (adaptive stationarity).  Failing either
doubles ``kappa`` and retries, so the smoothing level adapts to the
unknown weak convexity of the objective.

The accelerated loop interleaves those adaptive steps with Nesterov-style
extrapolation: a second surrogate is minimized around an extrapolated
center at a fixed smoothing level ``kappa_cvx``, the extrapolation anchor
is updated through the inverse retraction, and the next iterate is
whichever candidate has the smaller objective value, which keeps the
iteration monotone even when extrapolation fails to help.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import AdaptationError, ConfigError, DomainError, PrecisionLimitStall
from .manifolds.base import Manifold
from .objectives import Objective
from .solver import LineSearchConfig, ProxSurrogate, solve_prox_subproblem

# Absolute stationarity floor used when the prox step returns its anchor
# unchanged (distance exactly zero).
EPS_STATIONARY_ABS = 1e-12


def alpha_next(alpha: float) -> float:
    """Next extrapolation weight: the root of (1 - a')/a'^2 = 1/a^2 in (0, a).

    Evaluated in the cancellation-free form a*(sqrt(a^2 + 4) - a)/2.
    """
    if not 0.0 < alpha <= 1.0:
        raise ConfigError("alpha must lie in (0, 1]")
    return 0.5 * alpha * (math.sqrt(alpha * alpha + 4.0) - alpha)


@dataclass
class CatalystConfig:
    kappa0: float = 0.1
    kappa_cvx: float | None = None  # None: use the objective's smoothness estimate
    budget_t: int = 5  # prox-step iterations per adaptive attempt
    budget_s: int = 10  # base budget for the extrapolated subproblem
    eps: float = 1e-6  # stationarity target on ||grad f||
    max_outer: int = 100
    max_doublings: int = 40
    line_search: LineSearchConfig = field(default_factory=LineSearchConfig)

    def validate(self) -> None:
        if self.kappa0 <= 0:
            raise ConfigError("kappa0 must be positive")
        if self.kappa_cvx is not None and self.kappa_cvx <= 0:
            raise ConfigError("kappa_cvx must be positive")
        if self.budget_t < 1 or self.budget_s < 1:
            raise ConfigError("budgets must be positive integers")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.max_outer < 1 or self.max_doublings < 1:
            raise ConfigError("max_outer and max_doublings must be positive")
        self.line_search.validate()


@dataclass(frozen=True)
class ProxConditions:
    descent: bool
    stationarity: bool

    @property
    def accepted(self) -> bool:
        return self.descent and self.stationarity


def check_prox_conditions(
    obj: Objective,
    manifold: Manifold,
    kappa: float,
    candidate: np.ndarray,
    anchor: np.ndarray,
) -> ProxConditions:
    """Descent and adaptive-stationarity acceptance tests for a prox step.

    A DomainError while measuring the retraction distance counts as failure
    of both conditions rather than an exception.
    """
    surrogate = ProxSurrogate(obj, manifold, kappa, anchor)
    try:
        dist = manifold.distance(candidate, anchor)
        grad_norm = manifold.norm(candidate, surrogate.gradient(candidate))
        descent = surrogate.decrease(anchor, candidate) >= 0.0
    except DomainError:
        return ProxConditions(descent=False, stationarity=False)
    if np.array_equal(candidate, anchor):
        stationarity = grad_norm < EPS_STATIONARY_ABS
    else:
        stationarity = grad_norm < kappa * dist
    return ProxConditions(descent=descent, stationarity=stationarity)


def adaptive_prox_point(
    obj: Objective,
    manifold: Manifold,
    anchor: np.ndarray,
    kappa: float,
    iters: int,
    cfg: LineSearchConfig | None = None,
    max_doublings: int = 40,
) -> tuple[np.ndarray, float]:
    """Prox step that doubles the smoothing level until acceptance.

    Returns the first accepted ``(candidate, kappa)``; the returned kappa is
    ``kappa * 2**m`` after ``m >= 0`` doublings.  Raises AdaptationError when
    the doubling budget is exhausted.
    """
    if iters < 1:
        raise ConfigError("iters must be >= 1")
    if kappa <= 0:
        raise ConfigError("kappa must be positive")
    anchor_stalls = 0
    for _ in range(max_doublings + 1):
        current = kappa

        def near_stationary(p, g, gn, _kappa=current):
            try:
                return gn < _kappa * manifold.distance(p, anchor)
            except DomainError:
                return False

        candidate = solve_prox_subproblem(obj, manifold, current, anchor, iters, cfg, stop_when=near_stationary)
        if check_prox_conditions(obj, manifold, current, candidate, anchor).accepted:
            return candidate, current
        if np.array_equal(candidate, anchor):
            # The solver could not move at all; doubling shrinks the
            # achievable decrease further, so a repeat proves a float floor.
            anchor_stalls += 1
            if anchor_stalls >= 2:
                raise PrecisionLimitStall(
                    f"prox subproblem pinned to its anchor at kappa = {current:.3e}"
                )
        else:
            anchor_stalls = 0
        kappa = 2.0 * kappa
    raise AdaptationError(
        f"no acceptable prox step within {max_doublings} doublings (kappa reached {kappa:.3e})"
    )


@dataclass
class OuterRecord:
    iter: int
    f_value: float
    grad_norm: float  # ||grad f|| at the adaptive-step candidate
    kappa: float
    branch: str  # "bar" (adaptive step won), "tilde" (extrapolation won), "n/a" (held)
    c2_met: bool | None
    doublings: int
    extrapolation_skipped: bool
    elapsed_ns: int
    # anchor pair of the accepted prox step, kept so acceptance conditions
    # can be re-checked offline
    theta_bar: np.ndarray | None = None
    theta_prev: np.ndarray | None = None


@dataclass
class OuterTrace:
    records: list[OuterRecord] = field(default_factory=list)
    events: list[str] = field(default_factory=list)
    stop_reason: str = "max_outer"

    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])

    def grad_norms(self) -> np.ndarray:
        return np.array([r.grad_norm for r in self.records])

    def __len__(self) -> int:
        return len(self.records)


def accelerated_minimize(
    obj: Objective,
    manifold: Manifold,
    theta0: np.ndarray,
    cfg: CatalystConfig | None = None,
    callback=None,
) -> tuple[np.ndarray, OuterTrace]:
    """Accelerated outer loop around the adaptive prox step.

    Per outer iteration: (1) run the adaptive prox step from the current
    iterate; (2) minimize the surrogate around an extrapolated center at
    level ``kappa_cvx`` within a growing budget, stopping early once the
    extrapolation tolerance ``kappa_cvx/(k+1) * distance`` is met; (3) update
    the extrapolation anchor and weight; (4) keep the better candidate.
    Extrapolation steps that leave the inverse-retraction domain are skipped
    for that iteration and logged.  Stops once ``||grad f||`` at the adaptive
    candidate drops below ``eps``.
    """
    cfg = cfg or CatalystConfig()
    cfg.validate()
    kappa_cvx = cfg.kappa_cvx if cfg.kappa_cvx is not None else obj.smoothness_L
    if kappa_cvx is None or kappa_cvx <= 0:
        raise ConfigError("kappa_cvx unresolved: set cfg.kappa_cvx or obj.smoothness_L")

    start = time.perf_counter_ns()
    trace = OuterTrace()
    theta = theta0
    f_rec = obj.value(theta0)
    anchor_tilde = theta0
    alpha = 1.0
    kappa = cfg.kappa0

    for k in range(1, cfg.max_outer + 1):
        kappa_before = kappa
        prev_iterate = theta
        try:
            theta_bar, kappa = adaptive_prox_point(
                obj, manifold, theta, kappa, cfg.budget_t, cfg.line_search, cfg.max_doublings
            )
        except PrecisionLimitStall as exc:
            trace.stop_reason = "float_floor"
            trace.events.append(f"k={k}: {exc}")
            break
        doublings = int(round(math.log2(kappa / kappa_before))) if kappa > kappa_before else 0
        grad_norm_bar = manifold.norm(theta_bar, obj.gradient(theta_bar))
        stopping = grad_norm_bar < cfg.eps

        c2_met: bool | None = None
        extrapolation_skipped = False
        theta_tilde = None
        if not stopping:
            try:
                pull = manifold.inverse_retract(theta, anchor_tilde)
                center = manifold.retract(theta, alpha * pull)
            except DomainError:
                center = theta
                extrapolation_skipped = True
                trace.events.append(f"k={k}: extrapolated center out of domain; using current iterate")
            c2_tol = kappa_cvx / (k + 1)
            surrogate = ProxSurrogate(obj, manifold, kappa_cvx, center)

            def extrapolation_done(p, g, gn, _center=center, _tol=c2_tol):
                if np.array_equal(p, _center):
                    return False
                try:
                    return gn < _tol * manifold.distance(p, _center)
                except DomainError:
                    return False

            budget = max(1, math.ceil(cfg.budget_s * math.log(k + 1)))
            theta_tilde = solve_prox_subproblem(
                obj, manifold, kappa_cvx, center, budget, cfg.line_search, stop_when=extrapolation_done
            )
            try:
                gtn = manifold.norm(theta_tilde, surrogate.gradient(theta_tilde))
                c2_met = bool(gtn < c2_tol * manifold.distance(theta_tilde, center))
            except DomainError:
                c2_met = False
            if not c2_met:
                trace.events.append(f"k={k}: extrapolation tolerance missed (budget {budget})")
            try:
                push = manifold.inverse_retract(theta, theta_tilde)
                anchor_tilde = manifold.retract(theta, push / alpha)
            except DomainError:
                anchor_tilde = theta_tilde
                trace.events.append(f"k={k}: anchor update out of domain; anchoring at the candidate")
            alpha = alpha_next(alpha)

        # Keep whichever candidate improves the recorded value; ties prefer
        # the adaptive step.  Holding the previous iterate only happens when
        # float noise makes both fresh values read higher than the record.
        f_bar = obj.value(theta_bar)
        branch, best, f_best = "bar", theta_bar, f_bar
        if theta_tilde is not None:
            f_tilde = obj.value(theta_tilde)
            if f_tilde < f_bar:
                branch, best, f_best = "tilde", theta_tilde, f_tilde
        if f_best > f_rec:
            branch, best, f_best = "n/a", theta, f_rec
            trace.events.append(f"k={k}: held previous iterate (float-noise guard)")
        theta, f_rec = best, f_best

        record = OuterRecord(
            iter=k,
            f_value=f_rec,
            grad_norm=grad_norm_bar,
            kappa=kappa,
            branch=branch,
            c2_met=c2_met,
            doublings=doublings,
            extrapolation_skipped=extrapolation_skipped,
            elapsed_ns=time.perf_counter_ns() - start,
            theta_bar=theta_bar,
            theta_prev=prev_iterate,
        )
        trace.records.append(record)
        if callback is not None:
            callback(record, theta)
        if stopping:
            trace.stop_reason = "stationarity"
            break
    return theta, trace


def check_stationarity_bound(
    obj: Objective,
    manifold: Manifold,
    kappa: float,
    point: np.ndarray,
    center: np.ndarray,
    grad_dist_bound: float,
) -> bool:
    """Surrogate near-stationarity transfers to the objective:
    checks ||grad f(point)|| <= ||grad h(point)|| + kappa * K * d(point, center)
    where K bounds ||grad d^2|| / d on the region."""
    surrogate = ProxSurrogate(obj, manifold, kappa, center)
    eps_obs = manifold.norm(point, surrogate.gradient(point))
    dist = manifold.distance(point, center)
    grad_norm = manifold.norm(point, obj.gradient(point))
    return grad_norm <= eps_obs + kappa * grad_dist_bound * dist
