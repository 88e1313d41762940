"""Empirical estimators for the convexity machinery.

All constants are measured over explicitly sampled regions, never claimed
globally.  Sampling is sequential from the caller's generator, so a larger
sample count with the same seed extends the smaller one (estimates are
monotone under sample growth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, McatError
from .manifolds.base import Manifold
from .objectives import Objective
from .solver import ProxSurrogate


@dataclass
class RegularityEstimates:
    """Recorded geometric/regularity constants for a sampled region.

    k1, k2: inverse-retraction bi-Lipschitz bounds (>= 1); r1: strong
    retraction convexity modulus in [0, 1]; grad_dist_bound: bound on
    ||grad d^2|| / d; delta: sampled radius; smoothness / strong_convexity /
    weak_convexity: objective-level estimates.  None means "not measured".
    """

    k1: float | None = None
    k2: float | None = None
    r1: float | None = None
    grad_dist_bound: float | None = None
    delta: float | None = None
    smoothness: float | None = None
    strong_convexity: float | None = None
    weak_convexity: float | None = None

    def validate(self) -> None:
        for name in ("k1", "k2"):
            v = getattr(self, name)
            if v is not None and (not np.isfinite(v) or v < 1.0):
                raise ConfigError(f"{name} must be finite and >= 1")
        if self.r1 is not None and not (0.0 <= self.r1 <= 1.0 and np.isfinite(self.r1)):
            raise ConfigError("r1 must lie in [0, 1]")


def _ball_point(manifold: Manifold, center: np.ndarray, radius: float, rng: np.random.Generator) -> np.ndarray:
    v = manifold.random_tangent(center, rng)
    nv = float(np.linalg.norm(v))
    u = rng.random()
    if nv < 1e-12:
        return center.copy()
    return manifold.retract(center, (radius * u / nv) * v)


def _ball_pairs(manifold, center, radius, pairs, rng):
    for _ in range(pairs):
        yield _ball_point(manifold, center, radius, rng), _ball_point(manifold, center, radius, rng)


def estimate_weak_convexity(
    obj: Objective,
    manifold: Manifold,
    center: np.ndarray,
    radius: float,
    pairs: int,
    rng: np.random.Generator,
) -> float:
    """Largest weak-convexity modulus exhibited by sampled pairs.

    Combines the first-order form 2*(f(a) + <grad f(a), v> - f(b)) / d^2 with
    a midpoint secant form; nonpositive output means no convexity violation
    was observed on the sample.
    """
    if pairs < 1:
        raise ConfigError("pairs must be >= 1")
    worst = -math.inf
    used = 0
    for a, b in _ball_pairs(manifold, center, radius, pairs, rng):
        try:
            v = manifold.inverse_retract(a, b)
            d2 = float(np.sum(v * v))
            if d2 < 1e-18:
                continue
            fa, fb = obj.value(a), obj.value(b)
            first_order = 2.0 * (fa + manifold.inner(a, obj.gradient(a), v) - fb) / d2
            mid = manifold.retract(a, 0.5 * v)
            secant = 8.0 * (obj.value(mid) - 0.5 * (fa + fb)) / d2
        except DomainError:
            continue
        worst = max(worst, first_order, secant)
        used += 1
    if used == 0:
        raise McatError("all sampled pairs were skipped; region too large for the retraction domain")
    return worst


def count_surrogate_convexity_violations(
    obj: Objective,
    manifold: Manifold,
    kappa: float,
    center: np.ndarray,
    radius: float,
    pairs: int,
    rng: np.random.Generator,
    slack: float = 1e-9,
) -> int:
    """Violations of first-order convexity of the prox surrogate anchored at
    ``center`` over sampled pairs; 0 means convex at sample resolution."""
    if pairs < 1:
        raise ConfigError("pairs must be >= 1")
    surrogate = ProxSurrogate(obj, manifold, kappa, center)
    violations = 0
    used = 0
    for a, b in _ball_pairs(manifold, center, radius, pairs, rng):
        try:
            v = manifold.inverse_retract(a, b)
            # gap = h(b) - h(a) - <grad h(a), v>, nonnegative when h is convex
            gap = surrogate.decrease(b, a) - manifold.inner(a, surrogate.gradient(a), v)
            scale = max(1.0, abs(surrogate.value(a)), abs(surrogate.value(b)))
        except DomainError:
            continue
        used += 1
        if gap < -slack * scale:
            violations += 1
    if used == 0:
        raise McatError("all sampled pairs were skipped")
    return violations


def estimate_strong_retraction_convexity(
    manifold: Manifold,
    center: np.ndarray,
    radius: float,
    pairs: int,
    rng: np.random.Generator,
) -> float:
    """Smallest quadratic-lower-bound modulus of d(., center)^2 over sampled
    pairs, clamped to [0, 1]."""
    if pairs < 1:
        raise ConfigError("pairs must be >= 1")
    worst = math.inf
    used = 0
    for a, b in _ball_pairs(manifold, center, radius, pairs, rng):
        try:
            v = manifold.inverse_retract(a, b)
            d2_ab = float(np.sum(v * v))
            if d2_ab < 1e-18:
                continue
            da = manifold.distance(a, center)
            db = manifold.distance(b, center)
            slope = manifold.inner(a, manifold.grad_dist_sq(a, center), v)
            ratio = (db * db - da * da - slope) / d2_ab
        except DomainError:
            continue
        worst = min(worst, ratio)
        used += 1
    if used == 0:
        raise McatError("all sampled pairs were skipped")
    return float(min(1.0, max(0.0, worst)))


def estimate_bilipschitz(
    manifold: Manifold,
    center: np.ndarray,
    radius: float,
    pairs: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Bi-Lipschitz bounds for the inverse retraction at ``center``:
    (1/k1) d(v1, v2) <= ||R^{-1}v1 - R^{-1}v2|| <= k2 d(v1, v2)."""
    if pairs < 1:
        raise ConfigError("at least one pair is required")
    k1 = 1.0
    k2 = 1.0
    used = 0
    for a, b in _ball_pairs(manifold, center, radius, pairs, rng):
        try:
            diff = float(np.linalg.norm(manifold.inverse_retract(center, a) - manifold.inverse_retract(center, b)))
            dist = manifold.distance(a, b)
        except DomainError:
            continue
        if dist < 1e-12 or diff < 1e-12:
            continue
        k1 = max(k1, dist / diff)
        k2 = max(k2, diff / dist)
        used += 1
    if used == 0:
        raise McatError("all sampled pairs were skipped")
    return k1, k2


def estimate_grad_dist_bound(
    manifold: Manifold,
    center: np.ndarray,
    radius: float,
    samples: int,
    rng: np.random.Generator,
) -> float:
    """Largest ||grad_p d(p, center)^2|| / d(p, center) over points sampled in
    the ball (about 2 in the flat limit).

    The anchor is the region center, matching how the bound is consumed: it
    must cover pairs whose retraction distance stays within ``radius``.
    """
    if samples < 1:
        raise ConfigError("at least one sample is required")
    worst = 0.0
    used = 0
    for _ in range(samples):
        p = _ball_point(manifold, center, radius, rng)
        try:
            dist = manifold.distance(p, center)
            if dist < 1e-12:
                continue
            worst = max(worst, manifold.norm(p, manifold.grad_dist_sq(p, center)) / dist)
        except DomainError:
            continue
        used += 1
    if used == 0:
        raise McatError("all samples were skipped")
    return worst


@dataclass(frozen=True)
class GridSlack:
    intrinsic: float
    extrinsic: float


def sphere_convexity_grid_slack(step: float, mu: float = 1.0) -> GridSlack:
    """Worst slack of the squared-distance strong-convexity inequalities on a
    spherical-triangle grid (d1, d2 in [0, pi/4], d3 in [|d1-d2|, d1+d2]).

    Intrinsic:  d2^2  - (d1^2 - 2 d1 d3 C / (sin d1 sin d3) + (mu/2) d3^2)
    Extrinsic:  2(1-cos d2) - (2(1-cos d1) - 2 d3 C / sin d3 + (mu/2) d3^2)
    with C = cos d2 - cos d3 cos d1.  Grid cells with sin d1 or sin d3 below
    1e-9 are boundary-degenerate and excluded.  Deterministic in ``step``.
    """
    if not 0.0 < step <= 0.1:
        raise ConfigError("step must lie in (0, 0.1]")
    base = np.arange(0.0, np.pi / 4 + step / 2, step)
    d1 = base[:, None, None]
    d2 = base[None, :, None]
    jmax = int(math.ceil((np.pi / 2) / step)) + 1
    offsets = (np.arange(jmax) * step)[None, None, :]
    d3 = np.abs(d1 - d2) + offsets
    valid = d3 <= d1 + d2 + 1e-12
    valid &= np.sin(d1) >= 1e-9
    valid &= np.sin(d3) >= 1e-9

    cross = np.cos(d2) - np.cos(d3) * np.cos(d1)
    with np.errstate(divide="ignore", invalid="ignore"):
        intrinsic = d2**2 - (d1**2 - 2 * d1 * d3 * cross / (np.sin(d1) * np.sin(d3)) + 0.5 * mu * d3**2)
        extrinsic = 2 * (1 - np.cos(d2)) - (2 * (1 - np.cos(d1)) - 2 * d3 * cross / np.sin(d3) + 0.5 * mu * d3**2)
    if not np.any(valid):
        raise McatError("grid is empty; decrease the step")
    return GridSlack(
        intrinsic=float(np.min(intrinsic[valid])),
        extrinsic=float(np.min(extrinsic[valid])),
    )
