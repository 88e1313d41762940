"""Smooth objectives with Riemannian gradients.

Every objective exposes ``value``, ``gradient`` and ``decrease``.
``decrease(p, q) = value(p) - value(q)`` by default, but objectives whose
values sit on a large additive pedestal override it with a cancellation-free
formula; line searches use ``decrease`` so that progress remains resolvable
far below the rounding noise of the raw values.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DegenerateError, DomainError
from .manifolds.base import Manifold, TOL_DOMAIN
from .manifolds.sphere import Sphere


class Objective:
    """Value + Riemannian gradient contract.

    ``smoothness_L`` is an optional estimate of the gradient's Lipschitz
    constant, used only to seed default smoothing levels.
    """

    smoothness_L: float | None = None

    def value(self, point: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, point: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def decrease(self, point: np.ndarray, other: np.ndarray) -> float:
        """value(point) - value(other); override when the difference can be
        computed more accurately than the two values."""
        return self.value(point) - self.value(other)


class _IdentityCache:
    """Tiny memo keyed by array identity; holds references so ids stay valid."""

    def __init__(self, capacity: int = 8):
        self.capacity = capacity
        self._entries: list[tuple[int, np.ndarray, object]] = []

    def get(self, key: np.ndarray):
        for ident, ref, payload in self._entries:
            if ident == id(key) and ref is key:
                return payload
        return None

    def put(self, key: np.ndarray, payload) -> None:
        if len(self._entries) >= self.capacity:
            self._entries.pop(0)
        self._entries.append((id(key), key, payload))


class FrechetIntrinsic(Objective):
    """Sum of squared geodesic distances to the data points on a sphere."""

    def __init__(self, data: np.ndarray, sphere: Sphere):
        data = np.atleast_2d(np.asarray(data, dtype=float))
        if data.size == 0:
            raise ConfigError("data must be nonempty")
        if data.shape[1] != sphere.ambient_dim:
            raise ConfigError("data dimension does not match the sphere")
        self.data = data
        self.sphere = sphere
        self._cache = _IdentityCache()

    def _cos_angles(self, point: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cached = self._cache.get(point)
        if cached is None:
            c = np.clip(self.data @ point, -1.0, 1.0)
            cached = (c, np.arccos(c))
            self._cache.put(point, cached)
        return cached

    def value(self, point):
        a = self._cos_angles(point)[1]
        return float(a @ a)

    def decrease(self, point, other):
        # Sum of a_i^2 - b_i^2 with a = angle(point, x_i), b = angle(other, x_i).
        # For nearby well-conditioned terms the angle difference is recovered
        # from sin(a-b) = (c_b - c_a)(c_b + c_a)/sin(a+b) with the dot-product
        # difference computed on (other - point) directly, which keeps the
        # result accurate relative to its own size instead of the value scale.
        cp, a = self._cos_angles(point)
        cq, b = self._cos_angles(other)
        plain = (a - b) * (a + b)
        dc = self.data @ (other - point)  # c_b - c_a without cancellation
        csum = cp + cq
        sin_sum = np.sqrt(np.maximum(1.0 - cp * cp, 0.0)) * cq + cp * np.sqrt(np.maximum(1.0 - cq * cq, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            arg = dc * csum / sin_sum
        stable = (csum > 0.5) & (sin_sum > 1e-12) & (np.abs(arg) <= 0.7)
        delta = np.arcsin(np.clip(arg, -1.0, 1.0))
        return float(np.sum(np.where(stable, delta * (a + b), plain)))

    def gradient(self, point):
        c = np.clip(self.data @ point, -1.0, 1.0)
        if np.any(c <= -1.0 + TOL_DOMAIN):
            raise DomainError("gradient undefined: a data point is antipodal to the evaluation point")
        d = np.arccos(c)
        # d/sin(d) -> 1 as d -> 0; points within tolerance of p contribute zero.
        coef = np.ones_like(d)
        interior = c < 1.0 - TOL_DOMAIN
        coef[interior] = d[interior] / np.sin(d[interior])
        logs = coef[:, None] * (self.data - c[:, None] * point[None, :])
        g = -2.0 * logs.sum(axis=0)
        return self.sphere.project_tangent(point, g)


class FrechetExtrinsic(Objective):
    """Sum of squared chordal distances, 2(1 - p.x_i), on a sphere."""

    def __init__(self, data: np.ndarray, sphere: Sphere):
        data = np.atleast_2d(np.asarray(data, dtype=float))
        if data.size == 0:
            raise ConfigError("data must be nonempty")
        if data.shape[1] != sphere.ambient_dim:
            raise ConfigError("data dimension does not match the sphere")
        self.n = data.shape[0]
        self.data_sum = data.sum(axis=0)
        self.sphere = sphere
        # The gradient is -2 (I - p p^T) s; 2 |s| bounds its variation.
        self.smoothness_L = 2.0 * float(np.linalg.norm(self.data_sum)) + 1e-12

    def value(self, point):
        return 2.0 * (self.n - float(point @ self.data_sum))

    def decrease(self, point, other):
        # 2 s.(q - p) evaluated on the small difference vector: no pedestal.
        return 2.0 * float(self.data_sum @ (other - point))

    def gradient(self, point):
        return -2.0 * self.sphere.project_tangent(point, self.data_sum)


def closed_form_extrinsic_mean(data: np.ndarray) -> np.ndarray:
    """Normalized Euclidean mean; the global extrinsic minimizer."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    s = data.sum(axis=0)
    n = float(np.linalg.norm(s))
    if n <= TOL_DOMAIN:
        raise DegenerateError("Euclidean mean is numerically zero; extrinsic mean undefined")
    return s / n


def gradient_check(
    obj: Objective,
    manifold: Manifold,
    point: np.ndarray,
    h: float = 1e-5,
    directions: int = 5,
    rng: np.random.Generator | None = None,
) -> float:
    """Worst relative mismatch between <grad, v> and a central difference
    of the objective along the retraction curve through ``point``."""
    if h <= 0:
        raise ConfigError("h must be positive")
    rng = np.random.default_rng(0) if rng is None else rng
    g = obj.gradient(point)
    worst = 0.0
    for _ in range(directions):
        v = manifold.random_tangent(point, rng)
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v = v / nv
        analytic = manifold.inner(point, g, v)
        fd = (obj.value(manifold.retract(point, h * v)) - obj.value(manifold.retract(point, -h * v))) / (2 * h)
        worst = max(worst, abs(analytic - fd) / (1.0 + abs(analytic)))
    return worst


def estimate_smoothness(
    obj: Objective,
    manifold: Manifold,
    center: np.ndarray,
    radius: float = 0.5,
    pairs: int = 32,
    rng: np.random.Generator | None = None,
) -> float:
    """Empirical gradient-Lipschitz estimate: max ||grad difference|| / distance
    over point pairs sampled in a retraction ball around ``center``."""
    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    for _ in range(pairs):
        pts = []
        for _ in range(2):
            v = manifold.random_tangent(center, rng)
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                break
            pts.append(manifold.retract(center, (radius * rng.random() / nv) * v))
        if len(pts) < 2:
            continue
        p, q = pts
        try:
            d = manifold.distance(p, q)
            if d < 1e-9:
                continue
            ratio = float(np.linalg.norm(obj.gradient(p) - obj.gradient(q))) / d
        except DomainError:
            continue
        worst = max(worst, ratio)
    return worst
