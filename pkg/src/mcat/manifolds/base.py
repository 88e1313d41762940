"""Abstract manifold contract all solvers program against.

A manifold supplies a retraction, its (locally defined) inverse, tangent
arithmetic and seeded sampling.  Points and tangent vectors are plain
float64 numpy arrays whose layout is owned by the concrete manifold
(vectors on the sphere, tall matrices on the Grassmannian).

The retraction distance ``d(p, q) = ||inverse_retract(p, q)||`` is
one-sided: it is generally *not* symmetric in its arguments, and no code
here may assume symmetry.  Targets outside the inverse-retraction domain
raise :class:`~mcat.errors.DomainError` instead of returning huge values.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DomainError

# Default tolerances; the analysis neighborhoods are never modeled explicitly.
TOL_MEMBERSHIP = 1e-9
TOL_TANGENT = 1e-9
TOL_DOMAIN = 1e-12


class Manifold(ABC):
    """Retraction-based manifold contract."""

    name: str = "manifold"

    @abstractmethod
    def retract(self, point: np.ndarray, tangent: np.ndarray) -> np.ndarray:
        """Map a tangent vector at ``point`` back onto the manifold."""

    @abstractmethod
    def inverse_retract(self, point: np.ndarray, target: np.ndarray) -> np.ndarray:
        """Tangent vector ``v`` at ``point`` with ``retract(point, v) = target``.

        Raises DomainError when ``target`` is outside the domain.
        """

    @abstractmethod
    def project_tangent(self, point: np.ndarray, ambient: np.ndarray) -> np.ndarray:
        """Orthogonal projection of an ambient vector onto the tangent space."""

    @abstractmethod
    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        """Sample a point; randomness comes only from the caller's generator."""

    @abstractmethod
    def contains(self, point: np.ndarray, tol: float = TOL_MEMBERSHIP) -> bool:
        """Membership predicate at tolerance ``tol``."""

    @abstractmethod
    def is_tangent(self, point: np.ndarray, vector: np.ndarray, tol: float = TOL_TANGENT) -> bool:
        """Tangency predicate at tolerance ``tol``."""

    @abstractmethod
    def grad_dist_sq(self, point: np.ndarray, center: np.ndarray) -> np.ndarray:
        """Riemannian gradient of ``p -> distance(p, center)**2`` at ``point``."""

    def random_tangent(self, point: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.project_tangent(point, rng.standard_normal(point.shape))

    def inner(self, point: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(u * v))

    def norm(self, point: np.ndarray, v: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(point, v, v), 0.0)))

    def zero_tangent(self, point: np.ndarray) -> np.ndarray:
        return np.zeros_like(point)

    def distance(self, point: np.ndarray, target: np.ndarray) -> float:
        """Retraction distance ``||inverse_retract(point, target)||``; asymmetric."""
        return self.norm(point, self.inverse_retract(point, target))


def retraction_distance(manifold: Manifold, point: np.ndarray, target: np.ndarray) -> float:
    """Norm of the inverse retraction; zero iff the points coincide.

    Raises DomainError when ``target`` is outside the inverse-retraction
    domain of ``point``.
    """
    return manifold.distance(point, target)


@dataclass(frozen=True)
class AxiomReport:
    """Residuals of the two retraction axioms at a point."""

    zero_residual: float
    diff_residual: float


def check_retraction_axioms(
    manifold: Manifold,
    point: np.ndarray,
    trials: int = 10,
    fd_step: float = 1e-6,
    rng: np.random.Generator | None = None,
) -> AxiomReport:
    """Measure how well the retraction satisfies its defining properties.

    ``zero_residual`` is the ambient distance between ``retract(p, 0)`` and
    ``p``.  ``diff_residual`` is the worst forward-difference residual
    ``||(retract(p, h v) - p)/h - v||`` over ``trials`` random unit tangents,
    probing that the differential at the zero vector is the identity.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if fd_step <= 0:
        raise ConfigError("fd_step must be positive")
    rng = np.random.default_rng(0) if rng is None else rng

    zero_res = float(np.linalg.norm(manifold.retract(point, manifold.zero_tangent(point)) - point))

    diff_res = 0.0
    for _ in range(trials):
        v = manifold.random_tangent(point, rng)
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v = v / nv
        stepped = manifold.retract(point, fd_step * v)
        residual = np.linalg.norm((stepped - point) / fd_step - v)
        diff_res = max(diff_res, float(residual))
    return AxiomReport(zero_residual=zero_res, diff_residual=diff_res)


def round_trip_residual(
    manifold: Manifold,
    point: np.ndarray,
    trials: int = 10,
    rng: np.random.Generator | None = None,
    scale: float = 1.0,
) -> float:
    """Worst ``||inverse_retract(p, retract(p, v)) - v||`` over random tangents.

    Tangents are drawn with norm at most ``scale``.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng

    worst = 0.0
    for _ in range(trials):
        v = manifold.random_tangent(point, rng)
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v = v * (scale * rng.random() / nv)
        try:
            back = manifold.inverse_retract(point, manifold.retract(point, v))
        except DomainError:
            continue
        worst = max(worst, float(np.linalg.norm(back - v)))
    return worst
