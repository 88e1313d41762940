"""Unit sphere S^d embedded in R^{d+1}.

Uses the projection retraction ``R_p(v) = (p + v)/|p + v|`` with inverse
``R_p^{-1}(q) = q/(p.q) - p``, defined on the open hemisphere ``p.q > 0``.
Geodesic (exp/log) maps are provided for the intrinsic mean objective.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from .base import Manifold, TOL_DOMAIN, TOL_MEMBERSHIP, TOL_TANGENT


class Sphere(Manifold):
    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("sphere dimension must be >= 1")
        self.dim = dim
        self.ambient_dim = dim + 1
        self.name = f"sphere(S^{dim})"

    def retract(self, point, tangent):
        w = point + tangent
        return w / np.linalg.norm(w)

    def inverse_retract(self, point, target):
        c = float(point @ target)
        if c <= TOL_DOMAIN:
            raise DomainError(f"target outside hemisphere of base point (p.q = {c:.3e})")
        return target / c - point

    def project_tangent(self, point, ambient):
        return ambient - (point @ ambient) * point

    def random_point(self, rng):
        while True:
            x = rng.standard_normal(self.ambient_dim)
            n = np.linalg.norm(x)
            if n >= 1e-12:
                return x / n

    def contains(self, point, tol=TOL_MEMBERSHIP):
        return point.shape == (self.ambient_dim,) and abs(np.linalg.norm(point) - 1.0) <= tol

    def is_tangent(self, point, vector, tol=TOL_TANGENT):
        return abs(float(point @ vector)) <= tol * max(1.0, float(np.linalg.norm(vector)))

    def grad_dist_sq(self, point, center):
        # distance(p, c)^2 = 1/(p.c)^2 - 1, so the ambient gradient is
        # -2 c / (p.c)^3; subtracting the radial part leaves -2 (c - (p.c) p)/(p.c)^3.
        c = float(point @ center)
        if c <= TOL_DOMAIN:
            raise DomainError(f"center outside hemisphere of base point (p.c = {c:.3e})")
        g = (-2.0 / c**3) * (center - c * point)
        return self.project_tangent(point, g)

    # Geodesic maps, used by the intrinsic mean objective.

    def exp(self, point, tangent):
        """Geodesic starting at ``point`` with initial velocity ``tangent``, at time 1."""
        nv = float(np.linalg.norm(tangent))
        if nv == 0.0:
            return point.copy()
        return np.cos(nv) * point + (np.sin(nv) / nv) * tangent

    def log(self, point, target):
        """Initial velocity of the geodesic from ``point`` to ``target``.

        Returns the zero tangent when the points (numerically) coincide and
        raises DomainError at the antipode, where the map is undefined.
        """
        c = float(np.clip(point @ target, -1.0, 1.0))
        if c >= 1.0 - TOL_DOMAIN:
            return np.zeros_like(point)
        if c <= -1.0 + TOL_DOMAIN:
            raise DomainError("log undefined at antipodal points")
        d = float(np.arccos(c))
        return (d / np.sin(d)) * (target - c * point)

    def geodesic_distance(self, point, target):
        """Great-circle distance in [0, pi]; the dot product is clamped first."""
        return float(np.arccos(np.clip(point @ target, -1.0, 1.0)))
