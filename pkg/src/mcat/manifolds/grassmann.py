"""Grassmannian Gr(M, r): r-dimensional subspaces of R^M.

Subspaces are represented by M x r matrices of full column rank,
canonicalized to column-orthonormal form with a deterministic sign
convention so that traces are reproducible.  The retraction is the
additive map ``R_U(H) = canonicalize(U + H)`` on horizontal vectors
(``U^T H = 0``); its inverse rescales the target representative by
``(U^T Y)^{-1}`` before projecting, which makes the round trip
inverse(retract) exact on horizontal vectors and the distance
well-defined on the quotient.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from .base import Manifold, TOL_DOMAIN, TOL_MEMBERSHIP, TOL_TANGENT

TOL_RANK = 1e-8


def canonicalize(rep: np.ndarray) -> np.ndarray:
    """Column-orthonormal representative with positive triangular diagonal."""
    q, r = np.linalg.qr(rep)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


class Grassmann(Manifold):
    def __init__(self, ambient_dim: int, rank: int):
        if rank < 1 or ambient_dim < 1 or rank > ambient_dim:
            raise ValueError("need 1 <= rank <= ambient_dim")
        self.ambient_dim = ambient_dim
        self.rank = rank
        self.name = f"grassmann(Gr({ambient_dim},{rank}))"

    def retract(self, point, tangent):
        # (U+H)^T (U+H) = I + H^T H for horizontal H, so full rank is automatic.
        return canonicalize(point + tangent)

    def inverse_retract(self, point, target):
        target = canonicalize(target)
        a = point.T @ target
        smallest = np.linalg.svd(a, compute_uv=False)[-1]
        if smallest <= TOL_DOMAIN:
            raise DomainError(f"subspaces contain orthogonal directions (sigma_min = {smallest:.3e})")
        rescaled = np.linalg.solve(a.T, target.T).T  # target @ inv(a)
        return self.project_tangent(point, rescaled - point)

    def project_tangent(self, point, ambient):
        return ambient - point @ (point.T @ ambient)

    def random_point(self, rng):
        return canonicalize(rng.standard_normal((self.ambient_dim, self.rank)))

    def contains(self, point, tol=TOL_MEMBERSHIP):
        if point.shape != (self.ambient_dim, self.rank):
            return False
        sv = np.linalg.svd(point, compute_uv=False)
        if sv[-1] <= TOL_RANK:
            return False
        return float(np.linalg.norm(point.T @ point - np.eye(self.rank))) <= tol

    def is_tangent(self, point, vector, tol=TOL_TANGENT):
        return float(np.linalg.norm(point.T @ vector)) <= tol * max(1.0, float(np.linalg.norm(vector)))

    def grad_dist_sq(self, point, center):
        # With orthonormal representatives, distance(U, Y)^2 = tr((U^T Y Y^T U)^{-1}) - r,
        # whose ambient gradient is -2 Y Y^T U (U^T Y Y^T U)^{-2}.
        b = center.T @ point  # r x r
        gram = b.T @ b
        smallest = np.linalg.svd(b, compute_uv=False)[-1]
        if smallest <= TOL_DOMAIN:
            raise DomainError(f"subspaces contain orthogonal directions (sigma_min = {smallest:.3e})")
        inv2 = np.linalg.solve(gram, np.linalg.solve(gram, np.eye(self.rank)))
        ambient = -2.0 * center @ (b @ inv2)
        return self.project_tangent(point, ambient)


def subspace_distance(u: np.ndarray, y: np.ndarray) -> float:
    """Frobenius norm of the principal-angle vector; representative-invariant.

    Small angles come from the sine-based singular values (the cosine route
    loses half the digits near zero), large ones from the cosine route.
    """
    uc = canonicalize(u)
    yc = canonicalize(y)
    overlap = uc.T @ yc
    cos_sv = np.clip(np.linalg.svd(overlap, compute_uv=False), 0.0, 1.0)
    sin_sv = np.clip(np.linalg.svd(yc - uc @ overlap, compute_uv=False), 0.0, 1.0)
    # cos singular values sort angles ascending, sine ones descending.
    angles = np.where(cos_sv > 0.7, np.arcsin(np.sort(sin_sv)), np.arccos(cos_sv))
    return float(np.linalg.norm(angles))
