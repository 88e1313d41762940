"""Low-rank matrix completion objective over the Grassmannian.

Each user column k carries weights c_k (1 on observed entries, lambda on
unobserved ones) and zero-filled ratings x_k.  The per-user coefficients
solve the weighted least-squares system

    w_k(U) = (U^T diag(c_k^2) U)^{-1} U^T (c_k^2 * x_k),

and the loss is 0.5 * sum_k ||c_k * (U w_k(U) - x_k)||^2.  Because w_k is
the inner minimizer, the ambient gradient is diag(c_k^2)(U w_k - x_k) w_k^T
summed over users; the Riemannian gradient is its horizontal projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SingularError
from .manifolds.base import TOL_DOMAIN
from .objectives import Objective, _IdentityCache


@dataclass
class CompletionProblem:
    """Dense ratings with an observation mask; desk-scale representation."""

    values: np.ndarray  # (M, N), zero at unobserved entries
    mask: np.ndarray  # (M, N) boolean, True where observed
    lam: float
    rank: int

    n_duplicates: int = 0  # ingestion bookkeeping
    _obs_per_user: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.shape != self.mask.shape or self.values.ndim != 2:
            raise ConfigError("values and mask must be matching 2-d arrays")
        if self.lam < 0:
            raise ConfigError("lambda must be nonnegative")
        if not 1 <= self.rank <= min(self.values.shape):
            raise ConfigError("rank must satisfy 1 <= r <= min(M, N)")
        if np.any(self.values[~self.mask] != 0.0):
            self.values = np.where(self.mask, self.values, 0.0)
        self._obs_per_user = self.mask.sum(axis=0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_observed(self) -> int:
        return int(self.mask.sum())

    def observations_per_user(self) -> np.ndarray:
        return self._obs_per_user.copy()


def user_weights(problem: CompletionProblem, u: np.ndarray, k: int) -> np.ndarray:
    """Closed-form weighted least-squares coefficients for user ``k``."""
    m, n = problem.shape
    if not 0 <= k < n:
        raise ConfigError(f"user index {k} out of range")
    c2 = np.where(problem.mask[:, k], 1.0, problem.lam**2)
    gram = u.T @ (c2[:, None] * u)
    rhs = u.T @ problem.values[:, k]  # c^2 * x is x itself: unobserved x is zero
    scale = float(np.abs(gram).max())
    sv_min = np.linalg.svd(gram, compute_uv=False)[-1]
    if sv_min <= TOL_DOMAIN * max(1.0, scale):
        raise SingularError(f"weight system singular for user {k}")
    return np.linalg.solve(gram, rhs)


class CompletionObjective(Objective):
    """Regularized completion loss; value/gradient work on any full-rank
    representative (the loss depends only on the column span)."""

    def __init__(self, problem: CompletionProblem):
        self.problem = problem
        m, n = problem.shape
        self.c2 = np.where(problem.mask, 1.0, problem.lam**2)
        self.xz = np.where(problem.mask, problem.values, 0.0)
        # With lam = 0 a user without observations has an all-zero weight
        # column; those users are skipped (their loss terms vanish anyway).
        self.skipped = (problem.lam == 0.0) & (problem.observations_per_user() == 0)
        self._cache = _IdentityCache()

    def weights(self, u: np.ndarray) -> np.ndarray:
        """All per-user coefficient vectors as an (r, N) matrix."""
        return self._evaluate(u)[0]

    def _evaluate(self, u: np.ndarray):
        cached = self._cache.get(u)
        if cached is not None:
            return cached
        m, n = self.problem.shape
        r = u.shape[1]
        v = (u[:, :, None] * u[:, None, :]).reshape(m, r * r)
        gram = (self.c2.T @ v).reshape(n, r, r)
        rhs = (u.T @ self.xz).T  # (N, r)
        if np.any(self.skipped):
            gram[self.skipped] = np.eye(r)
            rhs[self.skipped] = 0.0
        if self.problem.lam == 0.0:
            active = ~self.skipped
            if np.any(active):
                eigs = np.linalg.eigvalsh(gram[active])
                scale = np.maximum(eigs[:, -1], 1.0)
                if np.any(eigs[:, 0] <= TOL_DOMAIN * scale):
                    raise SingularError("weight system singular for a user with fewer observations than the rank")
        w = np.linalg.solve(gram, rhs[..., None])[..., 0].T  # (r, N)
        resid = u @ w - self.xz
        losses = 0.5 * np.einsum("ij,ij->j", self.c2 * resid, resid)  # 0.5 ||c_j * resid_j||^2
        payload = (w, losses)
        self._cache.put(u, payload)
        return payload

    def value(self, point):
        return float(self._evaluate(point)[1].sum())

    def per_user_losses(self, point) -> np.ndarray:
        return self._evaluate(point)[1]

    def decrease(self, point, other):
        lp = self._evaluate(point)[1]
        lq = self._evaluate(other)[1]
        return float(np.sum(lp - lq))

    def gradient(self, point):
        w = self._evaluate(point)[0]
        resid = self.c2 * (point @ w - self.xz)  # c^2 * (Uw - x)
        ambient = resid @ w.T
        gram = point.T @ point
        coeff = np.linalg.solve(gram, point.T @ ambient)
        return ambient - point @ coeff

    def predict(self, u: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        w = self.weights(u)
        return np.einsum("ij,ij->i", u[rows], w[:, cols].T)
