"""Synthetic data generators and ratings-file ingestion."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .completion import CompletionProblem
from .errors import ConfigError, ParseError
from .manifolds.sphere import Sphere


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def generate_sphere_data(n: int, dim: int, seed) -> np.ndarray:
    """n standard-normal vectors in R^{dim+1} projected to the unit sphere."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    rng = as_rng(seed)
    x = rng.standard_normal((n, dim + 1))
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms < 1e-12):  # measure-zero resample
        bad = norms < 1e-12
        x[bad] = rng.standard_normal((int(bad.sum()), dim + 1))
        norms = np.linalg.norm(x, axis=1)
    return x / norms[:, None]


def generate_sphere_ball_data(n: int, dim: int, radius: float, seed, center: np.ndarray | None = None) -> np.ndarray:
    """n points inside the geodesic ball of the given radius.

    The center defaults to a random point drawn first from the same stream.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    if not 0 < radius < np.pi:
        raise ConfigError("radius must lie in (0, pi)")
    rng = as_rng(seed)
    sphere = Sphere(dim)
    c = sphere.random_point(rng) if center is None else center
    pts = np.empty((n, dim + 1))
    for i in range(n):
        v = sphere.random_tangent(c, rng)
        nv = np.linalg.norm(v)
        r = radius * rng.random()
        pts[i] = c if nv < 1e-12 else sphere.exp(c, (r / nv) * v)
    return pts


@dataclass
class HeldOutRatings:
    """Test split of a synthetic completion problem."""

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def generate_lowrank_data(
    rows: int,
    cols: int,
    rank: int,
    density: float,
    noise_sd: float,
    lam: float,
    seed,
) -> tuple[CompletionProblem, HeldOutRatings]:
    """Noisy low-rank matrix with Bernoulli(density) observations and an
    80/20 train/test split of the observed entries."""
    if rank < 1 or rank > min(rows, cols):
        raise ConfigError("rank must satisfy 1 <= r <= min(rows, cols)")
    if not 0.0 < density <= 1.0:
        raise ConfigError("density must lie in (0, 1]")
    if noise_sd < 0:
        raise ConfigError("noise must be nonnegative")
    rng = as_rng(seed)
    a = rng.standard_normal((rows, rank))
    b = rng.standard_normal((cols, rank))
    x = a @ b.T
    if noise_sd > 0:
        x = x + noise_sd * rng.standard_normal((rows, cols))
    observed = rng.random((rows, cols)) < density
    test = observed & (rng.random((rows, cols)) < 0.2)
    train = observed & ~test
    if lam == 0.0 and np.any(train.sum(axis=0) == 0):
        raise ConfigError("a user column has no training observations and lambda is zero")
    problem = CompletionProblem(values=np.where(train, x, 0.0), mask=train, lam=lam, rank=rank)
    ti, tj = np.nonzero(test)
    held_out = HeldOutRatings(rows=ti, cols=tj, values=x[ti, tj])
    return problem, held_out


def ingest_ratings(path, lam: float = 0.01, rank: int = 5) -> CompletionProblem:
    """Read `item <TAB> user <TAB> rating` triples (0-based indices).

    Lines starting with '#' are skipped; duplicate (item, user) pairs keep
    the last value and are counted on the returned problem.
    """
    entries: dict[tuple[int, int], float] = {}
    duplicates = 0
    max_i = -1
    max_j = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(parts)}", line=lineno)
            try:
                i = int(parts[0])
                j = int(parts[1])
                rating = float(parts[2])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
            if i < 0 or j < 0:
                raise IndexError(f"line {lineno}: negative index ({i}, {j})")
            if (i, j) in entries:
                duplicates += 1
            entries[(i, j)] = rating
            max_i = max(max_i, i)
            max_j = max(max_j, j)
    if not entries:
        raise ParseError(f"no rating entries found in {Path(path)}")
    values = np.zeros((max_i + 1, max_j + 1))
    mask = np.zeros((max_i + 1, max_j + 1), dtype=bool)
    for (i, j), rating in entries.items():
        values[i, j] = rating
        mask[i, j] = True
    rank = min(rank, max_i + 1, max_j + 1)  # small files cap the usable rank
    return CompletionProblem(values=values, mask=mask, lam=lam, rank=rank, n_duplicates=duplicates)
