import numpy as np
import pytest

from mcat.manifolds import Sphere
from mcat.objectives import Objective


class ZeroObjective(Objective):
    smoothness_L = 0.0

    def value(self, point):
        return 0.0

    def gradient(self, point):
        return np.zeros_like(point)


class AmbientLinearObjective(Objective):
    """f(theta) = offset + coeff . theta restricted to a sphere.

    Covers the negated-chordal construction -c * d_e^2(theta, pole) used to
    exercise the weakly convex machinery: coeff = 2c * pole, offset = -2c.
    """

    def __init__(self, coeff, sphere: Sphere, offset: float = 0.0):
        self.coeff = np.asarray(coeff, dtype=float)
        self.sphere = sphere
        self.offset = offset
        self.smoothness_L = float(np.linalg.norm(self.coeff))

    def value(self, point):
        return self.offset + float(self.coeff @ point)

    def decrease(self, point, other):
        return float(self.coeff @ (point - other))

    def gradient(self, point):
        return self.sphere.project_tangent(point, self.coeff)


class RayleighObjective(Objective):
    """f(theta) = theta^T A theta on a sphere (eigenvector objective);
    weakly convex with saddles at eigenvectors."""

    def __init__(self, matrix, sphere: Sphere):
        self.a = np.asarray(matrix, dtype=float)
        self.sphere = sphere
        ev = np.linalg.eigvalsh(self.a)
        self.smoothness_L = 2.0 * float(ev[-1] - ev[0]) + 1e-12

    def value(self, point):
        return float(point @ self.a @ point)

    def decrease(self, point, other):
        w = point - other
        return float(w @ self.a @ (point + other))

    def gradient(self, point):
        return self.sphere.project_tangent(point, 2.0 * self.a @ point)


def negated_chordal_objective(sphere: Sphere, pole: np.ndarray, c: float = 1.0) -> AmbientLinearObjective:
    """-c * d_e^2(theta, pole): concave around the pole, modulus about 2c."""
    return AmbientLinearObjective(2.0 * c * pole, sphere, offset=-2.0 * c)


def unit_tangent(manifold, point, rng):
    v = manifold.random_tangent(point, rng)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
