import numpy as np
import pytest

from mcat.errors import ConfigError, DomainError
from mcat.manifolds import (
    Grassmann,
    Sphere,
    check_retraction_axioms,
    retraction_distance,
    round_trip_residual,
)

E3 = np.eye(3)


def test_distance_to_self_is_zero():
    s = Sphere(2)
    assert retraction_distance(s, E3[0], E3[0]) == pytest.approx(0.0, abs=1e-12)


def test_distance_forced_by_inverse_formula():
    s = Sphere(2)
    q = (E3[0] + E3[1]) / np.sqrt(2)
    assert retraction_distance(s, E3[0], q) == pytest.approx(1.0, abs=1e-12)


def test_distance_outside_domain_raises():
    s = Sphere(2)
    with pytest.raises(DomainError):
        retraction_distance(s, E3[0], E3[1])


@pytest.mark.parametrize("manifold", [Sphere(9), Grassmann(5, 2)])
def test_retraction_axioms(manifold, rng):
    p = manifold.random_point(rng)
    report = check_retraction_axioms(manifold, p, trials=10, fd_step=1e-6, rng=rng)
    assert report.zero_residual <= 1e-12
    assert report.diff_residual <= 1e-4


def test_axiom_check_validates_inputs(rng):
    s = Sphere(2)
    with pytest.raises(ConfigError):
        check_retraction_axioms(s, E3[0], trials=0)
    with pytest.raises(ConfigError):
        check_retraction_axioms(s, E3[0], fd_step=0.0)


def test_differential_matches_central_difference_oracle(rng):
    # Independent second-order oracle for the identity-differential axiom.
    for manifold in (Sphere(9), Grassmann(5, 2)):
        p = manifold.random_point(rng)
        h = 1e-6
        for _ in range(5):
            v = manifold.random_tangent(p, rng)
            v = v / np.linalg.norm(v)
            central = (manifold.retract(p, h * v) - manifold.retract(p, -h * v)) / (2 * h)
            assert np.linalg.norm(central - v) <= 1e-4


@pytest.mark.parametrize("manifold", [Sphere(2), Sphere(9), Grassmann(5, 2), Grassmann(20, 5)])
def test_round_trip(manifold, rng):
    p = manifold.random_point(rng)
    assert round_trip_residual(manifold, p, trials=20, rng=rng, scale=1.0) <= 1e-10


@pytest.mark.parametrize("manifold", [Sphere(5), Grassmann(6, 2)])
def test_inner_product_positive_definite(manifold, rng):
    # Gram matrices of random tangents must admit a Cholesky factorization.
    for _ in range(5):
        p = manifold.random_point(rng)
        tangents = [manifold.random_tangent(p, rng) for _ in range(4)]
        gram = np.array([[manifold.inner(p, u, v) for v in tangents] for u in tangents])
        np.linalg.cholesky(gram + 1e-12 * np.eye(4))
        assert np.allclose(gram, gram.T)


def test_distance_is_not_assumed_symmetric(rng):
    # The contract makes no symmetry promise; just check both directions are
    # finite and nonnegative on the Grassmannian where they can differ.
    g = Grassmann(5, 2)
    a, b = g.random_point(rng), g.random_point(rng)
    dab = retraction_distance(g, a, b)
    dba = retraction_distance(g, b, a)
    assert dab >= 0 and dba >= 0
