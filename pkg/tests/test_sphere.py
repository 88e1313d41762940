import numpy as np
import pytest

from mcat.errors import DomainError
from mcat.manifolds import Sphere

E3 = np.eye(3)
S2 = Sphere(2)


class TestRetract:
    def test_zero_tangent(self):
        assert np.allclose(S2.retract(E3[0], np.zeros(3)), E3[0], atol=1e-15)

    def test_unit_tangent(self):
        expected = (E3[0] + E3[1]) / np.sqrt(2)
        assert np.allclose(S2.retract(E3[0], E3[1]), expected, atol=1e-15)

    def test_long_tangent(self):
        expected = (E3[0] + 3 * E3[1]) / np.sqrt(10)
        assert np.allclose(S2.retract(E3[0], 3 * E3[1]), expected, atol=1e-15)


class TestInverseRetract:
    def test_self(self):
        assert np.linalg.norm(S2.inverse_retract(E3[0], E3[0])) <= 1e-15

    def test_diagonal(self):
        q = (E3[0] + E3[1]) / np.sqrt(2)
        assert np.allclose(S2.inverse_retract(E3[0], q), E3[1], atol=1e-14)

    def test_antipode_raises(self):
        with pytest.raises(DomainError):
            S2.inverse_retract(E3[0], -E3[0])


class TestExpLog:
    def test_quarter_circle(self):
        assert np.allclose(S2.exp(E3[0], (np.pi / 2) * E3[1]), E3[1], atol=1e-15)

    def test_zero(self):
        assert np.allclose(S2.exp(E3[0], np.zeros(3)), E3[0])

    def test_half_circle(self):
        assert np.allclose(S2.exp(E3[0], np.pi * E3[1]), -E3[0], atol=1e-15)

    def test_log_quarter(self):
        assert np.allclose(S2.log(E3[0], E3[1]), (np.pi / 2) * E3[1], atol=1e-15)

    def test_log_self(self):
        assert np.array_equal(S2.log(E3[0], E3[0]), np.zeros(3))

    def test_log_antipode_raises(self):
        with pytest.raises(DomainError):
            S2.log(E3[0], -E3[0])


class TestGeodesicDistance:
    @pytest.mark.parametrize(
        "q,expected", [(E3[0], 0.0), (E3[1], np.pi / 2), (-E3[0], np.pi)]
    )
    def test_values(self, q, expected):
        assert S2.geodesic_distance(E3[0], q) == pytest.approx(expected, abs=1e-15)

    def test_clamping_no_nan(self):
        # dot products that overshoot 1 by rounding must not produce NaN
        p = np.array([1.0, 1e-16, 0.0])
        p = p / np.linalg.norm(p)
        assert np.isfinite(S2.geodesic_distance(p, p))


def test_retract_round_trip(rng):
    s = Sphere(9)
    for _ in range(20):
        p = s.random_point(rng)
        v = s.random_tangent(p, rng)
        v = v * (rng.random() / max(np.linalg.norm(v), 1e-12))
        back = s.inverse_retract(p, s.retract(p, v))
        assert np.linalg.norm(back - v) <= 1e-10


def test_exp_log_consistency(rng):
    s = Sphere(9)
    for _ in range(20):
        p = s.random_point(rng)
        q = s.random_point(rng)
        if p @ q <= 0.01:
            continue
        assert np.linalg.norm(s.exp(p, s.log(p, q)) - q) <= 1e-10
        assert s.geodesic_distance(p, q) == pytest.approx(np.linalg.norm(s.log(p, q)), abs=1e-10)
