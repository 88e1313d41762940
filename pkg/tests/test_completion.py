import numpy as np
import pytest

from mcat.completion import CompletionObjective, CompletionProblem, user_weights
from mcat.data import generate_lowrank_data
from mcat.errors import ConfigError, SingularError
from mcat.manifolds import Grassmann, canonicalize
from mcat.objectives import gradient_check


def make_problem(values, mask, lam=0.0, rank=1):
    return CompletionProblem(values=np.asarray(values, float), mask=np.asarray(mask, bool), lam=lam, rank=rank)


class TestUserWeights:
    def test_normal_equations(self):
        prob = make_problem([[2.0], [4.0]], [[True], [True]])
        w = user_weights(prob, np.array([[1.0], [1.0]]), 0)
        assert w == pytest.approx([3.0])

    def test_weighted_least_squares(self):
        prob = make_problem([[2.0], [0.0]], [[True], [False]], lam=0.01)
        w = user_weights(prob, np.array([[1.0], [0.0]]), 0)
        assert w == pytest.approx([2.0])

    def test_singular(self):
        prob = make_problem([[0.0], [0.0]], [[False], [False]], lam=0.0)
        with pytest.raises(SingularError):
            user_weights(prob, np.array([[1.0], [0.0]]), 0)

    def test_bad_index(self):
        prob = make_problem([[1.0]], [[True]])
        with pytest.raises(ConfigError):
            user_weights(prob, np.array([[1.0]]), 3)


class TestObjective:
    def test_exact_fit_is_zero(self, rng):
        # fully observed exact rank-2 matrix, U spanning its columns
        a = rng.standard_normal((10, 2))
        b = rng.standard_normal((10, 2))
        x = a @ b.T
        prob = make_problem(x, np.ones_like(x, dtype=bool), lam=0.0, rank=2)
        obj = CompletionObjective(prob)
        u = canonicalize(a)
        assert obj.value(u) <= 1e-20
        assert np.linalg.norm(obj.gradient(u)) <= 1e-10

    def test_hand_example(self):
        # M=2, N=1, U = (1,1)/sqrt2, X = (2,4): residual (1,-1), value 1;
        # ambient gradient is (Uw - x) w with w = 3*sqrt(2)
        prob = make_problem([[2.0], [4.0]], [[True], [True]], lam=0.0, rank=1)
        obj = CompletionObjective(prob)
        u = np.array([[1.0], [1.0]]) / np.sqrt(2)
        assert obj.value(u) == pytest.approx(1.0, abs=1e-12)
        w = obj.weights(u)
        assert w[0, 0] == pytest.approx(3 * np.sqrt(2), abs=1e-12)
        grad = obj.gradient(u)
        expected = 3 * np.sqrt(2) * np.array([[1.0], [-1.0]])
        assert np.allclose(grad, expected, atol=1e-10)

    def test_empty_observations_skipped(self):
        prob = make_problem(np.zeros((3, 2)), np.zeros((3, 2), bool), lam=0.0, rank=1)
        obj = CompletionObjective(prob)
        u = np.array([[1.0], [0.0], [0.0]])
        assert obj.value(u) == 0.0
        assert np.linalg.norm(obj.gradient(u)) == 0.0

    def test_gradient_check(self, rng):
        prob, _ = generate_lowrank_data(20, 30, 3, 0.5, 0.1, 0.01, rng)
        obj = CompletionObjective(prob)
        g = Grassmann(20, 3)
        for _ in range(20):
            u = g.random_point(rng)
            assert gradient_check(obj, g, u, h=1e-5, rng=rng) <= 1e-4

    def test_representative_invariance(self, rng):
        prob, _ = generate_lowrank_data(15, 20, 2, 0.6, 0.05, 0.01, rng)
        obj = CompletionObjective(prob)
        u = Grassmann(15, 2).random_point(rng)
        base = obj.value(u)
        for _ in range(5):
            mix = rng.standard_normal((2, 2)) + 3 * np.eye(2)
            assert obj.value(u @ mix) == pytest.approx(base, rel=1e-8)

    def test_column_order_invariance(self, rng):
        prob, _ = generate_lowrank_data(12, 18, 2, 0.7, 0.0, 0.01, rng)
        perm = rng.permutation(18)
        shuffled = CompletionProblem(
            values=prob.values[:, perm], mask=prob.mask[:, perm], lam=prob.lam, rank=prob.rank
        )
        u = Grassmann(12, 2).random_point(rng)
        a = CompletionObjective(prob).value(u)
        b = CompletionObjective(shuffled).value(u)
        assert a == pytest.approx(b, rel=1e-10)

    def test_decrease_matches_values(self, rng):
        prob, _ = generate_lowrank_data(20, 25, 3, 0.5, 0.1, 0.01, rng)
        obj = CompletionObjective(prob)
        g = Grassmann(20, 3)
        u = g.random_point(rng)
        v = g.retract(u, 0.01 * g.random_tangent(u, rng))
        assert obj.decrease(u, v) == pytest.approx(obj.value(u) - obj.value(v), abs=1e-9)

    def test_singular_propagates(self):
        # one observation, rank 2, lam = 0: the 2x2 weight system is singular
        values = np.zeros((4, 2))
        mask = np.zeros((4, 2), bool)
        values[0, 0] = 1.0
        mask[0, 0] = True
        mask[1, 1] = mask[2, 1] = True
        prob = make_problem(values, mask, lam=0.0, rank=2)
        obj = CompletionObjective(prob)
        u = canonicalize(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(SingularError):
            obj.value(u)


class TestProblemValidation:
    def test_negative_lambda(self):
        with pytest.raises(ConfigError):
            make_problem([[1.0]], [[True]], lam=-1.0)

    def test_bad_rank(self):
        with pytest.raises(ConfigError):
            make_problem([[1.0]], [[True]], rank=2)
