import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pmurecover.errors import ParameterError, ShapeError, UndefinedMetricError
from pmurecover.matcore import (
    ObservedMatrix,
    approximate_rank,
    frobenius_norm,
    mae_missing,
    masked_residual,
    singular_values,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def brute_rank(s, beta):
    """Direct transcription of the Frobenius-proportion rule."""
    s = np.asarray(s, float)
    total = math.sqrt(sum(x * x for x in s))
    if total == 0:
        return 0
    for r in range(1, len(s) + 1):
        if math.sqrt(sum(x * x for x in s[:r])) / total >= beta - 1e-15:
            return r
    return len(s)


class TestMaskedResidual:
    def test_identity(self, rng):
        X = rng.standard_normal((4, 3))
        mask = rng.integers(0, 2, (4, 3))
        assert not masked_residual(X, X, mask).any()

    def test_annihilating_mask(self, rng):
        X, M = rng.standard_normal((2, 3, 5))
        assert not masked_residual(X, M, np.zeros((3, 5))).any()

    def test_small(self):
        out = masked_residual([[2.0, 3.0]], [[1.0, 1.0]], [[1, 0]])
        np.testing.assert_array_equal(out, [[1.0, 0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            masked_residual(np.zeros((2, 2)), np.zeros((2, 3)), np.ones((2, 2)))
        with pytest.raises(ShapeError):
            masked_residual(np.zeros((2, 2)), np.zeros((2, 2)), np.ones((3, 2)))

    def test_rejects_non_binary_mask(self):
        with pytest.raises(ParameterError):
            masked_residual(np.zeros((1, 2)), np.zeros((1, 2)), [[0.5, 1]])

    @given(
        arrays(np.float64, (5, 4), elements=finite),
        arrays(np.float64, (5, 4), elements=finite),
        arrays(np.uint8, (5, 4), elements=st.integers(0, 1)),
    )
    def test_zero_wherever_missing(self, X, M, mask):
        out = masked_residual(X, M, mask)
        assert not out[mask == 0].any()


class TestNorms:
    @pytest.mark.parametrize(
        "X, expected",
        [(np.zeros((3, 2)), 0.0), (np.eye(2), math.sqrt(2)), ([[3.0, 4.0]], 5.0)],
    )
    def test_frobenius(self, X, expected):
        assert frobenius_norm(X) == pytest.approx(expected, rel=1e-15)

    def test_singular_values_examples(self):
        np.testing.assert_allclose(singular_values(np.eye(2)), [1, 1])
        np.testing.assert_allclose(singular_values(np.diag([3.0, 4.0])), [4, 3])
        u, v = np.array([1.0, 2.0, 2.0]), np.array([3.0, 4.0])
        s = singular_values(np.outer(u, v))
        assert s[0] == pytest.approx(15.0)
        assert s[1] == pytest.approx(0.0, abs=1e-12)

    def test_energy_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            X = rng.standard_normal((20, 8))
            s = singular_values(X)
            assert len(s) == 8
            assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
            assert np.sum(s**2) == pytest.approx(frobenius_norm(X) ** 2, rel=1e-9)


class TestApproximateRank:
    def test_exact_boundary(self):
        assert approximate_rank([4.0, 3.0, 0.0], 0.8) == 1

    def test_single(self):
        assert approximate_rank([1.0], 1.0) == 1

    def test_all_zero(self):
        assert approximate_rank([0.0, 0.0], 0.9) == 0

    @pytest.mark.parametrize("beta", [0.0, -0.1, 1.0001])
    def test_beta_range(self, beta):
        with pytest.raises(ParameterError):
            approximate_rank([1.0], beta)

    def test_full_beta_counts_nonzero(self):
        s = singular_values(np.outer([1.0, 2.0, 3.0], [1.0, -1.0, 0.5, 2.0]))
        assert approximate_rank(s, 1.0) == 1

    @given(
        st.lists(st.floats(0, 1e3, allow_nan=False), min_size=1, max_size=12),
        st.floats(0.01, 1.0),
        st.floats(0.01, 1.0),
    )
    def test_monotone_in_beta(self, values, b1, b2):
        s = sorted(values, reverse=True)
        lo, hi = sorted((b1, b2))
        assert approximate_rank(s, lo) <= approximate_rank(s, hi)

    @given(
        st.lists(st.floats(1e-3, 1e3, allow_nan=False), min_size=1, max_size=12),
        st.floats(0.01, 0.999),
    )
    def test_matches_brute_force(self, values, beta):
        s = sorted(values, reverse=True)
        assert approximate_rank(s, beta) == brute_rank(s, beta)


class TestMae:
    def test_perfect(self, rng):
        X = rng.standard_normal((3, 3))
        mask = np.ones((3, 3))
        mask[0, 1] = 0
        assert mae_missing(X, X, mask) == 0.0

    def test_arithmetic(self):
        X = np.array([[1.5, 9.0, 2.5]])
        Xhat = np.array([[1.0, 0.0, 2.0]])
        assert mae_missing(Xhat, X, [[0, 1, 0]]) == pytest.approx(0.5)

    def test_undefined_without_missing(self):
        with pytest.raises(UndefinedMetricError):
            mae_missing(np.zeros((2, 2)), np.zeros((2, 2)), np.ones((2, 2)))

    @given(arrays(np.float64, (4, 3), elements=finite))
    def test_ignores_observed_positions(self, noise):
        X = np.arange(12.0).reshape(4, 3)
        Xhat = X + 0.25
        mask = np.ones((4, 3))
        mask[1, 2] = mask[3, 0] = 0
        base = mae_missing(Xhat, X, mask)
        assert mae_missing(Xhat + noise * mask, X, mask) == base


class TestObservedMatrix:
    def test_zeroes_missing_values(self):
        obs = ObservedMatrix([[1.0, 2.0]], [[1, 0]])
        np.testing.assert_array_equal(obs.values, [[1.0, 0.0]])
        assert obs.n_missing == 1

    def test_genuine_zero_stays_observed(self):
        obs = ObservedMatrix([[0.0, 2.0]], [[1, 1]])
        assert obs.n_missing == 0

    def test_immutable(self):
        obs = ObservedMatrix([[1.0]], [[1]])
        with pytest.raises(ValueError):
            obs.values[0, 0] = 3.0

    def test_rejects_nan_at_observed(self):
        with pytest.raises(ParameterError):
            ObservedMatrix([[np.nan]], [[1]])

    def test_nan_at_missing_is_cleared(self):
        obs = ObservedMatrix([[np.nan, 1.0]], [[0, 1]])
        assert obs.values[0, 0] == 0.0

    def test_missing_rows(self):
        obs = ObservedMatrix(np.ones((3, 2)), [[1, 1], [0, 0], [0, 1]])
        np.testing.assert_array_equal(obs.missing_rows(), [1])
