import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pmurecover.errors import ParameterError, ShapeError
from pmurecover.matcore import ObservedMatrix
from pmurecover.reshape import ReshapePlan, ccrm_inverse, ccrm_reshape, select_cut_factor


def loop_reshape(M, n_star):
    """Entry-by-entry CCRM with 1-based indices, kept independent of the
    vectorised implementation."""
    n1, n2 = M.shape
    L = n1 // n_star
    out = np.empty((L, n2 * n_star), dtype=M.dtype)
    for c in range(1, n2 * n_star + 1):
        j = -(-c // n_star)
        s = (c - 1) % n_star + 1
        for i in range(1, L + 1):
            out[i - 1, c - 1] = M[(s - 1) * L + i - 1, j - 1]
    return out


def brute_cut(n1, n2):
    fits = [d for d in range(1, n1 + 1) if n1 % d == 0 and n1 // d >= n2]
    return max(fits) if fits else 1


def worked_6x2():
    # value 10*i + j for m_ij with i the channel: m_ij -> row j, column i
    M = np.array([[10 * 1 + t, 10 * 2 + t] for t in range(1, 7)], float)
    mask = np.ones((6, 2), dtype=np.uint8)
    mask[4] = 0
    return M, mask


def test_worked_6x2_example():
    M, mask = worked_6x2()
    out, plan = ccrm_reshape(ObservedMatrix(M, mask), 3)
    # rows [m11 m31 * m12 m32 *] and [m21 m41 m61 m22 m42 m62]
    np.testing.assert_array_equal(out.values, [[11, 13, 0, 21, 23, 0], [12, 14, 16, 22, 24, 26]])
    np.testing.assert_array_equal(out.mask, [[1, 1, 0, 1, 1, 0], [1, 1, 1, 1, 1, 1]])
    assert (plan.n1, plan.n2, plan.n_star, plan.seg_len) == (6, 2, 3, 2)
    np.testing.assert_array_equal(ccrm_inverse(out.values, plan), M * mask)


def test_identity_cut(rng):
    M = rng.standard_normal((5, 3))
    out, plan = ccrm_reshape(ObservedMatrix.fully_observed(M), 1)
    np.testing.assert_array_equal(out.values, M)
    assert (plan.n1, plan.n2, plan.n_star, plan.seg_len) == (5, 3, 1, 5)
    np.testing.assert_array_equal(ccrm_inverse(M, plan), M)


def test_single_column():
    M = np.array([[1.0], [2.0], [3.0], [4.0]])
    out, plan = ccrm_reshape(ObservedMatrix.fully_observed(M), 2)
    np.testing.assert_array_equal(out.values, [[1, 3], [2, 4]])
    np.testing.assert_array_equal(ccrm_inverse([[1, 3], [2, 4]], ReshapePlan(4, 1, 2)), M)


def test_non_divisor_rejected():
    with pytest.raises(ParameterError):
        ccrm_reshape(ObservedMatrix.fully_observed(np.ones((6, 2))), 4)


def test_inverse_shape_checked():
    with pytest.raises(ShapeError):
        ccrm_inverse(np.ones((3, 3)), ReshapePlan(6, 2, 3))


@pytest.mark.parametrize("n1, n2, expected", [(1800, 86, 20), (6, 2, 3), (10, 3, 2), (4, 9, 1), (7, 7, 1)])
def test_select_cut_factor(n1, n2, expected):
    assert select_cut_factor(n1, n2) == expected


def test_select_cut_factor_1800_shape():
    n_star = select_cut_factor(1800, 86)
    out, _ = ccrm_reshape(ObservedMatrix.fully_observed(np.zeros((1800, 86))), n_star)
    assert out.shape == (90, 1720)


@given(st.integers(1, 400), st.integers(1, 60))
def test_select_cut_factor_properties(n1, n2):
    n_star = select_cut_factor(n1, n2)
    assert n1 % n_star == 0
    assert n_star == brute_cut(n1, n2)
    if n1 >= n2:
        assert n1 // n_star >= n2


@given(
    st.integers(1, 12).flatmap(
        lambda L: st.tuples(st.just(L), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
    )
)
def test_matches_loop_and_round_trips(args):
    L, n2, n_star, seed = args
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((L * n_star, n2))
    mask = rng.integers(0, 2, M.shape)
    obs = ObservedMatrix(M, mask)
    out, plan = ccrm_reshape(obs, n_star)
    np.testing.assert_array_equal(out.values, loop_reshape(obs.values, n_star))
    np.testing.assert_array_equal(out.mask, loop_reshape(obs.mask, n_star))
    np.testing.assert_array_equal(ccrm_inverse(out.values, plan), obs.values)
    assert out.n_missing == obs.n_missing


def test_full_column_criterion():
    rng = np.random.default_rng(3)
    for _ in range(200):
        L, n2, n_star = rng.integers(1, 6, 3)
        n1 = L * n_star
        mask = (rng.random((n1, n2)) < 0.7).astype(np.uint8)
        if rng.random() < 0.5:
            s, j = rng.integers(n_star), rng.integers(n2)
            mask[s * L : (s + 1) * L, j] = 0
        out, _ = ccrm_reshape(ObservedMatrix(np.ones((n1, n2)), mask), n_star)
        has_empty_column = bool((~out.mask.any(axis=0)).any())
        segment_gone = any(
            not mask[s * L : (s + 1) * L, j].any() for s in range(n_star) for j in range(n2)
        )
        assert has_empty_column == segment_gone


def test_row_loss_becomes_partial():
    mask = np.ones((1800, 86), dtype=np.uint8)
    mask[[10, 500, 1799]] = 0
    out, _ = ccrm_reshape(ObservedMatrix(np.ones(mask.shape), mask), 20)
    assert out.mask.any(axis=1).all()
    assert out.mask.any(axis=0).all()
