import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pumrbf import CellIndex, CoveringError, Domain, InputDomainError, assign_points, build_covering, fill_distance
from pumrbf.covering import patches_per_axis
from pumrbf.sampling import grid_points


def brute_members(covering, X):
    d = np.linalg.norm(X[None, :, :] - covering.centers[:, None, :], axis=2)
    return [np.flatnonzero(row < covering.radius) for row in d]


@pytest.mark.parametrize("N, m", [(4, 1), (15, 1), (16, 2), (289, 8), (1089, 16), (4225, 32), (16641, 64)])
def test_patches_per_axis(N, m):
    assert patches_per_axis(N) == m


def test_build_covering_level4():
    cov = build_covering(289)
    assert cov.M == 64
    assert cov.radius == pytest.approx(math.sqrt(2.0 / 64), rel=1e-15)
    np.testing.assert_allclose(np.unique(cov.centers[:, 0]), (np.arange(8) + 0.5) / 8)


def test_covering_covers_the_square():
    cov = build_covering(1089)
    P = Domain().grid(101)
    d = np.linalg.norm(P[:, None, :] - cov.centers[None, :, :], axis=2)
    assert np.all(d.min(axis=1) < cov.radius)
    # each point of the square sits in at least 4 patches away from the boundary band
    inner = np.all((P > 0.1) & (P < 0.9), axis=1)
    assert (d[inner] < cov.radius).sum(axis=1).min() >= 4


def test_scaled_domain():
    cov = build_covering(289, Domain((0, 0), (2, 1)))
    assert cov.radius == pytest.approx(2 * math.sqrt(2) / 8)
    assert cov.centers[:, 0].max() == pytest.approx(2 * 7.5 / 8)


def test_too_few_points():
    with pytest.raises(InputDomainError):
        build_covering(3)


def test_assign_grid_counts_oracle():
    X = grid_points(4)
    cov = assign_points(build_covering(len(X)), X)
    expected = [len(m) for m in brute_members(cov, X)]
    assert cov.counts.tolist() == expected
    assert sum(expected) > len(X)


def test_uncovered_point_reported():
    cov = build_covering(16)
    X = np.array([[0.5, 0.5], [5.0, 5.0]])
    with pytest.raises(CoveringError) as info:
        assign_points(cov, X)
    assert info.value.point_index == 1


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(4, 400))
def test_assign_matches_brute_force(seed, n):
    X = np.random.default_rng(seed).random((n, 2))
    cov = assign_points(build_covering(n), X)
    for got, want in zip(cov.members, brute_members(cov, X)):
        np.testing.assert_array_equal(np.sort(got), want)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.floats(0.01, 0.7))
def test_query_pairs_matches_brute_force(seed, r):
    rng = np.random.default_rng(seed)
    X, Q = rng.random((150, 2)), rng.random((40, 2))
    rows, ids, dist = CellIndex(X, 0.1).query_pairs(Q, r)
    d = np.linalg.norm(Q[:, None] - X[None], axis=2)
    want_r, want_i = np.nonzero(d < r)
    np.testing.assert_array_equal(rows, want_r)
    np.testing.assert_array_equal(ids, want_i)
    np.testing.assert_allclose(dist, d[want_r, want_i], rtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), cell=st.floats(0.005, 0.5))
def test_nearest_matches_brute_force(seed, cell):
    rng = np.random.default_rng(seed)
    X, Q = rng.random((60, 2)), rng.random((30, 2)) * 3 - 1
    idx, dist = CellIndex(X, cell, origin=(0, 0)).nearest(Q)
    d = np.linalg.norm(Q[:, None] - X[None], axis=2)
    np.testing.assert_array_equal(idx, d.argmin(axis=1))
    np.testing.assert_allclose(dist, d.min(axis=1), rtol=1e-15)


@pytest.mark.parametrize("level", [3, 4, 5])
def test_fill_distance_of_grid(level):
    # finer probe grid hits the cell centres: half a cell diagonal
    h = fill_distance(grid_points(level))
    assert h.value == pytest.approx(math.sqrt(2) / 2 ** (level + 1), rel=1e-12)
    assert h.sample_size == (4 * 2**level + 1) ** 2


def test_fill_distance_zero_when_probe_is_data():
    X = grid_points(3)
    assert fill_distance(X, probe=X).value == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fill_distance_decreases_with_more_points(seed):
    rng = np.random.default_rng(seed)
    X = rng.random((50, 2))
    extra = np.vstack([X, rng.random((50, 2))])
    probe = Domain().grid(41)
    assert fill_distance(extra, probe).value <= fill_distance(X, probe).value


def test_covering_n16():
    cov = build_covering(16)
    assert (cov.M, cov.radius) == (4, pytest.approx(math.sqrt(0.5), rel=1e-15))
    np.testing.assert_allclose(cov.centers, [[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])


def test_covering_65_squared():
    cov = build_covering(65**2)
    assert cov.M == 1024
    assert cov.radius == pytest.approx(0.044194, abs=5e-7)
    assert cov.radius >= 1 / math.sqrt(cov.M)
