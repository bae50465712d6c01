import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pumrbf import (
    Domain,
    InputDomainError,
    PumConfig,
    UncoveredPointError,
    assign_points,
    build_covering,
    eval_rbf,
    get_kernel,
    pu_weights,
    pum_eval,
    pum_fit,
)
from pumrbf.sampling import franke, grid_points


def test_single_patch_equals_global_rbf():
    # N < 16 gives one patch; PUM collapses to the local interpolant
    X = np.array([[0.2, 0.2], [0.8, 0.3], [0.4, 0.9], [0.6, 0.6], [0.5, 0.1]])
    F = np.arange(5.0)
    model = pum_fit(X, F)
    assert model.covering.M == 1
    Q = np.random.default_rng(0).random((20, 2)) * 0.5 + 0.25
    np.testing.assert_allclose(pum_eval(model, Q), eval_rbf(model.locals[0], Q), rtol=1e-14)


def test_interpolates_data(franke65):
    X, F = franke65
    model = pum_fit(X, F)
    assert np.max(np.abs(pum_eval(model, X) - F)) < 1e-10


def test_weight_at_single_patch_is_one():
    X = grid_points(4)
    cov = assign_points(build_covering(len(X)), X)
    w = pu_weights([0.0, 0.0], cov, get_kernel("wendland2", 1 / cov.radius))
    assert w == [(0, 1.0)]


def test_weights_hand_value_two_patches():
    # two patches at equal distance share the weight evenly
    X = grid_points(4)
    cov = build_covering(len(X))
    x = [0.125, 0.0]  # midway between the first two centres along x, below the row
    w = dict(pu_weights(x, cov, get_kernel("wendland2", 1 / cov.radius)))
    assert w[0] == pytest.approx(w[8])


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0, 1), y=st.floats(0, 1), level=st.integers(3, 6))
def test_weights_form_partition(x, y, level):
    cov = build_covering((2**level + 1) ** 2)
    w = pu_weights([x, y], cov, get_kernel("wendland2", 1 / cov.radius))
    vals = np.array([v for _, v in w])
    assert np.all(vals > 0)
    assert abs(vals.sum() - 1) <= 1e-12


def test_relative_shape():
    X = grid_points(4)
    m = pum_fit(X, franke(X[:, 0], X[:, 1]), PumConfig("gaussian", relative_shape=True, rbf_shape=3.0))
    assert m.rbf_kernel.shape == pytest.approx(3.0 / m.covering.radius)


def test_empty_patch_inactive_and_uncovered_eval():
    X = np.random.default_rng(1).random((40, 2)) * 0.4
    cov = build_covering(40)
    model = pum_fit(X, X[:, 0], covering=cov)
    assert not model.active.all()
    with pytest.raises(UncoveredPointError):
        pum_eval(model, [[0.99, 0.99]])


def test_bad_inputs():
    X = grid_points(3)
    with pytest.raises(InputDomainError):
        pum_fit(X, np.zeros(3))
    with pytest.raises(InputDomainError):
        pum_fit(X, np.zeros(len(X)), PumConfig(pu_kernel="gaussian"))
    F = np.zeros(len(X))
    F[0] = np.nan
    with pytest.raises(InputDomainError):
        pum_fit(X, F)


def test_reassigns_mismatched_covering():
    X = grid_points(3)
    cov = assign_points(build_covering(len(X)), X)
    Y = X[::-1].copy()
    model = pum_fit(Y, Y[:, 0], covering=cov)
    assert np.array_equal(model.points, Y)


def test_scalar_and_batch_agree(franke65):
    X, F = franke65
    model = pum_fit(X, F)
    Q = np.random.default_rng(3).random((5, 2))
    np.testing.assert_allclose(pum_eval(model, Q), [pum_eval(model, q) for q in Q], rtol=1e-13)


def test_domain_validation():
    with pytest.raises(InputDomainError):
        Domain((0, 0), (0, 1))


def test_three_patch_weights_by_scalar_arithmetic():
    cov = build_covering(16)  # centres at 0.25 / 0.75, radius sqrt(1/2)
    x = (0.3, 0.2)
    k = get_kernel("wendland2", 1 / cov.radius)
    w = dict(pu_weights(x, cov, k))
    assert len(w) >= 3

    def w2(r):
        return max(1 - r, 0.0) ** 4 * (4 * r + 1)

    raw = {j: w2(((x[0] - c[0]) ** 2 + (x[1] - c[1]) ** 2) ** 0.5 / cov.radius) for j, c in enumerate(cov.centers.tolist())}
    total = sum(raw.values())
    for j, v in w.items():
        assert v == pytest.approx(raw[j] / total, rel=1e-14)
