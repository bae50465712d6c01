import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pumrbf import InputDomainError, RadialKernel, get_kernel, kernel_eval, kernel_smoothness
from pumrbf.kernels import Family, UNBOUNDED

FAMILIES = [f.value for f in Family]


def test_wendland2_hand_values():
    k = get_kernel("wendland2")
    assert kernel_eval(k, 0.0) == 1.0
    assert kernel_eval(k, 1.0) == 0.0
    # (1 - 0.5)^4 (4 * 0.5 + 1) = 0.0625 * 3
    assert kernel_eval(k, 0.5) == pytest.approx(0.1875, abs=1e-15)


def test_matern2_at_zero():
    assert kernel_eval(get_kernel("Matern2"), 0.0) == 1.0


@pytest.mark.parametrize("name", FAMILIES)
def test_normalised_at_origin(name):
    assert kernel_eval(get_kernel(name, 2.7), 0.0) == pytest.approx(1.0, abs=1e-15)


def test_closed_forms_against_direct_formulas():
    r = 0.3
    assert kernel_eval(get_kernel("gaussian"), r) == pytest.approx(math.exp(-r * r))
    assert kernel_eval(get_kernel("wendland0"), r) == pytest.approx((1 - r) ** 2)
    assert kernel_eval(get_kernel("wendland4"), r) == pytest.approx((1 - r) ** 6 * (35 * r * r + 18 * r + 3) / 3)
    assert kernel_eval(get_kernel("matern0"), r) == pytest.approx(math.exp(-r))
    assert kernel_eval(get_kernel("matern4"), r) == pytest.approx((3 + 3 * r + r * r) * math.exp(-r) / 3)


@pytest.mark.parametrize(
    "name, expected",
    [("wendland0", 0), ("wendland2", 2), ("wendland4", 4), ("matern0", 0), ("matern2", 2), ("matern4", 4),
     ("gaussian", UNBOUNDED)],
)
def test_smoothness(name, expected):
    assert kernel_smoothness(get_kernel(name)) == expected
    assert kernel_smoothness(name) == expected


@pytest.mark.parametrize("bad", [-1e-3, math.inf, math.nan])
def test_bad_distance_rejected(bad):
    with pytest.raises(InputDomainError):
        kernel_eval(get_kernel("wendland2"), bad)


def test_bad_shape_and_name():
    with pytest.raises(InputDomainError):
        RadialKernel("wendland2", 0.0)
    with pytest.raises(InputDomainError):
        get_kernel("multiquadric")


@pytest.mark.parametrize("name", FAMILIES)
def test_nonnegative_and_monotone(name):
    r = np.linspace(0.0, 3.0, 10_000)
    v = kernel_eval(get_kernel(name), r)
    assert np.all(v >= 0)
    assert np.all(np.diff(v) <= 1e-15)


@pytest.mark.parametrize("name", FAMILIES)
def test_support(name):
    k = get_kernel(name, 2.0)
    r = np.linspace(0.5, 5.0, 200)
    v = kernel_eval(k, r)
    if k.family.compact:
        assert np.all(v == 0.0)
        assert k.support_radius == 0.5
    else:
        assert np.all(v > 0.0)
        assert math.isinf(k.support_radius)


@settings(max_examples=200, deadline=None)
@given(
    name=st.sampled_from(FAMILIES),
    s=st.floats(0.01, 100.0),
    r=st.floats(0.0, 10.0),
)
def test_shape_scaling_identity(name, s, r):
    assert kernel_eval(get_kernel(name, s), r) == kernel_eval(get_kernel(name, 1.0), s * r)
