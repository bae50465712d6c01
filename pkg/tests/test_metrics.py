import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pumrbf import InputDomainError, LevelResult, convergence_rates, error_norms
from pumrbf.metrics import global_excess, local_range, range_excess


def test_error_norms_hand():
    mae, rmse = error_norms([0, 0, 0, 0], [1, -1, 1, 3])
    assert mae == 3
    assert rmse == pytest.approx(math.sqrt(12 / 4))


def test_error_norms_length_mismatch():
    with pytest.raises(InputDomainError):
        error_norms([1, 2], [1])


def test_rate_hand():
    a = LevelResult(4, 0.1, 1e-2, 4e-3)
    b = LevelResult(5, 0.05, 2.5e-3, 5e-4)
    r = convergence_rates([a, b])
    assert r[0].rate_inf is None and r[0].rate_2 is None
    assert r[1].rate_inf == pytest.approx(2.0)
    assert r[1].rate_2 == pytest.approx(3.0)


def test_zero_error_gives_no_rate():
    r = convergence_rates([LevelResult(4, 0.1, 1e-3, 1e-3), LevelResult(5, 0.05, 0.0, 1e-4)])
    assert r[1].rate_inf is None
    assert r[1].rate_2 == pytest.approx(math.log2(10))


def test_rates_validation():
    with pytest.raises(InputDomainError):
        convergence_rates([LevelResult(5, 0.1, 1, 1), LevelResult(4, 0.05, 1, 1)])
    with pytest.raises(InputDomainError):
        convergence_rates([LevelResult(4, 0.1, 1, 1), LevelResult(5, 0.1, 1, 1)])


@settings(max_examples=100)
@given(
    e=st.lists(st.floats(1e-12, 1.0), min_size=2, max_size=6),
    c=st.floats(1e-6, 1e6),
)
def test_rates_invariant_under_error_scaling(e, c):
    levels = [LevelResult(k, 2.0**-k, v, v) for k, v in enumerate(e)]
    scaled = [LevelResult(k, 2.0**-k, c * v, c * v) for k, v in enumerate(e)]
    for a, b in zip(convergence_rates(levels)[1:], convergence_rates(scaled)[1:]):
        assert a.rate_inf == pytest.approx(b.rate_inf, abs=1e-6)


def test_local_range_and_excess():
    X = np.array([[0.0, 0.0], [1.0, 0.0]])
    F = np.array([1.0, 5.0])
    Q = np.array([[0.1, 0.0], [0.5, 0.0], [3.0, 3.0]])
    lo, hi = local_range(Q, X, F, 0.6)
    assert lo.tolist() == [1.0, 1.0, math.inf]
    assert hi.tolist() == [1.0, 5.0, -math.inf]
    over, under = range_excess([1.5, 0.0, 99.0], lo, hi)
    assert over.tolist() == [0.5, 0.0, 0.0]
    assert under.tolist() == [0.0, 1.0, 0.0]
    assert global_excess([6.0, 0.5], F) == (1.0, 0.5)
