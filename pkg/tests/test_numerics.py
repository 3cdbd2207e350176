import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multloop import numerics as nm


def test_mixed_second_of_product():
    # F(s, t) = (s t, e^{s} sin t): mixed partials at 0 are (1, 1)
    F = lambda s, t: np.array([s * t, math.exp(s) * math.sin(t)])
    np.testing.assert_allclose(nm.mixed_second(F), [1.0, 1.0], atol=1e-9)


def test_unstable_extraction_raises():
    F = lambda s, t: np.array([math.sin(1e4 * s * t)])
    with pytest.raises(nm.ExtractionUnstable):
        nm.mixed_second(F)


def test_first_derivative():
    assert nm.first_derivative(lambda t: np.array([math.exp(3 * t)]))[0] == pytest.approx(3.0, abs=1e-9)


def test_to_rational():
    assert nm.to_rational(0.5000000001) == Fraction(1, 2)
    assert nm.to_rational(-2 / 3 + 1e-8) == Fraction(-2, 3)


def test_numeric_rank():
    assert nm.numeric_rank([[1, 0, 0], [0, 1, 0], [1, 1, 1e-9]])[0] == 2
    assert nm.numeric_rank([])[0] == 0


def test_scan_roots_counts():
    # problem 0: t^2 - 1, problem 1: t^2 + 1, problem 2: sin t on [-10, 10]
    fns = [lambda t: t * t - 1, lambda t: t * t + 1, np.sin]

    def g(idx, t):
        return np.stack([fns[i](row) for i, row in zip(idx, t)])

    res = nm.scan_roots(g, 3)
    assert list(res.count) == [2, 0, 7]
    np.testing.assert_allclose(np.sort(res.roots[0][:2]), [-1, 1], atol=1e-12)
    np.testing.assert_allclose(np.sort(res.roots[2][:7]), np.arange(-3, 4) * np.pi, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(-9.5, 9.5), st.floats(0.1, 3.0))
def test_scan_finds_shifted_cubic_root(r, a):
    def g(idx, t):
        return a * (t - r) ** 3 + (t - r)

    res = nm.scan_roots(g, 1)
    assert res.count[0] == 1
    assert abs(res.roots[0, 0] - r) < 1e-9


def test_newton_batch():
    F = lambda x: np.stack([x[0] + np.exp(x[1]) - 1, x[0] * x[1] + x[1]])
    truth = np.array([[0.5, -0.4], [0.3, 0.7]])
    x, res = nm.newton_batch(F, F(truth), np.zeros((2, 2)))
    assert np.all(res < 1e-12)
    np.testing.assert_allclose(F(x), F(truth), atol=1e-12)
    np.testing.assert_allclose(x[:, 0], truth[:, 0], atol=1e-10)


def test_solver_errors_carry_witness():
    err = nm.MultipleSolutions("two roots", witness=(1.0,), roots=[0.0, 1.0])
    assert err.roots == [0.0, 1.0] and err.witness == (1.0,)
    assert nm.NoSolution("none", witness=(2.0,)).witness == (2.0,)
