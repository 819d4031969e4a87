import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extpicard.errors import UnsupportedOperationError
from extpicard.jets import Jet, coefficient

P = 8
t = Jet.variable(0.0, P)


def fact(k):
    return float(math.factorial(k))


def test_exp_and_trig_series():
    np.testing.assert_allclose(np.exp(t).c, [1 / fact(k) for k in range(P + 1)], atol=1e-16)
    np.testing.assert_allclose(np.sin(t).c, [0 if k % 2 == 0 else (-1) ** (k // 2) / fact(k) for k in range(P + 1)],
                               atol=1e-16)
    np.testing.assert_allclose(np.cos(t).c, [0 if k % 2 else (-1) ** (k // 2) / fact(k) for k in range(P + 1)],
                               atol=1e-16)


def test_log_sqrt_and_division():
    np.testing.assert_allclose(np.log(1 + t).c, [0] + [(-1) ** (k + 1) / k for k in range(1, P + 1)], atol=1e-15)
    np.testing.assert_allclose((1 / (1 - t)).c, np.ones(P + 1), atol=1e-15)
    binom = [math.comb(2 * k, k) * (-1) ** (k + 1) / (4 ** k * (2 * k - 1)) for k in range(P + 1)]
    np.testing.assert_allclose(np.sqrt(1 + t).c, binom, atol=1e-15)


def test_powers():
    np.testing.assert_allclose(((1 + t) ** 5).c[:6], [math.comb(5, k) for k in range(6)])
    np.testing.assert_allclose(((2 + t) ** -1).c, [(-1) ** k / 2 ** (k + 1) for k in range(P + 1)], atol=1e-16)
    np.testing.assert_allclose(((1 + t) ** 0.5).c, np.sqrt(1 + t).c, atol=1e-16)
    np.testing.assert_allclose((2.0 ** t).c, [math.log(2) ** k / fact(k) for k in range(P + 1)], rtol=1e-14)


def test_mixed_scalar_arithmetic():
    j = 3.0 - 2.0 * t + t * 4.0 - 1.0
    np.testing.assert_allclose(j.c[:2], [2.0, 2.0])
    np.testing.assert_allclose((np.cos(2 * t) * 0.5).c[2], -1.0)
    assert coefficient(5.0, 0) == 5.0 and coefficient(5.0, 3) == 0.0
    assert coefficient(t, P + 3) == 0.0


def test_unsupported_operations():
    for fn in (np.tan, np.arctan, np.sinh, np.tanh):
        with pytest.raises(UnsupportedOperationError):
            fn(t)
    with pytest.raises(UnsupportedOperationError):
        t // 2


coeffs = st.lists(st.floats(-2, 2), min_size=P + 1, max_size=P + 1)


@settings(max_examples=80, deadline=None)
@given(coeffs, coeffs)
def test_mul_div_roundtrip(a, b):
    b[0] = 1.5 + abs(b[0])
    A, B = Jet(a), Jet(b)
    np.testing.assert_allclose(((A * B) / B).c, A.c, atol=1e-9)


@settings(max_examples=80, deadline=None)
@given(coeffs)
def test_exp_log_and_pythagoras(a):
    A = Jet(a)
    np.testing.assert_allclose((np.sin(A) ** 2 + np.cos(A) ** 2).c, [1] + [0] * P, atol=1e-9)
    np.testing.assert_allclose(np.log(np.exp(A)).c, A.c, atol=1e-9)
