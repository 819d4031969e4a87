import math

import numpy as np
import pytest

from extpicard.analysis import l2_mean_error
from extpicard.errors import DivergenceError, InvalidArgumentError, UnsupportedOperationError
from extpicard.picard import split_system
from extpicard.problems import bratu_quadratic_system, glycolysis_system
from extpicard.reference import rk8_dense, rk8_solve, rk8_step, taylor_jet, taylor_solve


def exp_system():
    return split_system(lambda x, y: [y[0]], 1, [[0.0]])


def harmonic():
    return split_system(lambda x, y: [y[1], -y[0]], 2, [[0.0, 1.0], [-1.0, 0.0]])


def test_rk8_exponential():
    curve = rk8_solve(exp_system(), 0.0, 1.0, [1.0], 0.01)
    assert abs(curve(1.0)[0] - math.e) <= 1e-12


def test_rk8_harmonic_period():
    curve = rk8_solve(harmonic(), 0.0, 2 * math.pi, [1.0, 0.0], 2 * math.pi / 200)
    np.testing.assert_allclose(curve(2 * math.pi), [1.0, 0.0], atol=1e-10)


def test_rk8_local_order():
    f = lambda x, y: np.array([y[0]])
    errs = [abs(rk8_step(f, 0.0, np.array([1.0]), h)[0][0] - math.exp(h)) for h in (0.4, 0.2)]
    assert math.log2(errs[0] / errs[1]) == pytest.approx(9.0, abs=0.5)


def test_rk8_dense_output_between_nodes():
    curve = rk8_solve(harmonic(), 0.0, 3.0, [1.0, 0.0], 0.05)
    x = np.linspace(0.0, 3.0, 1001)
    np.testing.assert_allclose(curve(x), np.column_stack([np.cos(x), -np.sin(x)]), atol=1e-11)


def test_rk8_dense_endpoints():
    f = lambda x, y: np.array([y[1], -y[0]])
    y0 = np.array([0.3, 0.4])
    y1, F = rk8_step(f, 0.0, y0, 0.1)
    np.testing.assert_allclose(rk8_dense(y0, F, [0.0, 1.0]), [y0, y1], atol=1e-16)


def test_rk8_truncates_last_step():
    curve = rk8_solve(exp_system(), 0.0, 1.05, [1.0], 0.1)
    assert curve.n_segments == 11 and curve.b == 1.05
    assert abs(curve(1.05)[0] - math.exp(1.05)) <= 1e-12


def test_rk8_divergence():
    blow = split_system(lambda x, y: [y[0] ** 2], 1, [[0.0]])
    with pytest.raises(DivergenceError):
        rk8_solve(blow, 0.0, 2.0, [1.0], 0.01)


def test_rk8_rejects_bad_step():
    with pytest.raises(InvalidArgumentError):
        rk8_solve(exp_system(), 0.0, 1.0, [1.0], 0.0)


@pytest.mark.parametrize("order", range(2, 11))
def test_taylor_single_step_is_truncated_series(order):
    h = 0.3
    curve = taylor_solve(exp_system(), 0.0, h, [1.0], h, order)
    assert curve(h)[0] == pytest.approx(sum(h ** j / math.factorial(j) for j in range(order + 1)), rel=1e-15)


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6, 8])
def test_taylor_order_exponent(order):
    def one_step_error(h):
        return abs(taylor_solve(exp_system(), 0.0, h, [1.0], h, order)(h)[0] - math.exp(h))
    exponent = math.log2(one_step_error(1.0) / one_step_error(0.5))
    assert exponent == pytest.approx(order + 1, abs=0.5)


def test_taylor_jet_coefficients_harmonic():
    jet = taylor_jet(harmonic(), 0.0, [1.0, 0.0], 8)
    expected = [(-1) ** (k // 2) / math.factorial(k) if k % 2 == 0 else 0.0 for k in range(9)]
    np.testing.assert_allclose(jet.coeffs[:, 0], expected, atol=1e-16)
    np.testing.assert_array_equal(jet.coeffs[0], [1.0, 0.0])


def test_taylor_handles_time_dependent_trig_rhs():
    mathieu = split_system(lambda x, y: [y[1], -(1 - 0.1 * np.cos(2 * x)) * y[0]], 2, [[0, 1], [-1, 0]])
    ref = rk8_solve(mathieu, 0.0, 2.0, [1.0, 0.0], 0.001)
    approx = taylor_solve(mathieu, 0.0, 2.0, [1.0, 0.0], 0.05, 8)
    assert l2_mean_error(ref, approx, 0.0, 2.0) < 1e-20


def test_taylor_unsupported_primitive():
    sys = split_system(lambda x, y: [np.tan(y[0])], 1, [[0.0]])
    with pytest.raises(UnsupportedOperationError):
        taylor_solve(sys, 0.0, 1.0, [0.1], 0.1, 4)


@pytest.mark.parametrize("order", [1, 11])
def test_taylor_order_range(order):
    with pytest.raises(InvalidArgumentError):
        taylor_solve(exp_system(), 0.0, 1.0, [1.0], 0.1, order)


def test_rk8_and_taylor10_agree_on_bratu():
    sys = bratu_quadratic_system(1.0)
    rk = rk8_solve(sys, 0.0, 1.0, [0.0, 0.549249], 0.01)
    ty = taylor_solve(sys, 0.0, 1.0, [0.0, 0.549249], 0.1, 10)
    assert l2_mean_error(rk, ty, 0.0, 1.0) <= 1e-12


def test_glycolysis_rk8_vs_taylor5():
    sys = glycolysis_system(0.4, 0.6)
    err = l2_mean_error(rk8_solve(sys, 0.0, 40.0, [1.0, 1.0], 0.1),
                        taylor_solve(sys, 0.0, 40.0, [1.0, 1.0], 0.1, 5), 0.0, 40.0)
    assert 9.6e-16 <= err <= 9.6e-14
