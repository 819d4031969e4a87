import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import fsolve

from extpicard.errors import InsufficientRootsError, InvalidArgumentError
from extpicard.picard import SolveSettings, solve_segmented
from extpicard.problems import (PROBLEMS, VIM_SLOPE, ProblemSpec, bratu_critical_alpha, bratu_exact,
                                bratu_exact_theta, bratu_quadratic_system, bratu_shoot, bratu_vim_reference,
                                brusselator_fixed_point, brusselator_stability, brusselator_system,
                                brusselator_w_forcing, brusselator_w_initial, brusselator_w_system,
                                duffing_system, glycolysis_boundary, glycolysis_fixed_point,
                                glycolysis_stability, glycolysis_system, glycolysis_trace,
                                mathieu_char_series, mathieu_char_values, mathieu_system)
from extpicard.reference import rk8_solve

THETA_1 = 1.51716459905


def fd_jacobian(rhs, y, eps=1e-6):
    y = np.asarray(y, dtype=float)
    cols = []
    for j in range(len(y)):
        d = np.zeros_like(y)
        d[j] = eps
        cols.append((np.asarray(rhs(0.0, y + d)) - np.asarray(rhs(0.0, y - d))) / (2 * eps))
    return np.column_stack(cols)


# ---------------------------------------------------------------- systems

@pytest.mark.parametrize("name", list(PROBLEMS))
def test_split_reproduces_rhs(name):
    sys = PROBLEMS[name]["build"](**PROBLEMS[name]["defaults"])
    rng = np.random.default_rng(7)
    for x, y, z in rng.uniform(-2, 2, size=(100, 3)):
        Y = np.array([y, z])
        np.testing.assert_allclose(sys.A @ Y + sys.G(x, Y), sys.F(x, Y), rtol=1e-14, atol=1e-14)


def test_forcing_examples():
    np.testing.assert_allclose(mathieu_system(1.0, 0.05).G(0.0, np.array([1.0, 0.0])), [0.0, 0.1])
    np.testing.assert_allclose(duffing_system(0.5).G(1.3, np.array([1.0, 0.0])), [0.0, -0.5])
    np.testing.assert_allclose(bratu_quadratic_system(2.0).G(0.0, np.array([0.0, 3.0])), [0.0, -2.0])
    np.testing.assert_allclose(glycolysis_system(0.4, 0.6).G(0.0, np.zeros(2)), [0.0, 0.6])
    np.testing.assert_allclose(brusselator_system(1.0, 2.5).G(0.0, np.zeros(2)), [1.0, 0.0])


def test_glycolysis_rhs_at_one_one():
    a, b = 0.4, 0.6
    np.testing.assert_allclose(glycolysis_system(a, b).F(0.0, np.array([1.0, 1.0])), [a, b - a - 1], atol=1e-15)


def test_bratu_forcing_negative():
    sys = bratu_quadratic_system(1.3)
    ys = np.linspace(-10, 10, 201)
    assert np.all(sys.F(0.0, np.column_stack([ys, np.zeros_like(ys)]))[:, 1] < 0)


@pytest.mark.parametrize("build, kwargs", [(glycolysis_system, dict(a=0.0, b=0.6)),
                                           (brusselator_system, dict(a=1.0, b=-1.0)),
                                           (duffing_system, dict(a=-0.5)),
                                           (bratu_quadratic_system, dict(alpha=0.0)),
                                           (mathieu_system, dict(r=1.0, q=float("nan")))])
def test_parameter_validation(build, kwargs):
    with pytest.raises(InvalidArgumentError):
        build(**kwargs)


def test_problem_spec():
    assert ProblemSpec("glycolysis", dict(a=0.4, b=0.6)).system().n == 2
    with pytest.raises(InvalidArgumentError):
        ProblemSpec("glycolysis", dict(a=0.4)).system()
    with pytest.raises(InvalidArgumentError):
        ProblemSpec("lorenz", {}).system()


# ---------------------------------------------------------------- Mathieu

def test_mathieu_linear_case():
    r = 2.0
    curve = solve_segmented(mathieu_system(r, 0.0), 0.0, 5.0, [1.0, 0.0], SolveSettings(h=0.5, n_iter=1))
    x = np.linspace(0, 5, 51)
    np.testing.assert_allclose(curve(x)[:, 0], np.cos(math.sqrt(r) * x), atol=1e-12)


def test_char_series_values():
    assert [mathieu_char_series(0.0, k) for k in range(1, 6)] == [1, 4, 9, 16, 25]
    assert mathieu_char_series(0.1, 1) == pytest.approx(1 - 0.1 - 0.01 / 8 + 0.001 / 64 - 1e-4 / 1536, abs=1e-15)
    assert mathieu_char_series(0.1, 1) == pytest.approx(0.898765, abs=1e-6)
    assert mathieu_char_series(0.1, 4) == pytest.approx(16 + 0.01 / 30 + 433e-4 / 864000 - 5701e-6 / 2721600000)
    with pytest.raises(InvalidArgumentError):
        mathieu_char_series(0.1, 6)


@pytest.mark.parametrize("n_iter", [1, 3])
def test_char_values_unperturbed(n_iter):
    np.testing.assert_allclose(mathieu_char_values(0.0, n_iter), [1, 4, 9, 16, 25], atol=1e-9)


def test_char_values_insufficient_roots():
    with pytest.raises(InsufficientRootsError):
        mathieu_char_values(0.1, 2, count=5, r_max=10.0)


# ---------------------------------------------------------------- Duffing

def duffing_period(a):
    """Energy-integral period of y'' = -y - a y^5 from (1, 0); y = 1 - u^2 removes the endpoint singularity."""
    V = lambda y: 0.5 * y * y + a * y ** 6 / 6
    E = V(1.0)
    integrand = lambda u: 2 * u / math.sqrt(2 * (E - V(1 - u * u)))
    return 4 * quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]


def test_duffing_harmonic_limit():
    assert duffing_period(1e-12) == pytest.approx(2 * math.pi, rel=1e-9)
    curve = rk8_solve(duffing_system(1e-300), 0.0, 2 * math.pi, [1.0, 0.0], 0.01)
    np.testing.assert_allclose(curve(2 * math.pi), [1.0, 0.0], atol=1e-10)


def test_duffing_periodicity():
    T = duffing_period(0.5)
    assert T == pytest.approx(5.5011, abs=1e-3)
    curve = rk8_solve(duffing_system(0.5), 0.0, 2 * T, [1.0, 0.0], 0.01)
    assert np.linalg.norm(curve(2 * T) - [1.0, 0.0]) <= 1e-2
    assert np.linalg.norm(curve(T) - [1.0, 0.0]) <= 1e-8


# ---------------------------------------------------------------- Bratu

def test_bratu_theta_alpha_one():
    roots = bratu_exact_theta(1.0)
    assert len(roots) == 2
    assert roots[0] == pytest.approx(THETA_1, abs=1e-9)
    for th in roots:
        assert abs(th - math.sqrt(2) * math.cosh(th / 4)) <= 1e-10


def test_bratu_critical_alpha_against_joint_newton():
    def system(v):
        th, al = v
        return [th - math.sqrt(2 * al) * math.cosh(th / 4), 1 - math.sqrt(2 * al) * math.sinh(th / 4) / 4]
    th_c, al_c = fsolve(system, [4.8, 3.5], xtol=1e-14)
    alpha, theta = bratu_critical_alpha()
    assert alpha == pytest.approx(al_c, rel=1e-10) and theta == pytest.approx(th_c, rel=1e-10)
    assert alpha == pytest.approx(3.5138, abs=1e-4)
    assert len(bratu_exact_theta(alpha)) == 1
    assert len(bratu_exact_theta(alpha - 1e-3)) == 2
    assert bratu_exact_theta(alpha + 1e-3) == []


def test_bratu_small_alpha_root():
    alpha = 1e-6
    assert bratu_exact_theta(alpha)[0] == pytest.approx(math.sqrt(2 * alpha), rel=1e-5)


def test_bratu_exact_solution_shape():
    x = np.linspace(0, 1, 101)
    w = bratu_exact(THETA_1, x)
    assert abs(w[0]) <= 1e-12 and abs(w[-1]) <= 1e-12
    np.testing.assert_allclose(w, w[::-1], atol=1e-12)
    assert bratu_exact(THETA_1, 0.5) == pytest.approx(2 * math.log(math.cosh(THETA_1 / 4)), rel=1e-12)
    assert bratu_exact(THETA_1, 0.5) == pytest.approx(0.14054, abs=1e-5)


def test_bratu_exact_solves_equation():
    x = np.linspace(0.05, 0.95, 19)
    h = 1e-4
    w = lambda s: bratu_exact(THETA_1, s)
    second = (w(x + h) - 2 * w(x) + w(x - h)) / h ** 2
    np.testing.assert_allclose(second, -np.exp(w(x)), atol=1e-6)


def test_vim_polynomial_printed_form():
    assert bratu_vim_reference(0.0, 0.3) == 0.0
    x = np.linspace(0, 1, 11)
    expected = -x ** 2 / 2 - x ** 3 / 6 + x ** 4 / 24 + 4 * x ** 5 / 120 - 3 * x ** 6 / 720
    np.testing.assert_allclose(bratu_vim_reference(x, 0.0), expected, atol=1e-15)
    # the published slope does not zero the published polynomial
    assert bratu_vim_reference(1.0, VIM_SLOPE) == pytest.approx(-0.0604084, abs=1e-6)


def _vim_second_iterate(k, x):
    """Oracle: two correction-functional iterations done by nested quadrature."""
    def step(H, dH2):
        def new(t):
            return H(t) + quad(lambda s: (s - t) * (dH2(s) + 1 + H(s) + 0.5 * H(s) ** 2), 0.0, t,
                               epsabs=1e-14, epsrel=1e-13)[0]
        return new
    H0 = lambda t: k * t
    H1 = step(H0, lambda s: 0.0)
    # H1'' = -(1 + H0 + H0^2/2) exactly
    return step(H1, lambda s: -(1 + k * s + 0.5 * (k * s) ** 2))(x)


def test_vim_polynomial_derived_form():
    assert abs(bratu_vim_reference(1.0, VIM_SLOPE, form="derived")) <= 1e-9
    for k in (0.0, 0.55, 1.3):
        for x in (0.3, 0.7, 1.0):
            assert bratu_vim_reference(x, k, form="derived") == pytest.approx(_vim_second_iterate(k, x), abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        bratu_vim_reference(0.5, 0.5, form="other")


def test_bratu_shoot():
    u, curve = bratu_shoot(1.0, 2)
    assert u == pytest.approx(0.549249, abs=1e-3)
    assert abs(curve.left_limit(1.0)[0]) <= 1e-10
    exact_slope = THETA_1 * math.tanh(THETA_1 / 4)
    h = 1e-6
    fd_slope = (bratu_exact(THETA_1, h) - bratu_exact(THETA_1, -h)) / (2 * h)
    assert exact_slope == pytest.approx(fd_slope, abs=1e-8)
    assert u == pytest.approx(exact_slope, abs=1e-3)


def test_bratu_shoot_small_alpha():
    alpha = 1e-3
    u, _ = bratu_shoot(alpha, 3)
    assert u == pytest.approx(alpha / 2, rel=1e-2)


# ---------------------------------------------------------------- stability

def test_glycolysis_fixed_point_and_stability():
    a, b = 0.4, 0.6
    fp = glycolysis_fixed_point(a, b)
    np.testing.assert_allclose(fp, [0.6, 0.7894736842105263])
    np.testing.assert_allclose(glycolysis_system(a, b).F(0.0, fp), [0, 0], atol=1e-15)
    rep = glycolysis_stability(a, b)
    assert rep.classification == "asymptotically-stable"
    assert rep.jacobian_det == pytest.approx(a + b * b)


def test_glycolysis_boundary():
    lo, hi = glycolysis_boundary(1 / 8)
    assert lo == pytest.approx(math.sqrt(3 / 8)) and hi == pytest.approx(math.sqrt(3 / 8))
    lo, hi = glycolysis_boundary(0.04)
    assert lo == pytest.approx(0.2184, abs=1e-4) and hi == pytest.approx(0.9340, abs=1e-4)
    rep = glycolysis_stability(0.04, 0.6)
    assert rep.classification == "unstable" and rep.jacobian_trace > 0
    assert glycolysis_boundary(0.2) is None


def test_glycolysis_trace_against_numerical_jacobian():
    rng = np.random.default_rng(11)
    for a, b in rng.uniform(0.01, 2.0, size=(50, 2)):
        sys = glycolysis_system(a, b)
        J = fd_jacobian(sys.F, glycolysis_fixed_point(a, b))
        assert glycolysis_trace(a, b) == pytest.approx(np.trace(J), abs=1e-8)
        rep = glycolysis_stability(a, b)
        assert rep.jacobian_det == pytest.approx(np.linalg.det(J), abs=1e-8)
        assert (rep.classification == "unstable") == (rep.jacobian_trace > 0)


def test_brusselator_fixed_point_and_stability():
    a, b = 1.0, 2.5
    fp = brusselator_fixed_point(a, b)
    np.testing.assert_allclose(fp, [1.0, 2.5])
    np.testing.assert_allclose(brusselator_system(a, b).F(0.0, fp), [0, 0], atol=1e-15)
    rep = brusselator_stability(a, b)
    assert rep.classification == "unstable"
    rng = np.random.default_rng(3)
    for a, b in rng.uniform(0.1, 3.0, size=(20, 2)):
        J = fd_jacobian(brusselator_system(a, b).F, brusselator_fixed_point(a, b))
        rep = brusselator_stability(a, b)
        assert rep.jacobian_trace == pytest.approx(np.trace(J), abs=1e-8)
        assert rep.jacobian_det == pytest.approx(np.linalg.det(J), abs=1e-8)
        assert (rep.classification == "unstable") == (b > 1 + a)


def test_brusselator_w_form():
    a, b = 1.0, 2.5
    assert brusselator_w_forcing(a, b, 7.3, 0.0) == pytest.approx(a + b)
    np.testing.assert_allclose(brusselator_w_initial(1.8, 1.2), [3.0, -0.8])
    w_curve = rk8_solve(brusselator_w_system(a, b), 0.0, 5.0, [3.0, -0.8], 0.01)
    yz = rk8_solve(brusselator_system(a, b), 0.0, 5.0, [1.8, 1.2], 0.01)
    x = np.linspace(0, 5, 501)
    assert np.max(np.abs(w_curve(x)[:, 0] - yz(x).sum(axis=1))) <= 1e-8
    assert np.max(np.abs(w_curve(x)[:, 1] - (1 - yz(x)[:, 0]))) <= 1e-8
