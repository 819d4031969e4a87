"""Benchmark systems and their problem-specific drivers.

Mathieu, quintic Duffing, the quadratic Bratu model, glycolysis and the
Brusselator (in its original form and as a second-order equation for
``w = y + z``). Each constructor returns an :class:`OdeSystem` carrying the
split used by the Extended Picard runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import (InsufficientRootsError, InvalidArgumentError,
                     RootNotFoundError, ShootingFailureError)
from .picard import ConstantSeed, OdeSystem, SolveSettings, solve_segmented, split_system
from .roots import root_find_scalar


def _require_positive(**kw):
    for name, value in kw.items():
        if not (np.isfinite(value) and value > 0):
            raise InvalidArgumentError(f"{name} must be positive, got {value}")


def _require_finite(**kw):
    for name, value in kw.items():
        if not np.isfinite(value):
            raise InvalidArgumentError(f"{name} must be finite, got {value}")


# ---------------------------------------------------------------- systems

def mathieu_system(r: float, q: float) -> OdeSystem:
    """``y'' + (r - 2 q cos 2x) y = 0`` as ``y' = z, z' = -(r - 2q cos 2x) y``."""
    _require_finite(r=r, q=q)

    def rhs(x, y):
        return [y[1], -(r - 2.0 * q * np.cos(2.0 * x)) * y[0]]

    def g(x, y):
        return [0.0 * y[0], 2.0 * q * np.cos(2.0 * x) * y[0]]

    return split_system(rhs, 2, [[0.0, 1.0], [-r, 0.0]], g, name="mathieu")


def duffing_system(a: float) -> OdeSystem:
    """Quintic Duffing ``y'' = -y - a y^5``, split about the harmonic oscillator."""
    _require_finite(a=a)
    if a < 0:
        raise InvalidArgumentError("a must be non-negative")

    def rhs(x, y):
        return [y[1], -y[0] - a * y[0] ** 5]

    def g(x, y):
        return [0.0 * y[0], -a * y[0] ** 5]

    return split_system(rhs, 2, [[0.0, 1.0], [-1.0, 0.0]], g, name="duffing")


def bratu_quadratic_system(alpha: float) -> OdeSystem:
    """Bratu with ``exp(y)`` truncated after the quadratic term."""
    _require_positive(alpha=alpha)

    def rhs(x, y):
        return [y[1], -alpha * (1.0 + y[0] + 0.5 * y[0] * y[0])]

    def g(x, y):
        return [0.0 * y[0], -alpha * (1.0 + 0.5 * y[0] * y[0])]

    return split_system(rhs, 2, [[0.0, 1.0], [-alpha, 0.0]], g, name="bratu")


def glycolysis_system(a: float, b: float) -> OdeSystem:
    """``y' = -y + a z + z y^2, z' = b - a z - z y^2`` (ADP ``y``, F6P ``z``)."""
    _require_positive(a=a, b=b)

    def rhs(x, y):
        u, v = y[0], y[1]
        f = a * v + v * u * u
        return [-u + f, b - f]

    def g(x, y):
        zy2 = y[1] * y[0] * y[0]
        return [zy2, b - zy2]

    return split_system(rhs, 2, [[-1.0, a], [0.0, -a]], g, name="glycolysis")


def brusselator_system(a: float, b: float) -> OdeSystem:
    """``y' = 1 - (1+b) y + a y^2 z, z' = b y - a y^2 z``."""
    _require_positive(a=a, b=b)

    def rhs(x, y):
        f = a * y[0] * y[0] * y[1]
        return [1.0 - (1.0 + b) * y[0] + f, b * y[0] - f]

    def g(x, y):
        f = a * y[0] * y[0] * y[1]
        return [1.0 + f, -f]

    return split_system(rhs, 2, [[-(1.0 + b), 0.0], [b, 0.0]], g, name="brusselator")


def brusselator_w_forcing(a: float, b: float, w, dw):
    """``F(w, w')`` of the second-order form ``w'' + a w = F``."""
    return (a + b - (1.0 + b + a * (3.0 - 2.0 * w)) * dw
            - a * (w - 3.0) * dw * dw - a * dw * dw * dw)


def brusselator_w_system(a: float, b: float) -> OdeSystem:
    """Brusselator in the variable ``w = y + z`` as ``w' = v, v' = -a w + F(w, v)``."""
    _require_positive(a=a, b=b)

    def rhs(x, y):
        return [y[1], -a * y[0] + brusselator_w_forcing(a, b, y[0], y[1])]

    def g(x, y):
        return [0.0 * y[0], brusselator_w_forcing(a, b, y[0], y[1])]

    return split_system(rhs, 2, [[0.0, 1.0], [-a, 0.0]], g, name="brusselator-w")


def brusselator_w_initial(y0: float, z0: float):
    """``(w, w')`` at the start from the original-form state ``(y0, z0)``; ``w' = 1 - y``."""
    return np.array([y0 + z0, 1.0 - y0])


@dataclass(frozen=True)
class ProblemSpec:
    """A named benchmark problem with its parameters and default data."""

    name: str
    params: dict
    initial: Optional[tuple] = None
    interval: tuple = (0.0, 1.0)

    def system(self) -> OdeSystem:
        entry = PROBLEMS.get(self.name)
        if entry is None:
            raise InvalidArgumentError(f"unknown problem {self.name!r}")
        missing = [p for p in entry["params"] if p not in self.params]
        if missing:
            raise InvalidArgumentError(f"problem {self.name} needs parameters {missing}")
        for p in entry["params"]:
            _require_finite(**{p: float(self.params[p])})
        return entry["build"](**{p: float(self.params[p]) for p in entry["params"]})


PROBLEMS = {
    "mathieu": dict(build=mathieu_system, params=("r", "q"),
                    defaults=dict(r=1.0, q=0.05), initial=(1.0, 0.0), interval=(0.0, 2 * math.pi)),
    "duffing": dict(build=duffing_system, params=("a",),
                    defaults=dict(a=0.5), initial=(1.0, 0.0), interval=(0.0, 7.0)),
    "bratu": dict(build=bratu_quadratic_system, params=("alpha",),
                  defaults=dict(alpha=1.0), initial=None, interval=(0.0, 1.0)),
    "glycolysis": dict(build=glycolysis_system, params=("a", "b"),
                       defaults=dict(a=0.4, b=0.6), initial=(1.0, 1.0), interval=(0.0, 40.0)),
    "brusselator": dict(build=brusselator_system, params=("a", "b"),
                        defaults=dict(a=1.0, b=2.5), initial=(1.8, 1.2), interval=(0.0, 15.0)),
    "brusselator-w": dict(build=brusselator_w_system, params=("a", "b"),
                          defaults=dict(a=1.0, b=2.5), initial=(3.0, -0.8), interval=(0.0, 15.0)),
}


# ---------------------------------------------------------------- Mathieu

_MATHIEU_SERIES = {
    1: ((0, 1.0), (1, -1.0), (2, -1 / 8), (3, 1 / 64), (4, -1 / 1536)),
    2: ((0, 4.0), (2, 5 / 12), (4, -763 / 13824), (6, 1002401 / 79626240)),
    3: ((0, 9.0), (2, 1 / 16), (3, -1 / 64), (4, 13 / 20480)),
    4: ((0, 16.0), (2, 1 / 30), (4, 433 / 864000), (6, -5701 / 2721600000)),
    5: ((0, 25.0), (2, 1 / 48), (4, 11 / 774144), (5, -1 / 147456)),
}


def mathieu_char_series(q: float, index: int) -> float:
    """Truncated small-``q`` series of the characteristic value ``r_index``."""
    if index not in _MATHIEU_SERIES:
        raise InvalidArgumentError(f"series index must be 1..5, got {index}")
    return float(sum(c * q ** p for p, c in _MATHIEU_SERIES[index]))


def mathieu_end_value(r: float, q: float, n_iter: int, quad_points: int = 32) -> float:
    """``y_n(pi)`` of the iteration with ``y(0) = 0, z(0) = 1`` and seed ``(0, 1)``."""
    sys = mathieu_system(r, q)
    settings = SolveSettings(h=math.pi, n_iter=n_iter, backend="quadrature", quad_points=quad_points)
    seed = ConstantSeed([0.0, 1.0])
    curve = solve_segmented(sys, 0.0, math.pi, [0.0, 1.0], settings, seed=seed)
    return float(curve.left_limit(math.pi)[0])


def mathieu_char_values(q: float, n_iter: int, count: int = 5,
                        r_max: float = 30.0, r_step: float = 0.25, tol: float = 1e-10):
    """First ``count`` roots in ``r`` of ``y_n(pi; r) = 0``.

    ``r`` is scanned on ``[0, r_max]`` for sign changes and each bracket is
    refined to ``tol``.
    """
    if not 1 <= count <= 5:
        raise InvalidArgumentError("count must be in 1..5")
    if abs(q) > 1:
        raise InvalidArgumentError("q must satisfy |q| <= 1")

    def f(r):
        return mathieu_end_value(r, q, n_iter)

    grid = np.arange(0.0, r_max + 0.5 * r_step, r_step)
    vals = [f(r) for r in grid]
    roots = []
    for (r0, f0), (r1, f1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if f0 == 0.0:
            roots.append(float(r0))
        elif f0 * f1 < 0:
            roots.append(root_find_scalar(f, bracket=(r0, r1), tol=tol))
        if len(roots) == count:
            return roots
    raise InsufficientRootsError(f"found {len(roots)} characteristic values, wanted {count}")


def percent_deviation(value: float, target: float) -> float:
    return 100.0 * abs(value - target) / abs(target)


# ---------------------------------------------------------------- Bratu

@dataclass
class BratuExact:
    """Exact Bratu solution ``w(x) = -2 log(cosh((x - 1/2) theta / 2) / cosh(theta / 4))``."""

    alpha: float
    theta: float

    def __call__(self, x):
        return bratu_exact(self.theta, x)


def bratu_exact(theta: float, x):
    x = np.asarray(x, dtype=float)
    return -2.0 * np.log(np.cosh(0.5 * (x - 0.5) * theta) / np.cosh(0.25 * theta))


def _theta_residual(theta, alpha):
    return theta - math.sqrt(2.0 * alpha) * math.cosh(0.25 * theta)


def _newton_theta(theta, alpha, tol=1e-11):
    s = math.sqrt(2.0 * alpha)
    for _ in range(50):
        f = theta - s * math.cosh(0.25 * theta)
        df = 1.0 - 0.25 * s * math.sinh(0.25 * theta)
        if df == 0.0:
            break
        step = f / df
        theta -= step
        if abs(step) <= tol:
            break
    return theta


def bratu_exact_theta(alpha: float, upper: float = 50.0, tol: float = 1e-11):
    """All roots of ``theta = sqrt(2 alpha) cosh(theta / 4)`` on ``(0, upper)``.

    The residual is concave in ``theta`` with its maximum where
    ``sqrt(2 alpha) sinh(theta / 4) = 4``, which separates the two roots.
    Returns two, one (at the critical ``alpha``) or no roots, ascending.
    """
    _require_positive(alpha=alpha)
    s = math.sqrt(2.0 * alpha)
    peak = 4.0 * math.asinh(4.0 / s)
    fpeak = _theta_residual(peak, alpha)
    if abs(fpeak) <= tol:
        return [peak]
    if fpeak < 0:
        return []
    roots = [root_find_scalar(lambda t: _theta_residual(t, alpha), bracket=(0.0, peak), tol=tol)]
    if peak < upper and _theta_residual(upper, alpha) < 0:
        roots.append(root_find_scalar(lambda t: _theta_residual(t, alpha), bracket=(peak, upper), tol=tol))
    return [_newton_theta(t, alpha, tol) for t in roots]


def bratu_critical_alpha() -> tuple:
    """``(alpha_c, theta_c)`` where the two roots merge (``theta tanh(theta/4) = 4``)."""
    theta = root_find_scalar(lambda t: t * math.tanh(0.25 * t) - 4.0, bracket=(1.0, 20.0), tol=1e-14)
    alpha = 0.5 * (theta / math.cosh(0.25 * theta)) ** 2
    return alpha, theta


def bratu_exact_solution(alpha: float = 1.0) -> BratuExact:
    """Lower (small-amplitude) exact solution branch."""
    roots = bratu_exact_theta(alpha)
    if not roots:
        raise InvalidArgumentError(f"no Bratu solution for alpha={alpha}")
    return BratuExact(alpha, roots[0])


def bratu_vim_reference(x, k: float, form: str = "printed"):
    """Second variational-iteration polynomial ``H_2`` with free slope ``k``.

    ``form="printed"`` is the published polynomial, which is the one the
    published VIM error was computed from. ``form="derived"`` is what two
    iterations of the correction functional (multiplier ``s - x``) on
    ``y'' = -(1 + y + y^2 / 2)`` from ``H_0 = k x`` actually give; it differs
    by a factor ``k`` on the ``x^3`` and ``x^5`` terms, and only this form
    vanishes at ``x = 1`` for the published slope :data:`VIM_SLOPE`.
    """
    if form not in ("printed", "derived"):
        raise InvalidArgumentError(f"form must be 'printed' or 'derived', got {form!r}")
    x = np.asarray(x, dtype=float)
    f = math.factorial
    odd = k if form == "derived" else 1.0
    return (k * x - x ** 2 / f(2) - odd * x ** 3 / f(3) - (k * k - 1) * x ** 4 / f(4)
            + 4 * odd * x ** 5 / f(5) + (5 * k * k - 3) * x ** 6 / f(6)
            + 5 * k * (k * k - 2) * x ** 7 / f(7) - 25 * k * k * x ** 8 / f(8)
            - 35 * k ** 3 * x ** 9 / f(9) - 35 * k ** 4 * x ** 10 / f(10))


VIM_SLOPE = 0.546936690480377


def shoot(end_value, seeds=(0.5, 0.6), tol=1e-10, max_iter=50):
    """Secant shooting on the initial slope: find ``u`` with ``end_value(u) = 0``."""
    try:
        return root_find_scalar(end_value, seeds=seeds, tol=tol, max_iter=max_iter)
    except RootNotFoundError as exc:
        raise ShootingFailureError(str(exc)) from exc


def bratu_shoot(alpha: float, n_iter: int, settings: Optional[SolveSettings] = None,
                seeds=(0.5, 0.6), tol: float = 1e-10):
    """Shoot the Extended Picard solution of the quadratic Bratu model onto ``y(1) = 0``.

    The run starts from ``y(0) = 0, z(0) = u`` with the constant seed
    ``(0, u)``. By default the interval is one segment with the quadrature
    backend. Returns ``(u, curve)``.
    """
    sys = bratu_quadratic_system(alpha)
    if settings is None:
        settings = SolveSettings(h=1.0, n_iter=n_iter, backend="quadrature", quad_points=32)
    else:
        settings = replace(settings, n_iter=n_iter)

    def solve(u):
        return solve_segmented(sys, 0.0, 1.0, [0.0, u], settings, seed=ConstantSeed([0.0, u]))

    u = shoot(lambda u: float(solve(u).left_limit(1.0)[0]), seeds, tol)
    return u, solve(u)


# ---------------------------------------------------------------- stability

@dataclass
class StabilityReport:
    fixed_point: np.ndarray
    jacobian_trace: float
    jacobian_det: float
    classification: str
    boundary: dict = field(default_factory=dict)


def _classify(trace):
    return "unstable" if trace > 0 else "asymptotically-stable"


def glycolysis_fixed_point(a: float, b: float) -> np.ndarray:
    return np.array([b, b / (a + b * b)])


def glycolysis_trace(a: float, b: float) -> float:
    det = a + b * b
    return -(b ** 4 + (2 * a - 1) * b * b + a * (1 + a)) / det


def glycolysis_boundary(a: float):
    """``(b_minus, b_plus)`` of the instability band, or ``None`` unless ``0 < a <= 1/8``."""
    if not 0 < a <= 0.125:
        return None
    disc = math.sqrt(max(1.0 - 8.0 * a, 0.0))
    b_minus = math.sqrt(0.5 * (1.0 - 2.0 * a - disc))
    b_plus = math.sqrt(0.5 * (1.0 - 2.0 * a + disc))
    return b_minus, b_plus


def glycolysis_stability(a: float, b: float) -> StabilityReport:
    _require_positive(a=a, b=b)
    tau = glycolysis_trace(a, b)
    band = glycolysis_boundary(a)
    boundary = {} if band is None else {"b_minus": band[0], "b_plus": band[1]}
    return StabilityReport(glycolysis_fixed_point(a, b), tau, a + b * b, _classify(tau), boundary)


def brusselator_fixed_point(a: float, b: float) -> np.ndarray:
    """Zero of the Brusselator right-hand side, ``(1, b / a)``."""
    return np.array([1.0, b / a])


def brusselator_stability(a: float, b: float) -> StabilityReport:
    """Jacobian at ``(1, b/a)``: trace ``b - 1 - a``, determinant ``a``."""
    _require_positive(a=a, b=b)
    tau = b - 1.0 - a
    return StabilityReport(brusselator_fixed_point(a, b), tau, a, _classify(tau),
                           {"b_critical": 1.0 + a})


def numerical_jacobian(sys: OdeSystem, x: float, y, eps: float = 1e-6) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    J = np.empty((sys.n, sys.n))
    for j in range(sys.n):
        dy = np.zeros(sys.n)
        dy[j] = eps * max(1.0, abs(y[j]))
        J[:, j] = (sys.F(x, y + dy) - sys.F(x, y - dy)) / (2 * dy[j])
    return J
