"""Fixed-step reference integrators: explicit 8th-order Runge-Kutta and the
Taylor series method of selectable order.

Both return a :class:`PiecewiseCurve` with one segment per step, so their
output can be sampled anywhere by the error metrics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
# Dormand-Prince 8(5,3) tableau with its 7th-order dense output stages.
from scipy.integrate._ivp import dop853_coefficients as _dop

from .curves import PiecewiseCurve, lobatto_points
from .errors import DivergenceError, InvalidArgumentError
from .jets import Jet, coefficient
from .picard import BLOWUP, OdeSystem, segment_nodes

_NS = _dop.N_STAGES
_A = _dop.A
_B = _dop.B
_C = _dop.C
_D = _dop.D
_DENSE_DEGREE = _dop.INTERPOLATOR_POWER


def _state_fn(sys: OdeSystem):
    rhs = sys.rhs

    def f(x, y):
        return np.array(rhs(x, y), dtype=float)

    return f


def _check_state(y, step):
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP:
        raise DivergenceError("state blew up", segment=step)


def _validate(sys, a, b, y_a, step):
    y = np.asarray(y_a, dtype=float)
    if y.shape != (sys.n,) or not np.all(np.isfinite(y)):
        raise InvalidArgumentError("initial value must be a finite vector of the system dimension")
    if not (np.isfinite(step) and step > 0):
        raise InvalidArgumentError(f"step must be positive, got {step}")
    if not b > a:
        raise InvalidArgumentError("interval must have b > a")
    return y


def rk8_step(f, x, y, h):
    """One DOP853 step. Returns ``(y_new, dense_coeffs)``.

    ``dense_coeffs`` (7, n) define the 7th-order interpolant of the step in
    the nested form used by :func:`rk8_dense`.
    """
    n = len(y)
    K = np.empty((_dop.N_STAGES_EXTENDED, n))
    K[0] = f(x, y)
    for s in range(1, _NS):
        K[s] = f(x + _C[s] * h, y + h * (_A[s, :s] @ K[:s]))
    y_new = y + h * (_B @ K[:_NS])
    K[_NS] = f(x + h, y_new)
    for s in range(_NS + 1, _dop.N_STAGES_EXTENDED):
        K[s] = f(x + _C[s] * h, y + h * (_A[s, :s] @ K[:s]))
    dy = y_new - y
    F = np.empty((_DENSE_DEGREE, n))
    F[0] = dy
    F[1] = h * K[0] - dy
    F[2] = 2 * dy - h * (K[_NS] + K[0])
    F[3:] = h * (_D @ K)
    return y_new, F


def rk8_dense(y_old, F, theta):
    """Evaluate a step's dense output at fractions ``theta`` of the step."""
    theta = np.asarray(theta, dtype=float)[..., None]
    out = np.zeros(theta.shape[:-1] + (len(y_old),))
    for i, coef in enumerate(F[::-1]):
        out = out + coef
        out = out * (theta if i % 2 == 0 else 1.0 - theta)
    return out + y_old


def rk8_solve(sys: OdeSystem, a: float, b: float, y_a, step: float) -> PiecewiseCurve:
    """Fixed-step 8th-order Runge-Kutta (Dormand-Prince 8 tableau).

    Steps are ``step`` long except a possibly shorter last one ending at ``b``.
    Between nodes the curve is the tableau's 7th-order continuous extension.
    """
    y = _validate(sys, a, b, y_a, step)
    f = _state_fn(sys)
    nodes = segment_nodes(float(a), float(b), float(step))
    theta = lobatto_points(0.0, 1.0, _DENSE_DEGREE)
    samples = np.empty((len(nodes) - 1, _DENSE_DEGREE + 1, sys.n))
    for i in range(len(nodes) - 1):
        x0, x1 = nodes[i], nodes[i + 1]
        # blow-up is reported by _check_state, not as floating-point warnings
        with np.errstate(over="ignore", invalid="ignore"):
            y_new, F = rk8_step(f, x0, y, x1 - x0)
        _check_state(y_new, i)
        samples[i] = rk8_dense(y, F, theta)
        samples[i, 0], samples[i, -1] = y, y_new
        y = y_new
    return PiecewiseCurve.from_samples(nodes, samples)


@dataclass
class JetSeries:
    """Taylor coefficients of the solution about ``x0``; ``coeffs[0]`` is the state."""

    x0: float
    coeffs: np.ndarray  # (order + 1, n)

    @property
    def n(self):
        return self.coeffs.shape[1]

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    def __call__(self, t):
        """Sum the series at offsets ``t`` from ``x0``."""
        t = np.asarray(t, dtype=float)[..., None]
        out = np.zeros(t.shape[:-1] + (self.n,))
        for c in self.coeffs[::-1]:
            out = out * t + c
        return out


def taylor_jet(sys: OdeSystem, x0: float, y0, order: int) -> JetSeries:
    """Taylor coefficients of the solution through ``(x0, y0)`` up to ``order``.

    Coefficient ``m + 1`` comes from coefficient ``m`` of the right-hand side
    evaluated on the jet truncated at ``m``.
    """
    y0 = np.asarray(y0, dtype=float)
    n = len(y0)
    Y = np.zeros((order + 1, n))
    Y[0] = y0
    for m in range(order):
        xj = Jet.variable(x0, m)
        yj = [Jet(Y[:m + 1, i]) for i in range(n)]
        fj = sys.rhs(xj, yj)
        for i in range(n):
            Y[m + 1, i] = coefficient(fj[i], m) / (m + 1)
    return JetSeries(float(x0), Y)


def taylor_solve(sys: OdeSystem, a: float, b: float, y_a, step: float, order: int) -> PiecewiseCurve:
    """Fixed-step Taylor series method of the given order (2..10).

    Each step's truncated series is kept as the curve on that step.
    """
    if not 2 <= int(order) <= 10:
        raise InvalidArgumentError(f"Taylor order must be in 2..10, got {order}")
    order = int(order)
    y = _validate(sys, a, b, y_a, step)
    nodes = segment_nodes(float(a), float(b), float(step))
    samples = np.empty((len(nodes) - 1, order + 1, sys.n))
    for i in range(len(nodes) - 1):
        x0, x1 = nodes[i], nodes[i + 1]
        with np.errstate(over="ignore", invalid="ignore"):
            jet = taylor_jet(sys, x0, y, order)
            samples[i] = jet(lobatto_points(0.0, x1 - x0, order))
        samples[i, 0] = y
        y = samples[i, -1].copy()
        _check_state(y, i)
    return PiecewiseCurve.from_samples(nodes, samples)
