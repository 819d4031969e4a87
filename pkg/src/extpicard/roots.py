"""Scalar root finding shared by the eigenvalue scan, Bratu and shooting."""
from __future__ import annotations

import math
import sys

from scipy.optimize import brentq

from .errors import RootNotFoundError

# Brent can need about the square of the bisection count on flat roots (x^3)
_BRENT_MAXITER = 2000


def root_find_scalar(f, bracket=None, seeds=None, tol=1e-12, max_iter=100):
    """Find a root of ``f`` from a sign-change bracket or two secant seeds.

    With ``bracket=(lo, hi)`` Brent's method is used. With ``seeds=(x0, x1)``
    the secant iteration runs until ``|f| <= tol`` or the step is below
    ``1e-12`` (relative to the iterate); as soon as two iterates straddle a
    sign change it falls back to the bracketed solver. ``max_iter`` caps the
    secant steps; Brent gets at least ``_BRENT_MAXITER``.
    """
    if bracket is not None:
        lo, hi = map(float, bracket)
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi > 0:
            raise RootNotFoundError(f"no sign change on [{lo}, {hi}]")
        try:
            return brentq(f, lo, hi, xtol=min(tol, 1e-12), rtol=4 * sys.float_info.epsilon, maxiter=max(max_iter, _BRENT_MAXITER))
        except RuntimeError as exc:
            raise RootNotFoundError(str(exc)) from exc
    if seeds is None:
        raise RootNotFoundError("need a bracket or two seeds")

    x0, x1 = map(float, seeds)
    f0, f1 = f(x0), f(x1)
    for _ in range(max_iter):
        if abs(f1) <= tol:
            return x1
        if f0 * f1 < 0:
            return root_find_scalar(f, bracket=sorted((x0, x1)), tol=tol, max_iter=max_iter)
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not math.isfinite(x2):
            break
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if abs(x1 - x0) <= 1e-12 * max(1.0, abs(x1)):
            return x1
    raise RootNotFoundError(f"secant did not converge from seeds {seeds}")
