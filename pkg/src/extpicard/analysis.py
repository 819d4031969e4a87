"""Error metrics and drivers that rebuild the benchmark error tables.

Every table is described by a :class:`TableSpec`. :func:`reproduce_table`
runs it against a fixed-step 8th-order Runge-Kutta reference (or the exact
Bratu solution) and returns an :class:`ErrorTable` whose CSV form has the
columns ``method,h,iterations,degree,error``.

Method ids: ``EP`` (Extended Picard), ``SP`` (Standard Picard), ``T<k>``
(Taylor of order ``k``), ``RK8``, ``VIM``. Table T3 holds percent deviations
of Mathieu characteristic values; its method ids are ``r1`` .. ``r5``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .errors import DivergenceError, InvalidArgumentError
from .picard import SolveSettings, solve_segmented
from .problems import (PROBLEMS, VIM_SLOPE, bratu_exact_solution, bratu_quadratic_system,
                       bratu_shoot, bratu_vim_reference, mathieu_char_series,
                       mathieu_char_values, percent_deviation, shoot)
from .reference import rk8_solve, taylor_solve
from .roots import root_find_scalar

__all__ = ["l2_mean_error", "root_find_scalar", "TableRow", "ErrorTable", "TableSpec",
           "TABLES", "reproduce_table", "table_ids"]

ERROR_SAMPLES = 2001


def _evaluate(curve, x, component):
    v = np.asarray(curve(x), dtype=float)
    if v.ndim == 2:
        return v[:, component]
    return v


def _check_domain(curve, a, b):
    lo, hi = getattr(curve, "a", None), getattr(curve, "b", None)
    if lo is None:
        return
    slack = 1e-12 * max(1.0, abs(a), abs(b))
    if a < lo - slack or b > hi + slack:
        raise InvalidArgumentError(f"curve covers [{lo}, {hi}], which does not contain [{a}, {b}]")


def l2_mean_error(reference, candidate, a: float, b: float, component: int = 0,
                  normalize: bool = True) -> float:
    """Mean squared deviation of one component over ``[a, b]``.

    ``(1/(b-a)) * int_a^b (ref_i - cand_i)^2 dx`` by composite Simpson on
    2001 uniform samples. ``normalize=False`` drops the ``1/(b-a)`` factor.
    Either argument may be a :class:`PiecewiseCurve` or any callable returning
    an ``(m, n)`` array of states or an ``(m,)`` array of scalars.
    """
    if not b > a:
        raise InvalidArgumentError("interval must have b > a")
    _check_domain(reference, a, b)
    _check_domain(candidate, a, b)
    x = np.linspace(a, b, ERROR_SAMPLES)
    d = _evaluate(reference, x, component) - _evaluate(candidate, x, component)
    value = float(simpson(d * d, x=x))
    return value / (b - a) if normalize else value


@dataclass(frozen=True)
class TableRow:
    method: str
    h: Optional[float]
    iterations: Optional[int]
    degree: Optional[int]
    error: float


@dataclass
class ErrorTable:
    """Rows of one reproduced table plus a description of the run."""

    table_id: str
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    HEADER = ("method", "h", "iterations", "degree", "error")

    def add(self, method, h, iterations, degree, error):
        error = float(error)
        if not (math.isfinite(error) and error >= 0):
            raise InvalidArgumentError(f"table error must be finite and >= 0, got {error}")
        self.rows.append(TableRow(method, h, iterations, degree, error))

    def lookup(self, method: str, h=None, iterations=None, degree=None) -> float:
        """Error of the unique row matching the given (non-``None``) keys."""
        hits = [r for r in self.rows if r.method == method
                and (h is None or (r.h is not None and abs(r.h - h) < 1e-12))
                and (iterations is None or r.iterations == iterations)
                and (degree is None or r.degree == degree)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {method}, h={h}, iterations={iterations}, degree={degree}")
        return hits[0].error

    def csv_rows(self):
        def cell(v):
            if v is None:
                return ""
            return format(v, ".17g") if isinstance(v, float) else str(v)
        return [[cell(getattr(r, name)) for name in self.HEADER] for r in self.rows]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.HEADER)
        writer.writerows(self.csv_rows())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


@dataclass(frozen=True)
class TableSpec:
    """Configuration of one benchmark table.

    ``kind`` is ``taylor`` (orders x steps), ``picard`` (steps x iterations x
    fit degrees for ``variant``), ``eigen`` or ``bratu``.
    """

    table_id: str
    kind: str
    problem: str
    title: str
    hs: tuple = (0.1,)
    orders: tuple = (2, 3, 4, 5)
    iterations: tuple = (2, 3, 4, 5)
    degrees: tuple = (1, 3)
    variant: str = "extended"
    reference_step: float = 0.01
    params: Optional[dict] = None


TABLES = {t.table_id: t for t in (
    TableSpec("T1", "taylor", "mathieu", "Mathieu: Taylor orders 2-5", hs=(0.1, 0.5), reference_step=1e-3),
    TableSpec("T2", "picard", "mathieu", "Mathieu: segmentary Extended Picard", hs=(0.1, 0.5), reference_step=1e-3),
    TableSpec("T3", "eigen", "mathieu", "Mathieu characteristic values, percent deviation from the series",
              iterations=(1, 2, 3), params=dict(q=0.1)),
    TableSpec("T4", "taylor", "duffing", "Quintic Duffing: Taylor orders 2-5", hs=(0.1, 0.5)),
    TableSpec("T5", "picard", "duffing", "Quintic Duffing: segmentary Extended Picard", hs=(0.1, 0.5)),
    TableSpec("T6", "bratu", "bratu", "Bratu: errors against the exact solution", iterations=(2,)),
    TableSpec("T7", "taylor", "glycolysis", "Glycolysis: Taylor orders 2-5"),
    TableSpec("T8", "picard", "glycolysis", "Glycolysis: segmentary Extended Picard"),
    TableSpec("T9", "picard", "glycolysis", "Glycolysis: segmentary Standard Picard", variant="standard"),
    TableSpec("T10", "taylor", "brusselator", "Brusselator: Taylor orders 2-5"),
    TableSpec("T11", "picard", "brusselator", "Brusselator: segmentary Extended Picard"),
    TableSpec("T12", "taylor", "brusselator-w", "Brusselator, w form: Taylor orders 2-5"),
    TableSpec("T13", "picard", "brusselator-w", "Brusselator, w form: segmentary Extended Picard"),
)}

_GRID_KEYS = ("hs", "orders", "iterations", "degrees", "reference_step", "params")
_SETTING_KEYS = tuple(f.name for f in fields(SolveSettings) if f.name not in ("h", "n_iter", "fit_degree"))
BRATU_TAYLOR_STEP = 0.1
BRATU_TAYLOR_ORDER = 10


def table_ids():
    return list(TABLES)


def _split_overrides(overrides):
    grid, settings = {}, {}
    for key, value in (overrides or {}).items():
        if key in _GRID_KEYS:
            grid[key] = tuple(value) if isinstance(value, (list, tuple)) else value
        elif key in _SETTING_KEYS:
            settings[key] = value
        else:
            raise InvalidArgumentError(f"unknown table override {key!r}")
    return grid, settings


def _problem_params(spec: TableSpec) -> dict:
    return {**PROBLEMS[spec.problem]["defaults"], **(spec.params or {})}


def _cell(table_id, what):
    def wrap(fn):
        try:
            return fn()
        except DivergenceError as exc:
            raise DivergenceError(f"{table_id} cell {what}: {exc.args[0]}",
                                  iteration=exc.iteration, segment=exc.segment) from exc
    return wrap


def _run_taylor(spec, table, system, a, b, y0, reference):
    for order in spec.orders:
        for h in spec.hs:
            curve = _cell(spec.table_id, f"T{order}, h={h}")(
                lambda: taylor_solve(system, a, b, y0, h, order))
            table.add(f"T{order}", h, None, None, l2_mean_error(reference, curve, a, b))


def _run_picard(spec, table, system, a, b, y0, reference, extra):
    method = "EP" if spec.variant == "extended" else "SP"
    for h in spec.hs:
        for n in spec.iterations:
            for d in spec.degrees:
                settings = SolveSettings(h=h, n_iter=n, fit_degree=d, **extra)
                curve = _cell(spec.table_id, f"{method}, h={h}, n={n}, degree={d}")(
                    lambda: solve_segmented(system, a, b, y0, settings, variant=spec.variant))
                table.add(method, h, n, d, l2_mean_error(reference, curve, a, b))


def _run_eigen(spec, table, params):
    q = params["q"]
    for n in spec.iterations:
        roots = mathieu_char_values(q, n, count=5)
        for index, r in enumerate(roots, start=1):
            table.add(f"r{index}", None, n, None, percent_deviation(r, mathieu_char_series(q, index)))


def _shot_curve(solver):
    u = shoot(lambda u: float(solver(u).left_limit(1.0)[0]))
    return u, solver(u)


def _run_bratu(spec, table, params, extra):
    alpha = params["alpha"]
    exact = bratu_exact_solution(alpha)
    system = bratu_quadratic_system(alpha)
    n_iter = spec.iterations[0]
    settings = SolveSettings(h=1.0, n_iter=n_iter, **{"backend": "quadrature", "quad_points": 32, **extra})

    def err(curve):
        return l2_mean_error(exact, curve, 0.0, 1.0, normalize=False)

    u_ep, ep = bratu_shoot(alpha, n_iter, settings)
    table.add("EP", None, n_iter, None, err(ep))
    table.add("VIM", None, 2, None, err(lambda x: bratu_vim_reference(x, VIM_SLOPE)))
    u_rk, rk = _shot_curve(lambda u: rk8_solve(system, 0.0, 1.0, [0.0, u], spec.reference_step))
    table.add("RK8", spec.reference_step, None, None, err(rk))
    u_ty, ty = _shot_curve(lambda u: taylor_solve(system, 0.0, 1.0, [0.0, u],
                                                  BRATU_TAYLOR_STEP, BRATU_TAYLOR_ORDER))
    table.add(f"T{BRATU_TAYLOR_ORDER}", BRATU_TAYLOR_STEP, None, None, err(ty))
    table.metadata.update(theta=exact.theta, slopes=dict(EP=u_ep, RK8=u_rk, T10=u_ty, VIM=VIM_SLOPE))


def reproduce_table(table_id: str, overrides: Optional[dict] = None) -> ErrorTable:
    """Run the configuration of ``table_id`` (``"T1"`` .. ``"T13"``).

    ``overrides`` may replace the grids (``hs``, ``orders``, ``iterations``,
    ``degrees``), ``reference_step``, problem ``params``, or any
    :class:`SolveSettings` field other than ``h``, ``n_iter`` and
    ``fit_degree`` (e.g. ``seed``, ``backend``, ``fit_samples``).
    """
    key = str(table_id).upper()
    if key not in TABLES:
        raise InvalidArgumentError(f"unknown table {table_id!r}; expected one of {', '.join(TABLES)}")
    grid, extra = _split_overrides(overrides)
    spec = replace(TABLES[key], **grid)
    entry = PROBLEMS[spec.problem]
    params = _problem_params(spec)
    a, b = map(float, entry["interval"])
    table = ErrorTable(key, metadata=dict(problem=spec.problem, title=spec.title, params=params,
                                          interval=(a, b), kind=spec.kind))
    if spec.kind == "eigen":
        table.metadata["reference"] = "truncated small-q series"
        _run_eigen(spec, table, params)
    elif spec.kind == "bratu":
        table.metadata["reference"] = "exact solution"
        _run_bratu(spec, table, params, extra)
    else:
        system = entry["build"](**params)
        y0 = np.asarray(entry["initial"], dtype=float)
        table.metadata["reference"] = f"rk8 step {spec.reference_step}"
        table.metadata["initial"] = tuple(y0)
        reference = rk8_solve(system, a, b, y0, spec.reference_step)
        if spec.kind == "taylor":
            _run_taylor(spec, table, system, a, b, y0, reference)
        else:
            table.metadata["variant"] = spec.variant
            _run_picard(spec, table, system, a, b, y0, reference, extra)
    return table
