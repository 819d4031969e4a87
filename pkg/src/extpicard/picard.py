"""Extended Picard iteration on a segment and over a segmented interval.

A system ``y' = F(x, y)`` is split as ``y' = A y + G(x, y)`` with a constant
matrix ``A``. Starting from a seed ``y_0`` the iterates are

    y_k(x) = exp((x - x0) A) y(x0) + int_{x0}^{x} exp((x - s) A) G(s, y_{k-1}(s)) ds.

Two backends evaluate the integral:

``poly-fit``
    ``G(s, y_{k-1}(s))`` is replaced on the segment by its least-squares
    polynomial of degree 1 or 3, and the integral is taken in closed form.
``quadrature``
    the integral is evaluated by Gauss-Legendre quadrature and the iterate is
    kept as a Chebyshev interpolant.

The Standard Picard variant is the same iteration with ``A = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as C

from .curves import PiecewiseCurve, _lobatto_transform, lobatto_points
from .errors import DegenerateFitError, DivergenceError, InvalidArgumentError
from .linalg import VecPoly, exp_poly_kernels, expm_batch, op_norm

BLOWUP = 1e8

BACKENDS = ("poly-fit", "quadrature")
SEED_MODES = ("homogeneous", "previous")


def _evaluate_components(fun, n, x, Y):
    """Call a component-wise evaluator on one state or a stack of states."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        if Y.shape[0] != n:
            raise InvalidArgumentError(f"state has dimension {Y.shape[0]}, expected {n}")
        out = fun(float(x), list(Y))
        return np.array([float(c) for c in out])
    if Y.shape[-1] != n:
        raise InvalidArgumentError(f"state has dimension {Y.shape[-1]}, expected {n}")
    x = np.broadcast_to(np.asarray(x, dtype=float), Y.shape[:-1])
    comps = [Y[..., i] for i in range(n)]
    out = fun(x, comps)
    if len(out) != n:
        raise InvalidArgumentError(f"right-hand side returned {len(out)} components, expected {n}")
    return np.stack([np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in out], axis=-1)


@dataclass(frozen=True)
class OdeSystem:
    """``y' = rhs(x, y) = A y + g(x, y)``.

    ``rhs`` and ``g`` take ``(x, y)`` where ``y`` is a sequence of the ``n``
    state components, and return a sequence of ``n`` components. Components
    may be floats, arrays or Taylor jets, so the same expression serves the
    vectorized Picard sampling and the Taylor integrator.
    """

    n: int
    rhs: Callable
    A: np.ndarray
    g: Callable
    name: str = ""

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.shape != (self.n, self.n):
            raise InvalidArgumentError(f"linear part has shape {A.shape}, expected {(self.n, self.n)}")
        if not np.all(np.isfinite(A)):
            raise InvalidArgumentError("linear part has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    def F(self, x, Y):
        """Full right-hand side on one state ``(n,)`` or a stack ``(..., n)``."""
        return _evaluate_components(self.rhs, self.n, x, Y)

    def G(self, x, Y):
        """Nonlinear part ``F - A y`` on one state or a stack of states."""
        return _evaluate_components(self.g, self.n, x, Y)

    def without_linear_part(self) -> "OdeSystem":
        """Split with ``A = 0`` (the Standard Picard split)."""
        return OdeSystem(self.n, self.rhs, np.zeros((self.n, self.n)), self.rhs, self.name)


def split_system(rhs, n: int, A, g=None, name: str = "") -> OdeSystem:
    """Split ``rhs`` against a constant linear part ``A``.

    When ``g`` is omitted it is derived as ``rhs(x, y) - A y``. Problem
    constructors pass their own ``g`` so the nonlinear part is computed
    without cancellation.
    """
    A = np.array(A, dtype=float)
    if A.shape != (n, n):
        raise InvalidArgumentError(f"linear part has shape {A.shape}, expected {(n, n)}")
    if g is None:
        rows = [[(j, A[i, j]) for j in range(n) if A[i, j] != 0.0] for i in range(n)]

        def g(x, y):
            f = rhs(x, y)
            return [f[i] - sum(a * y[j] for j, a in rows[i]) for i in range(n)]

    return OdeSystem(n, rhs, A, g, name)


@dataclass(frozen=True)
class SolveSettings:
    """Controls for one Picard solve.

    ``fit_samples`` is the number of Chebyshev-Gauss points per segment at
    which the forcing is sampled for the least-squares fit; ``quad_points`` is
    both the Gauss-Legendre order and the number of Lobatto points of the
    quadrature backend. ``dense_degree`` is the degree of the per-segment
    interpolant of the poly-fit output.
    """

    h: float
    n_iter: int = 3
    fit_degree: int = 3
    fit_samples: int = 8
    backend: str = "poly-fit"
    quad_points: int = 16
    seed: str = "homogeneous"
    dense_degree: int = 12

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0):
            raise InvalidArgumentError(f"segment width must be positive, got {self.h}")
        if int(self.n_iter) != self.n_iter or self.n_iter < 0:
            raise InvalidArgumentError(f"n_iter must be a non-negative integer, got {self.n_iter}")
        if self.fit_degree not in (1, 3):
            raise InvalidArgumentError(f"fit_degree must be 1 or 3, got {self.fit_degree}")
        if self.fit_samples < self.fit_degree + 1:
            raise InvalidArgumentError("fit_samples must be at least fit_degree + 1")
        if self.backend not in BACKENDS:
            raise InvalidArgumentError(f"unknown backend {self.backend!r}")
        if self.quad_points < 2:
            raise InvalidArgumentError("quad_points must be >= 2")
        if self.seed not in SEED_MODES:
            raise InvalidArgumentError(f"unknown seed mode {self.seed!r}")
        if self.dense_degree < 1:
            raise InvalidArgumentError("dense_degree must be >= 1")


@dataclass
class ConvergenceReport:
    """Iterate contraction record for one segment.

    ``sup_diffs[k - 1]`` is ``max_x |y_k(x) - y_{k-1}(x)|`` for ``k = 1..n``
    and ``bounds[k - 1]`` the matching value of ``H (M K)^k w^k / k!``.
    """

    sup_diffs: list
    M_est: float
    K_est: float
    H_est: float
    bounds: list = field(default_factory=list)
    bound_ok: list = field(default_factory=list)
    x0: float = 0.0
    x1: float = 0.0


class HomogeneousSeed:
    """``x -> exp((x - x0) A) y0``, vectorized over ``x``."""

    def __init__(self, A, x0: float, y0):
        self.A = np.asarray(A, dtype=float)
        self.x0 = float(x0)
        self.y0 = np.asarray(y0, dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = np.atleast_1d(x - self.x0).ravel()
        E = expm_batch(t[:, None, None] * self.A[None])
        return (E @ self.y0).reshape(x.shape + (len(self.y0),))


class ConstantSeed:
    """Seed that is constant in ``x`` (e.g. ``y_0 = 0, z_0 = u``)."""

    def __init__(self, value):
        self.value = np.asarray(value, dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.value, x.shape + self.value.shape).copy()


def homogeneous_seed(sys: OdeSystem, x0: float, y0) -> HomogeneousSeed:
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (sys.n,) or not np.all(np.isfinite(y0)):
        raise InvalidArgumentError("initial value must be a finite vector of the system dimension")
    return HomogeneousSeed(sys.A, x0, y0)


def _scaled_vandermonde(x, center, scale, degree):
    u = (np.asarray(x, dtype=float) - center) / scale
    return np.vander(u, degree + 1, increasing=True)


def fit_forcing_polynomial(samples, degree: int, center: Optional[float] = None) -> VecPoly:
    """Least-squares polynomial through vector samples.

    Parameters
    ----------
    samples : sequence of (x, vector)
    degree : int
        1 or 3 in the Picard engine, any non-negative value accepted here.
    center : float, optional
        Expansion point of the returned monomial basis (default: smallest x).
    """
    xs = np.array([float(s[0]) for s in samples])
    Y = np.array([np.asarray(s[1], dtype=float) for s in samples])
    if Y.ndim == 1:
        Y = Y[:, None]
    if len(np.unique(xs)) < degree + 1:
        raise DegenerateFitError(
            f"need {degree + 1} distinct abscissas for a degree-{degree} fit, got {len(np.unique(xs))}")
    if center is None:
        center = float(xs.min())
    scale = float(np.max(np.abs(xs - center))) or 1.0
    V = _scaled_vandermonde(xs, center, scale, degree)
    coef, _, rank, _ = np.linalg.lstsq(V, Y, rcond=None)
    if rank < degree + 1:
        raise DegenerateFitError("rank-deficient fit")
    coef /= (scale ** np.arange(degree + 1))[:, None]
    return VecPoly(coef, center)


def chebyshev_gauss_offsets(width: float, count: int) -> np.ndarray:
    j = np.arange(count)
    return 0.5 * width * (1.0 - np.cos((2 * j + 1) * np.pi / (2 * count)))


@lru_cache(maxsize=512)
def _kernels_cached(A_bytes, n, offsets, degree):
    A = np.frombuffer(A_bytes, dtype=float).reshape(n, n)
    return exp_poly_kernels(A, np.array(offsets), degree)


def _kernels(A, offsets, degree):
    A = np.ascontiguousarray(A, dtype=float)
    return _kernels_cached(A.tobytes(), A.shape[0], tuple(np.asarray(offsets, dtype=float)), degree)


@lru_cache(maxsize=64)
def _quad_kernels_cached(A_bytes, n, width, npts):
    A = np.frombuffer(A_bytes, dtype=float).reshape(n, n)
    tau = lobatto_points(0.0, width, npts - 1)
    xi, wi = np.polynomial.legendre.leggauss(npts)
    s = tau[:, None] * 0.5 * (xi[None, :] + 1.0)       # (N, L)
    wts = tau[:, None] * 0.5 * wi[None, :]
    lag = (tau[:, None] - s).ravel()
    K = expm_batch(lag[:, None, None] * A[None]).reshape(npts, npts, n, n)
    E = expm_batch(tau[:, None, None] * A[None])
    return tau, s, wts, K, E


def _check_finite(values, iteration, segment):
    if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > BLOWUP:
        raise DivergenceError("iterate blew up", iteration=iteration, segment=segment)


class SegmentSolution:
    """Result of the iteration on one segment ``[x0, x1]``.

    Holds the dense samples of the final iterate and enough state to
    re-evaluate any intermediate iterate ``y_k`` at arbitrary abscissas.
    """

    def __init__(self, sys, x0, x1, y0, settings, seed, forcing, cheb, samples):
        self.sys = sys
        self.x0 = x0
        self.x1 = x1
        self.y0 = y0
        self.settings = settings
        self.seed = seed
        self._forcing = forcing      # poly-fit: coefficients per k (k = 1..n)
        self._cheb = cheb            # quadrature: Chebyshev coefficients per k (k = 0..n)
        self.samples = samples
        self.curve = PiecewiseCurve.from_samples([x0, x1], samples[None])
        self.report: Optional[ConvergenceReport] = None

    @property
    def n_iter(self) -> int:
        return self.settings.n_iter

    @property
    def end_value(self) -> np.ndarray:
        return self.samples[-1].copy()

    def iterate(self, k: int, x) -> np.ndarray:
        """Evaluate ``y_k`` at ``x`` (may extrapolate past the segment)."""
        if not 0 <= k <= self.n_iter:
            raise InvalidArgumentError(f"iterate index {k} outside 0..{self.n_iter}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self._cheb is not None:
            u = 2.0 * (x - self.x0) / (self.x1 - self.x0) - 1.0
            return C.chebval(u[:, None], self._cheb[k][:, None, :], tensor=False)
        if k == 0:
            return self.seed(x)
        c = self._forcing[k - 1]
        E, Phi = _kernels(self.sys.A, x - self.x0, c.shape[0] - 1)
        return E @ self.y0 + np.einsum("pjab,jb->pa", Phi, c)

    def __call__(self, x):
        return self.iterate(self.n_iter, x)


def _solve_segment(sys, x0, x1, y0, settings, seed=None, segment=None):
    width = x1 - x0
    if not width > 0:
        raise InvalidArgumentError("segment must have x1 > x0")
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (sys.n,) or not np.all(np.isfinite(y0)):
        raise InvalidArgumentError("initial value must be a finite vector of the system dimension")
    if seed is None:
        seed = HomogeneousSeed(sys.A, x0, y0)
    if settings.backend == "poly-fit":
        return _solve_segment_polyfit(sys, x0, x1, y0, settings, seed, segment)
    return _solve_segment_quadrature(sys, x0, x1, y0, settings, seed, segment)


def _solve_segment_polyfit(sys, x0, x1, y0, settings, seed, segment):
    width = x1 - x0
    d = settings.fit_degree
    t_fit = chebyshev_gauss_offsets(width, settings.fit_samples)
    t_dense = lobatto_points(0.0, width, settings.dense_degree)
    E_fit, Phi_fit = _kernels(sys.A, t_fit, d)
    pinv = np.linalg.pinv(_scaled_vandermonde(t_fit, 0.0, width, d))
    unscale = (width ** -np.arange(d + 1))[:, None]

    Y = seed(x0 + t_fit)
    forcing = []
    for k in range(1, settings.n_iter + 1):
        Gv = sys.G(x0 + t_fit, Y)
        _check_finite(Gv, k, segment)
        c = (pinv @ Gv) * unscale
        forcing.append(c)
        Y = E_fit @ y0 + np.einsum("pjab,jb->pa", Phi_fit, c)
        _check_finite(Y, k, segment)

    if forcing:
        E_d, Phi_d = _kernels(sys.A, t_dense, d)
        dense = E_d @ y0 + np.einsum("pjab,jb->pa", Phi_d, forcing[-1])
    else:
        dense = seed(x0 + t_dense)
    _check_finite(dense, settings.n_iter, segment)
    return SegmentSolution(sys, x0, x1, y0, settings, seed, forcing, None, dense)


def _solve_segment_quadrature(sys, x0, x1, y0, settings, seed, segment):
    width = x1 - x0
    N = settings.quad_points
    A = np.ascontiguousarray(sys.A)
    tau, s, wts, K, E = _quad_kernels_cached(A.tobytes(), sys.n, float(width), N)
    T = _lobatto_transform(N - 1)
    u_s = 2.0 * s / width - 1.0

    vals = seed(x0 + tau)
    _check_finite(vals, 0, segment)
    chebs = [T @ vals]
    hom = E @ y0
    for k in range(1, settings.n_iter + 1):
        prev = C.chebval(u_s[..., None], chebs[-1][:, None, None, :], tensor=False)
        Gv = sys.G(x0 + s, prev)                               # (N, L, n)
        _check_finite(Gv, k, segment)
        vals = hom + np.einsum("il,ilab,ilb->ia", wts, K, Gv)
        _check_finite(vals, k, segment)
        chebs.append(T @ vals)
    return SegmentSolution(sys, x0, x1, y0, settings, seed, None, chebs, vals)


def convergence_diagnostic(sys: OdeSystem, segment: SegmentSolution, grid_points: int = 101) -> ConvergenceReport:
    """Sup-norm differences of successive iterates and the a-priori bound.

    ``M = exp(2 c |A|)`` with ``c`` the segment width (the segment-local
    coordinate starts at 0), ``K`` is the largest spectral norm of the
    finite-difference Jacobian of ``G`` sampled along the iterates, and ``H``
    the sup of ``|G(s, y_0(s))|``.
    """
    x0, x1 = segment.x0, segment.x1
    xs = np.linspace(x0, x1, grid_points)
    ys = [segment.iterate(k, xs) for k in range(segment.n_iter + 1)]
    sup_diffs = [float(np.max(np.linalg.norm(ys[k] - ys[k - 1], axis=1)))
                 for k in range(1, len(ys))]

    width = x1 - x0
    M = math.exp(2.0 * width * op_norm(sys.A))
    H = float(np.max(np.linalg.norm(sys.G(xs, ys[0]), axis=1)))
    K = 0.0
    for Y in ys[:-1] if len(ys) > 1 else ys:
        K = max(K, _lipschitz_estimate(sys, xs, Y))

    bounds, ok = [], []
    for k, diff in enumerate(sup_diffs, start=1):
        bound = H * (M * K * width) ** k / math.factorial(k)
        bounds.append(bound)
        ok.append(bool(diff <= bound * (1 + 1e-12) + 1e-15))
    return ConvergenceReport(sup_diffs, M, K, H, bounds, ok, x0, x1)


def _lipschitz_estimate(sys, xs, Y):
    n = sys.n
    best = 0.0
    steps = 1e-6 * (1.0 + np.abs(Y))
    cols = []
    for j in range(n):
        dY = np.zeros_like(Y)
        dY[:, j] = steps[:, j]
        cols.append((sys.G(xs, Y + dY) - sys.G(xs, Y - dY)) / (2 * steps[:, j:j + 1]))
    J = np.stack(cols, axis=-1)            # (P, n, n)
    if np.all(np.isfinite(J)):
        best = float(np.max(np.linalg.norm(J, 2, axis=(1, 2))))
    return best


def picard_iterate_segment(sys: OdeSystem, x0: float, y0, x1: float, settings: SolveSettings,
                           seed=None, diagnose: bool = True) -> SegmentSolution:
    """Run ``settings.n_iter`` Extended Picard iterations on ``[x0, x1]``.

    ``seed`` is a callable ``x -> y_0(x)``; the default is the homogeneous
    solution through ``y0``. With ``n_iter = 0`` the seed itself is returned.
    The solution's ``curve`` holds the final iterate and, when ``diagnose``
    is set, ``report`` the convergence record.
    """
    sol = _solve_segment(sys, float(x0), float(x1), y0, settings, seed)
    if diagnose:
        sol.report = convergence_diagnostic(sys, sol)
    return sol


def standard_picard_iterate_segment(sys: OdeSystem, x0: float, y0, x1: float, settings: SolveSettings,
                                    seed=None, diagnose: bool = True) -> SegmentSolution:
    """Standard Picard: ``y_k = y0 + int F(s, y_{k-1}(s)) ds`` (``A = 0``)."""
    return picard_iterate_segment(sys.without_linear_part(), x0, y0, x1, settings, seed, diagnose)


def segment_nodes(a: float, b: float, h: float) -> np.ndarray:
    """Nodes ``a, a+h, ...`` with the last segment truncated to end at ``b``."""
    if not b > a:
        raise InvalidArgumentError("interval must have b > a")
    count = (b - a) / h
    m = int(math.ceil(count - 1e-9))
    m = max(m, 1)
    nodes = a + h * np.arange(m + 1, dtype=float)
    nodes[-1] = b
    return nodes


def solve_segmented(sys: OdeSystem, a: float, b: float, y_a, settings: SolveSettings,
                    seed=None, variant: str = "extended", diagnostics: bool = False) -> PiecewiseCurve:
    """Segmentary Extended (or Standard) Picard over ``[a, b]``.

    Each segment starts from the previous segment's approximate end value.
    ``seed`` (a callable) overrides the seed on the first segment only; later
    segments use ``settings.seed``: the homogeneous solution through their
    initial value, or the previous segment's final iterate continued past its
    end. With ``diagnostics`` the per-segment convergence reports are stored
    in ``curve.reports``.
    """
    if variant not in ("extended", "standard"):
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    y = np.asarray(y_a, dtype=float)
    if y.shape != (sys.n,) or not np.all(np.isfinite(y)):
        raise InvalidArgumentError("initial value must be a finite vector of the system dimension")
    work = sys if variant == "extended" else sys.without_linear_part()
    nodes = segment_nodes(float(a), float(b), settings.h)
    samples, reports = [], []
    prev = None
    for s in range(len(nodes) - 1):
        x0, x1 = float(nodes[s]), float(nodes[s + 1])
        if s == 0 and seed is not None:
            seg_seed = seed
        elif settings.seed == "previous" and prev is not None:
            seg_seed = _ContinuedIterate(prev)
        else:
            seg_seed = None
        try:
            sol = _solve_segment(work, x0, x1, y, settings, seg_seed, segment=s)
        except DivergenceError as exc:
            exc.segment = s
            raise
        if diagnostics:
            reports.append(convergence_diagnostic(work, sol))
        samples.append(sol.samples)
        y = sol.end_value
        prev = sol
    curve = PiecewiseCurve.from_samples(nodes, np.stack(samples))
    curve.reports = reports
    return curve


class _ContinuedIterate:
    def __init__(self, sol: SegmentSolution):
        self.sol = sol

    def __call__(self, x):
        return self.sol.iterate(self.sol.n_iter, x)


def with_settings(settings: SolveSettings, **changes) -> SolveSettings:
    return replace(settings, **changes)
