"""Piecewise polynomial curves used to represent every approximate solution.

Each segment stores a Chebyshev series of fixed degree on its own interval,
built from samples at the segment's Chebyshev-Lobatto points. Lobatto points
include both endpoints, so a segment reproduces its own end values and the
curve is continuous wherever neighbouring segments share an end value.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import InvalidArgumentError


@lru_cache(maxsize=None)
def _lobatto_nodes(degree: int) -> np.ndarray:
    # ascending, -1 .. 1
    return -np.cos(np.pi * np.arange(degree + 1) / degree)


@lru_cache(maxsize=None)
def _lobatto_transform(degree: int) -> np.ndarray:
    """Matrix mapping Lobatto samples to Chebyshev coefficients."""
    N = degree
    j = np.arange(N + 1)
    # samples are ordered by xi_j = -cos(pi j / N) = cos(pi (N - j) / N)
    ang = np.pi * np.outer(j, N - j) / N
    T = np.cos(ang)
    w = np.full(N + 1, 1.0)
    w[0] = w[-1] = 0.5
    M = (2.0 / N) * T * w[None, :]
    M[0] *= 0.5
    M[-1] *= 0.5
    return M


def lobatto_points(x0: float, x1: float, degree: int) -> np.ndarray:
    """``degree + 1`` Chebyshev-Lobatto abscissas on ``[x0, x1]``, ascending."""
    if degree < 1:
        raise InvalidArgumentError("Lobatto degree must be >= 1")
    xi = _lobatto_nodes(degree)
    pts = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * xi
    pts[0], pts[-1] = x0, x1
    return pts


class PiecewiseCurve:
    """Vector-valued piecewise polynomial on ``[nodes[0], nodes[-1]]``.

    Parameters
    ----------
    nodes : array_like, shape (m + 1,)
        Strictly ascending segment boundaries.
    coeffs : array_like, shape (m, degree + 1, n)
        Chebyshev coefficients of each segment in its local variable
        ``u = (2 x - x_s - x_{s+1}) / (x_{s+1} - x_s)``.
    """

    def __init__(self, nodes, coeffs):
        nodes = np.asarray(nodes, dtype=float)
        coeffs = np.asarray(coeffs, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise InvalidArgumentError("need at least two nodes")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgumentError("nodes must be strictly ascending")
        if coeffs.ndim != 3 or coeffs.shape[0] != len(nodes) - 1:
            raise InvalidArgumentError(
                f"coefficient array {coeffs.shape} does not match {len(nodes) - 1} segments")
        self.nodes = nodes
        self.coeffs = coeffs
        self.reports = []

    @classmethod
    def from_samples(cls, nodes, samples) -> "PiecewiseCurve":
        """Build from values at each segment's Lobatto points.

        ``samples`` has shape ``(m, degree + 1, n)`` with the points ordered
        as returned by :func:`lobatto_points`.
        """
        samples = np.asarray(samples, dtype=float)
        degree = samples.shape[1] - 1
        T = _lobatto_transform(degree)
        coeffs = np.einsum("kj,sjn->skn", T, samples)
        return cls(nodes, coeffs)

    @classmethod
    def concatenate(cls, curves) -> "PiecewiseCurve":
        curves = list(curves)
        deg = max(c.degree for c in curves)
        nodes = [curves[0].nodes]
        blocks = []
        for c in curves:
            pad = np.zeros((c.coeffs.shape[0], deg + 1, c.n))
            pad[:, :c.degree + 1] = c.coeffs
            blocks.append(pad)
        for prev, c in zip(curves, curves[1:]):
            if not np.isclose(prev.b, c.a, rtol=0, atol=1e-12 * (1 + abs(c.a))):
                raise InvalidArgumentError("curves do not abut")
            nodes.append(c.nodes[1:])
        return cls(np.concatenate(nodes), np.concatenate(blocks))

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def n(self) -> int:
        return self.coeffs.shape[2]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def n_segments(self) -> int:
        return self.coeffs.shape[0]

    def _eval(self, x, idx):
        lo = self.nodes[idx]
        hi = self.nodes[idx + 1]
        u = (2.0 * x - lo - hi) / (hi - lo)
        c = np.moveaxis(self.coeffs[idx], 1, 0)  # (deg+1, P, n)
        return C.chebval(u[:, None], c, tensor=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        span = self.b - self.a
        tol = 1e-12 * max(1.0, abs(self.a), abs(self.b), span)
        if np.any(flat < self.a - tol) or np.any(flat > self.b + tol):
            raise InvalidArgumentError(
                f"evaluation outside [{self.a}, {self.b}]")
        idx = np.searchsorted(self.nodes, flat, side="right") - 1
        idx = np.clip(idx, 0, self.n_segments - 1)
        out = self._eval(flat, idx)
        return out.reshape(x.shape + (self.n,))

    def left_limit(self, x: float) -> np.ndarray:
        """Value at ``x`` from the segment ending at or containing ``x``."""
        idx = np.searchsorted(self.nodes, x, side="left") - 1
        idx = int(np.clip(idx, 0, self.n_segments - 1))
        return self._eval(np.array([float(x)]), np.array([idx]))[0]

    def segment_of(self, s: int) -> "PiecewiseCurve":
        return PiecewiseCurve(self.nodes[s:s + 2], self.coeffs[s:s + 1])

    def __repr__(self):
        return (f"PiecewiseCurve([{self.a:g}, {self.b:g}], segments={self.n_segments}, "
                f"degree={self.degree}, n={self.n})")
