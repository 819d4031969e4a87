"""Small dense linear algebra: matrix exponential, spectral norm and
closed-form integrals of exponential kernels against polynomials.

Everything here works on plain ``numpy`` arrays. Matrices are ``(n, n)``,
vectors ``(n,)``; batched routines take a leading stack axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import InvalidArgumentError

# Pade(13) coefficients and the matching 1-norm threshold (Higham 2005).
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgumentError("matrix has non-finite entries")
    return A


def expm_batch(mats: np.ndarray) -> np.ndarray:
    """Matrix exponential of every matrix in a ``(B, n, n)`` stack.

    Scaling and squaring around the diagonal Pade(13) approximant, with the
    scaling power picked per matrix from its 1-norm.
    """
    mats = np.asarray(mats, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise InvalidArgumentError(f"expected a (B, n, n) stack, got {mats.shape}")
    if not np.all(np.isfinite(mats)):
        raise InvalidArgumentError("matrix has non-finite entries")
    nb, n, _ = mats.shape
    if nb == 0:
        return mats.copy()

    norms = np.abs(mats).sum(axis=1).max(axis=1)
    with np.errstate(divide="ignore"):
        s = np.where(norms > _THETA13, np.ceil(np.log2(norms / _THETA13)), 0.0)
    s = s.astype(int)
    X = mats / (2.0 ** s)[:, None, None]

    b = _PADE13
    ident = np.broadcast_to(np.eye(n), X.shape)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = X @ (X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2)
             + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * ident)
    V = (X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2)
         + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * ident)
    R = np.linalg.solve(V - U, V + U)

    for j in range(int(s.max())):
        todo = s > j
        R[todo] = R[todo] @ R[todo]
    R[norms == 0] = np.eye(n)
    return R


def mat_exp(A, t: float = 1.0) -> np.ndarray:
    """Return ``exp(t*A)``.

    Examples
    --------
    >>> mat_exp([[0.0, 1.0], [0.0, 0.0]], 2.0)
    array([[1., 2.],
           [0., 1.]])
    """
    A = _as_matrix(A)
    if not np.isfinite(t):
        raise InvalidArgumentError("t must be finite")
    return expm_batch((t * A)[None])[0]


def op_norm(A) -> float:
    """Spectral norm ``sup_{|x|=1} |A x|`` (largest singular value)."""
    A = _as_matrix(A)
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class VecPoly:
    """Vector-valued polynomial ``sum_j coeffs[j] * (x - center)**j``.

    ``coeffs`` has shape ``(degree + 1, n)``; a zero leading coefficient is
    kept so the degree is exactly what the caller asked for.
    """

    coeffs: np.ndarray
    center: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] == 0:
            raise InvalidArgumentError(f"bad coefficient shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("polynomial coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", float(self.center))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = (x - self.center)[..., None]
        out = np.zeros(x.shape + (self.n,))
        for c in self.coeffs[::-1]:
            out = out * t + c
        return out

    def recentered(self, center: float) -> "VecPoly":
        """Same polynomial expressed about a new center (Taylor shift)."""
        delta = float(center) - self.center
        d = self.degree
        new = np.zeros_like(self.coeffs)
        # (x - c_old)^j = ((x - c_new) + delta)^j
        for j in range(d + 1):
            for i in range(j + 1):
                new[i] += comb(j, i) * delta ** (j - i) * self.coeffs[j]
        return VecPoly(new, center)


def _augmented_generator(A: np.ndarray, degree: int) -> np.ndarray:
    # [[A, I, 0, ..], [0, 0, I, ..], ..., [0, .., 0]]: block (0, j+1) of its
    # exponential is int_0^t exp((t-s)A) s^j / j! ds.
    n = A.shape[0]
    m = n * (degree + 2)
    M = np.zeros((m, m))
    M[:n, :n] = A
    eye = np.eye(n)
    for i in range(degree + 1):
        M[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = eye
    return M


def exp_poly_kernels(A, ts, degree: int):
    """Exponential and monomial-forcing kernels at several offsets.

    Returns ``(E, Phi)`` with ``E[i] = exp(ts[i] A)`` and
    ``Phi[i, j] = int_0^{ts[i]} exp((ts[i] - s) A) s**j ds`` for
    ``j = 0..degree``. Shapes are ``(len(ts), n, n)`` and
    ``(len(ts), degree + 1, n, n)``.
    """
    A = _as_matrix(A)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if not np.all(np.isfinite(ts)):
        raise InvalidArgumentError("offsets must be finite")
    if degree < 0:
        raise InvalidArgumentError("degree must be >= 0")
    n = A.shape[0]
    M = _augmented_generator(A, degree)
    big = expm_batch(ts[:, None, None] * M[None])
    E = big[:, :n, :n]
    Phi = np.empty((len(ts), degree + 1, n, n))
    for j in range(degree + 1):
        Phi[:, j] = factorial(j) * big[:, :n, (j + 1) * n:(j + 2) * n]
    return E, Phi


def exp_poly_integral(A, x0: float, x: float, p: VecPoly) -> np.ndarray:
    """Closed form of ``int_{x0}^{x} exp((x - s) A) p(s) ds``.

    ``x < x0`` gives the oriented integral. Computed from one exponential of
    the block generator coupling ``A`` to the monomial shift, so there is no
    quadrature error.

    >>> exp_poly_integral([[1.0]], 0.0, 1.0, VecPoly([[1.0]]))
    array([1.71828183])
    """
    A = _as_matrix(A)
    if p.n != A.shape[0]:
        raise InvalidArgumentError(
            f"polynomial dimension {p.n} does not match matrix dimension {A.shape[0]}")
    if not (np.isfinite(x0) and np.isfinite(x)):
        raise InvalidArgumentError("integration limits must be finite")
    p = p.recentered(x0)
    _, Phi = exp_poly_kernels(A, [x - x0], p.degree)
    return np.einsum("jab,jb->a", Phi[0], p.coeffs)
