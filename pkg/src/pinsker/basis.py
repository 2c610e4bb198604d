"""Trigonometric basis on the design sieve ``x_j = j/n``.

The basis is ``phi_1 = 1`` and, for ``j >= 2``, ``sqrt(2) cos(2 pi [j/2] x)``
for even ``j`` and ``sqrt(2) sin(2 pi [j/2] x)`` for odd ``j``.  For odd ``n``
the first ``n`` functions are orthonormal under the empirical inner product
``(f, g)_n = n^{-1} sum_l f(x_l) g(x_l)``, which is why every grid here must
have an odd number of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson

__all__ = [
    "DesignGrid",
    "FourierCoeffs",
    "SobolevBall",
    "phi",
    "basis_matrix",
    "empirical_inner",
    "fourier_transform",
    "fourier_transform_batch",
    "synthesize",
    "sobolev_coeff",
    "ellipsoid_membership",
    "l2_coefficients",
    "QUAD_NODES",
]

#: Simpson nodes used for every integral over [0, 1].
QUAD_NODES = 4097


@dataclass(frozen=True)
class DesignGrid:
    """Equispaced sieve ``x_j = j/n``, ``j = 1..n`` with odd ``n >= 3``."""

    n: int

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError(f"n must be an integer, got {type(n).__name__}")
        if n < 3:
            raise ValueError(f"n must be at least 3, got {n}")
        if n % 2 == 0:
            raise ValueError(f"n must be odd for empirical orthonormality, got {n}")
        object.__setattr__(self, "n", int(n))

    @property
    def points(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=float) / self.n


@dataclass(frozen=True)
class FourierCoeffs:
    """Empirical Fourier coefficients ``(v, phi_j)_n`` for ``j = 1..n``."""

    values: np.ndarray
    grid: DesignGrid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} coefficients, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SobolevBall:
    """Periodic Sobolev ball ``W_r^k``: smoothness ``k >= 1`` and radius ``r > 0``."""

    k: int
    r: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"smoothness k must be an integer >= 1, got {self.k}")
        if not self.r > 0:
            raise ValueError(f"radius r must be positive, got {self.r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "r", float(self.r))


def _frequency(j):
    return 2.0 * np.pi * (np.asarray(j) // 2)


def phi(j, x):
    """Evaluate the basis function ``phi_j`` at ``x`` (broadcasting over both).

    Examples
    --------
    >>> float(phi(1, 0.3))
    1.0
    >>> round(float(phi(3, 0.25)), 7)
    1.4142136
    """
    j = np.asarray(j)
    if np.any(j < 1):
        raise ValueError("basis index j must be >= 1")
    x = np.asarray(x, dtype=float)
    arg = _frequency(j) * x
    out = np.where(j % 2 == 0, np.sqrt(2.0) * np.cos(arg), np.sqrt(2.0) * np.sin(arg))
    out = np.where(j == 1, 1.0, out)
    return out[()] if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _cached_basis(n: int) -> np.ndarray:
    x = np.arange(1, n + 1, dtype=float) / n
    mat = phi(np.arange(1, n + 1)[None, :], x[:, None])
    mat.setflags(write=False)
    return mat


def basis_matrix(grid: DesignGrid) -> np.ndarray:
    """Read-only ``n x n`` matrix with entry ``[l, j-1] = phi_j(x_l)``."""
    return _cached_basis(grid.n)


def empirical_inner(f, g, grid: DesignGrid) -> float:
    """Empirical inner product ``n^{-1} sum_l f_l g_l`` of grid samples."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.n,) or g.shape != (grid.n,):
        raise ValueError(
            f"samples must have length {grid.n}, got {f.shape} and {g.shape}"
        )
    return float(np.dot(f, g) / grid.n)


def fourier_transform(y, grid: DesignGrid) -> FourierCoeffs:
    """Discrete Fourier coefficients ``theta_hat_j = (y, phi_j)_n``.

    Direct ``O(n^2)`` summation against the cached basis matrix.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (grid.n,):
        raise ValueError(f"y must have length {grid.n}, got shape {y.shape}")
    return FourierCoeffs(basis_matrix(grid).T @ y / grid.n, grid)


def fourier_transform_batch(Y, grid: DesignGrid) -> np.ndarray:
    """Row-wise Fourier coefficients for a ``(reps, n)`` array of observations."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[1] != grid.n:
        raise ValueError(f"expected shape (reps, {grid.n}), got {Y.shape}")
    return Y @ basis_matrix(grid) / grid.n


def synthesize(coeffs, grid: DesignGrid) -> np.ndarray:
    """Grid values ``sum_j c_j phi_j(x_l)`` of a coefficient vector."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != grid.n:
        raise ValueError(f"expected {grid.n} coefficients, got {coeffs.shape[-1]}")
    return coeffs @ basis_matrix(grid).T


def sobolev_coeff(j, k: int):
    """Ellipsoid weight ``a_j = sum_{i=0}^k (2 pi [j/2])^{2i}`` (with ``0^0 = 1``)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    j = np.asarray(j)
    if np.any(j < 1):
        raise ValueError("basis index j must be >= 1")
    w2 = _frequency(j) ** 2
    out = np.zeros(j.shape, dtype=float)
    term = np.ones(j.shape, dtype=float)
    for _ in range(k + 1):
        out = out + term
        term = term * w2
    return out[()] if out.ndim == 0 else out


def ellipsoid_membership(coeffs, ball: SobolevBall, *, rtol: float = 1e-12):
    """Return ``(value, inside)`` where ``value = sum_j a_j c_j^2``.

    Only the supplied coefficients enter the sum, so a truncated expansion
    gives a lower bound on the full ellipsoid value.  ``inside`` tolerates a
    relative round-off of ``rtol`` so that points built to sit exactly on the
    boundary are accepted.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        return 0.0, True
    a = sobolev_coeff(np.arange(1, coeffs.size + 1), ball.k)
    value = float(np.sum(a * coeffs**2))
    return value, bool(value <= ball.r * (1.0 + rtol))


def l2_coefficients(f, count: int, *, nodes: int = QUAD_NODES) -> np.ndarray:
    """True ``L2[0, 1]`` coefficients ``int_0^1 f phi_j`` for ``j = 1..count``.

    Composite Simpson on ``nodes`` equispaced points.
    """
    t = np.linspace(0.0, 1.0, nodes)
    ft = np.asarray(f(t), dtype=float)
    j = np.arange(1, count + 1)
    vals = phi(j[:, None], t[None, :]) * ft[None, :]
    return simpson(vals, x=t, axis=1)
